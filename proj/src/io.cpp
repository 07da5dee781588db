#include "permdiv/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "permdiv/errors.hpp"

namespace permdiv {

namespace {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

struct Line {
  std::size_t number;
  std::vector<Token> tokens;
};

[[noreturn]] void fail(std::size_t line, std::size_t column, const std::string& what) {
  throw InputError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw InputError("line " + std::to_string(line) + ": " + what);
}

struct Document {
  std::optional<int> degree;
  std::size_t header_line = 0;
  std::vector<Line> lines;
};

int to_int(std::string_view s, std::size_t line, std::size_t column) {
  int v = 0;
  const auto* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) fail(line, column, "expected a positive integer, got '" + std::string(s) + "'");
  if (v < 1) fail(line, column, "expected a positive integer, got '" + std::string(s) + "'");
  return v;
}

Document split(std::string_view text) {
  Document doc;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

    Line line{number, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && (raw[i] == ' ' || raw[i] == '\t')) ++i;
      if (i >= raw.size()) break;
      const std::size_t start = i;
      while (i < raw.size() && raw[i] != ' ' && raw[i] != '\t') ++i;
      line.tokens.push_back({raw.substr(start, i - start), start + 1});
    }
    if (line.tokens.empty() || line.tokens.front().text.front() == '#') continue;

    const auto first = line.tokens.front();
    if (first.text.starts_with("n=")) {
      if (line.tokens.size() != 1) fail(number, line.tokens[1].column, "unexpected text after header");
      if (doc.degree) fail(number, "second degree header (first on line " + std::to_string(doc.header_line) + ")");
      if (!doc.lines.empty()) fail(number, "degree header must precede the members");
      doc.degree = to_int(first.text.substr(2), number, first.column + 2);
      if (*doc.degree > kMaxRepresentableDegree) {
        fail(number, first.column, "degree " + std::to_string(*doc.degree) + " exceeds the supported maximum " +
                                       std::to_string(kMaxRepresentableDegree));
      }
      doc.header_line = number;
      continue;
    }
    doc.lines.push_back(std::move(line));
  }
  return doc;
}

bool looks_partial(const Line& l) {
  for (const auto& t : l.tokens) {
    if (t.text == "-" || t.text.find(':') != std::string_view::npos) return true;
  }
  return false;
}

PermFamily build_perms(const Document& doc) {
  const int n = doc.degree ? *doc.degree : doc.lines.empty() ? 1 : static_cast<int>(doc.lines.front().tokens.size());
  if (n > kMaxRepresentableDegree) fail(doc.lines.front().number, "degree exceeds the supported maximum");
  std::map<std::vector<int>, std::size_t> seen;
  std::vector<Permutation> members;
  for (const auto& line : doc.lines) {
    if (looks_partial(line)) fail(line.number, "row:col cells in a permutation family");
    if (static_cast<int>(line.tokens.size()) != n) {
      fail(line.number, "expected " + std::to_string(n) + " images, got " + std::to_string(line.tokens.size()) +
                            " (degree mismatch)");
    }
    std::vector<int> images;
    std::vector<bool> hit(static_cast<std::size_t>(n) + 1, false);
    for (const auto& t : line.tokens) {
      const int v = to_int(t.text, line.number, t.column);
      if (v > n) fail(line.number, t.column, "image " + std::to_string(v) + " outside 1.." + std::to_string(n));
      if (hit[static_cast<std::size_t>(v)]) {
        fail(line.number, t.column, "not a bijection: image " + std::to_string(v) + " repeated");
      }
      hit[static_cast<std::size_t>(v)] = true;
      images.push_back(v);
    }
    const auto [it, fresh] = seen.emplace(images, line.number);
    if (!fresh) fail(line.number, "duplicate of line " + std::to_string(it->second));
    members.emplace_back(std::span<const int>(images));
  }
  return PermFamily(n, std::move(members));
}

PartialFamily build_partials(const Document& doc) {
  struct Parsed {
    std::size_t line;
    std::vector<Cell> cells;
  };
  std::vector<Parsed> parsed;
  int inferred = 1;
  for (const auto& line : doc.lines) {
    Parsed p{line.number, {}};
    if (line.tokens.size() == 1 && line.tokens.front().text == "-") {
      parsed.push_back(std::move(p));
      continue;
    }
    std::map<int, std::size_t> rows, cols;
    for (const auto& t : line.tokens) {
      const auto colon = t.text.find(':');
      if (colon == std::string_view::npos) fail(line.number, t.column, "expected row:col, got '" + std::string(t.text) + "'");
      const int r = to_int(t.text.substr(0, colon), line.number, t.column);
      const int c = to_int(t.text.substr(colon + 1), line.number, t.column + colon + 1);
      if (doc.degree && (r > *doc.degree || c > *doc.degree)) {
        fail(line.number, t.column, "cell " + std::string(t.text) + " outside the " + std::to_string(*doc.degree) + "x" +
                                        std::to_string(*doc.degree) + " grid (degree mismatch)");
      }
      if (rows.contains(r)) fail(line.number, t.column, "repeated row " + std::to_string(r));
      if (cols.contains(c)) fail(line.number, t.column, "repeated column " + std::to_string(c));
      rows[r] = t.column;
      cols[c] = t.column;
      inferred = std::max({inferred, r, c});
      p.cells.push_back(Cell{r, c});
    }
    parsed.push_back(std::move(p));
  }
  const int n = doc.degree ? *doc.degree : inferred;
  if (n > kMaxRepresentableDegree) fail(parsed.front().line, "cells exceed the supported grid size");
  std::map<CellSet, std::size_t, decltype([](const CellSet& a, const CellSet& b) { return lex_less(a, b); })> seen;
  std::vector<PartialPerm> members;
  for (const auto& p : parsed) {
    PartialPerm pp(n, p.cells);
    const auto [it, fresh] = seen.emplace(pp.cells(), p.line);
    if (!fresh) fail(p.line, "duplicate of line " + std::to_string(it->second));
    members.push_back(std::move(pp));
  }
  return PartialFamily(n, std::move(members));
}

}  // namespace

PermFamily parse_perm_family(std::string_view text) { return build_perms(split(text)); }

PartialFamily parse_partial_family(std::string_view text) {
  const auto doc = split(text);
  if (!doc.degree && doc.lines.empty()) return PartialFamily(1);
  return build_partials(doc);
}

AnyFamily parse_family(std::string_view text) {
  const auto doc = split(text);
  for (const auto& l : doc.lines) {
    if (looks_partial(l)) return build_partials(doc);
  }
  return build_perms(doc);
}

std::string to_string(const Permutation& p) {
  std::string out;
  for (int i = 1; i <= p.degree(); ++i) {
    if (i > 1) out += ' ';
    out += std::to_string(p(i));
  }
  return out;
}

std::string to_string(const PartialPerm& p) {
  if (p.empty()) return "-";
  std::string out;
  for (const auto& c : p.cell_list()) {
    if (!out.empty()) out += ' ';
    out += to_string(c);
  }
  return out;
}

std::string serialize_family(const PermFamily& family) {
  std::string out = "n=" + std::to_string(family.degree()) + "\n";
  for (const auto& p : family) out += to_string(p) + "\n";
  return out;
}

std::string serialize_family(const PartialFamily& family) {
  std::string out = "n=" + std::to_string(family.degree()) + "\n";
  for (const auto& p : family) out += to_string(p) + "\n";
  return out;
}

std::string serialize_family(const AnyFamily& family) {
  return std::visit([](const auto& f) { return serialize_family(f); }, family);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace permdiv
