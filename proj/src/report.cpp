#include "permdiv/report.hpp"

#include "permdiv/errors.hpp"
#include "permdiv/io.hpp"

namespace permdiv {

namespace {

Json cells_json(const std::vector<Cell>& cells) {
  Json out = Json::array();
  for (const auto& c : cells) out.push_back(to_string(c));
  return out;
}

void flatten(const Json& node, const std::string& path, std::vector<std::pair<std::string, std::string>>& out) {
  if (node.is_object()) {
    for (auto it = node.begin(); it != node.end(); ++it) flatten(it.value(), path.empty() ? it.key() : path + "." + it.key(), out);
  } else if (node.is_array()) {
    if (node.empty()) out.emplace_back(path, "[]");
    for (std::size_t i = 0; i < node.size(); ++i) flatten(node[i], path + "." + std::to_string(i), out);
  } else if (node.is_string()) {
    out.emplace_back(path, node.get<std::string>());
  } else {
    out.emplace_back(path, node.dump());
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Format parse_format(const std::string& s) {
  if (s == "json") return Format::json;
  if (s == "csv") return Format::csv;
  if (s == "text") return Format::text;
  throw InputError("unknown format '" + s + "' (json, csv or text)");
}

Json to_json(const Enclosure& e) { return Json{{"lo", to_string(e.lo)}, {"hi", to_string(e.hi)}}; }

Json to_json(const DiversityReport& r) {
  Json table = Json::array();
  for (int i = 1; i <= r.degree; ++i) {
    Json row = Json::array();
    for (int j = 1; j <= r.degree; ++j) row.push_back(r.codegree(Cell{i, j}));
    table.push_back(row);
  }
  return Json{{"degree", r.degree},
              {"family_size", r.family_size},
              {"gamma", r.gamma},
              {"argmin_cell", to_string(r.argmin_cell)},
              {"codegree", table}};
}

Json to_json(const SpreadDecomposition& d) {
  Json branches = Json::array();
  for (const auto& b : d.branches) {
    branches.push_back(Json{{"root", to_string(b.root)},
                            {"root_size", b.root.size()},
                            {"members", b.members.size()},
                            {"restriction_spread", b.restriction_spread}});
  }
  Json out{{"degree", d.degree},
           {"params", Json{{"r", to_string(d.r)},
                           {"q_cap", d.q_cap_description},
                           {"q_cap_enclosure", to_json(d.q_cap_enclosure)}}},
           {"selection_rule", SpreadDecomposition::selection_rule},
           {"branches", branches},
           {"remainder_size", d.remainder.size()},
           {"stop_reason", to_string(d.stop_reason)},
           {"oversize_root", d.oversize_root ? Json(to_string(*d.oversize_root)) : Json(nullptr)},
           {"input_intersecting", d.input_intersecting},
           {"roots_intersecting", d.roots_intersecting}};
  return out;
}

Json to_json(const CascadeResult& c) {
  Json layers = Json::array();
  for (const auto& l : c.layers) {
    layers.push_back(Json{{"size", l.size}, {"members", l.members.size()}, {"furedi_bound", l.furedi_bound.str()}});
  }
  Json cls{{"shape", to_string(c.classification.shape)}};
  if (c.classification.center) cls["center"] = to_string(*c.classification.center);
  if (!c.classification.triangle.empty()) cls["triangle"] = cells_json(c.classification.triangle);
  if (!c.classification.note.empty()) cls["note"] = c.classification.note;
  return Json{{"q_int", c.q_int},
              {"detection_rule", kDetectionRule},
              {"minimal_members", c.minimal.size()},
              {"layers", layers},
              {"residue", serialize_family(c.residue)},
              {"classification", cls}};
}

Json to_json(const CertificateReport& r) {
  Json enc = Json::array();
  for (const auto& e : r.enclosures) enc.push_back(Json{{"name", e.name}, {"lo", to_string(e.value.lo)}, {"hi", to_string(e.value.hi)}});
  Json out{{"claim", r.claim}, {"n", r.n}, {"verdict", to_string(r.verdict)}, {"precision", r.precision}, {"enclosures", enc}};
  if (!r.note.empty()) out["note"] = r.note;
  return out;
}

Json to_json(const CertificateSet& s) {
  Json claims = Json::array();
  for (const auto& c : s.claims) claims.push_back(to_json(c));
  return Json{{"n", s.n}, {"overall", to_string(s.overall())}, {"claims", claims}};
}

Json to_json(const EstimateReport& r) {
  Json out{{"successes", r.successes},
           {"trials", r.trials},
           {"estimate", to_string(r.estimate)},
           {"std_error", to_json(r.std_error)},
           {"p", to_string(r.p)},
           {"seed", r.seed},
           {"generator", r.generator}};
  if (r.bound || r.bound_vacuous) {
    out["bound"] = r.bound ? to_json(*r.bound) : Json(nullptr);
    out["bound_vacuous"] = r.bound_vacuous;
    out["clamped"] = r.clamped;
    out["consistent"] = r.consistent;
    if (!r.note.empty()) out["note"] = r.note;
  }
  return out;
}

Json to_json(const SearchResult& r) {
  Json out{{"mode", to_string(r.mode)},
           {"best_gamma", r.best_gamma},
           {"family_size", r.best_family.size()},
           {"iterations", r.iterations},
           {"seed", r.seed},
           {"family", serialize_family(r.best_family)}};
  if (!r.trace.empty()) out["trace"] = r.trace;
  return out;
}

Json to_json(const TriangleAudit& a) {
  return Json{{"n", a.n},
              {"size", a.size},
              {"intersecting", a.intersecting},
              {"gamma", a.gamma},
              {"expected", a.expected},
              {"minimizing_cells", cells_json(a.minimizing_cells)}};
}

Json to_json(const FurediCheck& f) {
  return Json{{"layer_size", f.size}, {"bound", f.bound.str()}, {"sunflower_found", f.sunflower_found}, {"holds", f.holds}};
}

std::string render(const Json& doc, Format format) {
  if (format == Format::json) return doc.dump(2) + "\n";
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(doc, "", rows);
  std::string out;
  if (format == Format::csv) {
    out = "key,value\n";
    for (const auto& [k, v] : rows) out += csv_field(k) + "," + csv_field(v) + "\n";
    return out;
  }
  for (const auto& [k, v] : rows) {
    if (v.find('\n') != std::string::npos) {
      out += k + ":\n" + v;
      if (v.back() != '\n') out += "\n";
    } else {
      out += k + ": " + v + "\n";
    }
  }
  return out;
}

}  // namespace permdiv
