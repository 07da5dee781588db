#pragma once

// Plain-text family files.
//
//   # comment
//   n=4
//   2 1 3 4          permutation in one-line notation
//   1:1 2:3          partial permutation as row:col cells ("-" is the empty one)
//
// The header is optional on input (the degree is then inferred) and always
// written on output. Serialization is canonical, so parse(serialize(F)) == F
// and serialize(parse(text)) is stable byte for byte.

#include <string>
#include <string_view>
#include <variant>

#include "permdiv/core.hpp"

namespace permdiv {

using AnyFamily = std::variant<PermFamily, PartialFamily>;

/// Errors are InputError with "line L, column C: ..." positions. Duplicate
/// members are rejected, naming both lines.
PermFamily parse_perm_family(std::string_view text);
PartialFamily parse_partial_family(std::string_view text);
/// Partial if any member line contains ':' or is "-", permutations otherwise.
AnyFamily parse_family(std::string_view text);

std::string serialize_family(const PermFamily& family);
std::string serialize_family(const PartialFamily& family);
std::string serialize_family(const AnyFamily& family);

std::string to_string(const PartialPerm& p);  // "1:1 2:3" or "-"
std::string to_string(const Permutation& p);  // "2 1 3"

/// Reads a whole file; throws InputError if it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace permdiv
