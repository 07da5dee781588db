#pragma once

// Structured result documents for every module, and their json / csv / text
// renderings. The three renderings carry the same content: csv and text are
// flattened views ("a.b.0.c" paths) of the json tree.

#include <string>

#include "json.hpp"
#include "permdiv/bounds.hpp"
#include "permdiv/core.hpp"
#include "permdiv/montecarlo.hpp"
#include "permdiv/search.hpp"
#include "permdiv/spread.hpp"
#include "permdiv/sunflower.hpp"

namespace permdiv {

using Json = nlohmann::ordered_json;

enum class Format { json, csv, text };
/// "json", "csv" or "text"; anything else is an InputError.
Format parse_format(const std::string& s);

Json to_json(const Enclosure& e);  // {"lo": "a/b", "hi": "c/d"}
Json to_json(const DiversityReport& r);
Json to_json(const SpreadDecomposition& d);
Json to_json(const CascadeResult& c);
Json to_json(const CertificateReport& r);
Json to_json(const CertificateSet& s);
Json to_json(const EstimateReport& r);
Json to_json(const SearchResult& r);
Json to_json(const TriangleAudit& a);
Json to_json(const FurediCheck& f);

std::string render(const Json& doc, Format format);

}  // namespace permdiv
