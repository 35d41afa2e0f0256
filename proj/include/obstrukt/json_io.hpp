#pragma once

// Presentation files and JSON renderings of computed objects.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "obstrukt/dgalg.hpp"
#include "obstrukt/products.hpp"

namespace obstrukt {

using Json = nlohmann::ordered_json;

/// Throws Error(ParseError) on malformed documents, naming the offending field.
Presentation presentation_from_json(const Json& doc);
Json presentation_to_json(const Presentation& pres);
Json load_json(const std::filesystem::path& path);
Presentation load_presentation(const std::filesystem::path& path);

Json cohomology_to_json(const CohomologyRing& h, int max_degree);
Json class_to_json(const CohomologyRing& h, int degree, const FpVector& coords);
Json product_to_json(const CohomologyRing& h, const ProductSet& s);

}  // namespace obstrukt
