#include "obstrukt/json_io.hpp"

#include <fstream>
#include <sstream>

namespace obstrukt {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::ParseError, msg); }

const Json& field(const Json& doc, const char* name) {
  if (!doc.is_object() || !doc.contains(name)) bad(std::string("missing field \"") + name + "\"");
  return doc.at(name);
}

int int_field(const Json& doc, const char* name) {
  const Json& v = field(doc, name);
  if (!v.is_number_integer()) bad(std::string("field \"") + name + "\" must be an integer");
  return v.get<int>();
}

}  // namespace

Presentation presentation_from_json(const Json& doc) {
  Presentation pres;
  const int p = int_field(doc, "prime");
  if (p < 2) bad("field \"prime\" must be a prime");
  pres.prime = static_cast<std::uint32_t>(p);
  pres.degree_cap = int_field(doc, "degree_cap");
  const Json& gens = field(doc, "generators");
  if (!gens.is_array()) bad("field \"generators\" must be an array");
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const Json& g = gens[i];
    const Json& name = field(g, "name");
    if (!name.is_string()) bad("generators[" + std::to_string(i) + "].name must be a string");
    pres.generators.push_back({name.get<std::string>(), int_field(g, "degree")});
  }
  if (doc.contains("relations")) {
    const Json& rels = doc.at("relations");
    if (!rels.is_array()) bad("field \"relations\" must be an array");
    for (const auto& r : rels) {
      if (!r.is_string()) bad("relations must be strings");
      pres.relations.push_back(r.get<std::string>());
    }
  }
  if (doc.contains("differential")) {
    const Json& d = doc.at("differential");
    if (!d.is_object()) bad("field \"differential\" must be an object");
    for (const auto& [k, v] : d.items()) {
      if (!v.is_string()) bad("differential of \"" + k + "\" must be a string");
      pres.differential[k] = v.get<std::string>();
    }
  }
  return pres;
}

Json presentation_to_json(const Presentation& pres) {
  Json doc;
  doc["prime"] = pres.prime;
  doc["degree_cap"] = pres.degree_cap;
  doc["generators"] = Json::array();
  for (const auto& g : pres.generators) doc["generators"].push_back({{"name", g.name}, {"degree", g.degree}});
  doc["differential"] = Json::object();
  for (const auto& [k, v] : pres.differential) doc["differential"][k] = v;
  doc["relations"] = pres.relations;
  return doc;
}

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
}

Presentation load_presentation(const std::filesystem::path& path) {
  try {
    return presentation_from_json(load_json(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError && std::string(e.what()).rfind(path.string(), 0) != 0)
      throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    throw;
  }
}

Json class_to_json(const CohomologyRing& h, int degree, const FpVector& coords) {
  Json j;
  j["degree"] = degree;
  j["coords"] = std::vector<Scalar>(coords.entries().begin(), coords.entries().end());
  j["class"] = h.class_string(degree, coords);
  return j;
}

Json cohomology_to_json(const CohomologyRing& h, int max_degree) {
  Json doc;
  doc["prime"] = h.prime().value();
  doc["degree_cap"] = h.algebra().cap();
  doc["certified_through"] = std::min(max_degree, h.top());
  doc["degrees"] = Json::array();
  for (int n = 0; n <= std::min(max_degree, h.top()); ++n) {
    Json d;
    d["degree"] = n;
    d["algebra_dim"] = h.algebra().dim(n);
    d["dim"] = h.dim(n);
    d["representatives"] = Json::array();
    for (const auto& r : h.representatives(n)) d["representatives"].push_back(h.algebra().to_string(r));
    doc["degrees"].push_back(d);
  }
  return doc;
}

Json product_to_json(const CohomologyRing& h, const ProductSet& s) {
  Json j;
  j["degree"] = s.degree;
  j["mode"] = std::string(to_string(s.mode));
  if (s.representative) j["representative"] = class_to_json(h, s.degree, *s.representative);
  auto basis = [&](const Subspace& sub) {
    Json arr = Json::array();
    for (const auto& v : sub.basis()) arr.push_back(class_to_json(h, s.degree, v));
    return arr;
  };
  if (s.indeterminacy) j["indeterminacy"] = basis(*s.indeterminacy);
  if (s.stated_indeterminacy) j["stated_indeterminacy"] = basis(*s.stated_indeterminacy);
  if (auto cls = s.classes(4096)) {
    j["elements"] = Json::array();
    for (const auto& c : *cls) j["elements"].push_back(class_to_json(h, s.degree, c));
  }
  j["contains_zero"] = s.contains_zero();
  j["partial"] = s.partial;
  if (!s.witness.empty()) j["witness"] = s.witness;
  return j;
}

}  // namespace obstrukt
