#include "obstrukt/corpus.hpp"

#include <algorithm>
#include <map>
#include <memory>

#include "obstrukt/cup1.hpp"
#include "obstrukt/dgalg.hpp"
#include "obstrukt/error.hpp"
#include "obstrukt/json_io.hpp"
#include "obstrukt/products.hpp"

namespace obstrukt::corpus {

namespace fs = std::filesystem;

fs::path default_dir() {
#ifdef OBSTRUKT_CORPUS_DIR
  return fs::path(OBSTRUKT_CORPUS_DIR);
#else
  return fs::path("corpus");
#endif
}

bool EntryReport::pass() const {
  return std::all_of(claims.begin(), claims.end(), [](const ClaimResult& c) { return c.pass; });
}

namespace {

Json manifest(const fs::path& dir) { return load_json(dir / "manifest.json"); }

const Json& find_entry(const Json& man, const std::string& id) {
  for (const auto& e : man.at("entries"))
    if (e.at("id") == id) return e;
  throw Error(ErrorCode::UnknownEntry, "no corpus entry \"" + id + "\"");
}

std::string dims_string(const std::vector<std::size_t>& v) {
  std::string s;
  for (auto d : v) s += (s.empty() ? "" : " ") + std::to_string(d);
  return s;
}

std::vector<std::size_t> h_dims(const CohomologyRing& h) {
  std::vector<std::size_t> out;
  for (int n = 0; n <= h.top(); ++n) out.push_back(h.dim(n));
  return out;
}

// Variants of one entry, compiled on first use.
class Workspace {
 public:
  Workspace(const Json& entry, fs::path dir) : entry_(entry), dir_(std::move(dir)) {}

  Json document(const std::string& label) const {
    const Json& vs = entry_.at("variants");
    if (!vs.contains(label)) throw Error(ErrorCode::ParseError, "unknown variant \"" + label + "\"");
    return load_json(dir_ / vs.at(label).at("file").get<std::string>());
  }

  const AlgebraPtr& algebra(const std::string& label) {
    auto it = algebras_.find(label);
    if (it == algebras_.end()) it = algebras_.emplace(label, DgAlgebra::compile(presentation_from_json(document(label)))).first;
    return it->second;
  }

  const CohomologyRing& cohomology(const std::string& label) {
    auto it = rings_.find(label);
    if (it == rings_.end()) it = rings_.emplace(label, std::make_unique<CohomologyRing>(algebra(label))).first;
    return *it->second;
  }

  Morphism map(const std::string& name) {
    const Json& m = entry_.at("maps").at(name);
    const AlgebraPtr& src = algebra(m.at("source").get<std::string>());
    const AlgebraPtr& tgt = algebra(m.at("target").get<std::string>());
    std::vector<Element> images;
    for (const auto& g : src->presentation().generators) {
      if (!m.at("images").contains(g.name)) throw Error(ErrorCode::ParseError, "map " + name + " has no image for " + g.name);
      images.push_back(tgt->parse(m.at("images").at(g.name).get<std::string>(), g.degree));
    }
    return Morphism(src, tgt, images);
  }

  std::pair<std::string, std::string> map_ends(const std::string& name) const {
    const Json& m = entry_.at("maps").at(name);
    return {m.at("source").get<std::string>(), m.at("target").get<std::string>()};
  }

  const fs::path& dir() const { return dir_; }

 private:
  const Json& entry_;
  fs::path dir_;
  std::map<std::string, AlgebraPtr> algebras_;
  std::map<std::string, std::unique_ptr<CohomologyRing>> rings_;
};

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome check_compile(Workspace& ws, const Json& c) {
  const std::string expect = c.value("expect", "ok");
  std::string got = "ok", detail;
  try {
    const Json doc = ws.document(c.at("variant").get<std::string>());
    if (doc.contains("cup1")) {
      const auto alg = cup1::Cup1Algebra::compile(cup1::cup1_presentation_from_json(doc));
      detail = "total dimension " + std::to_string(alg.total_dim());
    } else {
      const AlgebraPtr a = DgAlgebra::compile(presentation_from_json(doc));
      const StructureReport r = a->verify_structure();
      if (!r.ok()) {
        got = "StructureFailure";
        detail = r.witness;
      }
    }
  } catch (const Error& e) {
    got = std::string(to_string(e.code()));
    detail = e.what();
  }
  if (detail.empty()) detail = got;
  return {got == expect, detail};
}

HClass named_class(const CohomologyRing& h, const std::string& text) { return parse_class(h, text); }

ProductQuery query(const CohomologyRing& h, const Json& c) {
  ProductQuery q;
  for (const auto& s : c.at("classes")) q.classes.push_back(named_class(h, s.get<std::string>()));
  q.order = c.value("order", 2);
  const std::string kind = c.at("kind").get<std::string>();
  if (kind == "massey")
    q.kind = ProductKind::Massey;
  else if (kind == "frob2")
    q.kind = ProductKind::FrobeniusType2;
  else if (kind == "frob1")
    q.kind = q.order > 2 ? ProductKind::HigherType1 : ProductKind::FrobeniusType1;
  else
    throw Error(ErrorCode::ParseError, "unknown product kind \"" + kind + "\"");
  return q;
}

Outcome check_product(Workspace& ws, const Json& c) {
  const CohomologyRing& h = ws.cohomology(c.at("variant").get<std::string>());
  const ProductSet s = compute_product(h, query(h, c));
  const std::string shown = render(h, s);
  const Json& ex = c.at("expect");
  if (ex.value("undefined", false)) return {!s.defined(), shown};
  if (!s.defined()) return {false, shown};
  const auto got = s.classes();
  if (!got) return {false, "set too large to list: " + shown};
  std::vector<FpVector> want;
  for (const auto& e : ex.at("elements")) {
    const std::string t = e.get<std::string>();
    want.push_back(t == "0" ? FpVector(h.prime(), h.dim(s.degree)) : named_class(h, t).coords);
  }
  std::sort(want.begin(), want.end());
  want.erase(std::unique(want.begin(), want.end()), want.end());
  return {want == *got, shown};
}

Element evaluate(const DgAlgebra& target, const std::vector<Element>& images, const Exponents& e) {
  Element out = target.one();
  for (std::size_t g = 0; g < e.size(); ++g)
    if (e[g]) out = target.multiply(out, target.power(images[g], e[g]));
  return out;
}

// The ring with zero differential maps to H(target) by sending generators to
// the named cocycles; checks the relations and bijectivity below both caps.
Outcome check_formal_ring(Workspace& ws, const Json& c) {
  const AlgebraPtr& ring = ws.algebra(c.at("ring").get<std::string>());
  const CohomologyRing& h = ws.cohomology(c.at("variant").get<std::string>());
  const DgAlgebra& t = h.algebra();
  for (int n = 0; n + 1 < ring->cap(); ++n)
    if (!ring->d_matrix(n).is_zero()) return {false, "ring has a nonzero differential in degree " + std::to_string(n)};
  std::vector<Element> images;
  for (const auto& g : ring->presentation().generators) {
    if (!c.at("images").contains(g.name)) return {false, "no image for " + g.name};
    Element im = t.parse(c.at("images").at(g.name).get<std::string>(), g.degree);
    if (im.degree != g.degree) return {false, "image of " + g.name + " has the wrong degree"};
    if (!h.is_cocycle(im)) return {false, "image of " + g.name + " is not a cocycle"};
    images.push_back(std::move(im));
  }
  const int top = std::min(ring->cap(), t.cap()) - 1;
  for (const auto& rel : ring->presentation().relations) {
    const SparsePoly poly = ring->parse_sparse(rel);
    if (poly.empty() || ring->monoid().degree(poly.begin()->first) > top) continue;
    Element sum = t.zero(ring->monoid().degree(poly.begin()->first));
    for (const auto& [e, coeff] : poly) sum = t.add(sum, t.scale(evaluate(t, images, e), coeff));
    if (!h.project(sum).is_zero()) return {false, "relation " + rel + " is not zero in cohomology"};
  }
  for (int n = 0; n <= top; ++n) {
    std::vector<FpVector> cols;
    for (std::size_t i = 0; i < ring->dim(n); ++i) cols.push_back(h.project(evaluate(t, images, ring->basis_monomial(n, i))));
    if (cols.size() != h.dim(n))
      return {false, "degree " + std::to_string(n) + ": ring dim " + std::to_string(cols.size()) + ", H dim " +
                         std::to_string(h.dim(n))};
    if (cols.empty()) continue;
    if (!is_iso(FpMatrix::from_columns(h.prime(), h.dim(n), cols)))
      return {false, "degree " + std::to_string(n) + ": the induced map is not bijective"};
  }
  return {true, "ring isomorphism through degree " + std::to_string(top)};
}

Outcome check_morphism(Workspace& ws, const Json& c) {
  const Morphism f = ws.map(c.at("map").get<std::string>());
  const MorphismReport r = f.check();
  if (!r.ok) return {false, "not a morphism: " + r.witness};
  const bool qi = is_quasi_iso(f);
  const bool want = c.value("quasi_iso", true);
  return {qi == want, std::string("morphism; quasi-isomorphism: ") + (qi ? "yes" : "no")};
}

// Transport: the source set pushed along H(f) against the set of
// the image classes, exactly and modulo the closed-form indeterminacy.
Outcome check_transport(Workspace& ws, const Json& c) {
  const std::string name = c.at("map").get<std::string>();
  const Morphism f = ws.map(name);
  const auto [src, tgt] = ws.map_ends(name);
  const CohomologyRing& hs = ws.cohomology(src);
  const CohomologyRing& ht = ws.cohomology(tgt);
  ProductQuery qs = query(hs, c), qt = qs;
  for (auto& x : qt.classes) x = class_of(ht, f.apply(hs.lift(x.degree, x.coords)));
  const ProductSet ss = compute_product(hs, qs), st = compute_product(ht, qt);
  if (!ss.defined() || !st.defined()) {
    const bool eq = ss.defined() == st.defined();
    return {eq == c.value("equal", true), "source " + render(hs, ss) + "; target " + render(ht, st)};
  }
  const ProductSet moved = transport(ss, induced_map(f, hs, ht).at(ss.degree));
  const bool eq = same_set(moved, st);
  const Subspace q = st.stated_indeterminacy ? *st.stated_indeterminacy
                                             : st.indeterminacy.value_or(Subspace(ht.prime(), ht.dim(st.degree)));
  const bool eq_mod = same_set_modulo(moved, st, q);
  const bool pass = eq == c.value("equal", true) && eq_mod == c.value("equal_modulo_stated", true);
  return {pass, "transported " + render(ht, moved) + "; target " + render(ht, st) + "; equal " + (eq ? "yes" : "no") +
                    ", equal modulo closed-form indeterminacy " + (eq_mod ? "yes" : "no")};
}

Outcome check_same_cohomology(Workspace& ws, const Json& c) {
  const auto& vs = c.at("variants");
  const auto a = h_dims(ws.cohomology(vs.at(0).get<std::string>()));
  const auto b = h_dims(ws.cohomology(vs.at(1).get<std::string>()));
  return {(a == b) == c.value("equal", true), dims_string(a) + " vs " + dims_string(b)};
}

Outcome check_cohomology_dims(Workspace& ws, const Json& c) {
  const auto got = h_dims(ws.cohomology(c.at("variant").get<std::string>()));
  return {got == c.at("dims").get<std::vector<std::size_t>>(), dims_string(got)};
}

Outcome check_algebra_dims(Workspace& ws, const Json& c) {
  const AlgebraPtr& a = ws.algebra(c.at("variant").get<std::string>());
  std::vector<std::size_t> got;
  for (int n = 0; n < a->cap(); ++n) got.push_back(a->dim(n));
  return {got == c.at("dims").get<std::vector<std::size_t>>(), dims_string(got)};
}

Outcome check_class(Workspace& ws, const Json& c) {
  const CohomologyRing& h = ws.cohomology(c.at("variant").get<std::string>());
  const HClass x = named_class(h, c.at("class").get<std::string>());
  const bool nz = !x.coords.is_zero();
  return {nz == c.value("nonzero", true), c.at("class").get<std::string>() + (nz ? " is nonzero" : " is zero") +
                                               " in H^" + std::to_string(x.degree)};
}

Outcome check_cup1_compile(Workspace& ws, const Json& c) {
  const auto alg = cup1::Cup1Algebra::compile(cup1::cup1_presentation_from_json(ws.document(c.at("variant").get<std::string>())));
  std::vector<std::size_t> hd;
  for (int n = 0; n < alg.cap(); ++n) hd.push_back(alg.h_dim(n));
  const cup1::IdentityReport ids = alg.verify_identities();
  bool pass = ids.ok();
  if (c.contains("total_dim")) pass = pass && alg.total_dim() == c.at("total_dim").get<std::size_t>();
  if (c.contains("h_dims")) pass = pass && hd == c.at("h_dims").get<std::vector<std::size_t>>();
  std::string quoted;
  if (c.contains("quoted_counts"))
    for (const auto& [k, v] : c.at("quoted_counts").items())
      quoted += (quoted.empty() ? " (quoted: " : ", ") + k + " " + std::to_string(v.get<std::size_t>());
  if (!quoted.empty()) quoted += ")";
  return {pass, "total dimension " + std::to_string(alg.total_dim()) + quoted + ", H dims " + dims_string(hd) +
                    ", identities " + (ids.ok() ? "hold" : "fail: " + ids.witness)};
}

Outcome check_cup1_maps(Workspace& ws, const Json& c) {
  const Json r = cup1::assoc_check_report(ws.document(c.at("variant").get<std::string>()), ws.dir());
  std::string detail;
  for (const auto& line : r.at("log")) detail += (detail.empty() ? "" : "; ") + line.get<std::string>();
  return {r.at("ok").get<bool>(), detail};
}

using Checker = Outcome (*)(Workspace&, const Json&);

const std::map<std::string, Checker>& checkers() {
  static const std::map<std::string, Checker> table = {
      {"compile", check_compile},
      {"cohomology_dims", check_cohomology_dims},
      {"algebra_dims", check_algebra_dims},
      {"same_cohomology", check_same_cohomology},
      {"class", check_class},
      {"formal_ring", check_formal_ring},
      {"product", check_product},
      {"morphism", check_morphism},
      {"transport", check_transport},
      {"cup1_compile", check_cup1_compile},
      {"cup1_maps", check_cup1_maps},
  };
  return table;
}

EntryReport run(const Json& entry, const fs::path& dir) {
  EntryReport rep;
  rep.id = entry.at("id").get<std::string>();
  Workspace ws(entry, dir);
  for (const auto& c : entry.at("claims")) {
    ClaimResult r;
    r.id = c.at("id").get<std::string>();
    r.op = c.at("op").get<std::string>();
    const auto it = checkers().find(r.op);
    if (it == checkers().end()) {
      r.detail = "unknown operation " + r.op;
    } else {
      try {
        const Outcome o = it->second(ws, c);
        r.pass = o.pass;
        r.detail = o.detail;
      } catch (const std::exception& e) {
        r.detail = e.what();
      }
    }
    rep.claims.push_back(std::move(r));
  }
  return rep;
}

Json report_json(const EntryReport& r) {
  Json j;
  j["id"] = r.id;
  j["status"] = r.pass() ? "PASS" : "FAIL";
  j["claims"] = Json::array();
  for (const auto& c : r.claims) {
    Json cj;
    cj["id"] = c.id;
    cj["op"] = c.op;
    cj["status"] = c.pass ? "PASS" : "FAIL";
    cj["detail"] = c.detail;
    j["claims"].push_back(cj);
  }
  return j;
}

bool printed_fails(const Json& entry, const fs::path& dir) {
  for (const auto& [label, v] : entry.at("variants").items()) {
    if (v.at("kind") != "as-printed") continue;
    try {
      const Json doc = load_json(dir / v.at("file").get<std::string>());
      if (doc.contains("cup1"))
        cup1::Cup1Algebra::compile(cup1::cup1_presentation_from_json(doc));
      else
        DgAlgebra::compile(presentation_from_json(doc));
    } catch (const Error&) {
      return true;
    }
  }
  return false;
}

}  // namespace

EntryReport verify(const std::string& entry_id, const fs::path& dir) {
  const Json man = manifest(dir);
  return run(find_entry(man, entry_id), dir);
}

std::vector<std::string> entry_ids(const fs::path& dir) {
  std::vector<std::string> out;
  const Json man = manifest(dir);
  for (const auto& e : man.at("entries")) out.push_back(e.at("id").get<std::string>());
  return out;
}

Json list_entries_json(const fs::path& dir) {
  Json j;
  j["entries"] = Json::array();
  const Json man = manifest(dir);
  for (const auto& e : man.at("entries")) {
    Json ej;
    ej["id"] = e.at("id");
    ej["title"] = e.at("title");
    ej["anchor"] = e.value("anchor", "");
    ej["claims"] = e.at("claims").size();
    ej["variants"] = Json::array();
    bool reconciled = false;
    for (const auto& [label, v] : e.at("variants").items()) {
      ej["variants"].push_back(label);
      reconciled = reconciled || v.at("kind") == "as-printed";
    }
    ej["reconciled"] = reconciled;
    ej["flagged"] = printed_fails(e, dir);
    j["entries"].push_back(ej);
  }
  return j;
}

Json verify_json(const std::string& entry_id, const fs::path& dir) {
  const EntryReport r = verify(entry_id, dir);
  Json j;
  j["entries"] = Json::array({report_json(r)});
  j["status"] = r.pass() ? "PASS" : "FAIL";
  return j;
}

Json verify_all_json(const fs::path& dir) {
  const Json man = manifest(dir);
  Json j;
  j["entries"] = Json::array();
  bool all = true;
  for (const auto& e : man.at("entries")) {
    const EntryReport r = run(e, dir);
    all = all && r.pass();
    j["entries"].push_back(report_json(r));
  }
  j["status"] = all ? "PASS" : "FAIL";
  return j;
}

}  // namespace obstrukt::corpus
