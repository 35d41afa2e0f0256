#include <doctest.h>

#include <random>

#include "obstrukt/cup1.hpp"
#include "obstrukt/json_io.hpp"

using namespace obstrukt;
using namespace obstrukt::cup1;

namespace {

std::string corpus_file(const std::string& name) { return std::string(OBSTRUKT_CORPUS_DIR) + "/" + name; }

Calculus uvw(Mode mode) {
  Calculus c({{"u", 2, {}}, {"v", 2, {}}, {"w", 2, {}}}, mode);
  return c;
}

Calculus xyt(Mode mode) {
  Calculus c({{"x", 2, {}}, {"y", 2, {}}, {"t", 3, {}}}, mode);
  c.set_differential("t", "x*y");
  return c;
}

TermPtr random_term(std::mt19937& rng, int gens, int depth) {
  if (depth == 0 || rng() % 3 == 0) return Term::generator(static_cast<int>(rng() % gens));
  return Term::node(rng() % 2 ? Term::Op::Cup : Term::Op::Cup1, random_term(rng, gens, depth - 1),
                    random_term(rng, gens, depth - 1));
}

const Cup1Algebra& algebra_c() {
  static const Cup1Algebra c = Cup1Algebra::compile(cup1_presentation_from_json(load_json(corpus_file("sec42_C.json"))));
  return c;
}

}  // namespace

TEST_CASE("reduced monomials normalize to themselves") {
  const Calculus c = uvw(Mode::Lax);
  for (const char* s : {"u", "u*v", "cup1(u, v)", "u*cup1(v, w)", "cup1(cup1(u, v), w)"}) {
    const Poly p = c.parse(s);
    REQUIRE(p.size() == 1);
    CHECK(c.to_string(p) == c.to_string(c.parse(c.to_string(p))));
  }
}

TEST_CASE("left Hirsch identity") {
  for (Mode m : {Mode::Lax, Mode::Strict}) {
    const Calculus c = uvw(m);
    CHECK(c.parse("cup1(u*v, w)") == c.parse("u*cup1(v, w) + cup1(u, w)*v"));
  }
}

TEST_CASE("Steenrod differential on cocycles") {
  const Calculus c = xyt(Mode::Lax);
  CHECK(c.d(c.parse("cup1(x, y)")) == c.parse("x*y + y*x"));
  CHECK(c.d(c.parse("t")) == c.parse("x*y"));
  CHECK(c.d(c.parse("x")).empty());
}

TEST_CASE("normalization is idempotent and d^2 = 0 on random lax terms") {
  const Calculus c = xyt(Mode::Lax);
  std::mt19937 rng(1);
  int checked = 0;
  for (int i = 0; i < 5000 && checked < 200; ++i) {
    const TermPtr t = random_term(rng, 3, 4);
    if (c.degree(*t) > 14) continue;
    ++checked;
    const Poly a = c.normalize(*t);
    Poly again;
    for (const auto& m : a) add_to(again, c.parse(c.to_string(m)));
    CHECK(again == a);
    CHECK(c.d(c.d(a)).empty());
  }
  CHECK(checked == 200);
}

TEST_CASE("rewrite orders agree modulo the relations of C") {
  const Cup1Algebra& alg = algebra_c();
  const Calculus& c = alg.calculus();
  std::mt19937 rng(5);
  int checked = 0, nonzero = 0;
  for (int i = 0; i < 20000 && checked < 300; ++i) {
    const TermPtr t = random_term(rng, 4, 4);
    const int deg = c.degree(*t);
    if (deg > alg.cap()) continue;
    const Poly a = c.normalize(*t), b = c.normalize_outermost(*t);
    if (a.empty() && b.empty()) continue;
    ++checked;
    const FpVector va = alg.reduce(a, deg);
    if (!va.is_zero()) ++nonzero;
    CHECK(va == alg.reduce(b, deg));
  }
  CHECK(checked == 300);
  CHECK(nonzero > 0);
}

TEST_CASE("free strict cup-1 algebra on one cocycle") {
  Cup1Presentation pres;
  pres.generators = {{"x", 2, {1}}};
  pres.mode = Mode::Strict;
  pres.max_weight = Weight{3};
  pres.degree_cap = 7;
  const Cup1Algebra a = Cup1Algebra::compile(pres);
  // x; cup1(x, x); x*x, cup1(x, cup1(x, x)); x*cup1(x, x), cup1(x, x)*x; x*x*x
  std::vector<std::size_t> dims;
  for (int n = 0; n <= a.cap(); ++n) dims.push_back(a.dim(n));
  CHECK(dims == std::vector<std::size_t>{1, 0, 1, 1, 2, 2, 1, 0});
  const auto ids = a.verify_identities();
  CHECK(ids.ok());
}

TEST_CASE("the Frobenius cocycle expression") {
  for (Mode m : {Mode::Strict, Mode::Lax}) {
    const CocycleReport r = verify_frobenius_cocycle(m);
    CHECK(r.zero);
    CHECK_FALSE(r.log.empty());
    const CocycleReport bad = verify_frobenius_cocycle(m, true);
    CHECK_FALSE(bad.zero);
    CHECK_FALSE(bad.remainder.empty());
  }
  const auto j = verify_frobenius_cocycle_json(Mode::Strict, false);
  CHECK(j["ok"] == true);
}

TEST_CASE("compiled C: identities, basis and cohomology") {
  const Cup1Algebra& c = algebra_c();
  const IdentityReport ids = c.verify_identities();
  CHECK(ids.d_squared_zero);
  CHECK(ids.hirsch);
  CHECK(ids.steenrod);
  CHECK(ids.cup_associative);
  CHECK(ids.cup1_associative);
  CHECK(c.total_dim() == 39);
  CHECK(c.dim(2) == 2);
  CHECK(c.dim(3) == 1);
  std::vector<std::size_t> h;
  for (int n = 0; n <= 6; ++n) h.push_back(c.h_dim(n));
  CHECK(h == std::vector<std::size_t>{1, 0, 2, 0, 3, 0, 1});
  // dt = x*y in C
  const Calculus& calc = c.calculus();
  CHECK(c.reduce(calc.d(calc.parse("t")), 4) == c.reduce(calc.parse("x*y"), 4));
  // degree 4 words of length 3 from the tables
  for (const char* s : {"cup1(x, t)", "cup1(y, t)", "S", "T"}) CHECK_FALSE(c.reduce(calc.parse(s), 4).is_zero());
}

TEST_CASE("comparison maps are associative quasi-isomorphisms") {
  const Json doc = load_json(corpus_file("sec42_C.json"));
  const Json r = assoc_check_report(doc, OBSTRUKT_CORPUS_DIR);
  CHECK(r["ok"] == true);
  REQUIRE(r["maps"].size() == 2);
  for (const auto& m : r["maps"]) {
    CHECK(m["chain_map"] == true);
    CHECK(m["multiplicative"] == true);
    CHECK(m["kills_ideal"] == true);
    CHECK(m["quasi_iso"] == true);
  }
}

TEST_CASE("a map that forgets the relation is caught") {
  const Cup1Algebra& c = algebra_c();
  const AlgebraPtr b = DgAlgebra::compile(load_presentation(corpus_file("sec42_B.json")));
  AssocMap g;
  g.images = {{"x", "x"}, {"y", "y"}, {"z", "z"}, {"t", "t"}};  // T -> 0 breaks x*T = t^2
  CHECK_FALSE(assoc_quasi_iso_check(c, b, g).ok());
}

TEST_CASE("commutative algebra viewed as a cup-1 algebra maps identically") {
  Json doc = {{"prime", 2},
              {"degree_cap", 9},
              {"generators", {{{"name", "x"}, {"degree", 2}}}},
              {"differential", Json::object()},
              {"relations", {"cup1(x, x)", "cup1(x, x*x)"}},
              {"cup1", {{"mode", "lax"}, {"weights", {{"x", {1}}}}, {"max_weight", {3}}}}};
  const Cup1Algebra c = Cup1Algebra::compile(cup1_presentation_from_json(doc));
  const AlgebraPtr a = DgAlgebra::compile(Presentation{2, {{"x", 2}}, {"x^4"}, {}, 9});
  AssocMap id;
  id.images = {{"x", "x"}};
  const AssocReport r = assoc_quasi_iso_check(c, a, id);
  INFO(r.witness);
  CHECK(r.chain_map);
  CHECK(r.multiplicative);
  CHECK(r.kills_ideal);
  CHECK(r.quasi_iso);
}

TEST_CASE("as-printed C fails to parse") {
  try {
    Cup1Algebra::compile(cup1_presentation_from_json(load_json(corpus_file("sec42_C_printed.json"))));
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("homogeneous") != std::string::npos);
  }
}

TEST_CASE("cup-1 words are rejected in plain presentations") {
  CHECK_THROWS_AS(DgAlgebra::compile(load_presentation(corpus_file("sec42_C.json"))), Error);
}
