#include <doctest.h>

#include <random>

#include "obstrukt/json_io.hpp"
#include "obstrukt/sullivan.hpp"
#include "support/random_algebra.hpp"
#include "support/sullivan_fixtures.hpp"

using namespace obstrukt;

namespace {

AlgebraPtr make(std::uint32_t p, std::vector<Generator> gens, std::vector<std::string> rels,
                std::map<std::string, std::string> d, int cap) {
  return DgAlgebra::compile(Presentation{p, std::move(gens), std::move(rels), std::move(d), cap});
}

AlgebraPtr corpus(const std::string& name) {
  return DgAlgebra::compile(load_presentation(std::string(OBSTRUKT_CORPUS_DIR) + "/" + name));
}

}  // namespace

TEST_CASE("free algebra without products below the cap is its own step 0 model") {
  auto a = make(3, {{"x", 3}}, {}, {}, 6);
  auto m = sullivan_step(a, 0);
  REQUIRE(m.stages.size() == 1);
  CHECK(m.generators.size() == 1);
  CHECK(m.stages[0].surjective);
  CHECK(m.quasi_iso());
}

TEST_CASE("step 0 of a free algebra with products is surjective but not injective") {
  auto a = make(2, {{"x", 2}, {"y", 3}}, {}, {}, 7);
  auto m = sullivan_step(a, 0);
  CHECK(m.stages[0].surjective);
  // V_0 = {x, y, x^2, xy, x^3, y^2}, and the products of these duplicate classes
  CHECK(m.generators.size() == 6);
  CHECK_FALSE(m.quasi_iso());
}

TEST_CASE("Sym(x,y)/(xy): stage 1 kills the product and the model converges below the cap") {
  auto a = make(2, {{"x", 2}, {"y", 2}}, {"x*y"}, {}, 8);
  auto m = sullivan_step(a, 3);
  REQUIRE(m.stages.size() == 4);
  // V_0 = basis of H^{<8}: x, y, x^2, y^2, x^3, y^3
  CHECK(m.stages[0].generators.size() == 6);
  CHECK(m.stages[0].kernel_dims == std::vector<std::size_t>{0, 0, 0, 0, 3, 0, 8, 0});
  bool kills_xy = false;
  for (auto g : m.stages[1].generators) kills_xy = kills_xy || (m.generators[g].degree == 3 && m.generators[g].d == "v0_1*v0_2");
  CHECK(kills_xy);
  CHECK(m.stages[1].kernel_dims == std::vector<std::size_t>{0, 0, 0, 0, 0, 6, 3, 12});
  CHECK(m.stages[2].kernel_dims == std::vector<std::size_t>{0, 0, 0, 0, 0, 0, 12, 0});
  CHECK(m.quasi_iso());
  for (const auto& st : m.stages) CHECK(st.surjective);
}

TEST_CASE("stages satisfy nilpotence and the structure map is a morphism") {
  auto m = sullivan_step(corpus("ex44_p3_A.json"), 2, 7);
  CHECK(m.map().check().ok);
  for (std::size_t g = 0; g < m.generators.size(); ++g) {
    const Element dv = m.algebra->differential(m.algebra->generator(g));
    for (std::size_t i = 0; i < dv.coords.size(); ++i) {
      if (!dv.coords[i]) continue;
      const Exponents& e = m.algebra->basis_monomial(dv.degree, i);
      for (std::size_t h = 0; h < e.size(); ++h)
        if (e[h]) CHECK(m.generators[h].stage < m.generators[g].stage);
    }
  }
}

TEST_CASE("the lowest degree carrying kernel increases stage over stage") {
  for (const char* name : {"ex44_p3_A.json", "ex46_p3_B.json", "sec42_A.json", "ex43_B.json"}) {
    auto a = corpus(name);
    auto m = sullivan_step(a, 2, 6);
    int prev = -1;
    for (const auto& st : m.stages) {
      int low = static_cast<int>(st.kernel_dims.size());
      for (std::size_t n = 0; n < st.kernel_dims.size(); ++n)
        if (st.kernel_dims[n]) {
          low = static_cast<int>(n);
          break;
        }
      CHECK_MESSAGE(low >= prev, name);
      prev = low;
      CHECK(st.surjective);
    }
  }
}

TEST_CASE("caps and size guards") {
  auto a = make(2, {{"x", 2}}, {}, {}, 6);
  CHECK_THROWS_AS(sullivan_step(a, 1, 7), Error);
  try {
    sullivan_step(corpus("ex43_A.json"), 3, 8);
    FAIL("expected TooLarge");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooLarge);
  }
}

TEST_CASE("lift against the identity returns g") {
  auto a = make(2, {{"x", 2}, {"y", 2}}, {"x*y"}, {}, 8);
  auto m = sullivan_step(a, 1, 6);
  const Morphism id = Morphism::identity(a);
  const Morphism h = lift(m, id, m.map());
  CHECK(h.images() == m.map().images());
}

TEST_CASE("lift on random surjective quasi-isomorphisms") {
  std::mt19937 rng(20240611);
  int done = 0;
  for (int trial = 0; done < 12 && trial < 60; ++trial) {
    testing::RandomShape shape;
    shape.prime = trial % 3 == 0 ? 3 : 2;
    shape.cap = 7;
    const Presentation d = testing::random_presentation(rng, shape);
    auto lp = testing::random_lift_problem(rng, d, 2);
    SullivanModel m;
    try {
      m = sullivan_step(lp.target, 1, 5);
    } catch (const Error& e) {
      REQUIRE(e.code() == ErrorCode::TooLarge);
      continue;
    }
    const Morphism h = lift(m, *lp.p, m.map());
    CHECK(h.check().ok);
    for (std::size_t g = 0; g < h.images().size(); ++g) CHECK(lp.p->apply(h.images()[g]) == m.map().images()[g]);
    ++done;
  }
  CHECK(done >= 10);
}

TEST_CASE("lift rejects maps that are not surjective quasi-isomorphisms") {
  auto a = make(2, {{"x", 2}}, {"x^3"}, {}, 6);
  auto m = sullivan_step(a, 1, 5);
  auto b = make(2, {{"x", 2}, {"e", 3}}, {"x^3", "e^2"}, {}, 6);
  // a -> b is injective but misses e
  const Morphism inc = Morphism::from_strings(a, b, {{"x", "x"}});
  const Morphism g = Morphism::unchecked(m.algebra, b, [&] {
    std::vector<Element> out;
    for (const auto& img : m.map().images()) out.push_back(inc.apply(img));
    return out;
  }());
  try {
    lift(m, inc, g);
    FAIL("expected NotSurjective");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotSurjective);
  }
  // b -> a killing e is surjective, not a quasi-iso
  const Morphism proj = Morphism::from_strings(b, a, {{"x", "x"}});
  try {
    lift(m, proj, m.map());
    FAIL("expected NotQuasiIso");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotQuasiIso);
  }
}

TEST_CASE("surjectivize: already surjective") {
  auto a = make(2, {{"x", 2}, {"t", 3}}, {"x^3"}, {{"t", "x^2"}}, 8);
  const Surjectivization s = surjectivize(Morphism::identity(a));
  for (auto k : s.complement_dims) CHECK(k == 0);
  CHECK(s.algebra->generator_count() == a->generator_count());
  CHECK(is_quasi_iso(*s.to_target));
}

TEST_CASE("surjectivize: adjoining an acyclic pair") {
  auto b = make(2, {{"x", 2}}, {"x^3"}, {}, 8);
  auto a = make(2, {{"x", 2}, {"a", 3}, {"b", 4}}, {"x^3", "a^2"}, {{"a", "b"}}, 8);
  const Morphism f = Morphism::from_strings(b, a, {{"x", "x"}});
  const Surjectivization s = surjectivize(f);
  CHECK(s.complement_dims == std::vector<std::size_t>{0, 0, 0, 1, 1, 1, 1, 2});
  CHECK(s.to_target->check().ok);
  CHECK(s.projection->check().ok);
  for (int n = 0; n < 8; ++n) {
    CHECK(s.to_target->surjective(n));
    CHECK(s.projection->surjective(n));
  }
  CHECK(is_quasi_iso(*s.to_target));
  CHECK(is_quasi_iso(*s.projection));
}

TEST_CASE("surjectivize: a p-th power class breaks acyclicity") {
  auto b = make(2, {{"x", 2}}, {"x^3"}, {}, 6);
  auto a = make(2, {{"x", 2}, {"a", 1}, {"b", 2}}, {"x^3", "a^2"}, {{"a", "b"}}, 6);
  const Morphism f = Morphism::from_strings(b, a, {{"x", "x"}});
  REQUIRE(is_quasi_iso(f));
  try {
    surjectivize(f);
    FAIL("expected NotQuasiIso");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotQuasiIso);
  }
}

TEST_CASE("cotriple product of the type 1 pattern equals frobenius_type1") {
  for (const char* name : {"ex43_A.json", "ex43_B.json", "sec42_A.json", "sec42_B.json"}) {
    auto a = corpus(name);
    const CohomologyRing h(a);
    const HClass x = parse_class(h, "x"), y = parse_class(h, "y");
    auto m = sullivan_step(a, 1, 2 * (x.degree + y.degree - 1) + 1);
    const Element sigma = type1_pattern(m, h, x, y);
    const ProductSet cot = cotriple_product_set(m, h, sigma);
    const ProductSet frob = frobenius_type1(h, x, y);
    CHECK_MESSAGE(same_set(cot, frob), name);
  }
}

TEST_CASE("cotriple product of a coboundary vanishes") {
  auto a = make(2, {{"x", 2}, {"y", 2}}, {"x*y"}, {}, 8);
  auto m = sullivan_step(a, 1, 8);
  const CohomologyRing h(a);
  std::vector<std::size_t> deg3;
  for (auto g : m.stages[1].generators)
    if (m.generators[g].degree == 3) deg3.push_back(g);
  REQUIRE(deg3.size() >= 2);
  const Element x = m.algebra->multiply(m.algebra->generator(deg3[0]), m.algebra->generator(deg3[1]));
  const ProductSet s = cotriple_product_set(m, h, m.algebra->differential(x));
  REQUIRE(s.defined());
  CHECK(s.elements.size() == 1);
  CHECK(s.contains_zero());
}

TEST_CASE("cotriple product rejects sigma outside the ideal or not closed") {
  auto a = make(2, {{"x", 2}, {"y", 2}}, {"x*y"}, {}, 8);
  auto m = sullivan_step(a, 1, 8);
  const CohomologyRing h(a);
  try {
    cotriple_product_set(m, h, m.algebra->parse("v0_1^2"));
    FAIL("expected NotInIdeal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotInIdeal);
  }
  try {
    cotriple_product_set(m, h, m.algebra->parse("v1_1"));
    FAIL("expected NotACocycle");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotACocycle);
  }
}

TEST_CASE("hand-built 3x3 bicomplex: d_2[c_1] = [d'c_2]") {
  const Prime p(2);
  Bicomplex b(p, 3, 3);
  // c_1 at (0,1), c_2 = e at (1,0), with d'c_1 = d''c_2 = m at (1,1) and d'c_2 = t at (2,0)
  b.set_dim(0, 1, 1);
  b.set_dim(1, 1, 1);
  b.set_dim(1, 0, 1);
  b.set_dim(2, 0, 1);
  // an extra acyclic vertical pair in column 2 that must not disturb E_2
  b.set_dim(2, 1, 1);
  b.set_dim(2, 2, 1);
  auto one = [&] { return FpMatrix::identity(p, 1); };
  b.set_horizontal(0, 1, one());
  b.set_vertical(1, 0, one());
  b.set_horizontal(1, 0, one());
  b.set_vertical(2, 1, one());
  REQUIRE(b.check().ok);
  const auto r = staircase_check(b, 0, 1, {FpVector(p, std::vector<Scalar>{1}), FpVector(p, std::vector<Scalar>{1})});
  CHECK(r.total_identity);
  CHECK(r.applicable);
  CHECK(r.survives);
  CHECK(r.differential_matches);
  CHECK(r.differential_nonzero);
  CHECK(r.page_dims == std::vector<std::size_t>{1, 1});
  CHECK(spectral_page_dim(b, 3, 2, 2) == 0);  // t is hit by d_2
  CHECK(spectral_page_dim(b, 1, 2, 2) == 1);
}

TEST_CASE("staircase of length 1 is the total differential") {
  const Prime p(3);
  Bicomplex b(p, 2, 2);
  b.set_dim(0, 0, 1);
  b.set_dim(1, 0, 1);
  b.set_dim(0, 1, 1);
  b.set_horizontal(0, 0, FpMatrix::identity(p, 1));
  const auto r = staircase_check(b, 0, 0, {FpVector(p, std::vector<Scalar>{2})});
  CHECK(r.total_identity);
  CHECK(r.differential_matches);
  CHECK(r.differential_nonzero);
  const auto z = staircase_check(b, 0, 0, {FpVector(p, std::vector<Scalar>{0})});
  CHECK(z.ok());
  CHECK_FALSE(z.differential_nonzero);
}

TEST_CASE("planted staircases of length up to 4") {
  std::mt19937 rng(7);
  for (std::uint32_t pv : {2u, 3u})
    for (int n = 1; n <= 4; ++n)
      for (int rep = 0; rep < 5; ++rep) {
        auto ps = testing::planted_staircase(rng, Prime(pv), n);
        REQUIRE(ps.b.check().ok);
        const auto r = staircase_check(ps.b, ps.i, ps.j, ps.chain);
        CHECK(r.total_identity);
        CHECK(r.applicable);
        CHECK(r.survives);
        CHECK(r.differential_matches);
        CHECK(r.differential_nonzero);
      }
}

TEST_CASE("broken staircase names the first failing step") {
  std::mt19937 rng(11);
  auto ps = testing::planted_staircase(rng, Prime(2), 3, false);
  ps.chain[2] = FpVector(Prime(2), ps.chain[2].size());
  try {
    staircase_check(ps.b, ps.i, ps.j, ps.chain);
    FAIL("expected NotAStaircase");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotAStaircase);
    CHECK(std::string(e.what()).find("s = 2") != std::string::npos);
  }
}

TEST_CASE("report JSON shape") {
  auto a = make(2, {{"x", 2}, {"y", 2}}, {"x*y"}, {}, 6);
  const auto j = sullivan_report(a, 1);
  CHECK(j["stages"].size() == 2);
  CHECK(j["stages"][1]["generators"][0].contains("d"));
  CHECK(j["certified_through"] == 5);
}
