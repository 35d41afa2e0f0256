#include <doctest.h>

#include <random>

#include "obstrukt/products.hpp"
#include "support/random_algebra.hpp"

using namespace obstrukt;

namespace {

AlgebraPtr make(std::uint32_t p, std::vector<Generator> gens, std::vector<std::string> rels,
                std::map<std::string, std::string> d, int cap) {
  return DgAlgebra::compile(Presentation{p, std::move(gens), std::move(rels), std::move(d), cap});
}

// Pairs of basis classes (plus their sum with the next basis class) whose product vanishes.
std::vector<std::pair<HClass, HClass>> zero_pairs(const CohomologyRing& h, int max_degree) {
  std::vector<HClass> cls;
  for (int n = 1; n <= std::min(max_degree, h.top()); ++n)
    for (std::size_t i = 0; i < h.dim(n); ++i) {
      cls.push_back(basis_class(h, n, i));
      if (i + 1 < h.dim(n)) cls.push_back({n, basis_class(h, n, i).coords + basis_class(h, n, i + 1).coords});
    }
  std::vector<std::pair<HClass, HClass>> out;
  for (const auto& a : cls)
    for (const auto& b : cls) {
      if (a.degree + b.degree > h.top()) continue;
      if (h.multiply(a.degree, a.coords, b.degree, b.coords).is_zero()) out.emplace_back(a, b);
    }
  return out;
}

}  // namespace

TEST_CASE("Massey product in a zero-differential algebra contains 0") {
  auto a = make(2, {{"x", 1}, {"y", 1}}, {"x*y", "x^2", "y^2"}, {}, 5);
  CohomologyRing h(a);
  auto s = massey_triple(h, parse_class(h, "x"), parse_class(h, "y"), parse_class(h, "x"));
  CHECK(s.contains_zero());
}

TEST_CASE("products require vanishing products") {
  auto a = make(2, {{"x", 1}, {"y", 1}}, {}, {}, 6);
  CohomologyRing h(a);
  try {
    frobenius_type1(h, parse_class(h, "x"), parse_class(h, "y"));
    FAIL("expected ProductsNonzero");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ProductsNonzero);
  }
  try {
    frobenius_type2(h, parse_class(h, "x"), parse_class(h, "y"));
    FAIL("expected OddPrimeRequired");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OddPrimeRequired);
  }
}

TEST_CASE("type 1 product detects a nontrivial Frobenius obstruction") {
  // dt = xy, t^2 = z: [t^2] = [z] and z is not in F(H^2) + x^2 Q + y^2 Q
  auto b = make(2, {{"x", 2}, {"y", 1}, {"t", 2}, {"z", 4}},
                {"t^2 + z", "t*z", "x*z", "y*z", "t^3", "t*x", "t*y", "y^2", "x^2*y"}, {{"t", "x*y"}}, 12);
  CohomologyRing h(b);
  auto s = frobenius_type1(h, parse_class(h, "x"), parse_class(h, "y"));
  CHECK(s.mode == ProductMode::Affine);
  CHECK(h.class_string(4, *s.representative) == "[z]");
  CHECK_FALSE(s.contains_zero());
  CHECK_FALSE(s.stated_indeterminacy->contains(*s.representative));
  auto oracle = bruteforce_oracle(h, {ProductKind::FrobeniusType1, {parse_class(h, "x"), parse_class(h, "y")}});
  CHECK(same_set(s, oracle));
  CHECK(same_set(higher_frobenius_type1(h, parse_class(h, "x"), parse_class(h, "y"), 2), s));
}

TEST_CASE("random F_2 algebras: products agree with the oracle") {
  std::mt19937 rng(2024);
  int algebras = 0, checks = 0;
  for (int trial = 0; trial < 200 && algebras < 20; ++trial) {
    AlgebraPtr a;
    try {
      a = DgAlgebra::compile(testing::random_presentation(rng));
    } catch (const Error&) {
      continue;
    }
    CohomologyRing h(a);
    bool used = false;
    for (const auto& [x, y] : zero_pairs(h, 3)) {
      for (int order : {2, 3}) {
        ProductQuery q{order == 2 ? ProductKind::FrobeniusType1 : ProductKind::HigherType1, {x, y}, order};
        ProductSet oracle;
        try {
          oracle = bruteforce_oracle(h, q, {1u << 14});
        } catch (const Error&) {
          continue;
        }
        const ProductSet s = compute_product(h, q);
        CHECK_MESSAGE(same_set(s, oracle), render(h, s), " vs ", render(h, oracle));
        ++checks;
        used = true;
      }
    }
    algebras += used;
  }
  CHECK(algebras >= 10);
  CHECK(checks >= 30);
}

TEST_CASE("random F_2 algebras: Massey products agree with the oracle") {
  std::mt19937 rng(77);
  int checks = 0;
  for (int trial = 0; trial < 100 && checks < 60; ++trial) {
    AlgebraPtr a;
    try {
      a = DgAlgebra::compile(testing::random_presentation(rng, {2, 2, 7}));
    } catch (const Error&) {
      continue;
    }
    CohomologyRing h(a);
    auto pairs = zero_pairs(h, 2);
    for (const auto& [x, y] : pairs)
      for (const auto& [y2, z] : pairs) {
        if (!(y2 == y) || x.degree + y.degree + z.degree - 1 > h.top()) continue;
        ProductQuery q{ProductKind::Massey, {x, y, z}};
        ProductSet oracle;
        try {
          oracle = bruteforce_oracle(h, q, {1u << 12});
        } catch (const Error&) {
          continue;
        }
        const ProductSet s = compute_product(h, q);
        CHECK_MESSAGE(same_set(s, oracle), render(h, s), " vs ", render(h, oracle));
        ++checks;
      }
  }
  CHECK(checks >= 20);
}

TEST_CASE("type 2 sweep agrees with the full oracle on F_3 toys") {
  std::mt19937 rng(9);
  int checks = 0;
  for (int trial = 0; trial < 100 && checks < 20; ++trial) {
    AlgebraPtr a;
    try {
      a = DgAlgebra::compile(testing::random_presentation(rng, {3, 2, 9}));
    } catch (const Error&) {
      continue;
    }
    CohomologyRing h(a);
    for (const auto& [x, y] : zero_pairs(h, 3)) {
      ProductQuery q{ProductKind::FrobeniusType2, {x, y}};
      ProductSet oracle;
      try {
        oracle = bruteforce_oracle(h, q, {3 * 3 * 3 * 3 * 3 * 3});
      } catch (const Error&) {
        continue;
      }
      const ProductSet s = compute_product(h, q);
      CHECK_MESSAGE(same_set(s, oracle), render(h, s), " vs ", render(h, oracle));
      ++checks;
    }
  }
  CHECK(checks >= 10);
}
