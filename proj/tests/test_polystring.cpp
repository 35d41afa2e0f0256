#include <doctest.h>

#include "obstrukt/polystring.hpp"

using namespace obstrukt;

TEST_CASE("basic polynomials") {
  auto p = poly::parse("x^2*y + 2*z - t");
  REQUIRE(p.terms.size() == 3);
  CHECK(p.terms[0].factors.size() == 2);
  CHECK(p.terms[0].factors[0].exponent == 2);
  CHECK(p.terms[1].coeff == 2);
  CHECK(p.terms[2].coeff == -1);
  CHECK(poly::names(p) == std::vector<std::string>{"t", "x", "y", "z"});
  CHECK(poly::to_string(p) == "x^2*y + 2*z - t");
}

TEST_CASE("constants and primes in names") {
  auto p = poly::parse("0");
  REQUIRE(p.terms.size() == 1);
  CHECK(p.terms[0].coeff == 0);
  auto q = poly::parse("x' * x_2");
  CHECK(poly::names(q) == std::vector<std::string>{"x'", "x_2"});
}

TEST_CASE("error columns") {
  auto column_of = [](const std::string& s, poly::ParseOptions o = {}) -> std::size_t {
    try {
      poly::parse(s, o);
    } catch (const poly::ParseError& e) {
      CHECK(e.code() == ErrorCode::ParseError);
      return e.column();
    }
    return 0;
  };
  CHECK(column_of("x + ") == 5);
  CHECK(column_of("x ^ y") == 5);
  CHECK(column_of("x $ y") == 3);
  CHECK(column_of("cup1(x, y)") == 5);
  CHECK(column_of("(x)") == 1);
  CHECK(column_of("cup1(x y)", {true}) == 8);
}

TEST_CASE("cup1 syntax") {
  poly::ParseOptions o{true};
  auto p = poly::parse("cup1(x*y, z) + (x + y)^2", o);
  REQUIRE(p.terms.size() == 2);
  CHECK(p.terms[0].factors[0].kind == poly::Factor::Kind::Cup1);
  CHECK(p.terms[1].factors[0].kind == poly::Factor::Kind::Group);
  CHECK(p.terms[1].factors[0].exponent == 2);
  CHECK(poly::to_string(p) == "cup1(x*y, z) + (x + y)^2");
}
