#include "obstrukt/polystring.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace obstrukt::poly {
namespace {

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& opts) : s_(text), opts_(opts) {}

  Poly parse_all() {
    Poly p = parse_poly();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

 private:
  std::string_view s_;
  ParseOptions opts_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_ + 1, msg); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool accept(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= s_.size()) fail(std::string("expected '") + c + "' but input ended");
      fail(std::string("expected '") + c + "'");
    }
  }

  static bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }

  std::int64_t parse_int() {
    skip_ws();
    const std::size_t start = pos_;
    std::int64_t v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      if (v > (std::int64_t{1} << 40)) fail("integer too large");
      ++pos_;
    }
    if (pos_ == start) fail("expected integer");
    return v;
  }

  Poly parse_poly() {
    Poly p;
    bool negate = false;
    if (accept('-')) negate = true;
    else accept('+');
    while (true) {
      Term t = parse_term();
      if (negate) t.coeff = -t.coeff;
      p.terms.push_back(std::move(t));
      if (accept('+')) negate = false;
      else if (accept('-')) negate = true;
      else break;
    }
    return p;
  }

  Term parse_term() {
    skip_ws();
    Term t;
    t.column = pos_ + 1;
    if (pos_ >= s_.size()) fail("expected term but input ended");
    if (std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      t.coeff = parse_int();
      if (!accept('*')) return t;
    }
    t.factors.push_back(parse_factor());
    while (accept('*')) t.factors.push_back(parse_factor());
    return t;
  }

  unsigned parse_exponent() {
    if (!accept('^')) return 1;
    const std::int64_t e = parse_int();
    if (e < 1) fail("exponent must be positive");
    return static_cast<unsigned>(e);
  }

  Factor parse_factor() {
    skip_ws();
    Factor f;
    f.column = pos_ + 1;
    if (pos_ >= s_.size()) fail("expected factor but input ended");
    if (s_[pos_] == '(') {
      if (!opts_.allow_cup1) fail("parentheses are only allowed in cup1 expressions");
      ++pos_;
      f.kind = Factor::Kind::Group;
      f.args.push_back(parse_poly());
      expect(')');
      f.exponent = parse_exponent();
      return f;
    }
    if (!name_start(s_[pos_])) fail("expected generator name");
    const std::size_t start = pos_;
    while (pos_ < s_.size() && name_char(s_[pos_])) ++pos_;
    f.name = std::string(s_.substr(start, pos_ - start));
    if (f.name == "cup1" && peek('(')) {
      if (!opts_.allow_cup1) fail("cup1 is only allowed in cup1 blocks");
      ++pos_;
      f.kind = Factor::Kind::Cup1;
      f.args.push_back(parse_poly());
      expect(',');
      f.args.push_back(parse_poly());
      expect(')');
      f.name.clear();
      return f;
    }
    f.exponent = parse_exponent();
    return f;
  }
};

void collect(const Poly& p, std::set<std::string>& out) {
  for (const auto& t : p.terms)
    for (const auto& f : t.factors) {
      if (f.kind == Factor::Kind::Name) out.insert(f.name);
      for (const auto& a : f.args) collect(a, out);
    }
}

}  // namespace

Poly parse(std::string_view text, const ParseOptions& options) {
  return Parser(text, options).parse_all();
}

std::vector<std::string> names(const Poly& p) {
  std::set<std::string> s;
  collect(p, s);
  return {s.begin(), s.end()};
}

std::string to_string(const Poly& p) {
  std::ostringstream os;
  for (std::size_t i = 0; i < p.terms.size(); ++i) {
    const Term& t = p.terms[i];
    std::int64_t c = t.coeff;
    if (i) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    c = c < 0 ? -c : c;
    if (t.factors.empty()) {
      os << c;
      continue;
    }
    if (c != 1) os << c << "*";
    for (std::size_t j = 0; j < t.factors.size(); ++j) {
      const Factor& f = t.factors[j];
      if (j) os << "*";
      switch (f.kind) {
        case Factor::Kind::Name: os << f.name; break;
        case Factor::Kind::Cup1: os << "cup1(" << to_string(f.args[0]) << ", " << to_string(f.args[1]) << ")"; break;
        case Factor::Kind::Group: os << "(" << to_string(f.args[0]) << ")"; break;
      }
      if (f.exponent != 1) os << "^" << f.exponent;
    }
  }
  if (p.terms.empty()) os << "0";
  return os.str();
}

}  // namespace obstrukt::poly
