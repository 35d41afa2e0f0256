#include "obstrukt/cup1.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include "obstrukt/json_io.hpp"
#include "obstrukt/polystring.hpp"

namespace obstrukt::cup1 {

using Json = nlohmann::ordered_json;

// ---- ordering and polynomial arithmetic ----

int compare(const Word& a, const Word& b) {
  if (a.gens != b.gens) return a.gens < b.gens ? -1 : 1;
  if (a.tail.size() != b.tail.size()) return a.tail.size() < b.tail.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.tail.size(); ++i)
    if (int c = compare(a.tail[i], b.tail[i])) return c;
  return 0;
}

int compare(const Mono& a, const Mono& b) {
  const std::size_t n = std::min(a.words.size(), b.words.size());
  for (std::size_t i = 0; i < n; ++i)
    if (int c = compare(a.words[i], b.words[i])) return c;
  if (a.words.size() == b.words.size()) return 0;
  return a.words.size() < b.words.size() ? -1 : 1;
}

void toggle(Poly& p, const Mono& m) {
  auto it = p.find(m);
  if (it == p.end())
    p.insert(m);
  else
    p.erase(it);
}

void add_to(Poly& acc, const Poly& other) {
  for (const auto& m : other) toggle(acc, m);
}

namespace {

Mono concat(const Mono& a, const Mono& b) {
  Mono m = a;
  m.words.insert(m.words.end(), b.words.begin(), b.words.end());
  return m;
}

Mono single(Word w) {
  Mono m;
  m.words.push_back(std::move(w));
  return m;
}


}  // namespace

// ---- calculus ----

Calculus::Calculus(std::vector<Cup1Generator> gens, Mode mode) : gens_(std::move(gens)), mode_(mode) {
  for (std::size_t i = 0; i < gens_.size(); ++i) {
    if (gens_[i].degree < 1) throw Error(ErrorCode::InvalidArgument, "generator " + gens_[i].name + " must have positive degree");
    for (std::size_t j = 0; j < i; ++j)
      if (gens_[j].name == gens_[i].name) throw Error(ErrorCode::ParseError, "duplicate generator " + gens_[i].name);
  }
}

std::optional<int> Calculus::index(const std::string& name) const {
  for (std::size_t i = 0; i < gens_.size(); ++i)
    if (gens_[i].name == name) return static_cast<int>(i);
  return std::nullopt;
}

void Calculus::set_caps(std::optional<Weight> max_weight, std::optional<int> max_degree) {
  max_weight_ = max_weight;
  max_degree_ = max_degree;
}

void Calculus::set_differential(const std::string& gen, const std::string& text) {
  auto i = index(gen);
  if (!i) throw Error(ErrorCode::ParseError, "differential of unknown generator " + gen);
  Poly v = parse(text);
  for (const auto& m : v)
    if (degree(m) != gens_[*i].degree + 1)
      throw Error(ErrorCode::IllFormedDifferential, "d" + gen + " = " + text + " is not of degree " +
                                                        std::to_string(gens_[*i].degree + 1));
  differential_[*i] = std::move(v);
}

void Calculus::set_alias(const std::string& name, const std::string& text) {
  if (index(name)) throw Error(ErrorCode::ParseError, "alias " + name + " shadows a generator");
  aliases_[name] = parse(text);
}

int Calculus::degree(const Mono& m) const {
  int deg = 0;
  for (const auto& w : m.words) {
    for (int g : w.gens) deg += gens_[g].degree;
    deg -= static_cast<int>(w.gens.size()) - 1;
    for (const auto& t : w.tail) deg += degree(t) - 1;
  }
  return deg;
}

namespace {

void accumulate(Weight& acc, const Weight& w) {
  if (acc.size() < w.size()) acc.resize(w.size(), 0);
  for (std::size_t i = 0; i < w.size(); ++i) acc[i] += w[i];
}

}  // namespace

Weight Calculus::weight(const Mono& m) const {
  Weight out;
  for (const auto& w : m.words) {
    for (int g : w.gens) accumulate(out, gens_[g].weight);
    for (const auto& t : w.tail) accumulate(out, weight(t));
  }
  return out;
}

bool Calculus::contains_generator(const Mono& m, int gen) const {
  for (const auto& w : m.words) {
    if (std::find(w.gens.begin(), w.gens.end(), gen) != w.gens.end()) return true;
    for (const auto& t : w.tail)
      if (contains_generator(t, gen)) return true;
  }
  return false;
}

bool Calculus::has_cup1(const Mono& m) const {
  for (const auto& w : m.words)
    if (w.gens.size() > 1 || !w.tail.empty()) return true;
  return false;
}

int Calculus::cup1_length(const Mono& m) const {
  int best = 0;
  for (const auto& w : m.words) {
    best = std::max(best, static_cast<int>(w.gens.size() + w.tail.size()));
    for (const auto& t : w.tail) best = std::max(best, cup1_length(t));
  }
  return best;
}

Poly Calculus::keep(Mono m) const {
  if (max_weight_) {
    const Weight w = weight(m);
    for (std::size_t i = 0; i < std::min(w.size(), max_weight_->size()); ++i)
      if (w[i] > (*max_weight_)[i]) return {};
  }
  if (max_degree_ && degree(m) > *max_degree_)
    throw Error(ErrorCode::CapExceeded, "monomial " + to_string(m) + " above degree " + std::to_string(*max_degree_));
  return {std::move(m)};
}

Poly Calculus::generator(int i) const {
  Word w;
  w.gens.push_back(i);
  return keep(single(std::move(w)));
}

Poly Calculus::cup(const Poly& a, const Poly& b) const {
  Poly out;
  for (const auto& x : a)
    for (const auto& y : b) add_to(out, keep(concat(x, y)));
  return out;
}

Poly Calculus::cup1(const Poly& a, const Poly& b) const {
  Poly out;
  for (const auto& x : a)
    for (const auto& y : b) add_to(out, cup1_mono(x, y));
  return out;
}

// (U * W) cup1 M = U * (W cup1 M) + (U cup1 M) * W
Poly Calculus::cup1_mono(const Mono& a, const Mono& b) const {
  if (a.words.empty() || b.words.empty()) return {};
  if (a.words.size() >= 2) {
    Mono u = a;
    Mono w = single(u.words.back());
    u.words.pop_back();
    Poly out;
    for (const auto& m : cup1_mono(w, b)) add_to(out, keep(concat(u, m)));
    for (const auto& m : cup1_mono(u, b)) add_to(out, keep(concat(m, w)));
    return out;
  }
  if (mode_ == Mode::Strict) {
    if (b.words.size() >= 2) return cup1_mono(b, a);
    Word w;
    w.gens = a.words[0].gens;
    w.gens.insert(w.gens.end(), b.words[0].gens.begin(), b.words[0].gens.end());
    std::sort(w.gens.begin(), w.gens.end());
    return keep(single(std::move(w)));
  }
  return cup1_word(a.words[0], b);
}

Poly Calculus::cup1_word(const Word& w, const Mono& b) const {
  if (!w.tail.empty()) {
    // g1 cup1 ... cup1 gk cup1 P with P a product: reassociate onto P first
    Word head{w.gens, {}};
    Poly out;
    for (const auto& q : cup1_mono(w.tail[0], b)) add_to(out, cup1_word(head, q));
    return out;
  }
  Word r{w.gens, {}};
  if (b.words.size() == 1) {
    r.gens.insert(r.gens.end(), b.words[0].gens.begin(), b.words[0].gens.end());
    r.tail = b.words[0].tail;
  } else {
    r.tail.push_back(b);
  }
  return keep(single(std::move(r)));
}

Poly Calculus::d(const Poly& a) const {
  Poly out;
  for (const auto& m : a) add_to(out, d(m));
  return out;
}

Poly Calculus::d(const Mono& m) const {
  Poly out;
  for (std::size_t i = 0; i < m.words.size(); ++i) {
    Mono before, after;
    before.words.assign(m.words.begin(), m.words.begin() + static_cast<std::ptrdiff_t>(i));
    after.words.assign(m.words.begin() + static_cast<std::ptrdiff_t>(i) + 1, m.words.end());
    for (const auto& x : d_word(m.words[i])) add_to(out, keep(concat(concat(before, x), after)));
  }
  return out;
}

// d(g cup1 R) = dg cup1 R + g cup1 dR + g*R + R*g
Poly Calculus::d_word(const Word& w) const {
  const int g = w.gens[0];
  if (w.gens.size() == 1 && w.tail.empty()) {
    auto it = differential_.find(g);
    return it == differential_.end() ? Poly{} : it->second;
  }
  Mono rest;
  if (w.gens.size() >= 2)
    rest = single(Word{std::vector<int>(w.gens.begin() + 1, w.gens.end()), w.tail});
  else
    rest = w.tail[0];
  const Poly gp = generator(g);
  const Poly rp = {rest};
  Poly out = cup1(d(gp), rp);
  add_to(out, cup1(gp, d(rest)));
  add_to(out, cup(gp, rp));
  add_to(out, cup(rp, gp));
  return out;
}

TermPtr Term::generator(int g) {
  auto t = std::make_shared<Term>();
  t->gen = g;
  return t;
}

TermPtr Term::node(Op op, TermPtr l, TermPtr r) {
  auto t = std::make_shared<Term>();
  t->op = op;
  t->left = std::move(l);
  t->right = std::move(r);
  return t;
}

Poly Calculus::normalize(const Term& t) const {
  switch (t.op) {
    case Term::Op::Gen: return generator(t.gen);
    case Term::Op::Cup: return cup(normalize(*t.left), normalize(*t.right));
    case Term::Op::Cup1: return cup1(normalize(*t.left), normalize(*t.right));
  }
  return {};
}

Poly Calculus::normalize_outermost(const Term& t) const {
  using Op = Term::Op;
  if (t.op == Op::Gen) return generator(t.gen);
  if (t.op == Op::Cup) {
    if (t.left->op == Op::Cup)  // (uv)w -> u(vw)
      return normalize_outermost(*Term::node(Op::Cup, t.left->left, Term::node(Op::Cup, t.left->right, t.right)));
    return cup(normalize_outermost(*t.left), normalize_outermost(*t.right));
  }
  const Term& l = *t.left;
  if (l.op == Op::Cup) {
    Poly out = normalize_outermost(*Term::node(Op::Cup, l.left, Term::node(Op::Cup1, l.right, t.right)));
    add_to(out, normalize_outermost(*Term::node(Op::Cup, Term::node(Op::Cup1, l.left, t.right), l.right)));
    return out;
  }
  if (l.op == Op::Cup1)
    return normalize_outermost(*Term::node(Op::Cup1, l.left, Term::node(Op::Cup1, l.right, t.right)));
  if (mode_ == Mode::Strict && t.right->op == Op::Cup)
    return normalize_outermost(*Term::node(Op::Cup1, t.right, t.left));
  return cup1(generator(l.gen), normalize_outermost(*t.right));
}

int Calculus::degree(const Term& t) const {
  switch (t.op) {
    case Term::Op::Gen: return gens_[t.gen].degree;
    case Term::Op::Cup: return degree(*t.left) + degree(*t.right);
    case Term::Op::Cup1: return degree(*t.left) + degree(*t.right) - 1;
  }
  return 0;
}

std::string Calculus::to_string(const Term& t) const {
  switch (t.op) {
    case Term::Op::Gen: return gens_[t.gen].name;
    case Term::Op::Cup: return "(" + to_string(*t.left) + "*" + to_string(*t.right) + ")";
    case Term::Op::Cup1: return "cup1(" + to_string(*t.left) + ", " + to_string(*t.right) + ")";
  }
  return {};
}

Poly Calculus::from_parsed(const void* raw) const {
  const auto& p = *static_cast<const poly::Poly*>(raw);
  Poly out;
  for (const auto& term : p.terms) {
    if (term.coeff % 2 == 0) continue;
    Poly acc{Mono{}};
    for (const auto& f : term.factors) {
      Poly base;
      switch (f.kind) {
        case poly::Factor::Kind::Name:
          if (auto i = index(f.name)) {
            base = generator(*i);
          } else if (auto it = aliases_.find(f.name); it != aliases_.end()) {
            base = it->second;
          } else {
            throw poly::ParseError(f.column, "unknown generator " + f.name);
          }
          break;
        case poly::Factor::Kind::Cup1:
          base = cup1(from_parsed(&f.args[0]), from_parsed(&f.args[1]));
          break;
        case poly::Factor::Kind::Group:
          base = from_parsed(&f.args[0]);
          break;
      }
      for (unsigned e = 0; e < f.exponent; ++e) acc = cup(acc, base);
    }
    add_to(out, acc);
  }
  return out;
}

Poly Calculus::parse(const std::string& text) const {
  const poly::Poly p = poly::parse(text, {.allow_cup1 = true});
  return from_parsed(&p);
}

std::string Calculus::word_string(const Word& w) const {
  std::vector<std::string> parts;
  for (int g : w.gens) parts.push_back(gens_[g].name);
  for (const auto& t : w.tail) parts.push_back(to_string(t));
  std::string s = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) s = "cup1(" + parts[i] + ", " + s + ")";
  return s;
}

std::string Calculus::to_string(const Mono& m) const {
  if (m.words.empty()) return "1";
  std::string s;
  for (std::size_t i = 0; i < m.words.size(); ++i) s += (i ? "*" : "") + word_string(m.words[i]);
  return s;
}

std::string Calculus::to_string(const Poly& p) const {
  if (p.empty()) return "0";
  std::string s;
  for (const auto& m : p) s += (s.empty() ? "" : " + ") + to_string(m);
  return s;
}

// ---- the Frobenius cocycle ----

CocycleReport verify_frobenius_cocycle(Mode mode, bool perturbed) {
  std::vector<Cup1Generator> gens = {{"a", 2, {}}, {"b", 2, {}}, {"c", 3, {}}};
  std::vector<std::pair<std::string, std::string>> terms = {{"c*c", ""}, {"cup1(c, a*b)", ""}};
  if (mode == Mode::Lax) {
    gens.push_back({"K", 6, {}});
    if (!perturbed) terms.push_back({"K", "cup1(a*b, a*b)"});
  } else {
    gens.push_back({"Kp", 2, {}});
    gens.push_back({"Lp", 2, {}});
    if (!perturbed) {
      terms.push_back({"a*a*Kp", ""});
      terms.push_back({"Lp*b*b", ""});
    }
  }
  Calculus calc(gens, mode);
  calc.set_differential("c", "a*b");
  if (mode == Mode::Lax) {
    calc.set_differential("K", "cup1(a*b, a*b)");
  } else {
    calc.set_differential("Kp", "cup1(b, b)");
    calc.set_differential("Lp", "cup1(a, a)");
  }

  CocycleReport r;
  r.log.push_back(std::string(mode == Mode::Lax ? "lax" : "strict") + " calculus, dc = a*b" +
                  (mode == Mode::Lax ? (perturbed ? "" : ", dK = cup1(a*b, a*b)")
                                     : (perturbed ? "" : ", dKp = cup1(b, b), dLp = cup1(a, a)")));
  std::string expr;
  for (const auto& [t, _] : terms) expr += (expr.empty() ? "" : " + ") + t;
  r.log.push_back("E = " + expr);

  std::map<Mono, int, MonoLess> occurrences;
  Poly total;
  for (const auto& [t, _] : terms) {
    const Poly dt = calc.d(calc.parse(t));
    r.log.push_back("d(" + t + ") = " + calc.to_string(dt));
    for (const auto& m : dt) ++occurrences[m];
    add_to(total, dt);
  }
  for (const auto& [m, k] : occurrences)
    if (k >= 2) r.log.push_back("cancels: " + calc.to_string(m) + " (" + std::to_string(k) + " occurrences)");
  r.remainder = total;
  r.remainder_text = calc.to_string(total);
  r.zero = total.empty();
  r.log.push_back("d(E) = " + r.remainder_text);
  return r;
}

Json verify_frobenius_cocycle_json(Mode mode, bool perturbed) {
  const CocycleReport r = verify_frobenius_cocycle(mode, perturbed);
  Json j;
  j["mode"] = mode == Mode::Lax ? "lax" : "strict";
  j["perturbed"] = perturbed;
  j["log"] = r.log;
  j["remainder"] = r.remainder_text;
  j["cocycle"] = r.zero;
  // the unperturbed expression must be a cocycle; the perturbed one must not be
  j["ok"] = perturbed ? !r.zero : r.zero;
  j["summary"] = std::string(r.zero ? "cocycle: d(E) = 0" : "not a cocycle: d(E) = " + r.remainder_text) +
                 (j["ok"].get<bool>() ? " [PASS]" : " [FAIL]");
  return j;
}

// ---- presentations ----

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::ParseError, msg); }

std::string string_field(const Json& j, const char* name) {
  if (!j.contains(name) || !j.at(name).is_string()) bad(std::string("field \"") + name + "\" must be a string");
  return j.at(name).get<std::string>();
}

int int_field(const Json& j, const char* name) {
  if (!j.contains(name) || !j.at(name).is_number_integer())
    bad(std::string("field \"") + name + "\" must be an integer");
  return j.at(name).get<int>();
}

Weight weight_field(const Json& j, const char* name) {
  const Json& v = j.at(name);
  Weight out;
  if (!v.is_array()) bad(std::string("field \"") + name + "\" must be an array of integers");
  for (const auto& x : v) {
    if (!x.is_number_integer()) bad(std::string("field \"") + name + "\" must be an array of integers");
    out.push_back(x.get<int>());
  }
  return out;
}

std::map<std::string, std::string> string_map(const Json& j, const char* name) {
  std::map<std::string, std::string> out;
  if (!j.contains(name)) return out;
  if (!j.at(name).is_object()) bad(std::string("field \"") + name + "\" must be an object");
  for (const auto& [k, v] : j.at(name).items()) {
    if (!v.is_string()) bad(std::string(name) + "." + k + " must be a string");
    out[k] = v.get<std::string>();
  }
  return out;
}

std::vector<std::string> string_list(const Json& j, const char* name) {
  std::vector<std::string> out;
  if (!j.contains(name)) return out;
  if (!j.at(name).is_array()) bad(std::string("field \"") + name + "\" must be an array");
  for (const auto& v : j.at(name)) {
    if (!v.is_string()) bad(std::string(name) + " entries must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

Cup1Presentation cup1_presentation_from_json(const Json& doc) {
  Cup1Presentation p;
  if (doc.contains("prime") && doc.at("prime") != 2) bad("cup-1 presentations are over F_2");
  if (!doc.contains("cup1") || !doc.at("cup1").is_object()) bad("missing object \"cup1\"");
  const Json& c = doc.at("cup1");
  p.degree_cap = int_field(doc, "degree_cap");
  if (c.contains("mode")) {
    const std::string m = string_field(c, "mode");
    if (m != "lax" && m != "strict") bad("field \"cup1.mode\" must be lax or strict");
    p.mode = m == "lax" ? Mode::Lax : Mode::Strict;
  }
  if (!doc.contains("generators") || !doc.at("generators").is_array()) bad("field \"generators\" must be an array");
  const Json weights = c.value("weights", Json::object());
  for (const auto& g : doc.at("generators")) {
    Cup1Generator gen{string_field(g, "name"), int_field(g, "degree"), {}};
    if (weights.contains(gen.name)) gen.weight = weight_field(weights, gen.name.c_str());
    p.generators.push_back(gen);
  }
  p.differential = string_map(doc, "differential");
  p.relations = string_list(doc, "relations");
  p.aliases = string_map(c, "aliases");
  if (c.contains("restrictions")) {
    for (const auto& r : c.at("restrictions"))
      p.restrictions.push_back({string_field(r, "generator"), string_list(r, "allowed")});
  }
  if (c.contains("max_weight")) p.max_weight = weight_field(c, "max_weight");
  if (c.contains("max_cup1_length")) p.max_cup1_length = int_field(c, "max_cup1_length");
  return p;
}

// ---- compiled algebras ----

namespace {

Calculus make_calculus(const Cup1Presentation& pres) {
  Calculus calc(pres.generators, pres.mode);
  calc.set_caps(pres.max_weight, std::nullopt);
  for (const auto& [name, text] : pres.aliases) calc.set_alias(name, text);
  for (const auto& [gen, text] : pres.differential) calc.set_differential(gen, text);
  return calc;
}

}  // namespace

void F2Echelon::reduce(Bits& v) const {
  for (std::size_t w = 0; w < v.size(); ++w)
    while (std::uint64_t bits = v[w]) {
      // lowest set bit at or after the current position that is a pivot
      std::uint64_t pending = bits;
      bool changed = false;
      while (pending) {
        const std::size_t col = w * 64 + static_cast<std::size_t>(std::countr_zero(pending));
        pending &= pending - 1;
        if (const auto r = pivot_row_[col]; r >= 0) {
          const Bits& row = rows_[static_cast<std::size_t>(r)];
          for (std::size_t k = w; k < v.size(); ++k) v[k] ^= row[k];
          changed = true;
          break;
        }
      }
      if (!changed) break;
    }
}

bool F2Echelon::insert(Bits v) {
  reduce(v);
  for (std::size_t w = 0; w < v.size(); ++w)
    if (v[w]) {
      const std::size_t col = w * 64 + static_cast<std::size_t>(std::countr_zero(v[w]));
      // keep rows reduced at the new pivot
      for (auto& row : rows_)
        if (row[col / 64] >> (col % 64) & 1)
          for (std::size_t k = 0; k < v.size(); ++k) row[k] ^= v[k];
      pivot_row_[col] = static_cast<std::ptrdiff_t>(rows_.size());
      rows_.push_back(std::move(v));
      return true;
    }
  return false;
}

F2Echelon::Bits Cup1Algebra::universe_bits(const Poly& p, int n) const {
  const Piece& pc = pieces_.at(static_cast<std::size_t>(n));
  F2Echelon::Bits v = pc.ideal.zero();
  for (const auto& m : p) {
    auto it = pc.index.find(m);
    if (it == pc.index.end())
      throw Error(ErrorCode::CapExceeded, "monomial " + calc_.to_string(m) + " outside the enumerated degree " +
                                              std::to_string(n));
    v[it->second / 64] ^= std::uint64_t{1} << (it->second % 64);
  }
  return v;
}

Cup1Algebra Cup1Algebra::compile(const Cup1Presentation& pres) {
  if (pres.degree_cap < 1) throw Error(ErrorCode::InvalidArgument, "degree_cap must be positive");
  Cup1Algebra alg(make_calculus(pres));
  const Calculus& calc = alg.calc_;
  const int cap = pres.degree_cap;
  alg.cap_ = cap;
  alg.pieces_.resize(static_cast<std::size_t>(cap) + 1);

  // Every normal monomial is a single term of a product (cup or cup-1) of two
  // lower ones, so enumerating degree by degree reaches all of them.
  auto insert = [&](const Mono& m) {
    const int n = calc.degree(m);
    if (n > cap) return;
    Piece& pc = alg.pieces_[static_cast<std::size_t>(n)];
    if (pc.index.count(m)) return;
    pc.index.emplace(m, pc.universe.size());
    pc.universe.push_back(m);
  };
  insert(Mono{});
  for (std::size_t g = 0; g < pres.generators.size(); ++g)
    for (const auto& m : calc.generator(static_cast<int>(g))) insert(m);
  for (int n = 1; n <= cap; ++n) {
    // products landing in degree n: cup from (i, n-i), cup-1 from (i, n+1-i);
    // cup-1 with a degree-1 factor stays in degree n, hence the fixpoint
    std::size_t before = 0;
    do {
    before = alg.pieces_[static_cast<std::size_t>(n)].universe.size();
    for (int i = 1; i < n + 1; ++i) {
      const auto& left = alg.pieces_[static_cast<std::size_t>(i)].universe;
      for (int j : {n - i, n + 1 - i}) {
        if (j < 1 || j > cap) continue;
        const std::vector<Mono> l = left;
        const std::vector<Mono> r = alg.pieces_[static_cast<std::size_t>(j)].universe;
        for (const auto& a : l)
          for (const auto& b : r) {
            const Poly prod = j == n - i ? calc.cup({a}, {b}) : calc.cup1({a}, {b});
            for (const auto& m : prod) insert(m);
          }
      }
    }
    } while (before != alg.pieces_[static_cast<std::size_t>(n)].universe.size());
  }
  // Column order: monomials with more cup-1 structure first, so that they
  // are eliminated in favour of plain products.
  for (auto& pc : alg.pieces_) {
    auto rank_of = [&](const Mono& m) {
      int r = 0;
      for (const auto& w : m.words) r += static_cast<int>(w.gens.size()) - 1 + 2 * static_cast<int>(w.tail.size());
      return r;
    };
    std::stable_sort(pc.universe.begin(), pc.universe.end(), [&](const Mono& a, const Mono& b) {
      const int ra = rank_of(a), rb = rank_of(b);
      if (ra != rb) return ra > rb;
      return compare(a, b) > 0;
    });
    pc.index.clear();
    for (std::size_t i = 0; i < pc.universe.size(); ++i) pc.index.emplace(pc.universe[i], i);
    pc.ideal = F2Echelon(pc.universe.size());
  }

  // ideal: relations, restricted monomials and the consequences of the
  // axioms that the normal form does not see, closed under both products
  std::vector<std::pair<int, Poly>> work;
  auto add_ideal = [&](const Poly& p) {
    if (p.empty()) return;
    const int n = calc.degree(*p.begin());
    for (const auto& m : p)
      if (calc.degree(m) != n) throw Error(ErrorCode::ParseError, "relation " + calc.to_string(p) + " is not homogeneous");
    if (n > cap) return;
    if (alg.pieces_[static_cast<std::size_t>(n)].ideal.insert(alg.universe_bits(p, n))) work.emplace_back(n, p);
  };
  for (const auto& r : pres.relations) add_ideal(calc.parse(r));
  std::vector<std::pair<int, Poly>> allowed;
  for (const auto& rs : pres.restrictions) {
    auto g = calc.index(rs.generator);
    if (!g) throw Error(ErrorCode::ParseError, "restriction on unknown generator " + rs.generator);
    Poly ok;
    for (const auto& a : rs.allowed) add_to(ok, calc.parse(a));
    allowed.emplace_back(*g, ok);
  }
  auto restricted = [&](const Mono& m) {
    if (pres.max_cup1_length && calc.cup1_length(m) > *pres.max_cup1_length) return true;
    for (const auto& [g, ok] : allowed)
      if (calc.contains_generator(m, g) && !ok.count(m)) return true;
    return false;
  };
  for (int n = 0; n <= cap; ++n)
    for (const auto& m : alg.pieces_[static_cast<std::size_t>(n)].universe)
      if (restricted(m)) add_ideal({m});

  // free factors for the derived identities
  std::vector<std::vector<Mono>> live(static_cast<std::size_t>(cap) + 1);
  for (int n = 1; n <= cap; ++n)
    for (const auto& m : alg.pieces_[static_cast<std::size_t>(n)].universe)
      if (!restricted(m)) live[static_cast<std::size_t>(n)].push_back(m);
  // Applying d to the two bracketings of u cup1 v cup1 w gives
  //   u cup1 (vw + wv) = (u cup1 v)w + w(u cup1 v) + (u cup1 w)v + v(u cup1 w),
  // and reassociating (uv) cup1 w cup1 q through the Hirsch identity gives
  //   (u cup1 q)(v cup1 w) = (u cup1 w)(v cup1 q).
  for (int i = 1; i <= cap; ++i)
    for (int j = 1; i + j <= cap; ++j)
      for (int k = j; i + j + k - 1 <= cap; ++k)
        for (const auto& u : live[static_cast<std::size_t>(i)]) {
          if (u.words.size() != 1) continue;
          const Poly up{u};
          for (const auto& v : live[static_cast<std::size_t>(j)])
            for (const auto& w : live[static_cast<std::size_t>(k)]) {
              if (j == k && compare(w, v) < 0) continue;
              const Poly vp{v}, wp{w};
              Poly r = calc.cup1(up, calc.cup(vp, wp));
              add_to(r, calc.cup1(up, calc.cup(wp, vp)));
              const Poly uv = calc.cup1(up, vp), uw = calc.cup1(up, wp);
              add_to(r, calc.cup(uv, wp));
              add_to(r, calc.cup(wp, uv));
              add_to(r, calc.cup(uw, vp));
              add_to(r, calc.cup(vp, uw));
              add_ideal(r);
            }
        }
  for (int i = 2; i <= cap; ++i)
    for (int j = 1; i + j - 1 <= cap; ++j)
      for (int k = 1; i + j + k - 2 <= cap; ++k)
        for (const auto& a : live[static_cast<std::size_t>(i)]) {
          if (a.words.size() < 2) continue;
          const Poly ap{a};
          for (const auto& b : live[static_cast<std::size_t>(j)])
            for (const auto& c : live[static_cast<std::size_t>(k)]) {
              const Poly bp{b}, cp{c};
              Poly r = calc.cup1(calc.cup1(ap, bp), cp);
              add_to(r, calc.cup1(ap, calc.cup1(bp, cp)));
              add_ideal(r);
            }
        }

  while (!work.empty()) {
    auto [n, r] = work.back();
    work.pop_back();
    for (int k = 1; k <= cap - n + 1; ++k)
      for (const auto& m : live[static_cast<std::size_t>(k)]) {
        const Poly mp{m};
        if (n + k <= cap) {
          add_ideal(calc.cup(r, mp));
          add_ideal(calc.cup(mp, r));
        }
        add_ideal(calc.cup1(r, mp));
        add_ideal(calc.cup1(mp, r));
      }
  }

  // d must preserve the ideal (checked below the top degree)
  for (int n = 0; n < cap; ++n) {
    const Piece& pc = alg.pieces_[static_cast<std::size_t>(n)];
    for (const auto& v : pc.ideal.rows()) {
      Poly r;
      for (std::size_t i = 0; i < pc.universe.size(); ++i)
        if (v[i / 64] >> (i % 64) & 1) r.insert(pc.universe[i]);
      const Poly dr = calc.d(r);
      F2Echelon::Bits dv = alg.universe_bits(dr, n + 1);
      alg.pieces_[static_cast<std::size_t>(n) + 1].ideal.reduce(dv);
      if (std::any_of(dv.begin(), dv.end(), [](std::uint64_t x) { return x != 0; }))
        throw Error(ErrorCode::IllFormedDifferential,
                    "d(" + calc.to_string(r) + ") = " + calc.to_string(dr) + " is not in the ideal");
    }
  }

  for (auto& pc : alg.pieces_)
    for (std::size_t i = 0; i < pc.universe.size(); ++i)
      if (!pc.ideal.is_pivot(i)) {
        pc.basis_cols.push_back(i);
        pc.basis.push_back(pc.universe[i]);
      }
  for (int n = 0; n <= cap; ++n) {
    Piece& pc = alg.pieces_[static_cast<std::size_t>(n)];
    const std::size_t next = n < cap ? alg.pieces_[static_cast<std::size_t>(n) + 1].basis.size() : 0;
    pc.d = FpMatrix(Prime(2), next, pc.basis.size());
    if (n == cap) continue;
    for (std::size_t j = 0; j < pc.basis.size(); ++j) {
      const FpVector col = alg.reduce(calc.d(pc.basis[j]), n + 1);
      for (std::size_t i = 0; i < next; ++i) pc.d(i, j) = col[i];
    }
  }
  for (int n = 0; n < cap; ++n) {
    Piece& pc = alg.pieces_[static_cast<std::size_t>(n)];
    Subspace z = kernel(pc.d);
    Subspace b = n == 0 ? Subspace(Prime(2), pc.basis.size()) : image(alg.pieces_[static_cast<std::size_t>(n) - 1].d);
    pc.h.emplace(std::move(b), std::move(z));
  }
  return alg;
}

std::size_t Cup1Algebra::dim(int n) const {
  if (n < 0 || n > cap_) return 0;
  return pieces_[static_cast<std::size_t>(n)].basis.size();
}

std::size_t Cup1Algebra::total_dim() const {
  std::size_t t = 0;
  for (const auto& pc : pieces_) t += pc.basis.size();
  return t;
}

const std::vector<Mono>& Cup1Algebra::basis(int n) const { return pieces_.at(static_cast<std::size_t>(n)).basis; }

FpVector Cup1Algebra::reduce(const Poly& p, int n) const {
  const Piece& pc = pieces_.at(static_cast<std::size_t>(n));
  F2Echelon::Bits full = universe_bits(p, n);
  pc.ideal.reduce(full);
  FpVector out(Prime(2), pc.basis.size());
  for (std::size_t i = 0; i < pc.basis_cols.size(); ++i) out[i] = full[pc.basis_cols[i] / 64] >> (pc.basis_cols[i] % 64) & 1;
  return out;
}

Poly Cup1Algebra::lift(const FpVector& v, int n) const {
  Poly out;
  const auto& b = basis(n);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i]) out.insert(b[i]);
  return out;
}

const FpMatrix& Cup1Algebra::d_matrix(int n) const { return pieces_.at(static_cast<std::size_t>(n)).d; }

std::size_t Cup1Algebra::h_dim(int n) const {
  if (n < 0 || n >= cap_) throw Error(ErrorCode::CapExceeded, "H^" + std::to_string(n) + " is not certified");
  return pieces_[static_cast<std::size_t>(n)].h->dim();
}

std::vector<Poly> Cup1Algebra::h_representatives(int n) const {
  h_dim(n);
  std::vector<Poly> out;
  for (const auto& r : pieces_[static_cast<std::size_t>(n)].h->representatives()) out.push_back(lift(r, n));
  return out;
}

FpVector Cup1Algebra::h_project(const FpVector& cocycle, int n) const {
  h_dim(n);
  return pieces_[static_cast<std::size_t>(n)].h->project(cocycle);
}

IdentityReport Cup1Algebra::verify_identities() const {
  IdentityReport rep;
  const Calculus& c = calc_;
  // operations on reduced representatives
  auto deg = [&](const Poly& p) { return p.empty() ? -1 : c.degree(*p.begin()); };
  auto red = [&](const Poly& p) -> Poly {
    const int n = deg(p);
    if (n < 0 || n > cap_) return {};
    return lift(reduce(p, n), n);
  };
  auto cup = [&](const Poly& a, const Poly& b) { return deg(a) + deg(b) > cap_ ? Poly{} : red(c.cup(a, b)); };
  auto cup1 = [&](const Poly& a, const Poly& b) { return deg(a) + deg(b) - 1 > cap_ ? Poly{} : red(c.cup1(a, b)); };
  auto dd = [&](const Poly& a) { return red(c.d(a)); };
  auto sum = [](std::initializer_list<Poly> ps) {
    Poly out;
    for (const auto& p : ps) add_to(out, p);
    return out;
  };
  auto fail = [&](bool& flag, const std::string& what) {
    if (flag && rep.witness.empty()) rep.witness = what;
    flag = false;
  };

  for (int n = 0; n + 2 <= cap_; ++n)
    if (!(pieces_[static_cast<std::size_t>(n) + 1].d * pieces_[static_cast<std::size_t>(n)].d).is_zero())
      fail(rep.d_squared_zero, "d^2 != 0 on degree " + std::to_string(n));

  std::vector<Poly> all;
  for (int n = 1; n <= cap_; ++n)
    for (const auto& m : basis(n)) all.push_back({m});
  for (const auto& u : all)
    for (const auto& v : all) {
      const int duv = deg(u) + deg(v);
      if (duv <= cap_) {
        const Poly lhs = sum({dd(cup1(u, v))});
        const Poly rhs = sum({cup1(dd(u), v), cup1(u, dd(v)), cup(u, v), cup(v, u)});
        if (duv < cap_ && lhs != rhs)
          fail(rep.steenrod, "d(cup1(" + c.to_string(u) + ", " + c.to_string(v) + "))");
        if (duv + 1 <= cap_ && dd(cup(u, v)) != sum({cup(dd(u), v), cup(u, dd(v))}))
          fail(rep.steenrod, "d(" + c.to_string(u) + "*" + c.to_string(v) + ")");
      }
      if (duv - 1 > cap_) continue;
      for (const auto& w : all) {
        const int total = duv + deg(w);
        if (total - 2 > cap_) continue;
        const std::string at = c.to_string(u) + ", " + c.to_string(v) + ", " + c.to_string(w);
        if (total <= cap_ && cup(cup(u, v), w) != cup(u, cup(v, w))) fail(rep.cup_associative, "cup on " + at);
        if (total - 1 <= cap_ &&
            cup1(cup(u, v), w) != sum({cup(u, cup1(v, w)), cup(cup1(u, w), v)}))
          fail(rep.hirsch, "Hirsch on " + at);
        if (cup1(cup1(u, v), w) != cup1(u, cup1(v, w))) fail(rep.cup1_associative, "cup-1 on " + at);
      }
    }
  return rep;
}

std::vector<Poly> Cup1Algebra::ideal_basis(int n) const {
  const Piece& pc = pieces_.at(static_cast<std::size_t>(n));
  std::vector<Poly> out;
  for (const auto& v : pc.ideal.rows()) {
    Poly r;
    for (std::size_t i = 0; i < pc.universe.size(); ++i)
      if (v[i / 64] >> (i % 64) & 1) r.insert(pc.universe[i]);
    out.push_back(std::move(r));
  }
  return out;
}

// ---- associative comparison maps ----

namespace {

class WordMap {
 public:
  WordMap(const Calculus& calc, const AlgebraPtr& target, const AssocMap& f) : calc_(calc), tgt_(target) {
    for (const auto& [key, value] : f.images) {
      const Poly k = calc.parse(key);
      if (k.size() != 1 || k.begin()->words.size() != 1)
        throw Error(ErrorCode::NotAMorphism, "image key " + key + " is not a single word");
      const int deg = calc.degree(*k.begin());
      Element e = target->parse(value, deg);
      if (e.degree != deg)
        throw Error(ErrorCode::NotAMorphism, key + " has degree " + std::to_string(deg) + " but " + value + " has degree " +
                                                 std::to_string(e.degree));
      images_.emplace(k.begin()->words[0], std::move(e));
    }
  }

  Element apply(const Mono& m) const {
    Element acc = tgt_->one();
    for (const auto& w : m.words) {
      auto it = images_.find(w);
      if (it == images_.end()) return tgt_->zero(calc_.degree(m));
      acc = tgt_->multiply(acc, it->second);
    }
    return acc;
  }

  Element apply(const Poly& p, int n) const {
    Element acc = tgt_->zero(n);
    for (const auto& m : p) acc = tgt_->add(acc, apply(m));
    return acc;
  }

 private:
  struct WordLess {
    bool operator()(const Word& a, const Word& b) const { return compare(a, b) < 0; }
  };
  const Calculus& calc_;
  AlgebraPtr tgt_;
  std::map<Word, Element, WordLess> images_;
};

}  // namespace

AssocReport assoc_quasi_iso_check(const Cup1Algebra& c, const AlgebraPtr& target, const AssocMap& f) {
  if (target->prime().value() != 2) throw Error(ErrorCode::ModulusMismatch, "target must be over F_2");
  const WordMap g(c.calculus(), target, f);
  const Calculus& calc = c.calculus();
  const int top = std::min(c.cap(), target->cap() - 1);
  AssocReport rep;
  rep.kills_ideal = rep.multiplicative = rep.chain_map = rep.quasi_iso = true;
  auto note = [&](bool& flag, const std::string& what) {
    if (flag && rep.witness.empty()) rep.witness = what;
    flag = false;
  };

  for (int n = 0; n <= top; ++n)
    for (const auto& r : c.ideal_basis(n))
      if (!g.apply(r, n).is_zero()) note(rep.kills_ideal, "relation " + calc.to_string(r) + " is not sent to 0");

  for (int n = 0; n <= top; ++n)
    for (const auto& u : c.basis(n))
      for (int m = 0; n + m <= top; ++m)
        for (const auto& v : c.basis(m)) {
          const Poly uv = c.lift(c.reduce(calc.cup({u}, {v}), n + m), n + m);
          if (!(g.apply(uv, n + m) == target->multiply(g.apply(u), g.apply(v))))
            note(rep.multiplicative, "product " + calc.to_string(u) + "*" + calc.to_string(v));
        }

  for (int n = 0; n < top; ++n)
    for (const auto& u : c.basis(n)) {
      const Poly du = c.lift(c.reduce(calc.d(u), n + 1), n + 1);
      if (!(g.apply(du, n + 1) == target->differential(g.apply(u))))
        note(rep.chain_map, "d(" + calc.to_string(u) + ")");
    }

  CohomologyRing h(target);
  for (int n = 0; n < std::min(c.cap(), h.top() + 1); ++n) {
    const auto reps = c.h_representatives(n);
    std::vector<FpVector> cols;
    for (const auto& r : reps) {
      const Element e = g.apply(r, n);
      if (!h.is_cocycle(e)) {
        cols.clear();
        break;
      }
      cols.push_back(h.project(e));
    }
    bool iso = reps.size() == h.dim(n) && cols.size() == reps.size();
    if (iso && !cols.empty()) iso = rank(FpMatrix::from_columns(Prime(2), h.dim(n), cols)) == h.dim(n);
    if (!iso) {
      rep.failing_degrees.push_back(n);
      note(rep.quasi_iso, "H^" + std::to_string(n) + ": dim " + std::to_string(reps.size()) + " -> " +
                              std::to_string(h.dim(n)) + " not bijective");
    }
  }
  return rep;
}

// ---- reports ----

namespace {

Json algebra_json(const Cup1Algebra& alg) {
  const Calculus& calc = alg.calculus();
  Json j;
  j["degree_cap"] = alg.cap();
  j["certified_through"] = alg.cap() - 1;
  j["total_dim"] = alg.total_dim();
  j["degrees"] = Json::array();
  for (int n = 0; n <= alg.cap(); ++n) {
    Json d;
    d["degree"] = n;
    d["dim"] = alg.dim(n);
    d["basis"] = Json::array();
    for (const auto& m : alg.basis(n)) d["basis"].push_back(calc.to_string(m));
    if (n < alg.cap()) {
      d["h_dim"] = alg.h_dim(n);
      d["h_representatives"] = Json::array();
      for (const auto& r : alg.h_representatives(n)) d["h_representatives"].push_back(calc.to_string(r));
    }
    j["degrees"].push_back(d);
  }
  return j;
}

Json identities_json(const IdentityReport& r) {
  Json j;
  j["d_squared_zero"] = r.d_squared_zero;
  j["hirsch"] = r.hirsch;
  j["steenrod"] = r.steenrod;
  j["cup_associative"] = r.cup_associative;
  j["cup1_associative"] = r.cup1_associative;
  if (!r.witness.empty()) j["witness"] = r.witness;
  return j;
}

std::string yes(bool b) { return b ? "yes" : "no"; }

}  // namespace

Json compile_report(const Json& doc) {
  const Cup1Algebra alg = Cup1Algebra::compile(cup1_presentation_from_json(doc));
  const IdentityReport ids = alg.verify_identities();
  Json j = algebra_json(alg);
  j["identities"] = identities_json(ids);
  std::vector<std::string> log;
  for (const auto& d : j["degrees"]) {
    std::string line = "degree " + std::to_string(d["degree"].get<int>()) + ": dim " +
                       std::to_string(d["dim"].get<std::size_t>());
    if (d.contains("h_dim")) line += ", H dim " + std::to_string(d["h_dim"].get<std::size_t>());
    log.push_back(line);
    for (const auto& r : d.value("h_representatives", Json::array()))
      log.push_back("  class " + r.get<std::string>());
  }
  log.push_back("d^2 = 0: " + yes(ids.d_squared_zero) + ", Hirsch: " + yes(ids.hirsch) + ", Steenrod: " +
                yes(ids.steenrod) + ", cup associative: " + yes(ids.cup_associative) +
                ", cup-1 associative: " + yes(ids.cup1_associative));
  if (!ids.witness.empty()) log.push_back("first failure: " + ids.witness);
  j["log"] = log;
  j["ok"] = ids.ok();
  j["summary"] = "total dimension " + std::to_string(alg.total_dim()) + (ids.ok() ? " [PASS]" : " [FAIL]");
  return j;
}

Json assoc_check_report(const Json& doc, const std::filesystem::path& base) {
  const Cup1Algebra alg = Cup1Algebra::compile(cup1_presentation_from_json(doc));
  const Json& c = doc.at("cup1");
  if (!c.contains("maps") || !c.at("maps").is_array()) throw Error(ErrorCode::ParseError, "field \"cup1.maps\" must be an array");
  Json j;
  j["maps"] = Json::array();
  std::vector<std::string> log;
  bool ok = true;
  for (const auto& m : c.at("maps")) {
    const std::string name = string_field(m, "name");
    const std::string target = string_field(m, "target");
    AssocMap f;
    for (const auto& [k, v] : m.at("images").items()) f.images[k] = v.get<std::string>();
    const AlgebraPtr tgt = DgAlgebra::compile(load_presentation(base / target));
    const AssocReport r = assoc_quasi_iso_check(alg, tgt, f);
    Json mj;
    mj["name"] = name;
    mj["target"] = target;
    mj["chain_map"] = r.chain_map;
    mj["multiplicative"] = r.multiplicative;
    mj["kills_ideal"] = r.kills_ideal;
    mj["quasi_iso"] = r.quasi_iso;
    mj["failing_degrees"] = r.failing_degrees;
    if (!r.witness.empty()) mj["witness"] = r.witness;
    j["maps"].push_back(mj);
    log.push_back(name + ": C -> " + target + ": chain map " + yes(r.chain_map) + ", multiplicative " +
                  yes(r.multiplicative) + ", well defined " + yes(r.kills_ideal) + ", quasi-isomorphism " +
                  yes(r.quasi_iso) + (r.witness.empty() ? "" : " (" + r.witness + ")"));
    ok = ok && r.ok();
  }
  j["log"] = log;
  j["ok"] = ok;
  j["summary"] = ok ? "all maps are associative quasi-isomorphisms [PASS]" : "[FAIL]";
  return j;
}

}  // namespace obstrukt::cup1
