// obstrukt: command-line front end.
//
// Exit codes:
//   0  success
//   1  any other library error (message on stderr)
//   2  parse error in a presentation file, polystring or flag; unknown corpus entry
//   3  ill-formed differential or presentation
//   4  the products required by an operation do not vanish
//   5  --strict was given and the requested product is undefined,
//      or a verification reported a FAIL

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "obstrukt/corpus.hpp"
#include "obstrukt/cup1.hpp"
#include "obstrukt/json_io.hpp"
#include "obstrukt/products.hpp"
#include "obstrukt/sullivan.hpp"

using namespace obstrukt;

namespace {

int exit_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::ParseError: return 2;
    case ErrorCode::IllFormedDifferential:
    case ErrorCode::DegreeOverflow: return 3;
    case ErrorCode::ProductsNonzero: return 4;
    case ErrorCode::UnknownEntry: return 2;
    default: return 1;
  }
}

std::vector<std::string> split_classes(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// ---- text renderers: pure functions of the JSON reports ----

std::string text_cohomology(const Json& j) {
  std::ostringstream os;
  os << "prime " << j["prime"].get<int>() << ", cap " << j["degree_cap"].get<int>() << ", certified through degree "
     << j["certified_through"].get<int>() << "\n";
  os << "deg  dim A  dim H  representatives\n";
  for (const auto& d : j["degrees"]) {
    os << std::setw(3) << d["degree"].get<int>() << "  " << std::setw(5) << d["algebra_dim"].get<int>() << "  "
       << std::setw(5) << d["dim"].get<int>() << "  ";
    bool first = true;
    for (const auto& r : d["representatives"]) {
      os << (first ? "" : ", ") << r.get<std::string>();
      first = false;
    }
    os << "\n";
  }
  return os.str();
}

std::string text_classes(const Json& arr) {
  std::string s = "{";
  for (std::size_t i = 0; i < arr.size(); ++i) s += (i ? ", " : "") + arr[i]["class"].get<std::string>();
  return s + "}";
}

std::string text_product(const Json& j) {
  std::ostringstream os;
  os << j["mode"].get<std::string>() << " in degree " << j["degree"].get<int>();
  if (j.contains("representative")) os << "\n  representative: " << j["representative"]["class"].get<std::string>();
  if (j.contains("indeterminacy")) os << "\n  indeterminacy: span" << text_classes(j["indeterminacy"]);
  if (j.contains("stated_indeterminacy"))
    os << "\n  closed-form indeterminacy: span" << text_classes(j["stated_indeterminacy"]);
  if (j.contains("elements")) os << "\n  elements: " << text_classes(j["elements"]);
  os << "\n  contains 0: " << (j["contains_zero"].get<bool>() ? "yes" : "no");
  if (j["partial"].get<bool>()) os << "\n  partial: enumeration bound reached";
  if (j.contains("witness")) os << "\n  witness: " << j["witness"].get<std::string>();
  if (j.contains("strict")) {
    const Json& s = j["strict"];
    os << "\n  strictly defined: " << (s["strict"].get<bool>() ? "yes" : "no");
    if (s.contains("witness")) os << " (" << s["witness"].get<std::string>() << ")";
  }
  return os.str() + "\n";
}

std::string text_verify(const Json& j) {
  std::ostringstream os;
  for (const auto& e : j["entries"]) {
    os << e["id"].get<std::string>() << ": " << e["status"].get<std::string>() << "\n";
    for (const auto& c : e["claims"]) {
      os << "  [" << c["status"].get<std::string>() << "] " << c["id"].get<std::string>();
      if (c.contains("detail") && !c["detail"].get<std::string>().empty()) os << ": " << c["detail"].get<std::string>();
      os << "\n";
    }
  }
  os << "overall: " << j["status"].get<std::string>() << "\n";
  return os.str();
}

std::string text_list(const Json& j) {
  std::ostringstream os;
  for (const auto& e : j["entries"]) {
    os << e["id"].get<std::string>() << "  claims=" << e["claims"].get<int>();
    if (e["reconciled"].get<bool>()) os << "  reconciled";
    if (e["flagged"].get<bool>()) os << "  as-printed fails";
    os << "  " << e["title"].get<std::string>() << "\n";
  }
  return os.str();
}

std::string text_sullivan(const Json& j) {
  std::ostringstream os;
  for (const auto& st : j["stages"]) {
    os << "stage " << st["stage"].get<int>() << ": " << st["generators"].size() << " new generators";
    os << ", surjective on H: " << (st["surjective"].get<bool>() ? "yes" : "no");
    os << ", kernel dims:";
    for (const auto& k : st["kernel_dims"]) os << " " << k.get<int>();
    os << "\n";
    for (const auto& g : st["generators"])
      os << "  " << g["name"].get<std::string>() << " (deg " << g["degree"].get<int>() << ")  d = "
         << g["d"].get<std::string>() << "  m = " << g["image"].get<std::string>() << "\n";
  }
  os << "quasi-isomorphism through degree " << j["certified_through"].get<int>() << ": "
     << (j["quasi_iso"].get<bool>() ? "yes" : "no") << "\n";
  return os.str();
}

std::string text_cup1(const Json& j) {
  std::ostringstream os;
  if (j.contains("log"))
    for (const auto& line : j["log"]) os << line.get<std::string>() << "\n";
  if (j.contains("summary")) os << j["summary"].get<std::string>() << "\n";
  return os.str();
}

struct Output {
  bool json = false;
  void emit(const Json& j, std::string (*text)(const Json&)) const {
    if (json)
      std::cout << j.dump(2) << "\n";
    else
      std::cout << text(j);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"obstrukt: secondary and higher products over F_p"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "text";
  app.add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

  std::string file;
  int max_degree = -1;
  auto* coh = app.add_subcommand("cohomology", "dimensions and representatives of H^n");
  coh->add_option("file", file, "presentation file")->required();
  coh->add_option("--max-degree", max_degree, "highest degree to report (default cap - 1)");

  std::string kind = "frob1", classes;
  int order = 2;
  bool strict = false;
  std::uint64_t bound = std::uint64_t{1} << 20;
  auto* prod = app.add_subcommand("product", "secondary or higher product set");
  prod->add_option("file", file, "presentation file")->required();
  prod->add_option("--kind", kind, "massey, frob1 or frob2")->check(CLI::IsMember({"massey", "frob1", "frob2"}));
  prod->add_option("--order", order, "order of the type 1 product")->check(CLI::Range(2, 64));
  prod->add_option("--classes", classes, "comma-separated cocycles, e.g. x,y")->required();
  prod->add_flag("--strict", strict, "exit 5 if the product is undefined; report strict definability");
  prod->add_option("--bound", bound, "enumeration bound");

  int steps = 1, cap = -1;
  auto* sul = app.add_subcommand("sullivan", "staged Sullivan resolution");
  sul->add_option("file", file, "presentation file")->required();
  sul->add_option("--steps", steps, "number of stages")->check(CLI::Range(0, 32));
  sul->add_option("--cap", cap, "model degree cap (default: the file's cap)")->check(CLI::Range(1, 1 << 16));

  std::string entry, corpus_dir = corpus::default_dir().string();
  bool all = false, list = false;
  auto* ver = app.add_subcommand("verify", "check corpus claims");
  auto* entry_opt = ver->add_option("--entry", entry, "corpus entry id");
  auto* all_opt = ver->add_flag("--all", all, "every entry");
  auto* list_opt = ver->add_flag("--list", list, "list the catalogue");
  ver->add_option("--corpus", corpus_dir, "corpus directory");
  entry_opt->excludes(all_opt)->excludes(list_opt);
  all_opt->excludes(list_opt);

  std::string cup1_action;
  bool lax = false, perturbed = false;
  auto* cup = app.add_subcommand("cup1", "cup-1 algebra tools");
  cup->add_option("action", cup1_action, "verify-prop-cocycle, compile or assoc-check")
      ->required()
      ->check(CLI::IsMember({"verify-prop-cocycle", "compile", "assoc-check"}));
  cup->add_option("file", file, "cup-1 presentation file (compile, assoc-check; default: the corpus C)");
  auto* strict_c = cup->add_flag("--strict", strict, "only strict rewrites");
  cup->add_flag("--lax", lax, "also use the distributivity of the twisted product")->excludes(strict_c);
  cup->add_flag("--perturbed", perturbed, "check the perturbed expression instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const Output out{format == "json"};

  try {
    if (*coh) {
      CohomologyRing h(DgAlgebra::compile(load_presentation(file)));
      out.emit(cohomology_to_json(h, max_degree < 0 ? h.top() : max_degree), text_cohomology);
      return 0;
    }
    if (*prod) {
      CohomologyRing h(DgAlgebra::compile(load_presentation(file)));
      std::vector<HClass> cls;
      for (const auto& c : split_classes(classes)) cls.push_back(parse_class(h, c));
      ProductQuery q;
      q.kind = kind == "massey" ? ProductKind::Massey
               : kind == "frob2" ? ProductKind::FrobeniusType2
               : order > 2       ? ProductKind::HigherType1
                                 : ProductKind::FrobeniusType1;
      q.classes = cls;
      q.order = order;
      const ProductOptions opts{bound};
      const ProductSet s = compute_product(h, q, opts);
      Json j = product_to_json(h, s);
      if (strict && q.kind == ProductKind::HigherType1) {
        const StrictReport r = strictly_defined(h, cls.at(0), cls.at(1), order, opts);
        Json sj;
        sj["strict"] = r.strict;
        sj["failing_degrees"] = r.failing_degrees;
        if (!r.witness.empty()) sj["witness"] = r.witness;
        j["strict"] = sj;
      }
      out.emit(j, text_product);
      return strict && !s.defined() ? 5 : 0;
    }
    if (*sul) {
      const Json j = sullivan_report(DgAlgebra::compile(load_presentation(file)), steps,
                                     cap < 0 ? std::nullopt : std::optional<int>(cap));
      out.emit(j, text_sullivan);
      return 0;
    }
    if (*ver) {
      if (list || (entry.empty() && !all)) {
        out.emit(corpus::list_entries_json(corpus_dir), text_list);
        return 0;
      }
      const Json j = all ? corpus::verify_all_json(corpus_dir) : corpus::verify_json(entry, corpus_dir);
      out.emit(j, text_verify);
      return j["status"] == "PASS" ? 0 : 5;
    }
    if (*cup) {
      Json j;
      if (cup1_action == "verify-prop-cocycle") {
        j = cup1::verify_frobenius_cocycle_json(lax ? cup1::Mode::Lax : cup1::Mode::Strict, perturbed);
      } else if (cup1_action == "compile") {
        if (file.empty()) throw Error(ErrorCode::ParseError, "cup1 compile needs a file");
        j = cup1::compile_report(load_json(file));
      } else {
        const std::filesystem::path path = file.empty() ? corpus::default_dir() / "sec42_C.json" : std::filesystem::path(file);
        j = cup1::assoc_check_report(load_json(path), path.parent_path());
      }
      out.emit(j, text_cup1);
      return j.value("ok", true) ? 0 : 5;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
