// Command line front end: deterministic JSON reports for the analyze /
// verify / product / catalog pipelines. JSON goes to stdout (or --json),
// human-readable notes go to stderr.
//
// Exit codes: 0 success, 1 usage or parse errors, 2 mathematical
// precondition failures (domain violations, convexity, bad parameters).

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "calabi/classify.hpp"
#include "calabi/expr.hpp"
#include "calabi/geometry.hpp"
#include "calabi/json_report.hpp"
#include "calabi/products.hpp"

namespace {

using calabi::Json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitMath = 2;

class MathError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::map<std::string, std::vector<double>> parse_params(const std::string& text) {
  std::map<std::string, std::vector<double>> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(';', pos);
    if (end == std::string::npos) end = text.size();
    const std::string item = text.substr(pos, end - pos);
    pos = end + 1;
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) {
      throw UsageError("bad parameter item '" + item + "' (expected key=value)");
    }
    const std::string key = item.substr(0, eq);
    std::vector<double> vals;
    std::size_t vpos = eq + 1;
    while (vpos <= item.size()) {
      std::size_t vend = item.find(',', vpos);
      if (vend == std::string::npos) vend = item.size();
      const std::string tok = item.substr(vpos, vend - vpos);
      try {
        vals.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw UsageError("bad numeric value '" + tok + "' for parameter '" + key + "'");
      }
      vpos = vend + 1;
      if (vend == item.size()) break;
    }
    out[key] = vals;
  }
  return out;
}

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> p;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    const std::string tok = text.substr(pos, end - pos);
    if (!tok.empty()) {
      try {
        p.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw UsageError("bad coordinate '" + tok + "'");
      }
    }
    pos = end + 1;
    if (end == text.size()) break;
  }
  if (p.empty()) throw UsageError("empty point");
  return p;
}

// "[a,b]^n" or "[a1,b1]x[a2,b2]x..."
calabi::Box parse_box(const std::string& text, int expected_dim) {
  auto read_interval = [&](std::size_t& pos) -> std::array<double, 2> {
    if (pos >= text.size() || text[pos] != '[') throw UsageError("expected '[' in box");
    const std::size_t close = text.find(']', pos);
    if (close == std::string::npos) throw UsageError("unterminated interval in box");
    const std::string body = text.substr(pos + 1, close - pos - 1);
    const std::size_t comma = body.find(',');
    if (comma == std::string::npos) throw UsageError("interval needs two endpoints");
    std::array<double, 2> iv{};
    try {
      iv[0] = std::stod(body.substr(0, comma));
      iv[1] = std::stod(body.substr(comma + 1));
    } catch (const std::exception&) {
      throw UsageError("bad interval endpoints '" + body + "'");
    }
    if (!(iv[0] < iv[1])) throw UsageError("interval endpoints must satisfy a < b");
    pos = close + 1;
    return iv;
  };

  calabi::Box box;
  std::size_t pos = 0;
  auto first = read_interval(pos);
  if (pos < text.size() && text[pos] == '^') {
    int reps = 0;
    try {
      reps = std::stoi(text.substr(pos + 1));
    } catch (const std::exception&) {
      throw UsageError("bad box power");
    }
    if (reps < 1) throw UsageError("box power must be positive");
    box.intervals.assign(static_cast<std::size_t>(reps), first);
  } else {
    box.intervals.push_back(first);
    while (pos < text.size()) {
      if (text[pos] != 'x') throw UsageError("expected 'x' between intervals");
      ++pos;
      box.intervals.push_back(read_interval(pos));
    }
  }
  if (expected_dim > 0 && box.dim() != expected_dim) {
    throw UsageError("box dimension " + std::to_string(box.dim()) +
                     " does not match arity " + std::to_string(expected_dim));
  }
  return box;
}

struct FunctionSource {
  calabi::ExprPtr expr;
  int arity = 0;
  std::optional<calabi::CatalogEntry> entry;
};

FunctionSource resolve_function(const std::string& func, const std::string& catalog_name,
                                const std::string& params_text, int arity_flag) {
  if (func.empty() == catalog_name.empty()) {
    throw UsageError("exactly one of --func or --catalog is required");
  }
  FunctionSource src;
  if (!func.empty()) {
    int arity = arity_flag;
    if (arity <= 0) {
      // infer from the highest variable index
      calabi::ExprPtr probe;
      try {
        probe = calabi::parse_expression(func, 64);
      } catch (const calabi::ParseError&) {
        throw;  // keep offsets intact
      }
      arity = std::max(1, calabi::max_var_index(probe));
      src.expr = probe;
    } else {
      src.expr = calabi::parse_expression(func, arity);
    }
    src.arity = arity;
    return src;
  }
  auto params = parse_params(params_text);
  calabi::CatalogEntry entry = calabi::catalog(catalog_name, params);
  src.expr = entry.expr;
  src.arity = entry.arity;
  src.entry = std::move(entry);
  return src;
}

void emit(const Json& doc, const std::string& path) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot open output file '" + path + "'");
    out << text;
  }
}

int run_analyze(const FunctionSource& src, const std::vector<std::string>& point_args,
                std::uint64_t seed, double tol, const std::string& json_path) {
  if (point_args.empty()) throw UsageError("analyze requires at least one --point");
  calabi::DerivativeTable table(src.expr, src.arity);
  calabi::CubicMaxOptions copts;
  copts.seed = seed;

  Json doc;
  doc["command"] = "analyze";
  doc["function"] = calabi::to_string(src.expr);
  doc["arity"] = src.arity;
  doc["seed"] = seed;
  doc["tol"] = tol;
  Json pts = Json::array();
  for (const auto& parg : point_args) {
    std::vector<double> x = parse_point(parg);
    if (static_cast<int>(x.size()) != src.arity) {
      throw UsageError("point dimension does not match arity");
    }
    calabi::Jet4 jet = table.jet(x);
    calabi::PointAnalysis a = calabi::analyze_point(jet, x, copts);
    pts.push_back(calabi::point_analysis_json(a, tol));
  }
  doc["points"] = pts;
  emit(doc, json_path);
  std::fprintf(stderr, "analyzed %zu point(s) of %s\n", point_args.size(),
               calabi::to_string(src.expr).c_str());
  return kExitOk;
}

int run_verify(const FunctionSource& src, const std::string& box_text, int samples,
               std::uint64_t seed, double tol, const std::string& json_path) {
  calabi::Box box;
  if (!box_text.empty()) {
    box = parse_box(box_text, src.arity);
  } else if (src.entry) {
    box = src.entry->default_box;
  } else {
    throw UsageError("verify requires --box (catalog entries provide a default)");
  }
  calabi::VerifyOptions opts;
  opts.samples = samples;
  opts.seed = seed;
  opts.tol = tol;
  calabi::VerificationReport rep = calabi::verify_function(src.expr, src.arity, box, opts);

  Json doc;
  doc["command"] = "verify";
  doc["function"] = calabi::to_string(src.expr);
  doc["arity"] = src.arity;
  doc["box"] = calabi::box_json(box);
  doc["seed"] = seed;
  doc["report"] = calabi::verification_json(rep);
  emit(doc, json_path);

  if (rep.not_strictly_convex) {
    std::fprintf(stderr, "function is not strictly convex on the box\n");
    return kExitMath;
  }
  bool ok = rep.verdicts.convex && rep.verdicts.codazzi && rep.verdicts.gauss_consistent &&
            rep.verdicts.scalar_identity;
  if (src.entry) {
    ok = ok && rep.verdicts.parallel == src.entry->expect_parallel &&
         rep.verdicts.flat == src.entry->expect_flat;
  }
  std::fprintf(stderr, "verify: convex=%d parallel=%d flat=%d codazzi=%d gauss=%d scalar=%d\n",
               rep.verdicts.convex, rep.verdicts.parallel, rep.verdicts.flat,
               rep.verdicts.codazzi, rep.verdicts.gauss_consistent,
               rep.verdicts.scalar_identity);
  if (!rep.verdicts.convex) return kExitMath;
  return ok ? kExitOk : kExitMath;
}

int run_product_join(const std::string& factor_text, double lambda,
                     const std::string& json_path) {
  if (factor_text.empty()) throw UsageError("product join requires --factor");
  if (lambda == 0.0) throw MathError("lambda must be nonzero");
  // the factor is written directly in the joined variables x2, x3, ...
  calabi::ExprPtr factor = calabi::parse_expression(factor_text, 64);
  std::function<bool(const calabi::ExprPtr&)> uses_x1 = [&](const calabi::ExprPtr& e) {
    if (e->kind == calabi::ExprKind::Variable) return e->var_index == 1;
    if (e->a && uses_x1(e->a)) return true;
    return e->b && uses_x1(e->b);
  };
  if (uses_x1(factor)) {
    throw UsageError("the factor must not use x1; it is the join direction");
  }
  const int top = calabi::max_var_index(factor);
  // shift back by one so the library call can shift forward again
  std::vector<calabi::ExprPtr> down(static_cast<std::size_t>(std::max(top, 1)));
  down[0] = calabi::make_var(1);  // never reached, x1 is absent
  for (int i = 2; i <= top; ++i) {
    down[static_cast<std::size_t>(i - 1)] = calabi::make_var(i - 1);
  }
  calabi::ExprPtr natural = calabi::substitute(factor, down);
  const int factor_arity = std::max(0, top - 1);
  calabi::ExprPtr joined = calabi::join_calabi_factor(natural, factor_arity, lambda);

  Json doc;
  doc["command"] = "product-join";
  doc["lambda"] = lambda;
  doc["factor"] = factor_text;
  doc["expr"] = calabi::to_string(joined);
  doc["arity"] = factor_arity + 1;
  emit(doc, json_path);
  std::fprintf(stderr, "joined potential: %s\n", calabi::to_string(joined).c_str());
  return kExitOk;
}

int run_catalog_list(const std::string& json_path) {
  Json doc;
  doc["command"] = "catalog-list";
  doc["entries"] = calabi::catalog_names();
  emit(doc, json_path);
  return kExitOk;
}

int run_catalog_get(const std::string& name, const std::string& params_text,
                    const std::string& json_path) {
  calabi::CatalogEntry entry = calabi::catalog(name, parse_params(params_text));
  Json doc;
  doc["command"] = "catalog-get";
  doc["entry"] = calabi::catalog_entry_json(entry);
  emit(doc, json_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"invariants, verification and classification of Calabi graph hypersurfaces"};
  app.require_subcommand(1);

  std::string func, catalog_name, params_text, box_text, json_path, factor_text;
  std::vector<std::string> points;
  int arity = 0;
  int samples = 32;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  double lambda = 1.0;

  auto add_common = [&](CLI::App* cmd, bool with_box) {
    cmd->add_option("--func", func, "potential as an expression in x1..xn");
    cmd->add_option("--catalog", catalog_name, "catalog entry name");
    cmd->add_option("--params", params_text, "catalog parameters, e.g. \"c=2,3;n=4\"");
    cmd->add_option("--arity", arity, "number of variables for --func");
    cmd->add_option("--seed", seed, "seed for deterministic sampling");
    cmd->add_option("--tol", tol, "residual tolerance");
    cmd->add_option("--json", json_path, "write the JSON report to this path");
    if (with_box) {
      cmd->add_option("--box", box_text, "sample box \"[a,b]^n\" or \"[a1,b1]x[a2,b2]\"");
      cmd->add_option("--samples", samples, "number of sample points");
    }
  };

  CLI::App* analyze = app.add_subcommand("analyze", "pointwise invariants and classification");
  add_common(analyze, false);
  analyze->add_option("--point", points, "comma-separated point, repeatable");

  CLI::App* verify = app.add_subcommand("verify", "sampled verification over a box");
  add_common(verify, true);

  CLI::App* product = app.add_subcommand("product", "product constructions");
  CLI::App* join = product->add_subcommand("join", "join a Calabi factor to a log direction");
  join->add_option("--factor", factor_text, "factor potential written in x2..xk");
  join->add_option("--lambda", lambda, "join weight, nonzero");
  join->add_option("--json", json_path, "write the JSON report to this path");

  CLI::App* catalog_cmd = app.add_subcommand("catalog", "catalog of canonical potentials");
  CLI::App* list_cmd = catalog_cmd->add_subcommand("list", "list entry names");
  list_cmd->add_option("--json", json_path, "write the JSON report to this path");
  CLI::App* get_cmd = catalog_cmd->add_subcommand("get", "emit one entry");
  std::string get_name;
  get_cmd->add_option("name", get_name, "entry name")->required();
  get_cmd->add_option("--params", params_text, "catalog parameters");
  get_cmd->add_option("--json", json_path, "write the JSON report to this path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (analyze->parsed()) {
      return run_analyze(resolve_function(func, catalog_name, params_text, arity), points,
                         seed, tol, json_path);
    }
    if (verify->parsed()) {
      return run_verify(resolve_function(func, catalog_name, params_text, arity), box_text,
                        samples, seed, tol, json_path);
    }
    if (product->parsed()) {
      if (join->parsed()) return run_product_join(factor_text, lambda, json_path);
      throw UsageError("product requires the 'join' subcommand");
    }
    if (catalog_cmd->parsed()) {
      if (list_cmd->parsed()) return run_catalog_list(json_path);
      if (get_cmd->parsed()) return run_catalog_get(get_name, params_text, json_path);
      throw UsageError("catalog requires 'list' or 'get'");
    }
    throw UsageError("no subcommand given");
  } catch (const calabi::ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitUsage;
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const calabi::EvalDomainError& e) {
    std::fprintf(stderr, "domain error: %s\n", e.what());
    return kExitMath;
  } catch (const calabi::NotPositiveDefinite& e) {
    std::fprintf(stderr, "convexity failure: %s\n", e.what());
    return kExitMath;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return kExitMath;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
}
