#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "acceptance.hpp"
#include "boxguide/asymptotics.hpp"
#include "boxguide/detector.hpp"
#include "boxguide/errors.hpp"
#include "boxguide/matcher.hpp"
#include "boxguide/oracle.hpp"

namespace boxguide::cli {
namespace {

using json = nlohmann::ordered_json;

// Raised for malformed values that CLI11 cannot see (grids, variant names, config files).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string variant = "neumann-even";
  int N = 64;
  std::string format = "json";
  std::string out;
  std::string config;
  int threads = 0;
  // smatrix / reflect
  std::string eps_grid = "0";
  std::string l_grid = "1";
  std::string lambda_grid;
  std::string mu_grid;
  // trapped / scan / discrete
  double eps = 0.0;
  int k = 1;
  double l = 1.0;
  double rho = 0.9;
  double l_scale = 0.25;
  std::optional<double> base_point;
  int max_iter = 200;
  double delta = 0.1;
  int grid = 50;
  int lambda_samples = 64;
  std::string criteria = "1:9:9";
  std::string discrete_eps = "0.05,0.1";
  std::string discrete_variants = "mixed-top,dirichlet-even";
  bool fd = false;
  double h = 1.0 / 80;
  double L = 20.0;
};

// Output document: `rows` share the ordered `columns`; `extra` holds JSON-only fields.
struct Table {
  std::vector<std::string> columns;
  std::vector<json> rows;
  json extra = json::object();
};

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

Variant variant_of(const std::string& name) {
  const auto v = parse_variant(name);
  if (!v) throw UsageError("unknown variant '" + name + "'");
  return *v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) parts.push_back(item);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

std::vector<double> grid_or_usage(const std::string& flag, const std::string& spec, double thr = 0.0,
                                  bool allow_t = false) {
  try {
    return parse_grid(spec, thr, allow_t);
  } catch (const std::invalid_argument& e) {
    throw UsageError("--" + flag + ": " + e.what());
  }
}

// Evaluates fn(i) for i < n on a worker pool; results keep index order and the
// lowest-index failure is rethrown.
std::vector<json> parallel_rows(std::size_t n, int threads, const std::function<json(std::size_t)>& fn) {
  std::vector<json> rows(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        rows[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t count = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(threads, 1)));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

// Re or Im of S(i, j); null when the matrix has no such entry.
json entry(const Eigen::MatrixXcd& S, int i, int j, bool imag) {
  if (i >= S.rows() || j >= S.cols()) return nullptr;
  return imag ? S(i, j).imag() : S(i, j).real();
}

Table smatrix(const Options& o) {
  const Variant v = variant_of(o.variant);
  const auto eps = grid_or_usage("eps", o.eps_grid);
  const auto ls = grid_or_usage("l", o.l_grid);
  if (o.lambda_grid.empty() == o.mu_grid.empty()) throw UsageError("give exactly one non-empty --lambda or --mu grid");
  const bool by_mu = !o.mu_grid.empty();
  const double thr = trapping_threshold(v);
  const auto spectral = by_mu ? grid_or_usage("mu", o.mu_grid) : grid_or_usage("lambda", o.lambda_grid, thr, true);

  Table t;
  t.columns = {"eps",    "l",      "lambda", "mu",     "S00_re", "S00_im", "S01_re", "S01_im",
               "S10_re", "S10_im", "S11_re", "S11_im", "unitarity_defect", "symmetry_defect",
               "cond_estimate", "N", "basis"};
  const std::size_t nl = ls.size(), ns = spectral.size();
  t.rows = parallel_rows(eps.size() * nl * ns, o.threads, [&](std::size_t idx) {
    ProblemConfig c;
    c.eps = eps[idx / (nl * ns)];
    c.l = ls[(idx / ns) % nl];
    c.variant = v;
    c.N = o.N;
    (by_mu ? c.mu : c.lambda) = spectral[idx % ns];
    const auto S = assemble_augmented_smatrix(c);
    const double lambda = spectral_parameter(c);
    // One-channel variants report their single exponential entry as S11; the
    // oscillatory entries are then null.
    const int e = S.size() - 1;
    const int osc = S.size() == 2 ? 0 : S.size();
    json row;
    row["eps"] = c.eps;
    row["l"] = c.l;
    row["lambda"] = lambda;
    if (by_mu) {
      row["mu"] = *c.mu;
    } else {
      row["mu"] = c.eps > 0.0 ? json((thr - lambda) / (c.eps * c.eps)) : json(nullptr);
    }
    row["S00_re"] = entry(S.S, osc, osc, false);
    row["S00_im"] = entry(S.S, osc, osc, true);
    row["S01_re"] = entry(S.S, osc, e, false);
    row["S01_im"] = entry(S.S, osc, e, true);
    row["S10_re"] = entry(S.S, e, osc, false);
    row["S10_im"] = entry(S.S, e, osc, true);
    row["S11_re"] = entry(S.S, e, e, false);
    row["S11_im"] = entry(S.S, e, e, true);
    row["unitarity_defect"] = S.unitarity_defect;
    row["symmetry_defect"] = S.symmetry_defect;
    row["cond_estimate"] = S.cond_estimate;
    row["N"] = S.N;
    row["basis"] = std::string(to_string(S.basis));
    return row;
  });
  return t;
}

Table reflect(const Options& o) {
  const Variant v = variant_of(o.variant);
  const auto eps = grid_or_usage("eps", o.eps_grid);
  const auto ls = grid_or_usage("l", o.l_grid);
  if (o.lambda_grid.empty()) throw UsageError("reflect needs a non-empty --lambda grid");
  const auto lambdas = grid_or_usage("lambda", o.lambda_grid, trapping_threshold(v), true);
  Table t;
  t.columns = {"eps", "l", "lambda", "s00_re", "s00_im", "modulus_defect", "N"};
  const std::size_t nl = ls.size(), ns = lambdas.size();
  t.rows = parallel_rows(eps.size() * nl * ns, o.threads, [&](std::size_t idx) {
    ProblemConfig c;
    c.eps = eps[idx / (nl * ns)];
    c.l = ls[(idx / ns) % nl];
    c.lambda = lambdas[idx % ns];
    c.variant = v;
    c.N = o.N;
    const cplx s = physical_reflection(c);
    json row;
    row["eps"] = c.eps;
    row["l"] = c.l;
    row["lambda"] = *c.lambda;
    row["s00_re"] = s.real();
    row["s00_im"] = s.imag();
    row["modulus_defect"] = std::abs(std::abs(s) - 1.0);
    row["N"] = c.N;
    return row;
  });
  return t;
}

DetectorOptions detector_options(const Options& o) {
  DetectorOptions d;
  d.rho = o.rho;
  d.l_scale = o.l_scale;
  d.max_iter = o.max_iter;
  d.N = o.N;
  d.base_point = o.base_point;
  return d;
}

TrappedModeResult solve_trapped(Variant v, double eps, const Options& o) {
  const auto opts = detector_options(o);
  auto r = channel_count(v) == 2 ? find_trapped(eps, o.k, v, opts) : find_trapped_scalar(eps, o.l, v, opts);
  if (!r.converged) throw ConvergenceError("detector did not converge: " + r.message);
  return r;
}

Table trapped(const Options& o) {
  const Variant v = variant_of(o.variant);
  const auto r = solve_trapped(v, o.eps, o);
  Table t;
  t.columns = {"variant", "eps", "k", "l_star", "l", "lambda", "mu", "dmu", "dl", "lambda_law",
               "s11_residual", "s01_residual", "iterations", "converged"};
  json row;
  row["variant"] = std::string(to_string(v));
  row["eps"] = r.eps;
  row["k"] = r.k;
  row["l_star"] = r.l_star;
  row["l"] = r.l;
  row["lambda"] = r.lambda;
  row["mu"] = r.mu;
  row["dmu"] = r.dmu;
  row["dl"] = r.dl;
  row["lambda_law"] = eigenvalue_leading(r.eps, r.l, v);
  row["s11_residual"] = r.s11_residual;
  row["s01_residual"] = r.s01_residual;
  row["iterations"] = r.iterations;
  row["converged"] = r.converged;
  t.rows.push_back(row);
  json history = json::array();
  for (const auto& h : r.history) {
    history.push_back({{"dmu", h.dmu},
                       {"dl", h.dl},
                       {"im_s11", h.im_s11},
                       {"re_s01", h.re_s01},
                       {"step", h.step},
                       {"method", h.method == StepMethod::FixedPoint ? "fixed-point" : "quasi-newton"}});
  }
  t.extra["history"] = history;
  return t;
}

Table scan(const Options& o) {
  const Variant v = variant_of(o.variant);
  ScanOptions so;
  so.grid = o.grid;
  so.lambda_samples = o.lambda_samples;
  so.N = o.N;
  const auto rep = scan_absence(o.eps, o.k, o.delta, v, so);
  Table t;
  t.columns = {"l", "min_residual", "argmin_lambda", "in_window"};
  for (const auto& r : rep.rows) {
    t.rows.push_back({{"l", r.l},
                      {"min_residual", r.min_residual},
                      {"argmin_lambda", r.argmin_lambda},
                      {"in_window", r.in_window}});
  }
  t.extra["eps"] = rep.eps;
  t.extra["k"] = rep.k;
  t.extra["delta"] = rep.delta;
  t.extra["l_root"] = rep.l_root;
  t.extra["window"] = rep.window;
  t.extra["lambda_lo"] = rep.lambda_lo;
  t.extra["lambda_hi"] = rep.lambda_hi;
  json zeros = json::array();
  for (const auto& [a, b] : rep.zero_intervals) zeros.push_back({a, b});
  t.extra["zero_intervals"] = zeros;
  return t;
}

Table discrete(const Options& o) {
  std::vector<Variant> variants;
  for (const auto& name : split(o.discrete_variants, ',')) {
    const Variant v = variant_of(name);
    if (channel_count(v) != 1) throw UsageError("discrete takes one-channel variants, got '" + name + "'");
    variants.push_back(v);
  }
  if (variants.empty()) throw UsageError("--variant list is empty");
  const auto eps = grid_or_usage("eps", o.discrete_eps);
  Table t;
  t.columns = {"variant", "eps", "l", "lambda_detector", "lambda_law", "gap", "iterations", "lambda_fd",
               "localization"};
  t.rows = parallel_rows(variants.size() * eps.size(), o.threads, [&](std::size_t idx) {
    const Variant v = variants[idx / eps.size()];
    const double e = eps[idx % eps.size()];
    const auto r = solve_trapped(v, e, o);
    const double law = eigenvalue_leading(e, o.l, v);
    json row;
    row["variant"] = std::string(to_string(v));
    row["eps"] = e;
    row["l"] = o.l;
    row["lambda_detector"] = r.lambda;
    row["lambda_law"] = law;
    row["gap"] = r.lambda - law;
    row["iterations"] = r.iterations;
    row["lambda_fd"] = nullptr;
    row["localization"] = nullptr;
    if (o.fd) {
      const double thr = trapping_threshold(v);
      const FDMesh mesh(e, o.l, o.L, o.h, v);
      // Most localized eigenpair in the window below the threshold.
      for (const auto& p : fd_eigensolve(mesh, r.lambda - 0.1 * thr, thr)) {
        if (row["localization"].is_null() || p.localization > row["localization"].get<double>()) {
          row["lambda_fd"] = p.lambda;
          row["localization"] = p.localization;
        }
      }
    }
    return row;
  });
  return t;
}

std::vector<int> criteria_ids(const std::string& spec) {
  std::vector<int> ids;
  for (double x : grid_or_usage("criteria", spec)) {
    const int id = static_cast<int>(std::lround(x));
    if (id != x || id < 1 || id > acceptance::kCriterionCount) {
      throw UsageError("--criteria: ids must be integers in 1..9");
    }
    ids.push_back(id);
  }
  return ids;
}

Table validate(const Options& o, std::ostream& err, bool& all_pass) {
  const auto ids = criteria_ids(o.criteria);
  Table t;
  t.columns = {"id", "name", "pass", "detail"};
  all_pass = true;
  for (int id : ids) {
    const auto r = acceptance::run_criterion(id);
    err << acceptance::format_line(r) << "\n";
    all_pass = all_pass && r.pass;
    // Timings go to the log only, so the table stays byte-identical across runs.
    t.rows.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
  }
  return t;
}

std::string csv_cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  std::string s = v.get<std::string>();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return quoted + "\"";
}

void emit(const Table& t, const std::string& command, const std::string& format, std::ostream& os) {
  if (format == "csv") {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_cell(row[t.columns[i]]);
      os << "\n";
    }
    return;
  }
  json doc;
  doc["command"] = command;
  for (const auto& [key, value] : t.extra.items()) doc[key] = value;
  doc["rows"] = t.rows;
  os << doc.dump(2) << "\n";
}

std::string error_type(const std::exception& e) {
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const SolverError*>(&e)) return "SolverError";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "ConvergenceError";
  if (dynamic_cast<const PoleError*>(&e)) return "PoleError";
  if (dynamic_cast<const ConversionError*>(&e)) return "ConversionError";
  if (dynamic_cast<const StepError*>(&e)) return "StepError";
  return "Error";
}

// Turns the JSON config into flag tokens; later command-line tokens override them.
std::vector<std::string> config_tokens(const std::string& path, std::string& command) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config '" + path + "'");
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config '" + path + "' is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config must be a JSON object");
  std::vector<std::string> tokens;
  for (const auto& [key, value] : cfg.items()) {
    if (key == "command") {
      if (!value.is_string()) throw UsageError("config 'command' must be a string");
      command = value.get<std::string>();
      continue;
    }
    if (key == "config") throw UsageError("config files cannot nest");
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (value.is_boolean()) {
      if (value.get<bool>()) tokens.push_back(flag);
      continue;
    }
    std::string text;
    if (value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        text += (i ? "," : "") + (value[i].is_string() ? value[i].get<std::string>() : value[i].dump());
      }
    } else {
      text = value.is_string() ? value.get<std::string>() : value.dump();
    }
    tokens.push_back(flag);
    tokens.push_back(text);
  }
  return tokens;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--variant", o.variant, "Wall conditions")->capture_default_str();
  sub->add_option("--N", o.N, "Strip-region mode count")->check(CLI::Range(8, 4096))->capture_default_str();
  sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  sub->add_option("--out", o.out, "Write results to this file instead of stdout");
  sub->add_option("--config", o.config, "JSON file whose keys mirror the flags");
  sub->add_option("--threads", o.threads, "Worker count (0: hardware concurrency)")->check(CLI::NonNegativeNumber);
}

}  // namespace

std::vector<double> parse_grid(const std::string& spec, double threshold, bool allow_threshold) {
  auto value = [&](std::string token) {
    if (!token.empty() && token.back() == 't') {
      if (!allow_threshold) throw std::invalid_argument("threshold units are not allowed here");
      token.pop_back();
      return threshold * parse_number(token);
    }
    return parse_number(token);
  };
  std::vector<double> out;
  for (std::string item : split(spec, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }), item.end());
    if (item.empty()) throw std::invalid_argument("empty grid item");
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(value(parts[0]));
    } else if (parts.size() == 3) {
      const double a = value(parts[0]), b = value(parts[1]);
      const double n = parse_number(parts[2]);
      if (n != std::floor(n) || n < 1) throw std::invalid_argument("point count must be a positive integer");
      const int count = static_cast<int>(n);
      if (count == 1 && a != b) throw std::invalid_argument("one point needs equal endpoints");
      for (int i = 0; i < count; ++i) out.push_back(count == 1 ? a : a + (b - a) * i / (count - 1));
    } else {
      throw std::invalid_argument("grid item '" + item + "' is neither a number nor a:b:n");
    }
  }
  if (out.empty()) throw std::invalid_argument("grid is empty");
  for (std::size_t i = 0; i + 1 < out.size(); ++i) {
    if (!(out[i] < out[i + 1])) throw std::invalid_argument("grid must be strictly increasing");
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Scattering matrices and trapped modes of a strip waveguide with a box-shaped ledge", "boxguide"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  auto* sm = app.add_subcommand("smatrix", "Augmented scattering matrix over an (eps, l, lambda|mu) grid");
  auto* rf = app.add_subcommand("reflect", "Physical reflection coefficient over an (eps, l, lambda) grid");
  for (auto* sub : {sm, rf}) {
    add_common(sub, o);
    sub->add_option("--eps", o.eps_grid, "Ledge height grid")->capture_default_str();
    sub->add_option("--l", o.l_grid, "Ledge length grid")->capture_default_str();
    sub->add_option("--lambda", o.lambda_grid, "Spectral grid; suffix t for threshold units");
  }
  sm->add_option("--mu", o.mu_grid, "Grid of mu with lambda = threshold - eps^2 mu");

  auto* tr = app.add_subcommand("trapped", "Locate the trapped mode near the k-th base point");
  auto* sc = app.add_subcommand("scan", "Minimum of |S11 + 1| over lambda along an l-grid");
  for (auto* sub : {tr, sc}) {
    add_common(sub, o);
    sub->add_option("--eps", o.eps, "Ledge height")->required();
    sub->add_option("--k", o.k, "Base point index")->check(CLI::PositiveNumber)->capture_default_str();
  }
  tr->add_option("--l", o.l, "Fixed ledge length of one-channel variants")->capture_default_str();
  tr->add_option("--rho", o.rho, "Admissible disk radius")->capture_default_str();
  tr->add_option("--l-scale", o.l_scale, "Length scale of the disk")->capture_default_str();
  tr->add_option("--base-point", o.base_point, "Base length l*");
  tr->add_option("--max-iter", o.max_iter, "Iteration cap")->check(CLI::PositiveNumber)->capture_default_str();
  sc->add_option("--delta", o.delta, "Distance of the grid from the neighbouring base points")->capture_default_str();
  sc->add_option("--grid", o.grid, "Number of l samples")->capture_default_str();
  sc->add_option("--lambda-samples", o.lambda_samples, "Number of lambda samples")->capture_default_str();

  auto* va = app.add_subcommand("validate", "Run the acceptance criteria");
  add_common(va, o);
  va->add_option("--criteria", o.criteria, "Criterion ids, grid syntax")->capture_default_str();

  auto* di = app.add_subcommand("discrete", "One-channel variants against their leading eigenvalue law");
  add_common(di, o);
  di->remove_option(di->get_option("--variant"));
  di->add_option("--variant", o.discrete_variants, "Comma-separated one-channel variants")->capture_default_str();
  di->add_option("--eps", o.discrete_eps, "Ledge height grid")->capture_default_str();
  di->add_option("--l", o.l, "Ledge length")->capture_default_str();
  di->add_flag("--fd", o.fd, "Also run the finite-difference eigensolver");
  di->add_option("--fd-h", o.h, "FD mesh width")->check(CLI::PositiveNumber)->capture_default_str();
  di->add_option("--fd-length", o.L, "FD truncation length")->check(CLI::PositiveNumber)->capture_default_str();

  std::string command;
  try {
    std::vector<std::string> rest = args;
    if (!rest.empty() && !rest.front().empty() && rest.front().front() != '-') {
      command = rest.front();
      rest.erase(rest.begin());
    }
    std::vector<std::string> tokens;
    for (std::size_t i = 0; i < rest.size(); ++i) {
      std::string path;
      if (rest[i] == "--config" && i + 1 < rest.size()) path = rest[i + 1];
      if (rest[i].rfind("--config=", 0) == 0) path = rest[i].substr(9);
      if (!path.empty()) {
        std::string from_config;
        tokens = config_tokens(path, from_config);
        if (command.empty()) command = from_config;
      }
    }
    std::vector<std::string> argv;
    if (!command.empty()) argv.push_back(command);
    argv.insert(argv.end(), tokens.begin(), tokens.end());
    argv.insert(argv.end(), rest.begin(), rest.end());
    std::reverse(argv.begin(), argv.end());  // CLI11 consumes a reversed vector
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (o.threads == 0) o.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  command = app.get_subcommands().front()->get_name();

  int status = kExitOk;
  Table table;
  try {
    if (command == "smatrix") {
      table = smatrix(o);
    } else if (command == "reflect") {
      table = reflect(o);
    } else if (command == "trapped") {
      table = trapped(o);
    } else if (command == "scan") {
      table = scan(o);
    } else if (command == "discrete") {
      table = discrete(o);
    } else {
      bool all_pass = true;
      table = validate(o, err, all_pass);
      if (!all_pass) status = kExitNumerical;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    json record;
    record["type"] = error_type(e);
    record["message"] = e.what();
    record["command"] = command;
    err << record.dump() << "\n";
    return kExitNumerical;
  }

  if (o.out.empty()) {
    emit(table, command, o.format, out);
  } else {
    std::ofstream file(o.out);
    if (!file) {
      err << json{{"type", "IOError"}, {"message", "cannot write '" + o.out + "'"}, {"command", command}}.dump()
          << "\n";
      return kExitNumerical;
    }
    emit(table, command, o.format, file);
  }
  return status;
}

}  // namespace boxguide::cli
