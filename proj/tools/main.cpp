#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gilbert/gilbert.hpp"
#include "tables.hpp"

#ifndef GILBERT_VERSION
#define GILBERT_VERSION "dev"
#endif

namespace {

using ordered = nlohmann::ordered_json;
using json = nlohmann::json;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

const std::set<std::string> kEstimators = {
    "crude1d",    "cond_p0",   "cond_p1",  "analytic_m0", "analytic_m1",
    "crude_nd",   "cond_lower", "cond_upper", "is_lower",  "is_upper",
    "quantiles",  "mu_estimate", "pilot_gamma"};

struct Experiment {
  std::string estimator;
  double lambda = 0.0;
  bool has_lambda = false;
  std::vector<double> window;
  long long k = 0;
  bool has_k = false;
  double a = 0.0;
  bool has_a = false;
  long long n = 0;
  bool has_n = false;
  std::uint64_t seed = 1;
  double gamma = 0.0;
  bool has_gamma = false;
  double mu = 0.0;
  bool has_mu = false;
  std::vector<double> alphas;
  std::vector<double> candidates;
  std::string tail;
  double bin_side = 1.0;
};

std::vector<double> parse_double_list(const std::string& text,
                                      const std::string& field) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok =
        text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw std::invalid_argument("field \"" + field + "\": cannot parse \"" +
                                  tok + "\" as a number");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string mu_key(const Experiment& e) {
  std::string key = fmt17(e.lambda) + "|";
  for (std::size_t i = 0; i < e.window.size(); ++i) {
    if (i) key += "x";
    key += fmt17(e.window[i]);
  }
  return key;
}

bool needs_a(const std::string& est) {
  return est == "crude_nd" || est == "cond_lower" || est == "cond_upper" ||
         est == "is_lower" || est == "is_upper" || est == "pilot_gamma";
}

bool needs_mu(const std::string& est) {
  return est == "crude_nd" || est == "cond_lower" || est == "cond_upper" ||
         est == "is_lower" || est == "is_upper";
}

bool is_1d_only(const std::string& est) {
  return est == "crude1d" || est == "cond_p0" || est == "cond_p1" ||
         est == "analytic_m0" || est == "analytic_m1";
}

bool is_analytic(const std::string& est) {
  return est == "analytic_m0" || est == "analytic_m1";
}

void validate_experiment(const Experiment& e, std::size_t idx,
                         const std::set<std::string>& mu_available) {
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("experiment " + std::to_string(idx) + ": " +
                                msg);
  };
  if (!kEstimators.count(e.estimator))
    fail("unknown estimator \"" + e.estimator + "\"");
  if (!e.has_lambda) fail("missing field \"lambda\"");
  if (!(e.lambda > 0.0)) fail("field \"lambda\" must be positive");
  if (e.window.empty()) fail("missing field \"window\"");
  if (e.window.size() > 8) fail("field \"window\" supports at most 8 dimensions");
  for (double s : e.window)
    if (!(s > 0.0)) fail("field \"window\" sides must be positive");
  if (is_1d_only(e.estimator) && e.window.size() != 1)
    fail("field \"window\" must be one-dimensional for " + e.estimator);
  if (!is_analytic(e.estimator)) {
    if (!e.has_n) fail("missing field \"n\"");
    if (e.n <= 0) fail("field \"n\" must be positive");
  }
  if (e.has_k && e.k < 0) fail("field \"k\" must be non-negative");
  if (needs_a(e.estimator)) {
    if (!e.has_a) fail("missing field \"a\"");
    if (!(e.a > 0.0 && e.a < 1.0)) fail("field \"a\" must lie in (0, 1)");
  }
  if (needs_mu(e.estimator)) {
    if (e.has_mu) {
      if (!(e.mu > 0.0)) fail("field \"mu\" must be positive");
    } else if (!mu_available.count(mu_key(e))) {
      fail("missing field \"mu\" (pass --mu or run a mu_estimate experiment "
           "for the same lambda and window first)");
    }
  }
  if (e.estimator == "is_lower" || e.estimator == "is_upper") {
    if (!e.has_gamma) fail("missing field \"gamma\"");
    if (!(e.gamma >= 1.0)) fail("field \"gamma\" must be >= 1");
  }
  if (e.estimator == "is_upper" && !(e.bin_side > 0.0))
    fail("field \"bin_side\" must be positive");
  if (e.estimator == "pilot_gamma") {
    if (e.tail != "lower" && e.tail != "upper")
      fail("field \"tail\" must be \"lower\" or \"upper\"");
    if (e.candidates.empty()) fail("missing field \"candidates\"");
  }
  if (e.estimator == "quantiles") {
    for (double alpha : e.alphas)
      if (!(alpha > 0.0 && alpha <= 0.5))
        fail("field \"alphas\" entries must lie in (0, 0.5]");
  }
}

double improvement(const gilbert::EstimateResult& r) {
  if (r.estimate <= 0.0 || r.estimate >= 1.0 || r.sample_variance <= 0.0)
    return kNan;
  return r.estimate * (1.0 - r.estimate) / r.sample_variance;
}

ordered make_row(const Experiment& e, ordered param, long long n_used,
                 double estimate, double se, double variance, double impr,
                 double seconds, bool stable) {
  ordered row = ordered::object();
  row["estimator"] = e.estimator;
  row["lambda"] = e.lambda;
  row["window"] = e.window;
  row["param"] = std::move(param);
  row["n"] = n_used;
  row["seed"] = e.seed;
  row["estimate"] = estimate;
  row["std_error"] = se;
  row["variance"] = variance;
  if (std::isnan(impr))
    row["improvement_vs_crude"] = nullptr;
  else
    row["improvement_vs_crude"] = impr;
  row["seconds"] = stable ? 0.0 : seconds;
  return row;
}

ordered result_row(const Experiment& e, ordered param,
                   const gilbert::EstimateResult& r, bool stable) {
  return make_row(e, std::move(param), r.n_samples, r.estimate, r.std_error,
                  r.sample_variance, improvement(r), r.seconds, stable);
}

std::vector<ordered> run_experiment(const Experiment& e,
                                    std::map<std::string, double>& mu_cache,
                                    bool stable, int workers) {
  using namespace gilbert;
  std::vector<ordered> rows;
  const std::string& est = e.estimator;

  auto resolve_mu = [&]() -> double {
    if (e.has_mu) return e.mu;
    auto it = mu_cache.find(mu_key(e));
    if (it == mu_cache.end())
      throw std::invalid_argument("missing field \"mu\"");
    return it->second;
  };

  if (est == "crude1d") {
    EstimateResult r = crude_mc_few_edges(e.lambda, e.window[0],
                                          static_cast<int>(e.k), e.n, e.seed,
                                          workers);
    ordered param = ordered::object();
    param["k"] = e.k;
    rows.push_back(result_row(e, std::move(param), r, stable));
  } else if (est == "cond_p0" || est == "cond_p1") {
    const int k = est == "cond_p0" ? 0 : 1;
    EstimateResult r = cond_mc_few_edges(e.lambda, e.window[0], k, e.n, e.seed,
                                         workers);
    ordered param = ordered::object();
    param["k"] = k;
    rows.push_back(result_row(e, std::move(param), r, stable));
  } else if (est == "analytic_m0" || est == "analytic_m1") {
    const double v = est == "analytic_m0"
                         ? prob_no_missing_edges(e.lambda, e.window[0])
                         : prob_at_most_one_missing_edge(e.lambda, e.window[0]);
    ordered param = ordered::object();
    param["k"] = est == "analytic_m0" ? 0 : 1;
    rows.push_back(
        make_row(e, std::move(param), 0, v, 0.0, 0.0, kNan, 0.0, stable));
  } else if (est == "crude_nd" || est == "cond_lower" || est == "cond_upper" ||
             est == "is_lower" || est == "is_upper") {
    const Window win = Window::box(e.window);
    const double mu = resolve_mu();
    auto tail_param = [&](const char* tail) {
      ordered param = ordered::object();
      param["a"] = e.a;
      param["mu"] = mu;
      param["tail"] = tail;
      return param;
    };
    if (est == "crude_nd") {
      EstimateResult lo =
          crude_mc_lower_tail(e.lambda, win, e.a, mu, e.n, e.seed, workers);
      EstimateResult hi =
          crude_mc_upper_tail(e.lambda, win, e.a, mu, e.n, e.seed, workers);
      rows.push_back(result_row(e, tail_param("lower"), lo, stable));
      rows.push_back(result_row(e, tail_param("upper"), hi, stable));
    } else if (est == "cond_lower") {
      rows.push_back(result_row(
          e, tail_param("lower"),
          cond_mc_lower_tail(e.lambda, win, e.a, mu, e.n, e.seed, workers),
          stable));
    } else if (est == "cond_upper") {
      rows.push_back(result_row(
          e, tail_param("upper"),
          cond_mc_upper_tail(e.lambda, win, e.a, mu, e.n, e.seed, workers),
          stable));
    } else if (est == "is_lower") {
      ordered param = tail_param("lower");
      param["gamma"] = e.gamma;
      rows.push_back(result_row(e, std::move(param),
                                is_lower_tail(e.lambda, win, e.a, mu, e.gamma,
                                              e.n, e.seed, workers),
                                stable));
    } else {
      ordered param = tail_param("upper");
      param["gamma"] = e.gamma;
      param["bin_side"] = e.bin_side;
      rows.push_back(result_row(e, std::move(param),
                                is_upper_tail(e.lambda, win, e.a, mu, e.gamma,
                                              e.bin_side, e.n, e.seed, workers),
                                stable));
    }
  } else if (est == "quantiles") {
    const Window win = Window::box(e.window);
    std::vector<double> alphas = e.alphas;
    if (alphas.empty()) alphas = {1e-2, 1e-3, 1e-4};
    QuantileTable table =
        edge_count_quantiles(e.lambda, win, alphas, e.n, e.seed, workers);
    ordered param = ordered::object();
    param["quantity"] = "mu_hat";
    rows.push_back(make_row(e, std::move(param), table.n_samples, table.mu_hat,
                            0.0, 0.0, kNan, table.seconds, stable));
    for (const QuantileRow& qr : table.rows) {
      for (int side = 0; side < 2; ++side) {
        ordered qparam = ordered::object();
        qparam["alpha"] = qr.alpha;
        qparam["side"] = side == 0 ? "lower" : "upper";
        qparam["rel"] = side == 0 ? qr.rel_low : qr.rel_high;
        qparam["low_count_warning"] = qr.low_count_warning;
        rows.push_back(make_row(e, std::move(qparam), table.n_samples,
                                side == 0 ? qr.q_low : qr.q_high, 0.0, 0.0,
                                kNan, table.seconds, stable));
      }
    }
  } else if (est == "mu_estimate") {
    const Window win = Window::box(e.window);
    EstimateResult r = mu_estimate(e.lambda, win, e.n, e.seed, workers);
    mu_cache[mu_key(e)] = r.estimate;
    ordered param = ordered::object();
    param["quantity"] = "mu";
    rows.push_back(make_row(e, std::move(param), r.n_samples, r.estimate,
                            r.std_error, r.sample_variance, kNan, r.seconds,
                            stable));
  } else if (est == "pilot_gamma") {
    const Window win = Window::box(e.window);
    const Tail tail = e.tail == "lower" ? Tail::lower : Tail::upper;
    PilotResult pilot = pilot_tune_gamma(e.lambda, win, e.a, tail,
                                         e.candidates, e.n, e.seed, workers);
    for (const PilotRow& pr : pilot.rows) {
      ordered param = ordered::object();
      param["gamma"] = pr.gamma;
      param["tail"] = e.tail;
      param["a"] = e.a;
      param["selected"] = pr.gamma == pilot.gamma_star;
      rows.push_back(result_row(e, std::move(param), pr.result, stable));
    }
    ordered param = ordered::object();
    param["quantity"] = "gamma_star";
    param["tail"] = e.tail;
    param["mu_used"] = pilot.mu_used;
    rows.push_back(make_row(e, std::move(param), e.n, pilot.gamma_star, 0.0,
                            0.0, kNan, 0.0, stable));
  }
  return rows;
}

std::string compact_param(const ordered& param) {
  std::string out;
  for (auto it = param.begin(); it != param.end(); ++it) {
    if (!out.empty()) out += ";";
    out += it.key();
    out += "=";
    if (it.value().is_string())
      out += it.value().get<std::string>();
    else if (it.value().is_boolean())
      out += it.value().get<bool>() ? "true" : "false";
    else
      out += fmt10(it.value().get<double>());
  }
  return out;
}

std::string csv_window(const ordered& row) {
  std::string out;
  for (const auto& side : row["window"]) {
    if (!out.empty()) out += "x";
    out += fmt17(side.get<double>());
  }
  return out;
}

void print_human_header() {
  std::printf("%-12s %-8s %-10s %-44s %10s %13s %12s %10s %9s\n", "estimator",
              "lambda", "window", "param", "n", "estimate", "std_error",
              "improv", "seconds");
}

void print_human_row(const ordered& row) {
  const ordered& impr = row["improvement_vs_crude"];
  std::string impr_s = impr.is_null() ? "-" : fmt10(impr.get<double>());
  if (impr_s.size() > 10) impr_s.resize(10);
  std::string param = compact_param(row["param"]);
  if (param.size() > 44) param = param.substr(0, 41) + "...";
  std::printf("%-12s %-8s %-10s %-44s %10lld %13.6e %12.4e %10s %9.3f\n",
              row["estimator"].get<std::string>().c_str(),
              fmt10(row["lambda"].get<double>()).c_str(),
              csv_window(row).c_str(), param.c_str(), row["n"].get<long long>(),
              row["estimate"].get<double>(), row["std_error"].get<double>(),
              impr_s.c_str(), row["seconds"].get<double>());
}

void write_machine(std::ostream& out, const std::vector<ordered>& rows,
                   bool csv, double wall_seconds) {
  if (csv) {
    out << "estimator,lambda,window,param,n,seed,estimate,std_error,variance,"
           "improvement_vs_crude,seconds\n";
    for (const ordered& row : rows) {
      const ordered& impr = row["improvement_vs_crude"];
      out << row["estimator"].get<std::string>() << ','
          << fmt17(row["lambda"].get<double>()) << ',' << csv_window(row)
          << ',' << compact_param(row["param"]) << ','
          << row["n"].get<long long>() << ',' << row["seed"].get<std::uint64_t>()
          << ',' << fmt17(row["estimate"].get<double>()) << ','
          << fmt17(row["std_error"].get<double>()) << ','
          << fmt17(row["variance"].get<double>()) << ','
          << (impr.is_null() ? "" : fmt17(impr.get<double>())) << ','
          << fmt17(row["seconds"].get<double>()) << '\n';
    }
    return;
  }
  ordered meta = ordered::object();
  meta["tool"] = "gilbert";
  meta["version"] = GILBERT_VERSION;
  meta["rows"] = rows.size();
  meta["wall_seconds"] = wall_seconds;
  out << meta.dump() << '\n';
  for (const ordered& row : rows) out << row.dump() << '\n';
}

Experiment parse_experiment_json(const json& item, std::size_t idx) {
  auto fail = [&](const std::string& msg) {
    throw std::invalid_argument("experiment " + std::to_string(idx) + ": " +
                                msg);
  };
  if (!item.is_object()) fail("expected an object");
  Experiment e;
  try {
    for (const auto& [key, value] : item.items()) {
      if (key == "estimator") {
        e.estimator = value.get<std::string>();
      } else if (key == "lambda") {
        e.lambda = value.get<double>();
        e.has_lambda = true;
      } else if (key == "window") {
        if (value.is_string()) {
          e.window = parse_double_list(value.get<std::string>(), "window");
        } else if (value.is_array()) {
          e.window = value.get<std::vector<double>>();
        } else {
          fail("field \"window\" must be an array or a comma-separated string");
        }
      } else if (key == "k") {
        e.k = value.get<long long>();
        e.has_k = true;
      } else if (key == "a") {
        e.a = value.get<double>();
        e.has_a = true;
      } else if (key == "n") {
        e.n = value.get<long long>();
        e.has_n = true;
      } else if (key == "seed") {
        e.seed = value.get<std::uint64_t>();
      } else if (key == "gamma") {
        e.gamma = value.get<double>();
        e.has_gamma = true;
      } else if (key == "mu") {
        e.mu = value.get<double>();
        e.has_mu = true;
      } else if (key == "alphas") {
        e.alphas = value.get<std::vector<double>>();
      } else if (key == "candidates") {
        e.candidates = value.get<std::vector<double>>();
      } else if (key == "tail") {
        e.tail = value.get<std::string>();
      } else if (key == "bin_side") {
        e.bin_side = value.get<double>();
      } else {
        fail("unknown field \"" + key + "\"");
      }
    }
  } catch (const json::exception& ex) {
    fail(ex.what());
  }
  return e;
}

std::vector<Experiment> load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("spec: cannot open file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& ex) {
    throw std::invalid_argument(std::string("spec: ") + ex.what());
  }
  const json* list = nullptr;
  if (doc.is_array()) {
    list = &doc;
  } else if (doc.is_object() && doc.contains("experiments") &&
             doc["experiments"].is_array()) {
    list = &doc["experiments"];
  } else {
    throw std::invalid_argument(
        "spec: expected an array or an object with an \"experiments\" array");
  }
  std::vector<Experiment> experiments;
  for (std::size_t i = 0; i < list->size(); ++i)
    experiments.push_back(parse_experiment_json((*list)[i], i));
  if (experiments.empty()) throw std::invalid_argument("spec: no experiments");
  return experiments;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edge-count rare-event estimators for the unit-distance random "
               "geometric graph on a Poisson point process"};
  app.set_version_flag("--version", std::string("gilbert ") + GILBERT_VERSION);

  std::string spec_file, estimator, window_str, out_path, tail, alphas_str,
      candidates_str;
  double lambda = 0.0, a = 0.0, gamma = 0.0, mu = 0.0, bin_side = 1.0,
         reproduce_scale = 0.0;
  long long k = 0, n = 0;
  std::uint64_t seed = 1;
  int workers = 1;
  bool csv = false, stable = false;

  app.add_option("--spec", spec_file,
                 "JSON file with an \"experiments\" array (flags override "
                 "file values)");
  app.add_option("--estimator", estimator,
                 "one of: crude1d cond_p0 cond_p1 analytic_m0 analytic_m1 "
                 "crude_nd cond_lower cond_upper is_lower is_upper quantiles "
                 "mu_estimate pilot_gamma");
  app.add_option("--lambda", lambda, "point process intensity");
  app.add_option("--window", window_str,
                 "comma-separated side lengths, e.g. \"20,20\"");
  app.add_option("--k", k, "edge-count threshold (1D estimators)");
  app.add_option("--a", a, "relative deviation from mu in (0, 1)");
  app.add_option("--n", n, "number of replicates");
  app.add_option("--seed", seed, "base seed for the replicate streams");
  app.add_option("--gamma", gamma, "tilting parameter, >= 1");
  app.add_option("--mu", mu, "mean edge count of the full configuration");
  app.add_option("--out", out_path,
                 "write results to this file (\"-\" for stdout); with "
                 "--reproduce-tables, the output directory");
  app.add_option("--workers", workers, "worker threads")
      ->check(CLI::Range(1, 256));
  app.add_option("--reproduce-tables", reproduce_scale,
                 "rerun every published table cell at this fraction of the "
                 "reference replicate counts");
  app.add_option("--alphas", alphas_str,
                 "comma-separated quantile levels (quantiles estimator)");
  app.add_option("--candidates", candidates_str,
                 "comma-separated gamma candidates (pilot_gamma)");
  app.add_option("--tail", tail, "lower or upper (pilot_gamma)")
      ->check(CLI::IsMember({"lower", "upper"}));
  app.add_option("--bin-side", bin_side, "birth-proposal bin side (is_upper)");
  app.add_flag("--csv", csv, "write CSV instead of JSON lines");
  app.add_flag("--stable-output", stable,
               "zero all timing fields so reruns are byte-identical");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex);
    return code == 0 ? 0 : 2;
  }

  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (app.count("--reproduce-tables")) {
      gilbert::tables::reproduce_tables(
          reproduce_scale, out_path.empty() ? "." : out_path, workers);
      return 0;
    }

    std::vector<Experiment> experiments;
    if (!spec_file.empty()) {
      experiments = load_spec_file(spec_file);
    } else {
      if (!app.count("--estimator"))
        throw std::invalid_argument("missing field \"estimator\"");
      experiments.emplace_back();
    }
    for (Experiment& e : experiments) {
      if (app.count("--estimator")) e.estimator = estimator;
      if (app.count("--lambda")) {
        e.lambda = lambda;
        e.has_lambda = true;
      }
      if (app.count("--window"))
        e.window = parse_double_list(window_str, "window");
      if (app.count("--k")) {
        e.k = k;
        e.has_k = true;
      }
      if (app.count("--a")) {
        e.a = a;
        e.has_a = true;
      }
      if (app.count("--n")) {
        e.n = n;
        e.has_n = true;
      }
      if (app.count("--seed")) e.seed = seed;
      if (app.count("--gamma")) {
        e.gamma = gamma;
        e.has_gamma = true;
      }
      if (app.count("--mu")) {
        e.mu = mu;
        e.has_mu = true;
      }
      if (app.count("--alphas"))
        e.alphas = parse_double_list(alphas_str, "alphas");
      if (app.count("--candidates"))
        e.candidates = parse_double_list(candidates_str, "candidates");
      if (app.count("--tail")) e.tail = tail;
      if (app.count("--bin-side")) e.bin_side = bin_side;
    }

    std::set<std::string> mu_available;
    for (std::size_t i = 0; i < experiments.size(); ++i) {
      validate_experiment(experiments[i], i, mu_available);
      if (experiments[i].estimator == "mu_estimate")
        mu_available.insert(mu_key(experiments[i]));
    }

    const bool machine_stdout = out_path == "-";
    std::map<std::string, double> mu_cache;
    std::vector<ordered> rows;
    if (!machine_stdout) {
      std::printf("gilbert %s | experiments: %zu | workers: %d\n",
                  GILBERT_VERSION, experiments.size(), workers);
      print_human_header();
    }
    for (const Experiment& e : experiments) {
      std::vector<ordered> r = run_experiment(e, mu_cache, stable, workers);
      for (ordered& row : r) {
        if (!machine_stdout) print_human_row(row);
        rows.push_back(std::move(row));
      }
    }
    const std::chrono::duration<double> wall =
        std::chrono::steady_clock::now() - t0;
    const double wall_seconds = stable ? 0.0 : wall.count();
    if (machine_stdout) {
      write_machine(std::cout, rows, csv, wall_seconds);
    } else if (!out_path.empty()) {
      std::ofstream out(out_path);
      if (!out)
        throw std::runtime_error("cannot open --out file: " + out_path);
      write_machine(out, rows, csv, wall_seconds);
      std::printf("wrote %zu rows to %s\n", rows.size(), out_path.c_str());
    }
    return 0;
  } catch (const std::invalid_argument& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 2;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 3;
  }
}
