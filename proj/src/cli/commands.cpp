#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <sstream>

#include "sparsepc/baselines.hpp"
#include "sparsepc/cli.hpp"
#include "sparsepc/eespca.hpp"
#include "sparsepc/model_selection.hpp"
#include "sparsepc/rng.hpp"
#include "sparsepc/simulation.hpp"

namespace sparsepc::cli {

namespace {

using Json = nlohmann::ordered_json;

struct Options {
  std::string input;
  std::string output;
  std::string format;
  std::string methods;
  int components = 1;
  long n = 100;
  long p = 10;
  long b = 4;
  double rho = 0.5;
  int reps = 50;
  std::string vary;
  std::string values;
  int nfolds = 5;
  unsigned long long seed = kDefaultSeed;
  bool no_center = false;
  double tol = 1e-8;
  int max_iter = 1000;
  bool omit_timing = false;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> out;
  for (const auto& name : split_list(text)) {
    const auto m = parse_method(name);
    if (!m) throw InputError("unknown method '" + name + "'");
    if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
  }
  if (out.empty()) throw InputError("no method given");
  return out;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0' || !std::isfinite(v)) {
      throw InputError("cannot parse value '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

int thread_count() {
  const char* env = std::getenv("SPARSEPC_THREADS");
  if (!env) return 1;
  const int t = std::atoi(env);
  return t > 0 ? t : 1;
}

void emit(const Options& opt, const std::string& text, std::ostream& out) {
  if (opt.output.empty() || opt.output == "-") {
    out << text;
  } else {
    write_text_file(opt.output, text);
  }
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
    return path.substr(0, dot) + suffix + path.substr(dot);
  }
  return path + suffix + ".csv";
}

DataMatrix load_input(const Options& opt) {
  if (opt.input.empty()) throw InputError("--input is required");
  Matrix raw = read_matrix_csv(opt.input);
  if (raw.rows() < 2 || raw.cols() < 2) {
    throw InputError("input needs at least 2 rows and 2 columns");
  }
  if (opt.no_center) {
    try {
      return DataMatrix(std::move(raw), true);
    } catch (const Error&) {
      throw InputError("--no-center given but input columns are not centered");
    }
  }
  return mean_center(DataMatrix(std::move(raw)));
}

bool is_tuned(Method m) {
  return m == Method::Spc || m == Method::Spc1se || m == Method::TPower || m == Method::Rifle;
}

Method cv_method(Method m) { return m == Method::Spc1se ? Method::Spc : m; }

Json nullable(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

SimSpec base_spec(const Options& opt) {
  SimSpec s;
  s.n = opt.n;
  s.p = opt.p;
  s.b = opt.b;
  s.rho = opt.rho;
  s.reps = opt.reps;
  s.seed = opt.seed;
  try {
    validate(s);
  } catch (const Error& e) {
    throw InputError(e.what());
  }
  return s;
}

GridAxis grid_axis(const Options& opt, const SimSpec& base) {
  GridAxis axis;
  if (opt.vary.empty()) {
    if (!opt.values.empty()) throw InputError("--values needs --vary");
    return axis;
  }
  if (opt.vary != "n" && opt.vary != "p" && opt.vary != "b" && opt.vary != "rho") {
    throw InputError("--vary must be one of n, p, b, rho");
  }
  axis.name = opt.vary;
  axis.values = parse_values(opt.values);
  if (axis.values.empty()) throw InputError("--vary needs --values");
  for (double v : axis.values) {
    try {
      apply_axis(base, axis.name, v);
    } catch (const Error& e) {
      throw InputError(std::string("grid value ") + format_double(v) + ": " + e.what());
    }
  }
  return axis;
}

std::string spec_prefix(const SimSpec& s) {
  return std::to_string(s.n) + "," + std::to_string(s.p) + "," + std::to_string(s.b) + "," +
         format_double(s.rho);
}

// ---------------------------------------------------------------------------

int cmd_fit(const Options& opt, std::ostream& out) {
  const DataMatrix x = load_input(opt);
  const std::vector<Method> methods = parse_methods(opt.methods.empty() ? "eespca" : opt.methods);
  if (methods.size() != 1) throw InputError("fit takes exactly one method");
  const Method method = methods.front();
  if (opt.components < 1 || opt.components >= std::min(x.n(), x.p())) {
    throw InputError("--components must lie in [1, min(n,p))");
  }
  const std::string format = opt.format.empty() ? "json" : opt.format;
  if (format != "json" && format != "csv") throw InputError("--format must be json or csv");

  EespcaOptions eopts;
  eopts.power = PowerOptions{opt.tol, opt.max_iter};

  const auto comps = deflate_components(x, opt.components, [&](const DataMatrix& residual, int idx) {
    if (method == Method::Pca) return pca_first_pc(sample_covariance(residual), eopts.power);
    if (method == Method::Eespca) return eespca_first_pc(sample_covariance(residual), eopts);
    const auto t0 = std::chrono::steady_clock::now();
    const CvResult cv = cv_select(cv_method(method), residual, default_grid(method, x.p()),
                                  opt.nfolds, derive_seed({opt.seed, static_cast<std::uint64_t>(idx)}));
    SparseComponent comp =
        fit_first_pc(method, residual, method == Method::Spc1se ? cv.chosen_1se : cv.chosen_min);
    comp.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return comp;
  });
  const double error = reconstruction_error(x, comps);
  auto runtime = [&](const SparseComponent& c) { return opt.omit_timing ? 0.0 : c.runtime; };

  std::string text;
  if (format == "json") {
    Json doc;
    doc["method"] = std::string(method_name(method));
    doc["n"] = x.n();
    doc["p"] = x.p();
    doc["centered_by_tool"] = !opt.no_center;
    Json arr = Json::array();
    for (size_t i = 0; i < comps.size(); ++i) {
      const auto& c = comps[i];
      Json jc;
      jc["component"] = i + 1;
      jc["eigenvalue"] = c.eigenvalue;
      Json support = Json::array();
      for (Index j : c.support) support.push_back(j + 1);
      jc["support"] = support;
      jc["support_size"] = c.support.size();
      jc["param"] = c.param ? Json(*c.param) : Json(nullptr);
      jc["runtime"] = runtime(c);
      jc["iterations"] = c.iterations;
      jc["converged"] = c.converged;
      jc["loadings"] = std::vector<double>(c.loadings.begin(), c.loadings.end());
      arr.push_back(std::move(jc));
    }
    doc["components"] = std::move(arr);
    doc["reconstruction_error"] = error;
    text = doc.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << "variable";
    for (size_t i = 0; i < comps.size(); ++i) os << ",pc" << i + 1;
    os << "\n";
    for (Index j = 0; j < x.p(); ++j) {
      os << j + 1;
      for (const auto& c : comps) os << "," << format_double(c.loadings[j]);
      os << "\n";
    }
    auto meta = [&](const char* name, auto getter) {
      os << name;
      for (const auto& c : comps) os << "," << getter(c);
      os << "\n";
    };
    meta("eigenvalue", [](const SparseComponent& c) { return format_double(c.eigenvalue); });
    meta("support_size", [](const SparseComponent& c) { return std::to_string(c.support.size()); });
    meta("runtime", [&](const SparseComponent& c) { return format_double(runtime(c)); });
    os << "reconstruction_error," << format_double(error);
    for (size_t i = 1; i < comps.size(); ++i) os << ",";
    os << "\n";
    text = os.str();
  }
  emit(opt, text, out);
  return kSuccess;
}

int cmd_simulate(const Options& opt, std::ostream& out, std::ostream& err) {
  const SimSpec base = base_spec(opt);
  const GridAxis axis = grid_axis(opt, base);
  const auto methods =
      parse_methods(opt.methods.empty() ? "eespca,spc,spc1se,tpower,rifle" : opt.methods);
  if (opt.nfolds < 2 || opt.nfolds > opt.n) throw InputError("--nfolds must lie in [2, n]");

  const auto records = run_grid(base, axis, methods, opt.nfolds, opt.seed, thread_count());
  auto timing = [&](double t) { return opt.omit_timing ? std::string("0") : format_double(t); };

  std::ostringstream trials;
  trials << "n,p,b,rho,replicate,method,sens,spec,balacc,recon_ratio,wall_time,chosen_param,status\n";
  for (const auto& r : records) {
    trials << spec_prefix(r.spec) << "," << r.replicate << "," << method_name(r.method) << ",";
    if (r.ok) {
      trials << format_double(r.sens) << "," << format_double(r.spec_metric) << ","
             << format_double(r.balacc) << "," << format_double(r.recon_ratio) << ","
             << timing(r.wall_time) << ","
             << (r.chosen_param ? format_double(*r.chosen_param) : std::string()) << ",ok\n";
    } else {
      trials << ",,,,,,failed\n";
      err << "trial failed (" << spec_prefix(r.spec) << ", replicate " << r.replicate << ", "
          << method_name(r.method) << "): " << r.error << "\n";
    }
  }

  const auto rows = aggregate(records);
  std::ostringstream agg;
  agg << "n,p,b,rho,method,trials,failed,sens_mean,sens_se,spec_mean,spec_se,balacc_mean,"
         "balacc_se,recon_ratio_mean,recon_ratio_se,wall_time_mean,wall_time_se\n";
  bool cell_failed = false;
  for (const auto& row : rows) {
    cell_failed = cell_failed || row.failed == row.trials;
    agg << spec_prefix(row.spec) << "," << method_name(row.method) << "," << row.trials << ","
        << row.failed;
    for (const Summary* s : {&row.sens, &row.spec_metric, &row.balacc, &row.recon_ratio}) {
      agg << "," << format_double(s->mean) << "," << format_double(s->se);
    }
    agg << "," << timing(row.wall_time.mean) << "," << timing(row.wall_time.se) << "\n";
  }

  if (opt.output.empty() || opt.output == "-") {
    out << trials.str() << "\n" << agg.str();
  } else {
    write_text_file(opt.output, trials.str());
    write_text_file(sibling_path(opt.output, "_aggregate"), agg.str());
  }
  if (cell_failed) {
    err << "every trial failed in at least one cell\n";
    return kGridFailure;
  }
  return kSuccess;
}

int cmd_bench(const Options& opt, std::ostream& out, std::ostream& err) {
  const SimSpec base = base_spec(opt);
  const GridAxis axis = grid_axis(opt, base);
  const auto methods = parse_methods(opt.methods.empty() ? "eespca,spc,tpower,rifle" : opt.methods);
  if (opt.nfolds < 2 || opt.nfolds > opt.n) throw InputError("--nfolds must lie in [2, n]");

  const auto records = run_grid(base, axis, methods, opt.nfolds, opt.seed, thread_count());
  const auto rows = aggregate(records);

  // Ratios are relative to EESPCA's mean time at the first grid value, or to
  // each method's own first cell when EESPCA is not benchmarked.
  const bool has_eespca =
      std::find(methods.begin(), methods.end(), Method::Eespca) != methods.end();
  auto baseline_for = [&](Method m) {
    const Method ref = has_eespca ? Method::Eespca : m;
    for (const auto& row : rows)
      if (row.method == ref) return std::max(row.wall_time.mean, 1e-9);
    return std::nan("");
  };

  std::ostringstream os;
  os << "n,p,b,rho,method,trials,failed,wall_time_mean,wall_time_se,ratio,log10_ratio\n";
  bool cell_failed = false;
  for (const auto& row : rows) {
    cell_failed = cell_failed || row.failed == row.trials;
    os << spec_prefix(row.spec) << "," << method_name(row.method) << "," << row.trials << ","
       << row.failed << ",";
    if (opt.omit_timing) {
      os << ",,,\n";
      continue;
    }
    const double ratio = std::max(row.wall_time.mean, 1e-9) / baseline_for(row.method);
    os << format_double(row.wall_time.mean) << "," << format_double(row.wall_time.se) << ","
       << format_double(ratio) << "," << format_double(std::log10(ratio)) << "\n";
  }
  emit(opt, os.str(), out);
  if (cell_failed) {
    err << "every trial failed in at least one cell\n";
    return kGridFailure;
  }
  return kSuccess;
}

int cmd_cv(const Options& opt, std::ostream& out) {
  const DataMatrix x = load_input(opt);
  const auto methods = parse_methods(opt.methods.empty() ? "tpower" : opt.methods);
  if (methods.size() != 1 || !is_tuned(methods.front())) {
    throw InputError("cv takes exactly one of spc, spc1se, tpower, rifle");
  }
  const Method method = methods.front();
  CvGrid grid = default_grid(method, x.p());
  if (!opt.values.empty()) grid.values = parse_values(opt.values);
  std::sort(grid.values.begin(), grid.values.end());
  grid.values.erase(std::unique(grid.values.begin(), grid.values.end()), grid.values.end());
  const std::string format = opt.format.empty() ? "csv" : opt.format;
  if (format != "json" && format != "csv") throw InputError("--format must be json or csv");

  const CvResult res = cv_select(cv_method(method), x, grid, opt.nfolds, opt.seed);

  std::string text;
  if (format == "csv") {
    std::ostringstream os;
    os << "candidate,mean_error,se_error,chosen_min,chosen_1se\n";
    for (size_t i = 0; i < grid.values.size(); ++i) {
      os << format_double(grid.values[i]) << "," << format_double(res.mean_error[i]) << ","
         << format_double(res.se_error[i]) << "," << (i == res.index_min) << ","
         << (i == res.index_1se) << "\n";
    }
    text = os.str();
  } else {
    Json doc;
    doc["method"] = std::string(method_name(method));
    doc["nfolds"] = res.nfolds;
    doc["seed"] = opt.seed;
    Json curve = Json::array();
    for (size_t i = 0; i < grid.values.size(); ++i) {
      curve.push_back({{"candidate", grid.values[i]},
                       {"mean_error", nullable(res.mean_error[i])},
                       {"se_error", nullable(res.se_error[i])}});
    }
    doc["curve"] = std::move(curve);
    doc["chosen_min"] = res.chosen_min;
    doc["chosen_1se"] = res.chosen_1se;
    text = doc.dump(2) + "\n";
  }
  emit(opt, text, out);
  return kSuccess;
}

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--output", opt.output, "Output path ('-' or empty: stdout)");
  cmd->add_option("--method", opt.methods,
                  "Comma list of methods: pca,eespca,spc,spc1se,tpower,rifle");
  cmd->add_option("--nfolds", opt.nfolds, "Cross-validation folds")->capture_default_str();
  cmd->add_option("--seed", opt.seed, "RNG seed")->capture_default_str();
  cmd->add_flag("--omit-timing", opt.omit_timing,
                "Write timing fields as 0/empty so repeated runs are byte-identical");
}

void add_input(CLI::App* cmd, Options& opt) {
  cmd->add_option("--input", opt.input, "Numeric CSV (rows = samples)")->required();
  cmd->add_flag("--no-center", opt.no_center, "Input is already column-centered");
}

void add_sim(CLI::App* cmd, Options& opt) {
  cmd->add_option("--n", opt.n, "Samples")->capture_default_str();
  cmd->add_option("--p", opt.p, "Variables")->capture_default_str();
  cmd->add_option("--b", opt.b, "Correlated block size")->capture_default_str();
  cmd->add_option("--rho", opt.rho, "Within-block covariance")->capture_default_str();
  cmd->add_option("--reps", opt.reps, "Replicates per grid value")->capture_default_str();
  cmd->add_option("--vary", opt.vary, "Grid parameter: n, p, b or rho");
  cmd->add_option("--values", opt.values, "Comma list of grid values");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Sparse principal component analysis (EESPCA and baselines)", "sparsepc"};
  app.require_subcommand(1);

  auto* fit = app.add_subcommand("fit", "Fit sparse PCs to a CSV matrix");
  add_input(fit, opt);
  add_common(fit, opt);
  fit->add_option("--components", opt.components, "Number of components")->capture_default_str();
  fit->add_option("--format", opt.format, "json (default) or csv");
  fit->add_option("--tol", opt.tol, "Power-iteration tolerance")->capture_default_str();
  fit->add_option("--max-iter", opt.max_iter, "Power-iteration iteration cap")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Run the block-covariance simulation grid");
  add_sim(simulate, opt);
  add_common(simulate, opt);

  Options bench_opt;
  bench_opt.reps = 5;
  auto* bench = app.add_subcommand("bench", "Time methods over a simulation grid");
  add_sim(bench, bench_opt);
  add_common(bench, bench_opt);

  auto* cv = app.add_subcommand("cv", "Cross-validation curve for a tuned method");
  add_input(cv, opt);
  add_common(cv, opt);
  cv->add_option("--values", opt.values, "Candidate grid (default: method's standard grid)");
  cv->add_option("--format", opt.format, "csv (default) or json");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInputError;
  }

  try {
    if (*fit) return cmd_fit(opt, out);
    if (*simulate) return cmd_simulate(opt, out, err);
    if (*bench) return cmd_bench(bench_opt, out, err);
    if (*cv) return cmd_cv(opt, out);
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    err << error_name(e.kind()) << ": " << e.what() << "\n";
    return kAlgorithmError;
  }
  return kInputError;
}

}  // namespace sparsepc::cli
