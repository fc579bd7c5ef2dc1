#include "sparsepc/simulation.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <thread>
#include <tuple>

#include "sparsepc/baselines.hpp"
#include "sparsepc/rng.hpp"

namespace sparsepc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<Index> leading_support(Index b) {
  std::vector<Index> s(static_cast<size_t>(b));
  for (Index i = 0; i < b; ++i) s[static_cast<size_t>(i)] = i;
  return s;
}

double grid_coordinate(const SimSpec& spec, const std::string& axis) {
  if (axis == "n") return static_cast<double>(spec.n);
  if (axis == "p") return static_cast<double>(spec.p);
  if (axis == "b") return static_cast<double>(spec.b);
  return spec.rho;
}

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  if (xs.empty()) {
    s.mean = std::nan("");
    s.se = std::nan("");
    return s;
  }
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.se = std::sqrt(ss / static_cast<double>(xs.size() - 1)) /
           std::sqrt(static_cast<double>(xs.size()));
  }
  return s;
}

}  // namespace

void validate(const SimSpec& spec) {
  if (spec.b < 2 || spec.b > spec.p) {
    throw Error(ErrorKind::InvalidBlock, "block size must satisfy 2 <= b <= p");
  }
  const double lower = -1.0 / static_cast<double>(spec.b - 1);
  if (!(spec.rho > lower && spec.rho < 1.0)) {
    throw Error(ErrorKind::InvalidBlock, "rho outside (-1/(b-1), 1)");
  }
  if (spec.reps < 1) throw Error(ErrorKind::InvalidBlock, "reps must be >= 1");
  if (spec.n < 2) throw Error(ErrorKind::InvalidBlock, "n must be >= 2");
}

SymMatrix block_covariance(Index p, Index b, double rho) {
  SimSpec probe;
  probe.p = p;
  probe.b = b;
  probe.rho = rho;
  validate(probe);
  Matrix sigma = Matrix::Identity(p, p);
  for (Index i = 0; i < b; ++i)
    for (Index j = 0; j < b; ++j)
      if (i != j) sigma(i, j) = rho;
  return SymMatrix(std::move(sigma));
}

SymMatrix running_example_covariance() {
  Matrix sigma = block_covariance(10, 4, 0.5).values();
  sigma(8, 9) = 0.5;
  sigma(9, 8) = 0.5;
  return SymMatrix(std::move(sigma));
}

DataMatrix mvn_sample(const SymMatrix& sigma, Index n, std::uint64_t seed) {
  const Index p = sigma.dim();
  const Matrix& s = sigma.values();
  Matrix chol = Matrix::Zero(p, p);
  for (Index j = 0; j < p; ++j) {
    double d = s(j, j) - chol.row(j).head(j).squaredNorm();
    if (d < -1e-10) throw Error(ErrorKind::NotPD, "covariance is not positive semidefinite");
    const double pivot = d > 1e-10 ? std::sqrt(d) : 0.0;
    chol(j, j) = pivot;
    for (Index i = j + 1; i < p; ++i) {
      chol(i, j) = pivot > 0.0 ? (s(i, j) - chol.row(i).head(j).dot(chol.row(j).head(j))) / pivot
                               : 0.0;
    }
  }
  if (n < 1) throw Error(ErrorKind::EmptyMatrix, "sample size must be positive");
  Rng rng(seed);
  Matrix z(n, p);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < p; ++j) z(i, j) = rng.normal();
  return DataMatrix(z * chol.transpose());
}

ClassificationMetrics classification_metrics(const SparseComponent& estimated,
                                             const std::vector<Index>& true_support) {
  const Index p = estimated.loadings.size();
  std::vector<bool> truth(static_cast<size_t>(p), false);
  for (Index j : true_support) {
    if (j < 0 || j >= p) throw Error(ErrorKind::IndexOutOfRange, "support index outside [0, p)");
    truth[static_cast<size_t>(j)] = true;
  }
  Index true_nonzero = 0;
  for (bool t : truth) true_nonzero += t;
  if (true_nonzero == 0 || true_nonzero == p) {
    throw Error(ErrorKind::UndefinedMetric, "true support must be a non-empty proper subset");
  }
  Index zeros_hit = 0;
  Index nonzeros_hit = 0;
  for (Index j = 0; j < p; ++j) {
    const bool est_nonzero = estimated.loadings[j] != 0.0;
    if (truth[static_cast<size_t>(j)]) {
      nonzeros_hit += est_nonzero;
    } else {
      zeros_hit += !est_nonzero;
    }
  }
  ClassificationMetrics m;
  m.sens = static_cast<double>(zeros_hit) / static_cast<double>(p - true_nonzero);
  m.spec = static_cast<double>(nonzeros_hit) / static_cast<double>(true_nonzero);
  m.balacc = (m.sens + m.spec) / 2.0;
  return m;
}

SimSpec apply_axis(const SimSpec& base, const std::string& name, double value) {
  SimSpec out = base;
  if (name == "n") {
    out.n = static_cast<Index>(std::llround(value));
  } else if (name == "p") {
    out.p = static_cast<Index>(std::llround(value));
  } else if (name == "b") {
    out.b = static_cast<Index>(std::llround(value));
  } else if (name == "rho") {
    out.rho = value;
  } else {
    throw Error(ErrorKind::InvalidParameter, "unknown grid parameter '" + name + "'");
  }
  validate(out);
  return out;
}

std::uint64_t replicate_seed(std::uint64_t seed, double grid_value, int replicate) {
  return derive_seed({seed, double_bits(grid_value), static_cast<std::uint64_t>(replicate)});
}

std::vector<TrialRecord> run_trial(const SimSpec& spec, int replicate,
                                   const std::vector<Method>& methods, int nfolds) {
  std::vector<TrialRecord> out;
  out.reserve(methods.size());
  auto blank = [&](Method m) {
    TrialRecord r;
    r.spec = spec;
    r.replicate = replicate;
    r.method = m;
    return r;
  };

  std::optional<DataMatrix> xc;
  double pca_error = 0.0;
  try {
    validate(spec);
    xc = mean_center(mvn_sample(block_covariance(spec.p, spec.b, spec.rho), spec.n, spec.seed));
    const Vector v_pca = power_iteration(sample_covariance(*xc)).vector;
    pca_error = frobenius_sq(rank1_residual(*xc, v_pca));
  } catch (const Error& e) {
    for (Method m : methods) {
      TrialRecord r = blank(m);
      r.ok = false;
      r.error = e.what();
      out.push_back(std::move(r));
    }
    return out;
  }

  const std::vector<Index> truth = leading_support(spec.b);
  const std::uint64_t cv_seed = derive_seed({spec.seed, 0xC0FFEEULL});

  // SPC and SPC.1se share one CV run; each is charged the full CV time.
  std::optional<CvResult> spc_cv;
  double spc_cv_time = 0.0;

  for (Method m : methods) {
    TrialRecord r = blank(m);
    try {
      SparseComponent comp;
      const auto t0 = Clock::now();
      double extra_time = 0.0;
      switch (m) {
        case Method::Pca:
        case Method::Eespca:
          comp = fit_first_pc(m, *xc, 0.0);
          break;
        case Method::Spc:
        case Method::Spc1se: {
          if (!spc_cv) {
            const auto tc = Clock::now();
            spc_cv = cv_select(Method::Spc, *xc, CvGrid::l1_bound(spec.p), nfolds, cv_seed);
            spc_cv_time = seconds_since(tc);
          } else {
            extra_time = spc_cv_time;
          }
          const double c = m == Method::Spc ? spc_cv->chosen_min : spc_cv->chosen_1se;
          comp = fit_first_pc(m, *xc, c);
          r.chosen_param = c;
          break;
        }
        case Method::TPower:
        case Method::Rifle: {
          const CvResult cv = cv_select(m, *xc, CvGrid::cardinality(spec.p), nfolds, cv_seed);
          comp = fit_first_pc(m, *xc, cv.chosen_min);
          r.chosen_param = cv.chosen_min;
          break;
        }
      }
      r.wall_time = seconds_since(t0) + extra_time;
      const ClassificationMetrics cm = classification_metrics(comp, truth);
      r.sens = cm.sens;
      r.spec_metric = cm.spec;
      r.balacc = cm.balacc;
      r.recon_ratio = frobenius_sq(rank1_residual(*xc, comp.loadings)) / pca_error;
    } catch (const Error& e) {
      r.ok = false;
      r.error = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TrialRecord> run_grid(const SimSpec& base, const GridAxis& vary,
                                  const std::vector<Method>& methods, int nfolds,
                                  std::uint64_t seed, int threads) {
  struct Job {
    SimSpec spec;
    int replicate;
  };
  std::vector<Job> jobs;
  std::vector<double> values = vary.values;
  const std::string axis = vary.name.empty() ? std::string("n") : vary.name;
  if (vary.name.empty()) values = {grid_coordinate(base, axis)};
  for (double value : values) {
    SimSpec cell = apply_axis(base, axis, value);
    for (int r = 0; r < base.reps; ++r) {
      Job job{cell, r};
      job.spec.seed = replicate_seed(seed, value, r);
      jobs.push_back(job);
    }
  }

  std::vector<std::vector<TrialRecord>> slots(jobs.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < jobs.size(); i = next++) {
      slots[i] = run_trial(jobs[i].spec, jobs[i].replicate, methods, nfolds);
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(jobs.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::vector<TrialRecord> out;
  for (auto& slot : slots)
    for (auto& rec : slot) out.push_back(std::move(rec));
  return out;
}

std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records) {
  using Key = std::tuple<Index, Index, Index, double, int>;
  std::map<Key, size_t> index;
  std::vector<AggregateRow> rows;
  struct Acc {
    std::vector<double> sens, spec, balacc, recon, time;
  };
  std::vector<Acc> accs;
  for (const auto& r : records) {
    const Key key{r.spec.n, r.spec.p, r.spec.b, r.spec.rho, static_cast<int>(r.method)};
    auto [it, inserted] = index.try_emplace(key, rows.size());
    if (inserted) {
      AggregateRow row;
      row.spec = r.spec;
      row.spec.seed = 0;
      row.method = r.method;
      rows.push_back(row);
      accs.emplace_back();
    }
    AggregateRow& row = rows[it->second];
    Acc& acc = accs[it->second];
    ++row.trials;
    if (!r.ok) {
      ++row.failed;
      continue;
    }
    acc.sens.push_back(r.sens);
    acc.spec.push_back(r.spec_metric);
    acc.balacc.push_back(r.balacc);
    acc.recon.push_back(r.recon_ratio);
    acc.time.push_back(r.wall_time);
  }
  for (size_t i = 0; i < rows.size(); ++i) {
    rows[i].sens = summarize(accs[i].sens);
    rows[i].spec_metric = summarize(accs[i].spec);
    rows[i].balacc = summarize(accs[i].balacc);
    rows[i].recon_ratio = summarize(accs[i].recon);
    rows[i].wall_time = summarize(accs[i].time);
  }
  return rows;
}

std::vector<RatioSample> loading_ratio_samples(const SimSpec& spec, std::uint64_t seed) {
  validate(spec);
  const SymMatrix sigma = block_covariance(spec.p, spec.b, spec.rho);
  std::vector<RatioSample> out;
  for (int r = 0; r < spec.reps; ++r) {
    const DataMatrix x = mean_center(mvn_sample(sigma, spec.n, replicate_seed(seed, spec.rho, r)));
    const SymMatrix cov = sample_covariance(x);
    const EigenPair top = power_iteration(cov);
    const Vector sub = submatrix_top_eigenvalues(cov, top.vector);
    const LoadingRatios ratios =
        loading_ratios(approx_squared_loadings(cov, top.value, sub), top.vector);
    for (Index j = 0; j < spec.p; ++j) {
      out.push_back({r, j, j < spec.b, ratios.values[j]});
    }
  }
  return out;
}

}  // namespace sparsepc
