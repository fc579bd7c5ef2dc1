#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparsepc/eespca.hpp"
#include "sparsepc/model_selection.hpp"

namespace sparsepc {

/// One cell of the simulation design: n samples of a p-variate normal whose
/// first b variables share covariance rho (unit variances elsewhere).
struct SimSpec {
  Index n = 100;
  Index p = 10;
  Index b = 4;
  double rho = 0.5;
  int reps = 50;
  std::uint64_t seed = 0;
};

/// Throws InvalidBlock unless 2 <= b <= p, rho in (-1/(b-1), 1), reps >= 1
/// and n >= 2.
void validate(const SimSpec& spec);

SymMatrix block_covariance(Index p, Index b, double rho);

/// The 10-variable two-block example: covariance 0.5 among variables 0-3 and
/// between variables 8 and 9, unit variances. Top eigenvalues 2.5 and 1.5.
SymMatrix running_example_covariance();

/// n draws of N(0, sigma): X = Z L^T with L the Cholesky factor of sigma.
/// The result is not centered.
DataMatrix mvn_sample(const SymMatrix& sigma, Index n, std::uint64_t seed);

struct ClassificationMetrics {
  double sens = 0.0;    // fraction of true-zero loadings estimated as zero
  double spec = 0.0;    // fraction of true-nonzero loadings estimated nonzero
  double balacc = 0.0;  // (sens + spec) / 2
};

ClassificationMetrics classification_metrics(const SparseComponent& estimated,
                                             const std::vector<Index>& true_support);

struct TrialRecord {
  SimSpec spec;  // spec.seed holds the data seed of this replicate
  int replicate = 0;
  Method method = Method::Eespca;
  bool ok = true;
  std::string error;
  double sens = 0.0;
  double spec_metric = 0.0;
  double balacc = 0.0;
  double recon_ratio = 0.0;
  double wall_time = 0.0;
  std::optional<double> chosen_param;
};

/// The simulation parameter varied across a grid: "n", "p", "b" or "rho".
struct GridAxis {
  std::string name;
  std::vector<double> values;
};

SimSpec apply_axis(const SimSpec& base, const std::string& name, double value);

/// Seed of replicate `replicate` at grid coordinate `grid_value`.
std::uint64_t replicate_seed(std::uint64_t seed, double grid_value, int replicate);

/// All requested methods on one replicate. Tunable methods are
/// cross-validated (nfolds) and their wall time includes the CV.
std::vector<TrialRecord> run_trial(const SimSpec& spec, int replicate,
                                   const std::vector<Method>& methods, int nfolds);

/// Every grid value x replicate x method. An empty axis runs the base spec
/// alone. Trials are distributed over `threads` workers; the output order is
/// fixed (grid value, replicate, method) regardless of scheduling.
std::vector<TrialRecord> run_grid(const SimSpec& base, const GridAxis& vary,
                                  const std::vector<Method>& methods, int nfolds,
                                  std::uint64_t seed, int threads = 1);

struct Summary {
  double mean = 0.0;
  double se = 0.0;
};

struct AggregateRow {
  SimSpec spec;
  Method method = Method::Eespca;
  int trials = 0;
  int failed = 0;
  Summary sens, spec_metric, balacc, recon_ratio, wall_time;
};

/// Mean and standard error per (cell, method) over successful trials, in
/// first-appearance order.
std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records);

/// Per-variable ratio of approximate to sample loading magnitude across
/// replicates; feeds density plots of the two variable classes.
struct RatioSample {
  int replicate = 0;
  Index variable = 0;
  bool in_block = false;
  double ratio = 0.0;
};
std::vector<RatioSample> loading_ratio_samples(const SimSpec& spec, std::uint64_t seed);

}  // namespace sparsepc
