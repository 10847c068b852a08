#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "consonance/coherence.hpp"
#include "consonance/qstate.hpp"
#include "consonance/unitary.hpp"

namespace consonance {

struct OptimizerConfig {
  Preset preset = Preset::SingleParty;
  int depth = 3;                              // NonglobalCircuit only
  std::vector<std::vector<int>> supports;     // NonglobalCircuit only; empty = default_supports
  int restarts = 32;
  std::uint64_t seed = 0;
  double mu0 = 10.0;
  double mu_growth = 10.0;
  int mu_stages = 4;
  double eps_l = 1e-6;
  double tol_value = 1e-6;
  int max_evals = 20000;                      // per restart, all stages included
  /// Extra starting points (flat circuit parameters), run after the seeded restarts.
  std::vector<std::vector<double>> warm_starts;
  /// Worker threads for restarts; 0 = hardware concurrency.
  unsigned threads = 0;

  /// Throws UsageError on out-of-range settings.
  void check() const;
  /// Circuit template (identity parameters) for the configured search space.
  [[nodiscard]] LocalCircuit circuit_template(const Dims& dims) const;
};

struct RestartStats {
  double best_value;   // +inf when no feasible point was seen
  double min_l;        // smallest local coherence seen
  int evals;
};

struct ConsonanceReport {
  double value = 0.0;
  double l_residual = 0.0;
  bool feasible = false;
  LocalCircuit circuit;
  int best_restart = -1;
  std::vector<RestartStats> per_restart;
};

/// Infimum of the nonlocal coherence over the configured unitary search
/// space, subject to local coherence <= eps_l.
///
/// Each start minimizes S + mu*L with Nelder-Mead over a staged penalty
/// schedule, then polishes feasibility by minimizing the local coherence
/// alone. Every evaluated point with L <= eps_l is a candidate. Restart 0 is
/// the identity; restarts 1..n draw theta uniformly in [-pi, pi].
[[nodiscard]] ConsonanceReport consonance(const DensityMatrix& rho, const OptimizerConfig& config = {});

/// (sum_k P_k)^2 - sum_k P_k^2 over the Schmidt coefficients P_k; the
/// nonlocal coherence of the Schmidt-form density matrix.
[[nodiscard]] double consonance_pure_bipartite(const PureState& psi);

struct OracleResult {
  double min_value;    // +inf when no sample was feasible
  int feasible_count;
};

/// Random-sampling upper bound on the consonance. Sample 0 is the identity.
[[nodiscard]] OracleResult oracle_consonance(const DensityMatrix& rho, const OptimizerConfig& config, int samples,
                                             std::uint64_t seed);

// -- exposed for tests ------------------------------------------------------

struct NelderMeadOptions {
  double initial_step = 0.5;
  double f_tol = 1e-14;
  double x_tol = 1e-10;
  int max_evals = 5000;
  int max_restarts = 8;  // simplex rebuilds around the incumbent
};

struct NelderMeadResult {
  std::vector<double> x;
  double f;
  int evals;
};

using Objective = std::function<double(std::span<const double>)>;

/// Adaptive-coefficient Nelder-Mead with simplex rebuilds on convergence.
[[nodiscard]] NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opt);

}  // namespace consonance
