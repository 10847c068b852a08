#include "consonance/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <utility>

#include "consonance/rng.hpp"
#include "parallel.hpp"

namespace consonance {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kOracleStream = 1ULL << 63;

}  // namespace

// ---------------------------------------------------------------------------
// Nelder-Mead

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0, const NelderMeadOptions& opt) {
  const std::size_t n = x0.size();
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return f(x);
  };

  std::vector<double> best_x = x0;
  double best_f = eval(x0);
  if (n == 0) return {best_x, best_f, evals};

  const double nd = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / nd;
  const double gamma = 0.75 - 1.0 / (2.0 * nd);
  const double delta = 1.0 - 1.0 / nd;

  double step = opt.initial_step;
  std::vector<std::vector<double>> simplex(n + 1);
  std::vector<double> fv(n + 1);
  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), xr(n), xe(n), xc(n);

  for (int rebuild = 0; rebuild <= opt.max_restarts && evals < opt.max_evals; ++rebuild) {
    const double f_at_rebuild = best_f;
    simplex[0] = best_x;
    fv[0] = best_f;
    for (std::size_t i = 0; i < n && evals < opt.max_evals; ++i) {
      simplex[i + 1] = best_x;
      simplex[i + 1][i] += step;
      fv[i + 1] = eval(simplex[i + 1]);
    }
    if (evals >= opt.max_evals) break;

    while (evals < opt.max_evals) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
      const std::size_t ib = order.front(), iw = order.back(), isw = order[n - 1];

      double diameter = 0.0;
      for (std::size_t k = 1; k <= n; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
          diameter = std::max(diameter, std::abs(simplex[order[k]][j] - simplex[ib][j]));
        }
      }
      if (fv[iw] - fv[ib] <= opt.f_tol || diameter <= opt.x_tol) break;

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[order[k]][j];
      }
      for (double& c : centroid) c /= nd;

      for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + alpha * (centroid[j] - simplex[iw][j]);
      const double fr = eval(xr);

      if (fr < fv[ib]) {
        for (std::size_t j = 0; j < n; ++j) xe[j] = centroid[j] + beta * (xr[j] - centroid[j]);
        const double fe = eval(xe);
        if (fe < fr) {
          simplex[iw] = xe;
          fv[iw] = fe;
        } else {
          simplex[iw] = xr;
          fv[iw] = fr;
        }
        continue;
      }
      if (fr < fv[isw]) {
        simplex[iw] = xr;
        fv[iw] = fr;
        continue;
      }
      bool accepted = false;
      if (fr < fv[iw]) {
        for (std::size_t j = 0; j < n; ++j) xc[j] = centroid[j] + gamma * (xr[j] - centroid[j]);
        const double fc = eval(xc);
        if (fc <= fr) {
          simplex[iw] = xc;
          fv[iw] = fc;
          accepted = true;
        }
      } else {
        for (std::size_t j = 0; j < n; ++j) xc[j] = centroid[j] + gamma * (simplex[iw][j] - centroid[j]);
        const double fc = eval(xc);
        if (fc < fv[iw]) {
          simplex[iw] = xc;
          fv[iw] = fc;
          accepted = true;
        }
      }
      if (!accepted) {
        for (std::size_t k = 0; k <= n && evals < opt.max_evals; ++k) {
          if (k == ib) continue;
          for (std::size_t j = 0; j < n; ++j) {
            simplex[k][j] = simplex[ib][j] + delta * (simplex[k][j] - simplex[ib][j]);
          }
          fv[k] = eval(simplex[k]);
        }
      }
    }

    for (std::size_t k = 0; k <= n; ++k) {
      if (fv[k] < best_f) {
        best_f = fv[k];
        best_x = simplex[k];
      }
    }
    if (f_at_rebuild - best_f <= opt.f_tol && rebuild > 0) break;
    step *= 0.5;
  }
  return {best_x, best_f, evals};
}

// ---------------------------------------------------------------------------
// Config

void OptimizerConfig::check() const {
  if (restarts < 1) throw UsageError("optimizer: restarts must be positive");
  if (!(mu0 > 0.0)) throw UsageError("optimizer: mu0 must be positive");
  if (!(mu_growth > 0.0)) throw UsageError("optimizer: mu_growth must be positive");
  if (mu_stages < 1) throw UsageError("optimizer: mu_stages must be positive");
  if (!(eps_l > 0.0) || !(eps_l < 1e-3)) throw UsageError("optimizer: eps_l must lie in (0, 1e-3)");
  if (!(tol_value > 0.0)) throw UsageError("optimizer: tol_value must be positive");
  if (max_evals < 1) throw UsageError("optimizer: max_evals must be positive");
  if (preset == Preset::NonglobalCircuit && depth < 1) throw UsageError("optimizer: depth must be positive");
}

LocalCircuit OptimizerConfig::circuit_template(const Dims& dims) const {
  if (preset == Preset::SingleParty) return LocalCircuit::single_party(dims);
  return LocalCircuit::nonglobal(dims, depth, supports);
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

/// Evaluates the coherence profile of U(theta) rho U(theta)^dagger for a
/// fixed circuit layout. Embedding index tables are computed once.
class CircuitEvaluator {
 public:
  CircuitEvaluator(const DensityMatrix& rho, const LocalCircuit& layout)
      : rho_(rho.entries()), dims_(rho.dims()), mask_(rho.dims()) {
    const int total = dims_.total();
    const int n = static_cast<int>(dims_.parties());
    for (const auto& layer : layout.layers()) {
      LayerTable t;
      t.dim = layer.params.dim;
      t.local.resize(static_cast<std::size_t>(total));
      t.spectator.resize(static_cast<std::size_t>(total));
      for (int f = 0; f < total; ++f) {
        int loc = 0, spec = 0;
        for (int p = 0; p < n; ++p) {
          const int dp = dims_[static_cast<std::size_t>(p)];
          const int digit = dims_.digit(f, static_cast<std::size_t>(p));
          if (std::find(layer.support.begin(), layer.support.end(), p) != layer.support.end()) {
            loc = loc * dp + digit;
          } else {
            spec = spec * dp + digit;
          }
        }
        t.local[static_cast<std::size_t>(f)] = loc;
        t.spectator[static_cast<std::size_t>(f)] = spec;
      }
      layers_.push_back(std::move(t));
    }
  }

  [[nodiscard]] Matrix transformed(std::span<const double> theta) const {
    const int total = dims_.total();
    Matrix u = Matrix::Identity(total, total);
    std::size_t offset = 0;
    for (const auto& t : layers_) {
      const std::size_t count = static_cast<std::size_t>(t.dim) * static_cast<std::size_t>(t.dim);
      const Matrix small = build_unitary(t.dim, theta.subspan(offset, count));
      offset += count;
      Matrix e = Matrix::Zero(total, total);
      for (int r = 0; r < total; ++r) {
        for (int c = 0; c < total; ++c) {
          if (t.spectator[static_cast<std::size_t>(r)] == t.spectator[static_cast<std::size_t>(c)]) {
            e(r, c) = small(t.local[static_cast<std::size_t>(r)], t.local[static_cast<std::size_t>(c)]);
          }
        }
      }
      u = e * u;
    }
    return u * rho_ * u.adjoint();
  }

  [[nodiscard]] CoherenceProfile evaluate(std::span<const double> theta) const {
    return profile(transformed(theta), mask_);
  }

  /// Profile plus the sum of squared moduli of the local-coherence elements,
  /// a smooth function with the same zero set as the local coherence.
  [[nodiscard]] std::pair<CoherenceProfile, double> evaluate_with_squared(std::span<const double> theta) const {
    const Matrix m = transformed(theta);
    double acc = 0.0;
    for (int r = 0; r < dims_.total(); ++r) {
      for (int c = 0; c < dims_.total(); ++c) {
        if (mask_(r, c) == CoherenceClass::LocalCoherence) acc += std::norm(m(r, c));
      }
    }
    return {profile(m, mask_), acc};
  }

 private:
  struct LayerTable {
    int dim = 0;
    std::vector<int> local;
    std::vector<int> spectator;
  };

  Matrix rho_;
  Dims dims_;
  CoherenceMask mask_;
  std::vector<LayerTable> layers_;
};

struct Candidate {
  double s = kInf;
  double l = kInf;
  std::vector<double> theta;
};

struct RestartOutcome {
  Candidate best_feasible;  // s == inf when none
  Candidate min_l;
  int evals = 0;
};

class Tracker {
 public:
  explicit Tracker(double eps_l) : eps_l_(eps_l) {}

  void observe(std::span<const double> theta, const CoherenceProfile& p) {
    ++evals_;
    if (p.l_value <= eps_l_ && (p.s_value < feasible_.s || (p.s_value == feasible_.s && p.l_value < feasible_.l))) {
      feasible_ = {p.s_value, p.l_value, {theta.begin(), theta.end()}};
    }
    if (p.l_value < min_l_.l || (p.l_value == min_l_.l && p.s_value < min_l_.s)) {
      min_l_ = {p.s_value, p.l_value, {theta.begin(), theta.end()}};
    }
  }

  [[nodiscard]] RestartOutcome outcome() const { return {feasible_, min_l_, evals_}; }
  [[nodiscard]] int evals() const { return evals_; }

 private:
  double eps_l_;
  Candidate feasible_;
  Candidate min_l_;
  int evals_ = 0;
};

std::vector<double> random_theta(std::size_t count, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  std::vector<double> theta(count);
  for (double& t : theta) t = rng.uniform(-std::numbers::pi, std::numbers::pi);
  return theta;
}

RestartOutcome run_restart(const CircuitEvaluator& evaluator, std::vector<double> start, const OptimizerConfig& cfg) {
  Tracker tracker(cfg.eps_l);
  const int share = std::max(1, cfg.max_evals / (cfg.mu_stages + 1));

  std::vector<double> x = std::move(start);
  {
    const CoherenceProfile p = evaluator.evaluate(x);
    tracker.observe(x, p);
  }

  double mu = cfg.mu0;
  for (int stage = 0; stage < cfg.mu_stages && tracker.evals() < cfg.max_evals; ++stage) {
    const Objective penalized = [&](std::span<const double> theta) {
      const CoherenceProfile p = evaluator.evaluate(theta);
      tracker.observe(theta, p);
      return p.s_value + mu * p.l_value;
    };
    NelderMeadOptions opt;
    opt.initial_step = stage == 0 ? 0.5 : 0.1;
    opt.max_evals = std::min(share, cfg.max_evals - tracker.evals());
    x = nelder_mead(penalized, x, opt).x;
    mu *= cfg.mu_growth;
  }

  // Feasibility polish from the best penalized point.
  if (tracker.evals() < cfg.max_evals) {
    const Objective polish = [&](std::span<const double> theta) {
      const auto [p, l2] = evaluator.evaluate_with_squared(theta);
      tracker.observe(theta, p);
      return l2;
    };
    NelderMeadOptions opt;
    opt.initial_step = 0.05;
    opt.f_tol = 1e-30;
    opt.x_tol = 1e-13;
    opt.max_evals = cfg.max_evals - tracker.evals();
    (void)nelder_mead(polish, x, opt);
  }
  return tracker.outcome();
}

}  // namespace

// ---------------------------------------------------------------------------
// Public entry points

ConsonanceReport consonance(const DensityMatrix& rho, const OptimizerConfig& config) {
  config.check();
  if (const auto v = validate(rho); !v.empty()) {
    throw ValidationError("consonance: input is not a valid density matrix (" + to_string(v.front().invariant) + ")");
  }
  const LocalCircuit layout = config.circuit_template(rho.dims());
  layout.check(rho.dims());
  const std::size_t nparams = layout.parameter_count();
  for (const auto& w : config.warm_starts) {
    if (w.size() != nparams) throw UsageError("consonance: warm start has wrong parameter count");
  }

  const CircuitEvaluator evaluator(rho, layout);
  const std::size_t seeded = static_cast<std::size_t>(config.restarts) + 1;
  const std::size_t jobs = seeded + config.warm_starts.size();
  std::vector<RestartOutcome> outcomes(jobs);

  parallel_for(jobs, config.threads, [&](std::size_t i) {
    std::vector<double> start;
    if (i == 0) {
      start.assign(nparams, 0.0);
    } else if (i < seeded) {
      start = random_theta(nparams, config.seed, i);
    } else {
      start = config.warm_starts[i - seeded];
    }
    outcomes[i] = run_restart(evaluator, std::move(start), config);
  });

  // Deterministic reduction in restart order.
  ConsonanceReport report;
  std::size_t chosen = 0;
  bool any_feasible = false;
  for (std::size_t i = 0; i < jobs; ++i) {
    const auto& o = outcomes[i];
    report.per_restart.push_back({o.best_feasible.s, o.min_l.l, o.evals});
    if (o.best_feasible.s == kInf) continue;
    const auto& best = outcomes[chosen].best_feasible;
    if (!any_feasible || o.best_feasible.s < best.s || (o.best_feasible.s == best.s && o.best_feasible.l < best.l)) {
      chosen = i;
      any_feasible = true;
    }
  }
  if (!any_feasible) {
    for (std::size_t i = 1; i < jobs; ++i) {
      const auto& a = outcomes[i].min_l;
      const auto& b = outcomes[chosen].min_l;
      if (a.l < b.l || (a.l == b.l && a.s < b.s)) chosen = i;
    }
  }
  const Candidate& pick = any_feasible ? outcomes[chosen].best_feasible : outcomes[chosen].min_l;

  report.circuit = layout.with_parameters(pick.theta);
  report.best_restart = static_cast<int>(chosen);
  const CoherenceProfile p = profile(apply(report.circuit, rho));
  report.value = p.s_value;
  report.l_residual = p.l_value;
  report.feasible = p.l_value <= config.eps_l;
  return report;
}

double consonance_pure_bipartite(const PureState& psi) {
  const Dims& dims = psi.dims();
  if (dims.parties() != 2) throw UsageError("consonance_pure_bipartite: state must have exactly two parties");
  Matrix coeff(dims[0], dims[1]);
  for (int i = 0; i < dims[0]; ++i) {
    for (int j = 0; j < dims[1]; ++j) coeff(i, j) = psi[i * dims[1] + j];
  }
  double sum = 0.0, sum_sq = 0.0;
  for (double p : singular_values(coeff)) {
    sum += p;
    sum_sq += p * p;
  }
  return std::max(0.0, sum * sum - sum_sq);
}

OracleResult oracle_consonance(const DensityMatrix& rho, const OptimizerConfig& config, int samples,
                               std::uint64_t seed) {
  if (samples < 1) throw UsageError("oracle_consonance: samples must be >= 1");
  const LocalCircuit layout = config.circuit_template(rho.dims());
  const CircuitEvaluator evaluator(rho, layout);
  const std::size_t nparams = layout.parameter_count();
  OracleResult out{kInf, 0};
  for (int k = 0; k < samples; ++k) {
    const std::vector<double> theta =
        k == 0 ? std::vector<double>(nparams, 0.0) : random_theta(nparams, seed, kOracleStream + static_cast<std::uint64_t>(k));
    const CoherenceProfile p = evaluator.evaluate(theta);
    if (p.l_value <= config.eps_l) {
      ++out.feasible_count;
      out.min_value = std::min(out.min_value, p.s_value);
    }
  }
  return out;
}

}  // namespace consonance
