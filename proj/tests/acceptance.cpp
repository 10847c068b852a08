// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes. Archived optimizer reports go to
// ./acceptance_reports/ (relative to the working directory).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "consonance/coherence.hpp"
#include "consonance/measures.hpp"
#include "consonance/optimizer.hpp"
#include "consonance/rng.hpp"
#include "consonance/state_io.hpp"
#include "consonance/states.hpp"
#include "consonance/sweep.hpp"

using namespace consonance;

namespace {

// Soundness bookkeeping shared by every optimizer run (criterion 9).
struct SoundnessLog {
  int runs = 0;
  double worst_value_error = 0.0;
  bool feasibility_consistent = true;
};
SoundnessLog g_soundness;

ConsonanceReport optimize(const DensityMatrix& rho, const OptimizerConfig& cfg) {
  ConsonanceReport r = consonance::consonance(rho, cfg);
  const CoherenceProfile p = profile(apply(r.circuit, rho));
  ++g_soundness.runs;
  g_soundness.worst_value_error = std::max(g_soundness.worst_value_error, std::abs(p.s_value - r.value));
  if (r.feasible != (p.l_value <= cfg.eps_l)) g_soundness.feasibility_consistent = false;
  return r;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (!pass) detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

FamilySpec qubit_qutrit_spec(double alpha, double gamma) {
  FamilySpec f;
  f.name = "two_param_2x3";
  f.params = {{"alpha", format_number(alpha)}, {"gamma", format_number(gamma)}};
  return f;
}

FamilySpec werner_spec(double a) {
  FamilySpec f;
  f.name = "werner";
  f.params["a"] = format_number(a);
  return f;
}

// 1. Werner closed-form suite.
Outcome werner_suite() {
  Outcome o;
  double worst_opt = 0.0, worst_conc = 0.0, worst_discord = 0.0, worst_eof = 0.0;
  auto xlx = [](double x) { return x > 0 ? x * std::log2(x) : 0.0; };
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k <= 10; ++k) {
    const double a = k / 10.0;
    const DensityMatrix rho = werner(a);
    o.require(consonance_closed_form(werner_spec(a)).value == a, "consonance_cf != a at a=" + fmt(a));
    const ConsonanceReport r = optimize(rho, OptimizerConfig{});
    o.require(r.feasible, "infeasible at a=" + fmt(a));
    worst_opt = std::max(worst_opt, std::abs(r.value - a));
    const double c = concurrence_2x2(rho);
    worst_conc = std::max(worst_conc, std::abs(c - std::max(0.0, (3 * a - 1) / 2)));
    const double d = 0.25 * (xlx(1 - a) + xlx(1 + 3 * a) - 2 * xlx(1 + a));
    worst_discord = std::max(worst_discord, std::abs(discord_werner(a) - d));
    const double f = (1 + std::sqrt(1 - c * c)) / 2;
    const double e = -xlx(f) - xlx(1 - f);
    worst_eof = std::max(worst_eof, std::abs(eof_from_concurrence(c) - e));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(worst_opt < 1e-3, "optimizer error " + fmt(worst_opt));
  o.require(worst_conc < 1e-10, "concurrence error " + fmt(worst_conc));
  o.require(worst_discord < 1e-10, "discord error " + fmt(worst_discord));
  o.require(worst_eof < 1e-10, "eof error " + fmt(worst_eof));
  o.require(secs <= 120.0, "optimizer column took " + fmt(secs) + " s");
  if (o.pass) {
    o.detail << "11 points, max |opt - a| = " << fmt(worst_opt) << ", optimizer column " << fmt(secs) << " s";
  }
  return o;
}

// 2. Pure-state suite.
Outcome pure_suite() {
  Outcome o;
  double worst_cf = 0.0, worst_conc = 0.0, worst_opt = 0.0;
  int feasible = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const PureState psi = random_pure(Dims{2, 2}, s);
    const Complex a = psi[3], b = psi[2], c = psi[1], d = psi[0];
    const double closed = 2.0 * std::abs(a * d - b * c);
    const double schmidt = consonance_pure_bipartite(psi);
    worst_cf = std::max(worst_cf, std::abs(schmidt - closed));
    worst_conc = std::max(worst_conc, std::abs(schmidt - concurrence_2x2(density_from_pure(psi))));
    if (s < 20) {
      const ConsonanceReport r = optimize(density_from_pure(psi), OptimizerConfig{});
      feasible += r.feasible;
      worst_opt = std::max(worst_opt, std::abs(r.value - closed));
    }
  }
  o.require(worst_cf < 1e-9, "Schmidt vs 2|ad-bc| error " + fmt(worst_cf));
  o.require(worst_conc < 1e-9, "Schmidt vs concurrence error " + fmt(worst_conc));
  o.require(feasible == 20, std::to_string(20 - feasible) + " optimizer runs infeasible");
  o.require(worst_opt < 1e-3, "optimizer error " + fmt(worst_opt));
  if (o.pass) o.detail << "200 states, optimizer on 20: max error " << fmt(worst_opt);
  return o;
}

// 3. Bell-like discord equals EoF of 2|ab|.
Outcome bell_like_discord_identity() {
  Outcome o;
  CounterRng rng(2024, 3);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Complex a(rng.normal(), rng.normal()), b(rng.normal(), rng.normal());
    const double n = std::sqrt(std::norm(a) + std::norm(b));
    const double c = std::min(1.0, 2.0 * std::abs(a * b) / (n * n));
    worst = std::max(worst, std::abs(discord_bell_like(a / n, b / n) - eof_from_concurrence(c)));
  }
  o.require(worst < 1e-10, "max deviation " + fmt(worst));
  if (o.pass) o.detail << "100 pairs, max deviation " << fmt(worst);
  return o;
}

// 4. Qubit-qutrit family suite.
Outcome two_by_three_suite() {
  Outcome o;
  double worst_neg = 0.0, worst_cf = 0.0, worst_opt = 0.0, worst_coincidence = 0.0;
  int opt_points = 0, opt_feasible = 0;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const double alpha = 0.5 * i / 20.0, gamma = j / 20.0;
      if (1.0 - 2.0 * alpha - gamma < -1e-12) continue;
      const double beta = std::max(0.0, two_param_beta(alpha, gamma));
      const DensityMatrix rho = two_param_qubit_qutrit(alpha, gamma);
      worst_neg = std::max(worst_neg, std::abs(negativity(rho) - std::max(0.0, 2 * alpha + 2 * gamma - 1)));
      const double cf = consonance_closed_form(qubit_qutrit_spec(alpha, gamma)).value;
      worst_cf = std::max(worst_cf, std::abs(cf - std::abs(beta - gamma)));
    }
  }
  // 5x5 optimizer subgrid spanning the feasible triangle.
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double alpha = 0.1 * i, gamma = (1 - 2 * alpha) * j / 4.0;
      const double beta = std::max(0.0, two_param_beta(alpha, gamma));
      ++opt_points;
      const ConsonanceReport r = optimize(two_param_qubit_qutrit(alpha, gamma), OptimizerConfig{});
      opt_feasible += r.feasible;
      worst_opt = std::max(worst_opt, std::abs(r.value - std::abs(beta - gamma)));
    }
  }
  // Coincidences: gamma = 0, beta = 0 and beta = gamma.
  for (int k = 0; k <= 20; ++k) {
    const double alpha = 0.5 * k / 20.0;
    {
      const double cons = consonance_closed_form(qubit_qutrit_spec(alpha, 0.0)).value;
      const double expected = (1 - 2 * alpha) / 3;
      worst_coincidence = std::max({worst_coincidence, std::abs(cons - expected),
                                    std::abs(discord_2x3(alpha, 0.0) - expected)});
    }
    {
      const double gamma = 1 - 2 * alpha;  // beta = 0
      const double expected = 1 - 2 * alpha;
      const double cons = consonance_closed_form(qubit_qutrit_spec(alpha, gamma)).value;
      worst_coincidence =
          std::max({worst_coincidence, std::abs(cons - expected), std::abs(discord_2x3(alpha, gamma) - expected),
                    std::abs(negativity(two_param_qubit_qutrit(alpha, gamma)) - expected)});
    }
    {
      const double gamma = (1 - 2 * alpha) / 4;  // beta = gamma
      const DensityMatrix rho = two_param_qubit_qutrit(alpha, gamma);
      worst_coincidence =
          std::max({worst_coincidence, consonance_closed_form(qubit_qutrit_spec(alpha, gamma)).value,
                    nonlocal_sum(rho), std::abs(discord_2x3(alpha, gamma)), negativity(rho)});
    }
  }
  o.require(worst_neg < 1e-8, "negativity error " + fmt(worst_neg));
  o.require(worst_cf < 1e-12, "closed-form consonance error " + fmt(worst_cf));
  o.require(opt_feasible == opt_points, std::to_string(opt_points - opt_feasible) + " optimizer runs infeasible");
  o.require(worst_opt < 1e-3, "optimizer error " + fmt(worst_opt));
  o.require(worst_coincidence < 1e-9, "coincidence error " + fmt(worst_coincidence));
  if (o.pass) {
    o.detail << "grid negativity error " << fmt(worst_neg) << ", optimizer on " << opt_points << " points max error "
             << fmt(worst_opt);
  }
  return o;
}

int sign(double x) { return x > 1e-12 ? 1 : (x < -1e-12 ? -1 : 0); }

// 5. Dominance and monotonicity on the fig2 and fig4 grids.
Outcome dominance_suite(SweepTable& fig2_out) {
  Outcome o;
  SweepSpec s2 = recipe("fig2");
  s2.measures = {"consonance_cf", "discord", "concurrence", "eof"};
  const SweepTable t2 = run_sweep(s2);
  fig2_out = t2;
  const auto cc = t2.column("consonance_cf"), dd = t2.column("discord"), cn = t2.column("concurrence"),
             ee = t2.column("eof");
  int dominance_failures = 0, sign_failures = 0;
  for (std::size_t k = 0; k < t2.rows.size(); ++k) {
    const auto& r = t2.rows[k];
    const double a = r[0];
    const double others = std::max({r[dd], r[cn], r[ee]});
    if (a > 0 && a < 1) {
      if (!(r[cc] > others)) ++dominance_failures;
    } else if (r[cc] < others - 1e-12) {
      ++dominance_failures;
    }
    if (k > 0 && sign(r[cc] - t2.rows[k - 1][cc]) != sign(r[dd] - t2.rows[k - 1][dd])) ++sign_failures;
  }
  SweepSpec s4 = recipe("fig4");
  s4.measures = {"consonance_cf", "discord", "negativity"};
  const SweepTable t4 = run_sweep(s4);
  const auto c4 = t4.column("consonance_cf"), d4 = t4.column("discord");
  for (std::size_t k = 1; k < t4.rows.size(); ++k) {
    if (sign(t4.rows[k][c4] - t4.rows[k - 1][c4]) != sign(t4.rows[k][d4] - t4.rows[k - 1][d4])) ++sign_failures;
  }
  o.require(dominance_failures == 0, std::to_string(dominance_failures) + " dominance failures on fig2");
  o.require(sign_failures == 0, std::to_string(sign_failures) + " monotonicity sign mismatches");
  if (o.pass) o.detail << "fig2 " << t2.rows.size() << " points, fig4 " << t4.rows.size() << " points";
  return o;
}

// 6. Consonance minus concurrence on the fig3 grid.
Outcome fig3_suite() {
  Outcome o;
  const SweepTable t = run_sweep(recipe("fig3"));
  const auto col = t.column("consonance_minus_concurrence");
  std::size_t argmax = 0;
  double worst_shape = 0.0;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    const double a = t.rows[k][0];
    const double expected = a <= 1.0 / 3.0 ? a : (1 - a) / 2;
    worst_shape = std::max(worst_shape, std::abs(t.rows[k][col] - expected));
    if (t.rows[k][col] > t.rows[argmax][col]) argmax = k;
  }
  const double a_max = t.rows[argmax][0], v_max = t.rows[argmax][col];
  o.require(std::abs(a_max - 1.0 / 3.0) < 1e-9, "maximum at a=" + fmt(a_max));
  o.require(std::abs(v_max - 1.0 / 3.0) < 1e-9, "maximum value " + fmt(v_max));
  o.require(std::abs(t.rows.back()[col]) < 1e-9, "value at a=1 is " + fmt(t.rows.back()[col]));
  o.require(worst_shape < 1e-9, "shape error " + fmt(worst_shape));
  if (o.pass) o.detail << "maximum 1/3 at a=1/3, 0 at a=1";
  return o;
}

// 7. Tensor-product-structure suite.
Outcome tps_suite() {
  Outcome o;
  const TpsRelabeling f = TpsRelabeling::werner_f_prime();
  double worst_remap = 0.0;
  for (int k = 0; k <= 20; ++k) {
    const DensityMatrix r = tps_remap(werner(k / 20.0), f);
    worst_remap = std::max({worst_remap, nonlocal_sum(r), local_coherence(r)});
  }
  double worst_eq1 = 0.0;
  CounterRng rng(77, 0);
  for (int k = 0; k < 50; ++k) {
    auto pair = [&] {
      const Complex x(rng.normal(), rng.normal()), y(rng.normal(), rng.normal());
      const double n = std::sqrt(std::norm(x) + std::norm(y));
      return std::pair{x / n, y / n};
    };
    const auto [a1, a2] = pair();
    const auto [b1, b2] = pair();
    const PureState four = tensor(bell_like(a1, a2), bell_like(b1, b2));
    const std::vector<int> perm{0, 2, 1, 3}, groups{2, 2};
    const double value = consonance_pure_bipartite(regroup(permute_subsystems(four, perm), groups));
    const double p[4] = {std::abs(a1 * b1), std::abs(a1 * b2), std::abs(a2 * b1), std::abs(a2 * b2)};
    const double sum = p[0] + p[1] + p[2] + p[3];
    const double sq = p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3];
    worst_eq1 = std::max(worst_eq1, std::abs(value - (sum * sum - sq)));
  }
  o.require(worst_remap < 1e-12, "remapped Werner coherence " + fmt(worst_remap));
  o.require(worst_eq1 < 1e-9, "regrouped consonance error " + fmt(worst_eq1));
  if (o.pass) o.detail << "21 Werner points classical after remap, 50 regrouped states";
  return o;
}

Matrix cnot() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1.0;
  return m;
}

// Parameters mapping GHZ to |000> in the default depth-3 space
// (layers {0}, {0,1}, {0,2}).
std::vector<double> ghz_witness() {
  Matrix h(2, 2);
  h << 1, 1, 1, -1;
  h /= std::numbers::sqrt2;
  Matrix h_first = Matrix::Zero(4, 4);  // H (x) I on {0,2}
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) h_first(r, c) = (r % 2 == c % 2) ? h(r / 2, c / 2) : 0.0;
  }
  std::vector<double> theta;
  for (const Matrix& u : {Matrix(Matrix::Identity(2, 2)), cnot(), Matrix(h_first * cnot())}) {
    const UnitaryParams p = params_from_unitary(u);
    theta.insert(theta.end(), p.theta.begin(), p.theta.end());
  }
  return theta;
}

void archive(const std::string& name, const std::string& state, const OptimizerConfig& cfg,
             const ConsonanceReport& r) {
  std::filesystem::create_directories("acceptance_reports");
  std::ofstream out("acceptance_reports/" + name + ".json");
  out << nlohmann::json{{"state", state}, {"config", config_to_json(cfg)}, {"report", report_to_json(r)}}.dump(2)
      << '\n';
}

// 8. Multipartite suite.
Outcome multipartite_suite() {
  Outcome o;
  const Dims d3{2, 2, 2};
  int class_failures = 0;
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      const MultiIndex ri = d3.decode(r), ci = d3.decode(c);
      int all_equal = 1, all_differ = 1;
      for (int k = 0; k < 3; ++k) {
        const int delta = ri[static_cast<std::size_t>(k)] == ci[static_cast<std::size_t>(k)];
        all_equal *= delta;
        all_differ *= 1 - delta;
      }
      const int f = (1 - all_equal) * (1 - all_differ);
      const CoherenceClass cls = classify(d3, ri, ci);
      if ((cls == CoherenceClass::LocalCoherence) != (f == 1)) ++class_failures;
      if ((cls == CoherenceClass::Diagonal) != (all_equal == 1)) ++class_failures;
    }
  }
  o.require(class_failures == 0, std::to_string(class_failures) + " classification mismatches");

  const DensityMatrix ghz_rho = density_from_pure(ghz(3));
  const DensityMatrix w_rho = density_from_pure(w_state(3));
  const CoherenceProfile pg = profile(ghz_rho), pw = profile(w_rho);
  o.require(std::abs(pg.s_value - 1) < 1e-12 && pg.l_value < 1e-12, "GHZ profile");
  o.require(pw.s_value < 1e-12 && std::abs(pw.l_value - 2) < 1e-12, "W profile");

  OptimizerConfig ng;
  ng.preset = Preset::NonglobalCircuit;
  ng.depth = 3;
  const std::vector<double> witness = ghz_witness();
  const LocalCircuit witness_circuit = ng.circuit_template(d3).with_parameters(witness);
  Matrix target = Matrix::Zero(8, 8);
  target(0, 0) = 1.0;
  const double witness_err = (apply(witness_circuit, ghz_rho).entries() - target).cwiseAbs().maxCoeff();
  o.require(witness_err < 1e-8, "witness final state off |000> by " + fmt(witness_err));
  OptimizerConfig ng_ghz = ng;
  ng_ghz.warm_starts = {witness};
  const ConsonanceReport rg = optimize(ghz_rho, ng_ghz);
  archive("ghz_nonglobal_circuit", "ghz:n=3", ng_ghz, rg);
  o.require(rg.feasible && rg.value <= 1e-4, "GHZ consonance " + fmt(rg.value));
  const double ghz_final = (apply(rg.circuit, ghz_rho).entries() - target).cwiseAbs().maxCoeff();
  o.require(ghz_final < 1e-8, "reported GHZ circuit final state off |000> by " + fmt(ghz_final));

  std::ostringstream w_summary;
  for (const Preset preset : {Preset::SingleParty, Preset::NonglobalCircuit}) {
    OptimizerConfig cfg;
    cfg.preset = preset;
    cfg.depth = 3;
    cfg.seed = 7;
    const ConsonanceReport a = optimize(w_rho, cfg);
    const ConsonanceReport b = optimize(w_rho, cfg);
    archive("w_" + to_string(preset), "w_state:n=3", cfg, a);
    const CoherenceProfile replayed = profile(apply(a.circuit, w_rho));
    o.require(std::abs(replayed.s_value - a.value) < 1e-9, "W report not re-derivable under " + to_string(preset));
    o.require(a.feasible == (replayed.l_value <= cfg.eps_l), "W feasibility flag under " + to_string(preset));
    o.require(a.value == b.value && a.circuit.parameters() == b.circuit.parameters(),
              "W run not reproducible under " + to_string(preset));
    w_summary << ", W " << to_string(preset) << " = " << fmt(a.value) << (a.feasible ? "" : " (infeasible)");
  }
  if (o.pass) o.detail << "GHZ nonglobal = " << fmt(rg.value) << w_summary.str() << " (archived)";
  return o;
}

// 9. Optimizer soundness and the oracle bound.
Outcome soundness_suite() {
  Outcome o;
  int oracle_failures = 0, points = 0;
  const OptimizerConfig cfg;
  std::vector<DensityMatrix> states;
  for (double a : {0.0, 0.3, 0.6, 1.0}) states.push_back(werner(a));
  for (auto [alpha, gamma] : std::vector<std::pair<double, double>>{{0.1, 0.3}, {0.0, 0.5}, {0.25, 0.1}, {0.05, 0.9}}) {
    states.push_back(two_param_qubit_qutrit(alpha, gamma));
  }
  for (const auto& rho : states) {
    const ConsonanceReport r = optimize(rho, cfg);
    const OracleResult oracle = oracle_consonance(rho, cfg, 10000, 99);
    ++points;
    if (oracle.min_value < r.value - 1e-9) ++oracle_failures;
  }
  o.require(g_soundness.worst_value_error < 1e-9, "value vs replay error " + fmt(g_soundness.worst_value_error));
  o.require(g_soundness.feasibility_consistent, "feasibility flag inconsistent with replay");
  o.require(oracle_failures == 0, std::to_string(oracle_failures) + " oracle undercuts");
  if (o.pass) {
    o.detail << g_soundness.runs << " optimizer runs sound (max error " << fmt(g_soundness.worst_value_error)
             << "), oracle 1e4 samples on " << points << " points";
  }
  return o;
}

}  // namespace

int main() {
  SweepTable fig2;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Werner closed-form suite", werner_suite},
      {"pure-state suite", pure_suite},
      {"Bell-like discord equals EoF", bell_like_discord_identity},
      {"qubit-qutrit family suite", two_by_three_suite},
      {"dominance and monotonicity", [&] { return dominance_suite(fig2); }},
      {"consonance minus concurrence curve", fig3_suite},
      {"tensor product structure suite", tps_suite},
      {"multipartite suite", multipartite_suite},
      {"optimizer soundness and oracle bound", soundness_suite},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << k + 1 << ": " << criteria[k].first << " ("
              << o.detail.str() << ") [" << fmt(secs) << " s]" << std::endl;
  }
  std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
