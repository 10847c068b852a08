#include "consonance/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "consonance/coherence.hpp"
#include "parallel.hpp"

namespace consonance {

namespace {

const FamilySpec& require_family(const FamilySpec* family, const std::string& measure) {
  if (!family) throw UsageError("measure '" + measure + "' needs a state family (closed form), not a state file");
  return *family;
}

double closed_form_discord(const FamilySpec& f, const AnyState& state) {
  if (f.name == "werner") return discord_werner(f.number("a"));
  if (f.name == "two_param_2x3" || f.name == "two_param_qubit_qutrit") {
    const auto [alpha, gamma] = two_param_alpha_gamma(f);
    return discord_2x3(alpha, gamma);
  }
  if (f.name == "bell") return 1.0;
  if (f.name == "bell_like") {
    const auto& psi = std::get<PureState>(state);
    return discord_bell_like(psi[3], psi[0]);
  }
  if (f.name == "psi_like") {
    const auto& psi = std::get<PureState>(state);
    return discord_bell_like(psi[2], psi[1]);
  }
  if (f.name == "product" || f.name == "basis") return 0.0;
  throw UsageError("no closed-form discord for family '" + f.name + "'");
}

void require_two_qubits(const AnyState& state, const std::string& measure) {
  if (!(dims_of(state) == Dims{2, 2})) throw UsageError("measure '" + measure + "' needs a two-qubit state");
}

}  // namespace

std::vector<std::string> measure_names() {
  return {"consonance_cf", "consonance_opt", "consonance_pure", "concurrence", "eof", "negativity",
          "discord", "nonlocal_sum", "local_coherence", "consonance_minus_concurrence"};
}

MeasureResult evaluate_measure(const std::string& name, const AnyState& state, const FamilySpec* family,
                               const OptimizerConfig& config) {
  MeasureResult r{name, 0.0, Method::General, family ? family->str() : std::string{}};
  if (name == "consonance_cf") {
    const ClosedForm cf = consonance_closed_form(require_family(family, name));
    r.value = cf.value;
    r.method = Method::ClosedForm;
    r.preset_dependent_claim = cf.preset_dependent_claim;
  } else if (name == "consonance_opt") {
    const ConsonanceReport rep = consonance(as_density(state), config);
    r.value = rep.value;
    r.method = Method::Optimized;
    r.feasible = rep.feasible;
  } else if (name == "consonance_pure") {
    const auto* psi = std::get_if<PureState>(&state);
    if (!psi) throw UsageError("consonance_pure needs a pure bipartite state");
    r.value = consonance_pure_bipartite(*psi);
  } else if (name == "concurrence") {
    require_two_qubits(state, name);
    r.value = concurrence_2x2(as_density(state));
  } else if (name == "eof") {
    require_two_qubits(state, name);
    r.value = eof_from_concurrence(std::min(1.0, concurrence_2x2(as_density(state))));
  } else if (name == "negativity") {
    r.value = negativity(as_density(state), 1);
  } else if (name == "discord") {
    r.value = closed_form_discord(require_family(family, name), state);
    r.method = Method::ClosedForm;
  } else if (name == "nonlocal_sum") {
    r.value = nonlocal_sum(as_density(state));
  } else if (name == "local_coherence") {
    r.value = local_coherence(as_density(state));
  } else if (name == "consonance_minus_concurrence") {
    require_two_qubits(state, name);
    r.value = consonance_closed_form(require_family(family, name)).value - concurrence_2x2(as_density(state));
    r.method = Method::ClosedForm;
  } else {
    throw UsageError("unknown measure '" + name + "'");
  }
  return r;
}

double Grid::at(int k) const {
  if (k == points - 1) return stop;
  return start + (stop - start) * static_cast<double>(k) / static_cast<double>(points - 1);
}

void SweepSpec::check() const {
  if (grid.points < 2) throw UsageError("sweep: grid needs at least 2 points");
  if (axis.empty()) throw UsageError("sweep: axis parameter is required");
  const auto known = measure_names();
  if (measures.empty()) throw UsageError("sweep: at least one measure is required");
  for (const auto& m : measures) {
    if (std::find(known.begin(), known.end(), m) == known.end()) throw UsageError("sweep: unknown measure '" + m + "'");
  }
  // Build the first point: rejects unknown families and axes the family ignores.
  FamilySpec f;
  f.name = FamilySpec::parse(family).name;
  f.params = fixed;
  f.params[axis] = format_number(grid.at(0));
  (void)build_state(f);
  static const std::map<std::string, std::vector<std::string>> axes = {
      {"werner", {"a"}},
      {"two_param_2x3", {"alpha", "beta", "gamma"}},
      {"two_param_qubit_qutrit", {"alpha", "beta", "gamma"}},
      {"bell_like", {"a", "a2", "b"}},
      {"psi_like", {"a", "a2", "b"}},
      {"pure_2x2", {"a", "b", "c", "d"}}};
  const auto it = axes.find(f.name);
  if (it == axes.end() || std::find(it->second.begin(), it->second.end(), axis) == it->second.end()) {
    throw UsageError("sweep: '" + axis + "' is not a sweepable parameter of family '" + f.name + "'");
  }
  optimizer.check();
}

SweepSpec recipe(const std::string& name) {
  SweepSpec s;
  s.name = name;
  if (name == "fig2") {
    s.family = "werner";
    s.axis = "a";
    s.grid = {0.0, 1.0, 41};
    s.measures = {"consonance_cf", "consonance_opt", "discord", "concurrence", "eof"};
    s.notes = {"Werner state a|Psi-><Psi-| + (1-a) I/4: consonance, discord, concurrence, EoF versus a"};
  } else if (name == "fig3") {
    s.family = "werner";
    s.axis = "a";
    s.grid = {0.0, 1.0, 31};  // contains a = 1/3
    s.measures = {"consonance_cf", "concurrence", "consonance_minus_concurrence"};
    s.notes = {"Werner state: consonance minus concurrence versus a",
               "dissonance column omitted: it has no closed form here"};
  } else if (name == "fig4") {
    s.family = "two_param_2x3";
    s.axis = "gamma";
    s.fixed = {{"beta", "0.07"}};
    s.grid = {0.0, 0.79, 80};  // alpha = (1 - 0.21 - gamma)/2 >= 0; step 0.01 hits gamma = beta
    s.measures = {"consonance_cf", "consonance_opt", "discord", "negativity"};
    s.notes = {"qubit-qutrit family at fixed beta = 0.07, alpha = (1 - 3 beta - gamma)/2"};
  } else {
    throw UsageError("unknown recipe '" + name + "' (known: fig2, fig3, fig4)");
  }
  return s;
}

std::vector<std::string> recipe_names() { return {"fig2", "fig3", "fig4"}; }

std::size_t SweepTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw UsageError("sweep table: no column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

SweepTable run_sweep(const SweepSpec& spec, unsigned threads) {
  spec.check();
  SweepTable table;
  table.comments.push_back("recipe=" + (spec.name.empty() ? std::string("custom") : spec.name));
  table.comments.push_back("family=" + spec.family + " axis=" + spec.axis + " start=" + format_number(spec.grid.start) +
                           " stop=" + format_number(spec.grid.stop) + " points=" + std::to_string(spec.grid.points));
  for (const auto& [k, v] : spec.fixed) table.comments.push_back("fixed " + k + "=" + v);
  table.comments.push_back("seed=" + std::to_string(spec.optimizer.seed) +
                           " restarts=" + std::to_string(spec.optimizer.restarts) +
                           " preset=" + to_string(spec.optimizer.preset));
  for (const auto& n : spec.notes) table.comments.push_back(n);

  table.header.push_back(spec.axis);
  for (const auto& m : spec.measures) {
    table.header.push_back(m);
    if (m == "consonance_opt") table.header.push_back(m + "_feasible");
  }

  const std::size_t n = static_cast<std::size_t>(spec.grid.points);
  table.rows.assign(n, {});
  OptimizerConfig inner = spec.optimizer;
  inner.threads = 1;  // parallelism is over grid points

  auto evaluate_row = [&](std::size_t k) {
    const double x = spec.grid.at(static_cast<int>(k));
    FamilySpec f;
    f.name = FamilySpec::parse(spec.family).name;
    f.params = spec.fixed;
    // Keep the exact grid value rather than its 9-digit rendering.
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    f.params[spec.axis] = std::string(buf, res.ptr);
    const AnyState state = build_state(f);
    std::vector<double> row{x};
    for (const auto& m : spec.measures) {
      const MeasureResult r = evaluate_measure(m, state, &f, inner);
      row.push_back(r.value);
      if (m == "consonance_opt") row.push_back(r.feasible ? 1.0 : 0.0);
    }
    table.rows[k] = std::move(row);
  };

  parallel_for(n, threads, evaluate_row);
  return table;
}

std::string format_number(double x) {
  if (x == 0.0) return "0";  // also folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 9);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const SweepTable& table) {
  for (const auto& c : table.comments) out << "# " << c << '\n';
  for (std::size_t k = 0; k < table.header.size(); ++k) out << (k ? "," : "") << table.header[k];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_number(row[k]);
    out << '\n';
  }
}

}  // namespace consonance
