#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "consonance/measures.hpp"
#include "consonance/optimizer.hpp"
#include "consonance/states.hpp"

namespace consonance {

/// Names accepted by evaluate_measure:
///   consonance_cf, consonance_opt, consonance_pure, concurrence, eof,
///   negativity, discord, nonlocal_sum, local_coherence,
///   consonance_minus_concurrence
[[nodiscard]] std::vector<std::string> measure_names();

/// Evaluates one measure. Closed-form measures (consonance_cf, discord,
/// consonance_minus_concurrence) need the family spec the state was built from.
[[nodiscard]] MeasureResult evaluate_measure(const std::string& name, const AnyState& state,
                                             const FamilySpec* family, const OptimizerConfig& config = {});

struct Grid {
  double start = 0.0;
  double stop = 1.0;
  int points = 2;

  /// start + (stop - start) k/(points - 1); the last point is exactly stop.
  [[nodiscard]] double at(int k) const;
};

struct SweepSpec {
  std::string name;  // recipe name, informational
  std::string family;
  std::string axis;
  Grid grid;
  ParamMap fixed;
  std::vector<std::string> measures;
  OptimizerConfig optimizer;
  std::vector<std::string> notes;  // emitted as '#' header lines

  /// Throws UsageError for an unknown family/measure, a bad axis or < 2 points.
  void check() const;
};

/// Built-in recipes: fig2 (Werner, a in [0,1]), fig3 (Werner consonance minus
/// concurrence), fig4 (qubit-qutrit family at beta = 0.07, axis gamma).
[[nodiscard]] SweepSpec recipe(const std::string& name);
[[nodiscard]] std::vector<std::string> recipe_names();

struct SweepTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> comments;

  [[nodiscard]] std::size_t column(const std::string& name) const;
};

/// One row per grid point in grid order. Optimizer-backed measures add a
/// `<name>_feasible` column (1/0); infeasibility is recorded, not fatal.
[[nodiscard]] SweepTable run_sweep(const SweepSpec& spec, unsigned threads = 0);

/// 9 significant digits, '.' decimal point regardless of locale.
[[nodiscard]] std::string format_number(double x);
void write_csv(std::ostream& out, const SweepTable& table);

}  // namespace consonance
