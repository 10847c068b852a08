#pragma once

#include <string>
#include <vector>

#include "consonance/qstate.hpp"
#include "consonance/states.hpp"

namespace consonance {

struct SchmidtDecomposition {
  std::vector<double> coefficients;  // descending, sum of squares 1
  Matrix left_basis;                 // columns: Schmidt vectors of party 0
  Matrix right_basis;                // columns: Schmidt vectors of party 1

  /// sum_k P_k |left_k> (x) |right_k>
  [[nodiscard]] Vector reconstruct() const;
};

[[nodiscard]] SchmidtDecomposition schmidt_decompose(const PureState& psi);

/// Wootters concurrence of a two-qubit state.
[[nodiscard]] double concurrence_2x2(const DensityMatrix& rho);

/// Binary entropy of f = (1 + sqrt(1 - C^2))/2.
[[nodiscard]] double eof_from_concurrence(double c);

/// Trace norm of the partial transpose minus one.
[[nodiscard]] double negativity(const DensityMatrix& rho, int party = 1);

/// x log2 x with the 0 log 0 = 0 convention.
[[nodiscard]] double xlog2x(double x);

[[nodiscard]] double discord_werner(double a);
[[nodiscard]] double discord_bell_like(Complex a, Complex b);
[[nodiscard]] double discord_2x3(double alpha, double gamma);

struct ClosedForm {
  double value;
  /// True for the three-qubit GHZ/W values, which depend on the admitted
  /// multipartite search space and are reported as claims, not results.
  bool preset_dependent_claim = false;
};

/// Known closed-form consonance of the built-in state families.
[[nodiscard]] ClosedForm consonance_closed_form(const FamilySpec& family);

enum class Method { ClosedForm, General, Optimized };

[[nodiscard]] std::string to_string(Method m);

struct MeasureResult {
  std::string name;
  double value;
  Method method;
  std::string family;  // factory spec, empty for file inputs
  bool feasible = true;
  bool preset_dependent_claim = false;
};

}  // namespace consonance
