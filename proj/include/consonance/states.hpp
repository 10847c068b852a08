#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "consonance/qstate.hpp"

namespace consonance {

enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

[[nodiscard]] PureState bell(BellKind kind);

/// a|11> + b|00>
[[nodiscard]] PureState bell_like(Complex a, Complex b);
/// a|10> + b|01>
[[nodiscard]] PureState psi_like(Complex a, Complex b);
/// a|11> + b|10> + c|01> + d|00>
[[nodiscard]] PureState pure_2x2(Complex a, Complex b, Complex c, Complex d);

/// a|Psi-><Psi-| + (1 - a) I/4
[[nodiscard]] DensityMatrix werner(double a);

/// Qubit-qutrit family
///   alpha (|02><02| + |12><12|) + beta (Phi+ + Phi- + Psi+) + gamma Psi-
/// with beta = (1 - 2 alpha - gamma)/3 and the Bell vectors on qutrit levels {0,1}.
[[nodiscard]] DensityMatrix two_param_qubit_qutrit(double alpha, double gamma);
[[nodiscard]] double two_param_beta(double alpha, double gamma);

[[nodiscard]] PureState ghz(int n = 3);
[[nodiscard]] PureState w_state(int n = 3);

[[nodiscard]] PureState basis_state(const Dims& dims, std::span<const int> digits);

/// Party k of the result is party perm[k] of the input.
[[nodiscard]] PureState permute_subsystems(const PureState& psi, std::span<const int> perm);
[[nodiscard]] DensityMatrix permute_subsystems(const DensityMatrix& rho, std::span<const int> perm);

/// Groups consecutive parties: regroup([2,2,2,2], {2,2}) views the state on [4,4].
/// Amplitudes are unchanged; only the tensor product structure is coarsened.
[[nodiscard]] PureState regroup(const PureState& psi, std::span<const int> group_sizes);
[[nodiscard]] DensityMatrix regroup(const DensityMatrix& rho, std::span<const int> group_sizes);

/// Relabels a chosen orthonormal basis of the source space as the product
/// basis of the target structure: source_basis column k is sent to the
/// target product-basis vector with flat index target_index[k].
struct TpsRelabeling {
  Dims source_dims;
  Dims target_dims;
  Matrix source_basis;
  std::vector<int> target_index;

  /// Throws ValidationError if the map is not a bijection or the basis is not orthonormal.
  void check() const;
  /// T = sum_k |t_k><s_k|.
  [[nodiscard]] Matrix transform() const;

  static TpsRelabeling identity(const Dims& dims);
  /// Bell basis onto [2,2]: Psi+ -> |00>, Psi- -> |01>, Phi+ -> |10>, Phi- -> |11>,
  /// i.e. Psi/Phi on the first factor and +/- on the second.
  static TpsRelabeling werner_f_prime();
  static TpsRelabeling named(const std::string& name);
};

[[nodiscard]] DensityMatrix tps_remap(const DensityMatrix& rho, const TpsRelabeling& relabeling);

/// Normalized complex Gaussian vector; deterministic per seed.
[[nodiscard]] PureState random_pure(const Dims& dims, std::uint64_t seed);
/// Equal mixture of `rank` random pure states.
[[nodiscard]] DensityMatrix random_density(const Dims& dims, std::uint64_t seed, int rank);

// -- factory specs --------------------------------------------------------

using ParamMap = std::map<std::string, std::string>;

/// `name(:key=value(,key=value)*)?`; a bare token without '=' is stored
/// under the key "kind" (e.g. `bell:psi-`).
struct FamilySpec {
  std::string name;  // normalized: lower case, '-' replaced by '_'
  ParamMap params;

  static FamilySpec parse(const std::string& text);
  [[nodiscard]] std::string str() const;

  [[nodiscard]] bool has(const std::string& key) const { return params.count(key) != 0; }
  [[nodiscard]] double number(const std::string& key) const;
  [[nodiscard]] double number_or(const std::string& key, double fallback) const;
  [[nodiscard]] Complex complex_number(const std::string& key) const;
};

using AnyState = std::variant<PureState, DensityMatrix>;

[[nodiscard]] AnyState build_state(const FamilySpec& spec);

/// (alpha, gamma) of a two_param_2x3 spec given any two of alpha, beta, gamma.
[[nodiscard]] std::pair<double, double> two_param_alpha_gamma(const FamilySpec& spec);
[[nodiscard]] DensityMatrix as_density(const AnyState& state);
[[nodiscard]] const Dims& dims_of(const AnyState& state);

/// Known factory names, for help text.
[[nodiscard]] std::vector<std::string> family_names();

}  // namespace consonance
