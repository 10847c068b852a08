#pragma once

#include <span>
#include <string>
#include <vector>

#include "consonance/qstate.hpp"

namespace consonance {

/// Coordinates on U(d): d*d reals mapped through U = exp(i H(theta)).
///
/// H is Hermitian with H_kk = theta[k] for k < d, followed by one
/// (re, im) pair per upper-triangular entry (j < k) in row-major order.
/// The exponential map of the compact group U(d) is surjective and smooth,
/// and theta = 0 gives the identity.
struct UnitaryParams {
  int dim = 0;
  std::vector<double> theta;

  static UnitaryParams zero(int dim);
};

[[nodiscard]] Matrix generator(const UnitaryParams& params);
[[nodiscard]] Matrix build_unitary(const UnitaryParams& params);
[[nodiscard]] Matrix build_unitary(int dim, std::span<const double> theta);

/// Principal logarithm of a unitary, expressed in the same chart. Throws
/// ValidationError if u is not unitary within tol.
[[nodiscard]] UnitaryParams params_from_unitary(const Matrix& u, double tol = 1e-10);

[[nodiscard]] double unitarity_residual(const Matrix& u);

enum class Preset { SingleParty, NonglobalCircuit };

[[nodiscard]] std::string to_string(Preset p);
[[nodiscard]] Preset preset_from_string(const std::string& name);

struct CircuitLayer {
  /// Strictly increasing party indices; a non-empty strict subset of all parties.
  std::vector<int> support;
  UnitaryParams params;
};

/// Singletons then pairs interleaved in lexicographic order:
/// {0}, {0,1}, {0,2}, ..., {1}, {1,2}, ...
[[nodiscard]] std::vector<std::vector<int>> default_supports(const Dims& dims);

class LocalCircuit {
 public:
  LocalCircuit() = default;
  LocalCircuit(Preset preset, int depth, std::vector<CircuitLayer> layers);

  /// One identity layer per party.
  static LocalCircuit single_party(const Dims& dims);

  /// `depth` identity layers whose supports cycle through `supports`
  /// (default_supports(dims) when empty).
  static LocalCircuit nonglobal(const Dims& dims, int depth, std::vector<std::vector<int>> supports = {});

  [[nodiscard]] Preset preset() const { return preset_; }
  [[nodiscard]] int depth() const { return depth_; }
  [[nodiscard]] const std::vector<CircuitLayer>& layers() const { return layers_; }

  /// Throws ConstraintError for global or malformed supports, UsageError for
  /// parameter-count or preset-shape mismatches.
  void check(const Dims& dims) const;

  [[nodiscard]] std::size_t parameter_count() const;
  [[nodiscard]] std::vector<double> parameters() const;
  /// Same layout and supports with new parameters (concatenated layer thetas).
  [[nodiscard]] LocalCircuit with_parameters(std::span<const double> theta) const;

 private:
  Preset preset_ = Preset::SingleParty;
  int depth_ = 0;
  std::vector<CircuitLayer> layers_;
};

/// Full-space unitary acting as the layer's unitary on its support and as the
/// identity elsewhere. Supports need not be contiguous.
[[nodiscard]] Matrix embed(const CircuitLayer& layer, const Dims& dims);

/// Ordered product of embedded layers: layer 0 acts first.
[[nodiscard]] Matrix circuit_unitary(const LocalCircuit& circuit, const Dims& dims);

/// rho^c = U rho U^dagger.
[[nodiscard]] DensityMatrix apply(const LocalCircuit& circuit, const DensityMatrix& rho);

}  // namespace consonance
