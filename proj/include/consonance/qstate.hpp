#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "consonance/errors.hpp"

namespace consonance {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using MultiIndex = std::vector<int>;

struct Tolerances {
  double herm = 1e-10;
  double trace = 1e-10;
  double psd = 1e-8;
  double norm = 1e-10;
};

/// Ordered subsystem dimensions of a tensor product structure.
///
/// Composite indices are row-major with party 0 slowest:
/// flat = sum_k i_k * prod_{l>k} d_l.
class Dims {
 public:
  Dims() = default;
  Dims(std::initializer_list<int> dims);
  explicit Dims(std::vector<int> dims);

  [[nodiscard]] std::size_t parties() const { return dims_.size(); }
  [[nodiscard]] int operator[](std::size_t party) const { return dims_[party]; }
  [[nodiscard]] int total() const { return total_; }
  [[nodiscard]] const std::vector<int>& values() const { return dims_; }

  /// Stride of party k in the flat index.
  [[nodiscard]] int stride(std::size_t party) const { return strides_[party]; }

  [[nodiscard]] int digit(int flat, std::size_t party) const {
    return (flat / strides_[party]) % dims_[party];
  }
  [[nodiscard]] MultiIndex decode(int flat) const;
  [[nodiscard]] int encode(std::span<const int> multi) const;

  [[nodiscard]] Dims concat(const Dims& other) const;
  [[nodiscard]] Dims select(std::span<const int> parties) const;

  [[nodiscard]] std::string str() const;

  friend bool operator==(const Dims& a, const Dims& b) { return a.dims_ == b.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<int> strides_;
  int total_ = 1;
};

class PureState {
 public:
  /// Throws ValidationError unless the amplitudes are normalized within tol.
  PureState(Dims dims, Vector amps, double tol = Tolerances{}.norm);

  [[nodiscard]] const Dims& dims() const { return dims_; }
  [[nodiscard]] const Vector& amps() const { return amps_; }
  [[nodiscard]] Complex operator[](int i) const { return amps_(i); }

 private:
  Dims dims_;
  Vector amps_;
};

class DensityMatrix {
 public:
  /// Validates hermiticity, unit trace and positivity.
  DensityMatrix(Dims dims, Matrix entries, const Tolerances& tol = {});

  /// Skips the physical checks; shape is still checked. Used for
  /// non-physical inputs such as partial transposes, and for hot loops.
  static DensityMatrix unchecked(Dims dims, Matrix entries);

  [[nodiscard]] const Dims& dims() const { return dims_; }
  [[nodiscard]] const Matrix& entries() const { return entries_; }
  [[nodiscard]] Complex operator()(int r, int c) const { return entries_(r, c); }
  [[nodiscard]] int size() const { return static_cast<int>(entries_.rows()); }

 private:
  struct NoCheck {};
  DensityMatrix(Dims dims, Matrix entries, NoCheck);

  Dims dims_;
  Matrix entries_;
};

enum class Invariant { Shape, Hermiticity, Trace, Positivity };

struct Violation {
  Invariant invariant;
  double residual;
};

[[nodiscard]] std::string to_string(Invariant inv);

/// Empty result means the matrix is a valid density matrix.
[[nodiscard]] std::vector<Violation> validate(const Matrix& m, const Tolerances& tol = {});
[[nodiscard]] std::vector<Violation> validate(const DensityMatrix& rho, const Tolerances& tol = {});

[[nodiscard]] DensityMatrix density_from_pure(const PureState& psi);

[[nodiscard]] PureState tensor(const PureState& a, const PureState& b);
[[nodiscard]] DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

/// Reduced state on the listed parties (any order; result keeps ascending order).
[[nodiscard]] DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep);
[[nodiscard]] DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep);

/// Transpose on one party's indices. The result may be non-positive, so it is
/// returned as a bare matrix.
[[nodiscard]] Matrix partial_transpose(const Matrix& m, const Dims& dims, int party);
[[nodiscard]] Matrix partial_transpose(const DensityMatrix& rho, int party);

/// Eigenvalues in descending order. Throws ValidationError if m is not
/// Hermitian within tol_herm.
[[nodiscard]] std::vector<double> hermitian_eigenvalues(const Matrix& m,
                                                        double tol_herm = Tolerances{}.herm);

/// Singular values in descending order.
[[nodiscard]] std::vector<double> singular_values(const Matrix& m);

[[nodiscard]] double hermiticity_residual(const Matrix& m);

}  // namespace consonance
