#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "consonance/qstate.hpp"

namespace consonance {

/// Class of a density-matrix element rho_{row,col} relative to a tensor
/// product structure:
///  - Diagonal: every party index agrees.
///  - LocalCoherence: some, but not all, party indices differ.
///  - NonlocalCoherence: every party index differs.
enum class CoherenceClass : std::uint8_t { Diagonal, LocalCoherence, NonlocalCoherence };

[[nodiscard]] std::string to_string(CoherenceClass c);

[[nodiscard]] CoherenceClass classify(const Dims& dims, std::span<const int> row, std::span<const int> col);
[[nodiscard]] CoherenceClass classify_flat(const Dims& dims, int row, int col);

/// Precomputed class of every (row, col) pair for one Dims, row-major.
class CoherenceMask {
 public:
  explicit CoherenceMask(const Dims& dims);

  [[nodiscard]] const Dims& dims() const { return dims_; }
  [[nodiscard]] CoherenceClass operator()(int row, int col) const {
    return classes_[static_cast<std::size_t>(row) * static_cast<std::size_t>(dims_.total()) +
                    static_cast<std::size_t>(col)];
  }

 private:
  Dims dims_;
  std::vector<CoherenceClass> classes_;
};

struct CoherenceProfile {
  double s_value = 0.0;    // nonlocal coherence
  double l_value = 0.0;    // local coherence
  double diag_mass = 0.0;  // sum of |diagonal|
};

/// Sum of |rho_{rc}| over NonlocalCoherence elements.
[[nodiscard]] double nonlocal_sum(const DensityMatrix& rho);
/// Sum of |rho_{rc}| over LocalCoherence elements.
[[nodiscard]] double local_coherence(const DensityMatrix& rho);
[[nodiscard]] CoherenceProfile profile(const DensityMatrix& rho);

/// Profile of a raw matrix against a precomputed mask. This is the
/// optimizer's hot path; summation order and compensation are identical to
/// the DensityMatrix overloads, so results agree bit-for-bit.
[[nodiscard]] CoherenceProfile profile(const Matrix& m, const CoherenceMask& mask);

}  // namespace consonance
