#include "consonance/coherence.hpp"

#include <cmath>

namespace consonance {

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

std::string to_string(CoherenceClass c) {
  switch (c) {
    case CoherenceClass::Diagonal: return "Diagonal";
    case CoherenceClass::LocalCoherence: return "LocalCoherence";
    case CoherenceClass::NonlocalCoherence: return "NonlocalCoherence";
  }
  return "Unknown";
}

CoherenceClass classify(const Dims& dims, std::span<const int> row, std::span<const int> col) {
  if (row.size() != dims.parties() || col.size() != dims.parties()) {
    throw UsageError("classify: multi-index length does not match dims " + dims.str());
  }
  std::size_t equal = 0;
  for (std::size_t k = 0; k < dims.parties(); ++k) {
    if (row[k] < 0 || row[k] >= dims[k] || col[k] < 0 || col[k] >= dims[k]) {
      throw UsageError("classify: index out of range for party " + std::to_string(k));
    }
    if (row[k] == col[k]) ++equal;
  }
  if (equal == dims.parties()) return CoherenceClass::Diagonal;
  if (equal == 0) return CoherenceClass::NonlocalCoherence;
  return CoherenceClass::LocalCoherence;
}

CoherenceClass classify_flat(const Dims& dims, int row, int col) {
  const MultiIndex r = dims.decode(row);
  const MultiIndex c = dims.decode(col);
  return classify(dims, r, c);
}

CoherenceMask::CoherenceMask(const Dims& dims) : dims_(dims) {
  const int total = dims.total();
  classes_.reserve(static_cast<std::size_t>(total) * static_cast<std::size_t>(total));
  for (int r = 0; r < total; ++r) {
    for (int c = 0; c < total; ++c) classes_.push_back(classify_flat(dims, r, c));
  }
}

CoherenceProfile profile(const Matrix& m, const CoherenceMask& mask) {
  CompensatedSum s, l, d;
  const int total = mask.dims().total();
  for (int r = 0; r < total; ++r) {
    for (int c = 0; c < total; ++c) {
      const double mod = std::abs(m(r, c));
      switch (mask(r, c)) {
        case CoherenceClass::Diagonal: d.add(mod); break;
        case CoherenceClass::LocalCoherence: l.add(mod); break;
        case CoherenceClass::NonlocalCoherence: s.add(mod); break;
      }
    }
  }
  return {s.value(), l.value(), d.value()};
}

CoherenceProfile profile(const DensityMatrix& rho) {
  return profile(rho.entries(), CoherenceMask(rho.dims()));
}

double nonlocal_sum(const DensityMatrix& rho) { return profile(rho).s_value; }

double local_coherence(const DensityMatrix& rho) { return profile(rho).l_value; }

}  // namespace consonance
