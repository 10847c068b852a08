#include "consonance/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace consonance {

Dims::Dims(std::initializer_list<int> dims) : Dims(std::vector<int>(dims)) {}

Dims::Dims(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw UsageError("Dims: at least one subsystem required");
  strides_.assign(dims_.size(), 1);
  for (std::size_t k = dims_.size(); k-- > 0;) {
    if (dims_[k] < 2) throw UsageError("Dims: every subsystem dimension must be >= 2");
    strides_[k] = total_;
    total_ *= dims_[k];
  }
}

MultiIndex Dims::decode(int flat) const {
  if (flat < 0 || flat >= total_) throw UsageError("Dims::decode: flat index out of range");
  MultiIndex out(dims_.size());
  for (std::size_t k = 0; k < dims_.size(); ++k) out[k] = digit(flat, k);
  return out;
}

int Dims::encode(std::span<const int> multi) const {
  if (multi.size() != dims_.size()) throw UsageError("Dims::encode: wrong number of components");
  int flat = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (multi[k] < 0 || multi[k] >= dims_[k]) {
      throw UsageError("Dims::encode: component " + std::to_string(k) + " out of range");
    }
    flat += multi[k] * strides_[k];
  }
  return flat;
}

Dims Dims::concat(const Dims& other) const {
  std::vector<int> d = dims_;
  d.insert(d.end(), other.dims_.begin(), other.dims_.end());
  return Dims(std::move(d));
}

Dims Dims::select(std::span<const int> parties) const {
  std::vector<int> d;
  d.reserve(parties.size());
  for (int p : parties) d.push_back(dims_.at(static_cast<std::size_t>(p)));
  return Dims(std::move(d));
}

std::string Dims::str() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t k = 0; k < dims_.size(); ++k) os << (k ? "," : "") << dims_[k];
  os << ']';
  return os.str();
}

PureState::PureState(Dims dims, Vector amps, double tol) : dims_(std::move(dims)), amps_(std::move(amps)) {
  if (amps_.size() != dims_.total()) {
    throw UsageError("PureState: amplitude count " + std::to_string(amps_.size()) +
                     " does not match dims " + dims_.str());
  }
  if (!amps_.allFinite()) throw ValidationError("PureState: non-finite amplitude");
  const double norm2 = amps_.squaredNorm();
  if (std::abs(norm2 - 1.0) > tol) {
    throw ValidationError("PureState: not normalized (|psi|^2 = " + std::to_string(norm2) + ")");
  }
}

DensityMatrix::DensityMatrix(Dims dims, Matrix entries, NoCheck)
    : dims_(std::move(dims)), entries_(std::move(entries)) {
  if (entries_.rows() != dims_.total() || entries_.cols() != dims_.total()) {
    throw UsageError("DensityMatrix: matrix shape does not match dims " + dims_.str());
  }
}

DensityMatrix::DensityMatrix(Dims dims, Matrix entries, const Tolerances& tol)
    : DensityMatrix(std::move(dims), std::move(entries), NoCheck{}) {
  const auto violations = validate(entries_, tol);
  if (!violations.empty()) {
    std::ostringstream os;
    os << "DensityMatrix: invalid state:";
    for (const auto& v : violations) os << ' ' << to_string(v.invariant) << " (residual " << v.residual << ")";
    throw ValidationError(os.str());
  }
}

DensityMatrix DensityMatrix::unchecked(Dims dims, Matrix entries) {
  return DensityMatrix(std::move(dims), std::move(entries), NoCheck{});
}

std::string to_string(Invariant inv) {
  switch (inv) {
    case Invariant::Shape: return "shape";
    case Invariant::Hermiticity: return "hermiticity";
    case Invariant::Trace: return "trace";
    case Invariant::Positivity: return "positivity";
  }
  return "unknown";
}

double hermiticity_residual(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

std::vector<Violation> validate(const Matrix& m, const Tolerances& tol) {
  std::vector<Violation> out;
  if (m.rows() != m.cols() || m.rows() == 0) {
    out.push_back({Invariant::Shape, 0.0});
    return out;
  }
  if (!m.allFinite()) {
    out.push_back({Invariant::Shape, std::numeric_limits<double>::infinity()});
    return out;
  }
  const double herm = hermiticity_residual(m);
  if (herm > tol.herm) out.push_back({Invariant::Hermiticity, herm});
  const double trace_res = std::abs(m.trace() - Complex(1.0, 0.0));
  if (trace_res > tol.trace) out.push_back({Invariant::Trace, trace_res});
  // Positivity is judged on the Hermitian part so a tiny asymmetry does not
  // mask a genuine negative eigenvalue.
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -tol.psd) out.push_back({Invariant::Positivity, -min_eig});
  return out;
}

std::vector<Violation> validate(const DensityMatrix& rho, const Tolerances& tol) {
  return validate(rho.entries(), tol);
}

DensityMatrix density_from_pure(const PureState& psi) {
  Matrix rho = psi.amps() * psi.amps().adjoint();
  return DensityMatrix::unchecked(psi.dims(), std::move(rho));
}

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

}  // namespace

PureState tensor(const PureState& a, const PureState& b) {
  Vector out(a.amps().size() * b.amps().size());
  for (Eigen::Index i = 0; i < a.amps().size(); ++i) {
    out.segment(i * b.amps().size(), b.amps().size()) = a.amps()(i) * b.amps();
  }
  return PureState(a.dims().concat(b.dims()), std::move(out));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix::unchecked(a.dims().concat(b.dims()), kron(a.entries(), b.entries()));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
  const Dims& dims = rho.dims();
  const int n = static_cast<int>(dims.parties());
  if (keep.empty()) throw UsageError("partial_trace: keep set must be non-empty");
  std::vector<int> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end()) {
    throw UsageError("partial_trace: duplicate party in keep set");
  }
  if (kept.front() < 0 || kept.back() >= n) throw UsageError("partial_trace: party index out of range");

  std::vector<int> traced;
  for (int p = 0; p < n; ++p) {
    if (!std::binary_search(kept.begin(), kept.end(), p)) traced.push_back(p);
  }
  const Dims out_dims = dims.select(kept);
  Matrix out = Matrix::Zero(out_dims.total(), out_dims.total());

  auto reduced_index = [&](int flat) {
    int r = 0;
    for (std::size_t k = 0; k < kept.size(); ++k) r += dims.digit(flat, kept[k]) * out_dims.stride(k);
    return r;
  };
  auto traced_equal = [&](int a, int b) {
    return std::all_of(traced.begin(), traced.end(),
                       [&](int p) { return dims.digit(a, p) == dims.digit(b, p); });
  };
  const int total = dims.total();
  for (int r = 0; r < total; ++r) {
    const int rr = reduced_index(r);
    for (int c = 0; c < total; ++c) {
      if (traced_equal(r, c)) out(rr, reduced_index(c)) += rho(r, c);
    }
  }
  return DensityMatrix::unchecked(out_dims, std::move(out));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::initializer_list<int> keep) {
  return partial_trace(rho, std::span<const int>(keep.begin(), keep.size()));
}

Matrix partial_transpose(const Matrix& m, const Dims& dims, int party) {
  if (party < 0 || party >= static_cast<int>(dims.parties())) {
    throw UsageError("partial_transpose: party index out of range");
  }
  if (m.rows() != dims.total() || m.cols() != dims.total()) {
    throw UsageError("partial_transpose: matrix shape does not match dims");
  }
  const int stride = dims.stride(party);
  Matrix out(m.rows(), m.cols());
  for (int r = 0; r < dims.total(); ++r) {
    const int ir = dims.digit(r, party);
    for (int c = 0; c < dims.total(); ++c) {
      const int ic = dims.digit(c, party);
      out(r + (ic - ir) * stride, c + (ir - ic) * stride) = m(r, c);
    }
  }
  return out;
}

Matrix partial_transpose(const DensityMatrix& rho, int party) {
  return partial_transpose(rho.entries(), rho.dims(), party);
}

std::vector<double> hermitian_eigenvalues(const Matrix& m, double tol_herm) {
  if (m.rows() != m.cols()) throw UsageError("hermitian_eigenvalues: matrix must be square");
  const double herm = hermiticity_residual(m);
  if (herm > tol_herm) {
    throw ValidationError("hermitian_eigenvalues: matrix is not Hermitian (residual " +
                          std::to_string(herm) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

std::vector<double> singular_values(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  std::vector<double> out(svd.singularValues().data(),
                          svd.singularValues().data() + svd.singularValues().size());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace consonance
