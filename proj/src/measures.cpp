#include "consonance/measures.hpp"

#include <algorithm>
#include <cmath>

namespace consonance {

Vector SchmidtDecomposition::reconstruct() const {
  const Eigen::Index d1 = left_basis.rows(), d2 = right_basis.rows();
  Vector out = Vector::Zero(d1 * d2);
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    for (Eigen::Index i = 0; i < d1; ++i) {
      out.segment(i * d2, d2) += coefficients[k] * left_basis(i, col) * right_basis.col(col);
    }
  }
  return out;
}

SchmidtDecomposition schmidt_decompose(const PureState& psi) {
  const Dims& dims = psi.dims();
  if (dims.parties() != 2) throw UsageError("schmidt_decompose: state must have exactly two parties");
  Matrix coeff(dims[0], dims[1]);
  for (int i = 0; i < dims[0]; ++i) {
    for (int j = 0; j < dims[1]; ++j) coeff(i, j) = psi[i * dims[1] + j];
  }
  // C = U S V^dagger, so psi = sum_k s_k |u_k> (x) |conj(v_k)>.
  Eigen::JacobiSVD<Matrix> svd(coeff, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SchmidtDecomposition out;
  const auto& s = svd.singularValues();
  out.coefficients.assign(s.data(), s.data() + s.size());
  out.left_basis = svd.matrixU();
  out.right_basis = svd.matrixV().conjugate();
  return out;
}

double concurrence_2x2(const DensityMatrix& rho) {
  if (!(rho.dims() == Dims{2, 2})) throw UsageError("concurrence_2x2: state must have dims [2,2]");
  // rho = W W^dagger with W = V sqrt(p). The Wootters values are the singular
  // values of tau = W^T Y W, Y = sigma_y (x) sigma_y, which avoids square
  // roots of the (often numerically zero) eigenvalues of rho * rho~.
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho.entries() + rho.entries().adjoint()));
  const double cutoff = 1e-14 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  Matrix w = Matrix::Zero(4, 4);
  for (int k = 0; k < 4; ++k) {
    const double p = es.eigenvalues()(k);
    if (p > cutoff) w.col(k) = std::sqrt(p) * es.eigenvectors().col(k);
  }
  Matrix y = Matrix::Zero(4, 4);
  y(0, 3) = -1.0;
  y(1, 2) = 1.0;
  y(2, 1) = 1.0;
  y(3, 0) = -1.0;
  const Matrix tau = w.transpose() * y * w;
  std::vector<double> lambda = singular_values(tau);
  return std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

double xlog2x(double x) { return x == 0.0 ? 0.0 : x * std::log2(x); }

double eof_from_concurrence(double c) {
  if (!(c >= 0.0 && c <= 1.0)) throw ValidationError("eof_from_concurrence: C must lie in [0, 1]");
  const double f = 0.5 * (1.0 + std::sqrt(1.0 - c * c));
  return std::clamp(-xlog2x(f) - xlog2x(1.0 - f), 0.0, 1.0);
}

double negativity(const DensityMatrix& rho, int party) {
  const Matrix pt = partial_transpose(rho, party);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (pt + pt.adjoint()), Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues().cwiseAbs().sum() - 1.0);
}

double discord_werner(double a) {
  if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("discord_werner: a must lie in [0, 1]");
  return 0.25 * (xlog2x(1.0 - a) + xlog2x(1.0 + 3.0 * a) - 2.0 * xlog2x(1.0 + a));
}

double discord_bell_like(Complex a, Complex b) {
  if (std::abs(std::norm(a) + std::norm(b) - 1.0) > 1e-10) {
    throw ValidationError("discord_bell_like: |a|^2 + |b|^2 must equal 1");
  }
  const double ab2 = std::norm(a) * std::norm(b);
  const double root = std::sqrt(std::max(0.0, 1.0 - 4.0 * ab2));
  return 1.0 - 0.5 * (xlog2x(1.0 + root) + xlog2x(1.0 - root));
}

double discord_2x3(double alpha, double gamma) {
  constexpr double slack = 1e-12;
  if (!(alpha >= -slack && alpha <= 0.5 + slack)) throw ValidationError("discord_2x3: alpha must lie in [0, 1/2]");
  if (!(gamma >= -slack && gamma <= 1.0 + slack)) throw ValidationError("discord_2x3: gamma must lie in [0, 1]");
  alpha = std::clamp(alpha, 0.0, 0.5);
  gamma = std::clamp(gamma, 0.0, 1.0);
  double beta = two_param_beta(alpha, gamma);
  if (beta < -slack) throw ValidationError("discord_2x3: beta must be >= 0");
  beta = std::max(beta, 0.0);
  // beta log2(2 beta) = xlog2x(2 beta)/2
  return 0.5 * xlog2x(2.0 * beta) + 0.5 * xlog2x(2.0 * gamma) - xlog2x(beta + gamma);
}

ClosedForm consonance_closed_form(const FamilySpec& family) {
  const std::string& n = family.name;
  if (n == "werner") {
    const double a = family.number("a");
    if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("werner: a must lie in [0, 1]");
    return {a};
  }
  if (n == "two_param_2x3" || n == "two_param_qubit_qutrit") {
    (void)build_state(family);  // validates the parameters
    auto [alpha, gamma] = two_param_alpha_gamma(family);
    alpha = std::clamp(alpha, 0.0, 0.5);
    gamma = std::clamp(gamma, 0.0, 1.0);
    return {std::abs(std::max(two_param_beta(alpha, gamma), 0.0) - gamma)};
  }
  if (n == "bell") return {1.0};
  if (n == "bell_like" || n == "psi_like") {
    const PureState psi = std::get<PureState>(build_state(family));
    const Complex a = n == "bell_like" ? psi[3] : psi[2];
    const Complex b = n == "bell_like" ? psi[0] : psi[1];
    return {2.0 * std::abs(a * b)};
  }
  if (n == "pure_2x2") {
    const PureState psi = std::get<PureState>(build_state(family));
    return {2.0 * std::abs(psi[3] * psi[0] - psi[2] * psi[1])};
  }
  if (n == "product" || n == "basis") return {0.0};
  if (n == "ghz") return {0.0, true};
  if (n == "w" || n == "w_state") return {1.0, true};
  throw UsageError("no closed-form consonance for family '" + n + "'");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::ClosedForm: return "closed_form";
    case Method::General: return "general";
    case Method::Optimized: return "optimized";
  }
  return "unknown";
}

}  // namespace consonance
