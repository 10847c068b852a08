#include "consonance/unitary.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace consonance {

UnitaryParams UnitaryParams::zero(int dim) {
  if (dim < 1) throw UsageError("UnitaryParams: dimension must be positive");
  return {dim, std::vector<double>(static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim), 0.0)};
}

namespace {

Matrix generator(int d, std::span<const double> theta) {
  if (d < 1 || theta.size() != static_cast<std::size_t>(d) * static_cast<std::size_t>(d)) {
    throw UsageError("build_unitary: expected " + std::to_string(d * d) + " parameters, got " +
                     std::to_string(theta.size()));
  }
  Matrix h = Matrix::Zero(d, d);
  std::size_t p = 0;
  for (int k = 0; k < d; ++k) h(k, k) = theta[p++];
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      const Complex z(theta[p], theta[p + 1]);
      p += 2;
      h(j, k) = z;
      h(k, j) = std::conj(z);
    }
  }
  return h;
}

}  // namespace

Matrix generator(const UnitaryParams& params) { return generator(params.dim, params.theta); }

Matrix build_unitary(const UnitaryParams& params) { return build_unitary(params.dim, params.theta); }

Matrix build_unitary(int dim, std::span<const double> theta) {
  const Matrix h = generator(dim, theta);
  if (h.rows() == 1) return Matrix::Constant(1, 1, std::polar(1.0, h(0, 0).real()));
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const Eigen::VectorXd& lambda = es.eigenvalues();
  Vector phases(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) phases(k) = std::polar(1.0, lambda(k));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

double unitarity_residual(const Matrix& u) {
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

UnitaryParams params_from_unitary(const Matrix& u, double tol) {
  if (u.rows() != u.cols()) throw UsageError("params_from_unitary: matrix must be square");
  const double res = unitarity_residual(u);
  if (res > tol) throw ValidationError("params_from_unitary: matrix is not unitary (residual " + std::to_string(res) + ")");
  const int d = static_cast<int>(u.rows());
  // A unitary is normal, so its complex Schur form is diagonal with a
  // unitary Schur basis even when eigenvalues are degenerate.
  Eigen::ComplexSchur<Matrix> schur(u);
  const Matrix& t = schur.matrixT();
  const Matrix& q = schur.matrixU();
  Vector angles(d);
  for (int k = 0; k < d; ++k) angles(k) = std::arg(t(k, k));
  const Matrix h = q * angles.asDiagonal() * q.adjoint();

  UnitaryParams out = UnitaryParams::zero(d);
  std::size_t p = 0;
  for (int k = 0; k < d; ++k) out.theta[p++] = h(k, k).real();
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      out.theta[p++] = h(j, k).real();
      out.theta[p++] = h(j, k).imag();
    }
  }
  return out;
}

std::string to_string(Preset p) {
  return p == Preset::SingleParty ? "single_party" : "nonglobal_circuit";
}

Preset preset_from_string(const std::string& name) {
  std::string n = name;
  std::replace(n.begin(), n.end(), '-', '_');
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
  if (n == "single_party" || n == "single") return Preset::SingleParty;
  if (n == "nonglobal_circuit" || n == "nonglobal") return Preset::NonglobalCircuit;
  throw UsageError("unknown preset '" + name + "' (expected single_party or nonglobal_circuit)");
}

std::vector<std::vector<int>> default_supports(const Dims& dims) {
  const int n = static_cast<int>(dims.parties());
  std::vector<std::vector<int>> out;
  for (int i = 0; i < n; ++i) {
    if (n > 1) out.push_back({i});
    for (int j = i + 1; j < n; ++j) {
      if (n > 2) out.push_back({i, j});
    }
  }
  return out;
}

namespace {

int support_dim(const std::vector<int>& support, const Dims& dims) {
  int d = 1;
  for (int p : support) d *= dims[static_cast<std::size_t>(p)];
  return d;
}

void check_support(const std::vector<int>& support, const Dims& dims) {
  const int n = static_cast<int>(dims.parties());
  if (support.empty()) throw ConstraintError("circuit layer: empty support");
  if (!std::is_sorted(support.begin(), support.end()) ||
      std::adjacent_find(support.begin(), support.end()) != support.end()) {
    throw ConstraintError("circuit layer: support must be strictly increasing");
  }
  if (support.front() < 0 || support.back() >= n) throw ConstraintError("circuit layer: party index out of range");
  if (static_cast<int>(support.size()) >= n) {
    throw ConstraintError("circuit layer: support covers every party (global unitary)");
  }
}

}  // namespace

LocalCircuit::LocalCircuit(Preset preset, int depth, std::vector<CircuitLayer> layers)
    : preset_(preset), depth_(depth), layers_(std::move(layers)) {}

LocalCircuit LocalCircuit::single_party(const Dims& dims) {
  std::vector<CircuitLayer> layers;
  for (int p = 0; p < static_cast<int>(dims.parties()); ++p) {
    layers.push_back({{p}, UnitaryParams::zero(dims[static_cast<std::size_t>(p)])});
  }
  LocalCircuit c(Preset::SingleParty, static_cast<int>(layers.size()), std::move(layers));
  c.check(dims);
  return c;
}

LocalCircuit LocalCircuit::nonglobal(const Dims& dims, int depth, std::vector<std::vector<int>> supports) {
  if (depth < 1) throw UsageError("nonglobal circuit: depth must be positive");
  if (supports.empty()) supports = default_supports(dims);
  if (supports.empty()) throw ConstraintError("nonglobal circuit: no strict-subset support exists for dims " + dims.str());
  std::vector<CircuitLayer> layers;
  for (int k = 0; k < depth; ++k) {
    const auto& s = supports[static_cast<std::size_t>(k) % supports.size()];
    check_support(s, dims);
    layers.push_back({s, UnitaryParams::zero(support_dim(s, dims))});
  }
  return LocalCircuit(Preset::NonglobalCircuit, depth, std::move(layers));
}

void LocalCircuit::check(const Dims& dims) const {
  for (const auto& layer : layers_) {
    check_support(layer.support, dims);
    const int d = support_dim(layer.support, dims);
    if (layer.params.dim != d) {
      throw UsageError("circuit layer: unitary dimension " + std::to_string(layer.params.dim) +
                       " does not match support dimension " + std::to_string(d));
    }
    if (layer.params.theta.size() != static_cast<std::size_t>(d) * static_cast<std::size_t>(d)) {
      throw UsageError("circuit layer: wrong parameter count");
    }
  }
  if (preset_ == Preset::SingleParty) {
    if (layers_.size() != dims.parties()) throw UsageError("single_party circuit: need exactly one layer per party");
    for (std::size_t p = 0; p < layers_.size(); ++p) {
      if (layers_[p].support != std::vector<int>{static_cast<int>(p)}) {
        throw UsageError("single_party circuit: layer " + std::to_string(p) + " must act on party " + std::to_string(p));
      }
    }
  } else if (static_cast<int>(layers_.size()) > depth_) {
    throw UsageError("nonglobal circuit: more layers than depth");
  }
}

std::size_t LocalCircuit::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.params.theta.size();
  return n;
}

std::vector<double> LocalCircuit::parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& l : layers_) out.insert(out.end(), l.params.theta.begin(), l.params.theta.end());
  return out;
}

LocalCircuit LocalCircuit::with_parameters(std::span<const double> theta) const {
  if (theta.size() != parameter_count()) throw UsageError("with_parameters: wrong parameter count");
  LocalCircuit out = *this;
  std::size_t p = 0;
  for (auto& l : out.layers_) {
    std::copy_n(theta.begin() + static_cast<std::ptrdiff_t>(p), l.params.theta.size(), l.params.theta.begin());
    p += l.params.theta.size();
  }
  return out;
}

Matrix embed(const CircuitLayer& layer, const Dims& dims) {
  check_support(layer.support, dims);
  const Matrix u = build_unitary(layer.params);
  if (u.rows() != support_dim(layer.support, dims)) {
    throw UsageError("embed: unitary dimension does not match support");
  }
  const int total = dims.total();
  const int n = static_cast<int>(dims.parties());
  std::vector<char> in_support(static_cast<std::size_t>(n), 0);
  for (int p : layer.support) in_support[static_cast<std::size_t>(p)] = 1;

  // Local index on the support (row-major over supported parties) and the
  // complementary "spectator" index.
  std::vector<int> local(static_cast<std::size_t>(total)), spectator(static_cast<std::size_t>(total));
  for (int f = 0; f < total; ++f) {
    int loc = 0, spec = 0;
    for (int p = 0; p < n; ++p) {
      const int dp = dims[static_cast<std::size_t>(p)];
      const int digit = dims.digit(f, static_cast<std::size_t>(p));
      if (in_support[static_cast<std::size_t>(p)]) {
        loc = loc * dp + digit;
      } else {
        spec = spec * dp + digit;
      }
    }
    local[static_cast<std::size_t>(f)] = loc;
    spectator[static_cast<std::size_t>(f)] = spec;
  }

  Matrix out = Matrix::Zero(total, total);
  for (int r = 0; r < total; ++r) {
    for (int c = 0; c < total; ++c) {
      if (spectator[static_cast<std::size_t>(r)] == spectator[static_cast<std::size_t>(c)]) {
        out(r, c) = u(local[static_cast<std::size_t>(r)], local[static_cast<std::size_t>(c)]);
      }
    }
  }
  return out;
}

Matrix circuit_unitary(const LocalCircuit& circuit, const Dims& dims) {
  circuit.check(dims);
  Matrix total = Matrix::Identity(dims.total(), dims.total());
  for (const auto& layer : circuit.layers()) total = embed(layer, dims) * total;
  return total;
}

DensityMatrix apply(const LocalCircuit& circuit, const DensityMatrix& rho) {
  const Matrix u = circuit_unitary(circuit, rho.dims());
  return DensityMatrix::unchecked(rho.dims(), u * rho.entries() * u.adjoint());
}

}  // namespace consonance
