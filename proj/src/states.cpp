#include "consonance/states.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "consonance/rng.hpp"

namespace consonance {

namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

constexpr double kNormTol = 1e-10;

Vector amplitudes(int size, std::initializer_list<std::pair<int, Complex>> entries) {
  Vector v = Vector::Zero(size);
  for (const auto& [index, value] : entries) v(index) = value;
  return v;
}

Matrix projector(const Vector& v) { return v * v.adjoint(); }

Vector ket(const Dims& dims, std::initializer_list<int> digits) {
  Vector v = Vector::Zero(dims.total());
  v(dims.encode(std::vector<int>(digits))) = 1.0;
  return v;
}

}  // namespace

PureState bell(BellKind kind) {
  const Dims dims{2, 2};
  switch (kind) {
    case BellKind::PhiPlus: return {dims, amplitudes(4, {{0, kInvSqrt2}, {3, kInvSqrt2}})};
    case BellKind::PhiMinus: return {dims, amplitudes(4, {{0, kInvSqrt2}, {3, -kInvSqrt2}})};
    case BellKind::PsiPlus: return {dims, amplitudes(4, {{1, kInvSqrt2}, {2, kInvSqrt2}})};
    case BellKind::PsiMinus: return {dims, amplitudes(4, {{1, kInvSqrt2}, {2, -kInvSqrt2}})};
  }
  throw UsageError("bell: unknown kind");
}

PureState bell_like(Complex a, Complex b) {
  return {Dims{2, 2}, amplitudes(4, {{3, a}, {0, b}}), kNormTol};
}

PureState psi_like(Complex a, Complex b) {
  return {Dims{2, 2}, amplitudes(4, {{2, a}, {1, b}}), kNormTol};
}

PureState pure_2x2(Complex a, Complex b, Complex c, Complex d) {
  return {Dims{2, 2}, amplitudes(4, {{3, a}, {2, b}, {1, c}, {0, d}}), kNormTol};
}

DensityMatrix werner(double a) {
  if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("werner: a must lie in [0, 1]");
  const Matrix psi_minus = projector(bell(BellKind::PsiMinus).amps());
  return {Dims{2, 2}, a * psi_minus + (1.0 - a) / 4.0 * Matrix::Identity(4, 4)};
}

double two_param_beta(double alpha, double gamma) { return (1.0 - 2.0 * alpha - gamma) / 3.0; }

DensityMatrix two_param_qubit_qutrit(double alpha, double gamma) {
  // Parameters derived through the trace condition (e.g. alpha = (1 - 3 beta - gamma)/2)
  // can miss a boundary by a rounding error; those are snapped onto it.
  constexpr double slack = 1e-12;
  if (!(alpha >= -slack && alpha <= 0.5 + slack)) throw ValidationError("two_param_2x3: alpha must lie in [0, 1/2]");
  if (!(gamma >= -slack && gamma <= 1.0 + slack)) throw ValidationError("two_param_2x3: gamma must lie in [0, 1]");
  alpha = std::clamp(alpha, 0.0, 0.5);
  gamma = std::clamp(gamma, 0.0, 1.0);
  const double beta = two_param_beta(alpha, gamma);
  if (beta < -slack) throw ValidationError("two_param_2x3: beta = (1 - 2 alpha - gamma)/3 must be >= 0");
  const double b = std::max(beta, 0.0);

  const Dims dims{2, 3};
  const Vector k00 = ket(dims, {0, 0}), k01 = ket(dims, {0, 1}), k10 = ket(dims, {1, 0}), k11 = ket(dims, {1, 1});
  const Vector phi_plus = (k00 + k11) * kInvSqrt2;
  const Vector phi_minus = (k00 - k11) * kInvSqrt2;
  const Vector psi_plus = (k01 + k10) * kInvSqrt2;
  const Vector psi_minus = (k01 - k10) * kInvSqrt2;

  Matrix rho = alpha * (projector(ket(dims, {0, 2})) + projector(ket(dims, {1, 2}))) +
               b * (projector(phi_plus) + projector(phi_minus) + projector(psi_plus)) + gamma * projector(psi_minus);
  return {dims, std::move(rho)};
}

PureState ghz(int n) {
  if (n < 2) throw UsageError("ghz: need at least two parties");
  const Dims dims(std::vector<int>(static_cast<std::size_t>(n), 2));
  Vector v = Vector::Zero(dims.total());
  v(0) = kInvSqrt2;
  v(dims.total() - 1) = kInvSqrt2;
  return {dims, std::move(v)};
}

PureState w_state(int n) {
  if (n < 2) throw UsageError("w_state: need at least two parties");
  const Dims dims(std::vector<int>(static_cast<std::size_t>(n), 2));
  Vector v = Vector::Zero(dims.total());
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) v(dims.stride(k)) = amp;
  return {dims, std::move(v)};
}

PureState basis_state(const Dims& dims, std::span<const int> digits) {
  Vector v = Vector::Zero(dims.total());
  v(dims.encode(digits)) = 1.0;
  return {dims, std::move(v)};
}

namespace {

void check_permutation(std::span<const int> perm, std::size_t parties) {
  if (perm.size() != parties) throw UsageError("permute_subsystems: permutation length does not match party count");
  std::vector<int> sorted(perm.begin(), perm.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    if (sorted[k] != static_cast<int>(k)) throw UsageError("permute_subsystems: not a permutation");
  }
}

/// new flat index -> old flat index
std::vector<int> permutation_source(const Dims& old_dims, const Dims& new_dims, std::span<const int> perm) {
  std::vector<int> out(static_cast<std::size_t>(old_dims.total()));
  MultiIndex old_digits(old_dims.parties());
  for (int f = 0; f < new_dims.total(); ++f) {
    for (std::size_t k = 0; k < perm.size(); ++k) {
      old_digits[static_cast<std::size_t>(perm[k])] = new_dims.digit(f, k);
    }
    out[static_cast<std::size_t>(f)] = old_dims.encode(old_digits);
  }
  return out;
}

Dims grouped_dims(const Dims& dims, std::span<const int> group_sizes) {
  const int covered = std::accumulate(group_sizes.begin(), group_sizes.end(), 0);
  if (covered != static_cast<int>(dims.parties()) ||
      std::any_of(group_sizes.begin(), group_sizes.end(), [](int g) { return g < 1; })) {
    throw UsageError("regroup: group sizes must be positive and cover every party");
  }
  std::vector<int> out;
  std::size_t p = 0;
  for (int g : group_sizes) {
    int d = 1;
    for (int k = 0; k < g; ++k) d *= dims[p++];
    out.push_back(d);
  }
  return Dims(std::move(out));
}

}  // namespace

PureState permute_subsystems(const PureState& psi, std::span<const int> perm) {
  check_permutation(perm, psi.dims().parties());
  const Dims new_dims = psi.dims().select(perm);
  const auto source = permutation_source(psi.dims(), new_dims, perm);
  Vector v(psi.amps().size());
  for (int f = 0; f < new_dims.total(); ++f) v(f) = psi[source[static_cast<std::size_t>(f)]];
  return {new_dims, std::move(v)};
}

DensityMatrix permute_subsystems(const DensityMatrix& rho, std::span<const int> perm) {
  check_permutation(perm, rho.dims().parties());
  const Dims new_dims = rho.dims().select(perm);
  const auto source = permutation_source(rho.dims(), new_dims, perm);
  const int total = new_dims.total();
  Matrix m(total, total);
  for (int r = 0; r < total; ++r) {
    for (int c = 0; c < total; ++c) m(r, c) = rho(source[static_cast<std::size_t>(r)], source[static_cast<std::size_t>(c)]);
  }
  return DensityMatrix::unchecked(new_dims, std::move(m));
}

PureState regroup(const PureState& psi, std::span<const int> group_sizes) {
  return {grouped_dims(psi.dims(), group_sizes), psi.amps()};
}

DensityMatrix regroup(const DensityMatrix& rho, std::span<const int> group_sizes) {
  return DensityMatrix::unchecked(grouped_dims(rho.dims(), group_sizes), rho.entries());
}

// -- TPS relabeling ---------------------------------------------------------

void TpsRelabeling::check() const {
  const int total = source_dims.total();
  if (target_dims.total() != total) throw ValidationError("tps relabeling: source and target dimensions differ");
  if (source_basis.rows() != total || source_basis.cols() != total) {
    throw ValidationError("tps relabeling: source basis must be a square matrix of the space dimension");
  }
  if (target_index.size() != static_cast<std::size_t>(total)) {
    throw ValidationError("tps relabeling: map must assign every source basis vector");
  }
  std::vector<int> sorted = target_index;
  std::sort(sorted.begin(), sorted.end());
  for (int k = 0; k < total; ++k) {
    if (sorted[static_cast<std::size_t>(k)] != k) throw ValidationError("tps relabeling: map is not a bijection");
  }
  const double res = (source_basis.adjoint() * source_basis - Matrix::Identity(total, total)).cwiseAbs().maxCoeff();
  if (res > 1e-10) throw ValidationError("tps relabeling: source basis is not orthonormal");
}

Matrix TpsRelabeling::transform() const {
  check();
  const int total = source_dims.total();
  Matrix t = Matrix::Zero(total, total);
  for (int k = 0; k < total; ++k) t.row(target_index[static_cast<std::size_t>(k)]) = source_basis.col(k).adjoint();
  return t;
}

TpsRelabeling TpsRelabeling::identity(const Dims& dims) {
  std::vector<int> idx(static_cast<std::size_t>(dims.total()));
  std::iota(idx.begin(), idx.end(), 0);
  return {dims, dims, Matrix::Identity(dims.total(), dims.total()), std::move(idx)};
}

TpsRelabeling TpsRelabeling::werner_f_prime() {
  Matrix basis(4, 4);
  basis.col(0) = bell(BellKind::PsiPlus).amps();
  basis.col(1) = bell(BellKind::PsiMinus).amps();
  basis.col(2) = bell(BellKind::PhiPlus).amps();
  basis.col(3) = bell(BellKind::PhiMinus).amps();
  return {Dims{2, 2}, Dims{2, 2}, basis, {0, 1, 2, 3}};
}

TpsRelabeling TpsRelabeling::named(const std::string& name) {
  std::string n = name;
  std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
  std::replace(n.begin(), n.end(), '_', '-');
  if (n == "werner-f-prime" || n == "f-prime") return werner_f_prime();
  throw UsageError("unknown relabeling '" + name + "' (known: werner-F-prime)");
}

DensityMatrix tps_remap(const DensityMatrix& rho, const TpsRelabeling& relabeling) {
  if (!(rho.dims() == relabeling.source_dims)) throw UsageError("tps_remap: state dims do not match relabeling source");
  const Matrix t = relabeling.transform();
  return DensityMatrix::unchecked(relabeling.target_dims, t * rho.entries() * t.adjoint());
}

// -- random states ----------------------------------------------------------

PureState random_pure(const Dims& dims, std::uint64_t seed) {
  CounterRng rng(seed, 0x5eedULL);
  Vector v(dims.total());
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    const double re = rng.normal();
    const double im = rng.normal();
    v(k) = Complex(re, im);
  }
  v /= v.norm();
  return {dims, std::move(v)};
}

DensityMatrix random_density(const Dims& dims, std::uint64_t seed, int rank) {
  if (rank < 1 || rank > dims.total()) throw UsageError("random_density: rank must lie in [1, D]");
  Matrix m = Matrix::Zero(dims.total(), dims.total());
  CounterRng seeds(seed, 0xde45ULL);
  for (int k = 0; k < rank; ++k) m += projector(random_pure(dims, seeds()).amps());
  m /= static_cast<double>(rank);
  return {dims, std::move(m)};
}

// -- factory specs ------------------------------------------------------------

namespace {

std::string normalize_name(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) throw UsageError("factory spec: '" + key + "=" + text + "' is not a number");
  return value;
}

Dims parse_dims(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, 'x')) out.push_back(static_cast<int>(parse_double("dims", part)));
  return Dims(std::move(out));
}

BellKind bell_kind(const std::string& raw) {
  std::string k = raw;
  std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) { return std::tolower(c); });
  k.erase(std::remove(k.begin(), k.end(), '_'), k.end());
  if (k == "phi+" || k == "phiplus") return BellKind::PhiPlus;
  if (k == "phi-" || k == "phiminus") return BellKind::PhiMinus;
  if (k == "psi+" || k == "psiplus") return BellKind::PsiPlus;
  if (k == "psi-" || k == "psiminus") return BellKind::PsiMinus;
  throw UsageError("bell: unknown kind '" + raw + "' (expected phi+, phi-, psi+, psi-)");
}

/// (a, b) for the Bell-like families: either a2=|a|^2, or a and optionally b.
std::pair<Complex, Complex> bell_like_pair(const FamilySpec& spec) {
  if (spec.has("a2")) {
    const double a2 = spec.number("a2");
    if (!(a2 >= 0.0 && a2 <= 1.0)) throw ValidationError("bell_like: a2 must lie in [0, 1]");
    return {std::sqrt(a2), std::sqrt(1.0 - a2)};
  }
  const Complex a = spec.complex_number("a");
  const Complex b = spec.has("b") ? spec.complex_number("b") : Complex(std::sqrt(std::max(0.0, 1.0 - std::norm(a))));
  return {a, b};
}

std::uint64_t seed_param(const FamilySpec& spec) {
  return spec.has("seed") ? static_cast<std::uint64_t>(spec.number("seed")) : 0;
}

}  // namespace

FamilySpec FamilySpec::parse(const std::string& text) {
  FamilySpec spec;
  const auto colon = text.find(':');
  spec.name = normalize_name(trim(text.substr(0, colon)));
  if (spec.name.empty()) throw UsageError("factory spec: empty family name in '" + text + "'");
  if (colon == std::string::npos) return spec;
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw UsageError("factory spec: empty parameter in '" + text + "'");
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      if (spec.params.count("kind")) throw UsageError("factory spec: more than one bare token in '" + text + "'");
      spec.params["kind"] = item;
    } else {
      const std::string key = normalize_name(trim(item.substr(0, eq)));
      if (key.empty()) throw UsageError("factory spec: empty key in '" + text + "'");
      spec.params[key] = trim(item.substr(eq + 1));
    }
  }
  return spec;
}

std::string FamilySpec::str() const {
  std::string out = name;
  char sep = ':';
  for (const auto& [k, v] : params) {
    out += sep;
    out += k + "=" + v;
    sep = ',';
  }
  return out;
}

double FamilySpec::number(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) throw UsageError("factory spec '" + name + "': missing parameter '" + key + "'");
  return parse_double(key, it->second);
}

double FamilySpec::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

Complex FamilySpec::complex_number(const std::string& key) const {
  return {number(key), number_or(key + "_im", 0.0)};
}

std::pair<double, double> two_param_alpha_gamma(const FamilySpec& spec) {
  // Any two of alpha, beta, gamma fix the third through 2 alpha + 3 beta + gamma = 1.
  if (spec.has("alpha") && spec.has("gamma")) return {spec.number("alpha"), spec.number("gamma")};
  if (spec.has("beta") && spec.has("gamma")) {
    const double gamma = spec.number("gamma");
    return {(1.0 - 3.0 * spec.number("beta") - gamma) / 2.0, gamma};
  }
  if (spec.has("alpha") && spec.has("beta")) {
    const double alpha = spec.number("alpha");
    return {alpha, 1.0 - 2.0 * alpha - 3.0 * spec.number("beta")};
  }
  throw UsageError("two_param_2x3: give two of alpha, beta, gamma");
}

AnyState build_state(const FamilySpec& spec) {
  const std::string& n = spec.name;
  if (n == "werner") return werner(spec.number("a"));
  if (n == "two_param_2x3" || n == "two_param_qubit_qutrit") {
    const auto [alpha, gamma] = two_param_alpha_gamma(spec);
    return two_param_qubit_qutrit(alpha, gamma);
  }
  if (n == "bell") return bell(bell_kind(spec.params.count("kind") ? spec.params.at("kind") : "phi+"));
  if (n == "bell_like") {
    const auto [a, b] = bell_like_pair(spec);
    return bell_like(a, b);
  }
  if (n == "psi_like") {
    const auto [a, b] = bell_like_pair(spec);
    return psi_like(a, b);
  }
  if (n == "pure_2x2") {
    return pure_2x2(spec.complex_number("a"), spec.complex_number("b"), spec.complex_number("c"), spec.complex_number("d"));
  }
  if (n == "ghz") return ghz(static_cast<int>(spec.number_or("n", 3)));
  if (n == "w" || n == "w_state") return w_state(static_cast<int>(spec.number_or("n", 3)));
  if (n == "product" || n == "basis") {
    const Dims dims = parse_dims(spec.params.count("dims") ? spec.params.at("dims") : "2x2");
    std::vector<int> digits(dims.parties(), 0);
    if (spec.has("index")) digits = dims.decode(static_cast<int>(spec.number("index")));
    return basis_state(dims, digits);
  }
  if (n == "maximally_mixed") {
    const Dims dims = parse_dims(spec.params.count("dims") ? spec.params.at("dims") : "2x2");
    return DensityMatrix(dims, Matrix::Identity(dims.total(), dims.total()) / static_cast<double>(dims.total()));
  }
  if (n == "random_pure") {
    return random_pure(parse_dims(spec.params.count("dims") ? spec.params.at("dims") : "2x2"), seed_param(spec));
  }
  if (n == "random_density") {
    return random_density(parse_dims(spec.params.count("dims") ? spec.params.at("dims") : "2x2"), seed_param(spec),
                          static_cast<int>(spec.number_or("rank", 2)));
  }
  throw UsageError("unknown state family '" + spec.name + "'");
}

DensityMatrix as_density(const AnyState& state) {
  if (const auto* psi = std::get_if<PureState>(&state)) return density_from_pure(*psi);
  return std::get<DensityMatrix>(state);
}

const Dims& dims_of(const AnyState& state) {
  return std::visit([](const auto& s) -> const Dims& { return s.dims(); }, state);
}

std::vector<std::string> family_names() {
  return {"werner:a=", "two_param_2x3:alpha=,gamma= (or beta=)", "bell:phi+|phi-|psi+|psi-",
          "bell_like:a=[,b=] | bell_like:a2=", "psi_like:a=[,b=] | psi_like:a2=", "pure_2x2:a=,b=,c=,d=",
          "ghz:n=", "w_state:n=", "product:dims=2x2[,index=]", "maximally_mixed:dims=",
          "random_pure:dims=,seed=", "random_density:dims=,seed=,rank="};
}

}  // namespace consonance
