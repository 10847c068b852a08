#include "consonance/state_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

namespace consonance {

using nlohmann::json;

namespace {

json complex_array(const Complex* data, Eigen::Index count) {
  json arr = json::array();
  for (Eigen::Index k = 0; k < count; ++k) arr.push_back({data[k].real(), data[k].imag()});
  return arr;
}

Complex complex_from(const json& pair) {
  if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
    throw UsageError("state file: every data entry must be a [re, im] pair");
  }
  return {pair[0].get<double>(), pair[1].get<double>()};
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

json state_to_json(const AnyState& state) {
  json j;
  j["dims"] = dims_of(state).values();
  if (const auto* psi = std::get_if<PureState>(&state)) {
    j["kind"] = "pure";
    j["data"] = complex_array(psi->amps().data(), psi->amps().size());
  } else {
    const auto& rho = std::get<DensityMatrix>(state);
    // Eigen is column-major; the file is row-major.
    const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = rho.entries();
    j["kind"] = "density";
    j["data"] = complex_array(rm.data(), rm.size());
  }
  return j;
}

AnyState state_from_json(const json& j, bool validate_state) {
  if (!j.is_object() || !j.contains("dims") || !j.contains("kind") || !j.contains("data")) {
    throw UsageError("state file: expected an object with dims, kind and data");
  }
  const Dims dims(j.at("dims").get<std::vector<int>>());
  const std::string kind = j.at("kind").get<std::string>();
  const json& data = j.at("data");
  if (!data.is_array()) throw UsageError("state file: data must be an array");
  const auto total = static_cast<std::size_t>(dims.total());

  if (kind == "pure") {
    if (data.size() != total) {
      throw UsageError("state file: pure data has " + std::to_string(data.size()) + " entries, dims need " +
                       std::to_string(total));
    }
    Vector v(dims.total());
    for (std::size_t k = 0; k < total; ++k) v(static_cast<Eigen::Index>(k)) = complex_from(data[k]);
    return PureState(dims, std::move(v), validate_state ? Tolerances{}.norm : std::numeric_limits<double>::infinity());
  }
  if (kind == "density") {
    if (data.size() != total * total) {
      throw UsageError("state file: density data has " + std::to_string(data.size()) + " entries, dims need " +
                       std::to_string(total * total));
    }
    Matrix m(dims.total(), dims.total());
    for (std::size_t k = 0; k < total * total; ++k) {
      m(static_cast<Eigen::Index>(k / total), static_cast<Eigen::Index>(k % total)) = complex_from(data[k]);
    }
    if (validate_state) return DensityMatrix(dims, std::move(m));
    return DensityMatrix::unchecked(dims, std::move(m));
  }
  throw UsageError("state file: kind must be \"pure\" or \"density\"");
}

AnyState load_state_file(const std::string& path, bool validate_state) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open state file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw UsageError("state file '" + path + "': " + e.what());
  }
  return state_from_json(j, validate_state);
}

void save_state_file(const std::string& path, const AnyState& state) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << state_to_json(state).dump(2) << '\n';
}

AnyState resolve_state(const std::string& text, bool validate_state, FamilySpec* family) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(text, ec)) return load_state_file(text, validate_state);
  FamilySpec spec = FamilySpec::parse(text);
  AnyState state = build_state(spec);
  if (family) *family = std::move(spec);
  return state;
}

json circuit_to_json(const LocalCircuit& circuit) {
  json layers = json::array();
  for (const auto& l : circuit.layers()) layers.push_back({{"support", l.support}, {"theta", l.params.theta}});
  return {{"preset", to_string(circuit.preset())}, {"depth", circuit.depth()}, {"layers", layers}};
}

LocalCircuit circuit_from_json(const json& j, const Dims& dims) {
  const Preset preset = preset_from_string(j.at("preset").get<std::string>());
  std::vector<CircuitLayer> layers;
  for (const auto& l : j.at("layers")) {
    CircuitLayer layer;
    layer.support = l.at("support").get<std::vector<int>>();
    layer.params.theta = l.at("theta").get<std::vector<double>>();
    const double root = std::sqrt(static_cast<double>(layer.params.theta.size()));
    layer.params.dim = static_cast<int>(std::lround(root));
    layers.push_back(std::move(layer));
  }
  const int depth = j.contains("depth") ? j.at("depth").get<int>() : static_cast<int>(layers.size());
  LocalCircuit circuit(preset, depth, std::move(layers));
  circuit.check(dims);
  return circuit;
}

json config_to_json(const OptimizerConfig& c) {
  json j = {{"preset", to_string(c.preset)},
            {"restarts", c.restarts},
            {"seed", c.seed},
            {"mu0", c.mu0},
            {"mu_growth", c.mu_growth},
            {"mu_stages", c.mu_stages},
            {"eps_l", c.eps_l},
            {"tol_value", c.tol_value},
            {"max_evals", c.max_evals},
            {"warm_starts", c.warm_starts.size()}};
  if (c.preset == Preset::NonglobalCircuit) {
    j["depth"] = c.depth;
    j["supports"] = c.supports;
  }
  return j;
}

json report_to_json(const ConsonanceReport& r) {
  json per = json::array();
  for (std::size_t i = 0; i < r.per_restart.size(); ++i) {
    const auto& s = r.per_restart[i];
    per.push_back({{"restart", i}, {"best_value", finite_or_null(s.best_value)}, {"min_l", s.min_l}, {"evals", s.evals}});
  }
  return {{"value", r.value},
          {"l_residual", r.l_residual},
          {"feasible", r.feasible},
          {"best_restart", r.best_restart},
          {"circuit", circuit_to_json(r.circuit)},
          {"per_restart", per}};
}

DensityMatrix replay(const json& report_json, const DensityMatrix& rho) {
  const json& r = report_json.contains("report") ? report_json.at("report") : report_json;
  return apply(circuit_from_json(r.at("circuit"), rho.dims()), rho);
}

}  // namespace consonance
