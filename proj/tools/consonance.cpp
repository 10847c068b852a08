// consonance: command-line front end for the consonance library.
//
//   consonance measure  --family werner:a=0.5 --measure discord
//   consonance optimize --state ghz:n=3 --preset nonglobal --report ghz.json
//   consonance sweep    --recipe fig2 --out fig2.csv
//   consonance schmidt  --state bell-like:a2=0.8
//   consonance classify --family werner:a=0.5
//   consonance remap    --family werner:a=0.2 --relabeling werner-F-prime
//
// Exit codes: 0 success, 1 validation error, 2 usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "consonance/coherence.hpp"
#include "consonance/measures.hpp"
#include "consonance/optimizer.hpp"
#include "consonance/state_io.hpp"
#include "consonance/states.hpp"
#include "consonance/sweep.hpp"

namespace {

using namespace consonance;
using nlohmann::json;

constexpr int kExitValidation = 1;
constexpr int kExitUsage = 2;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CONSONANCE_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("CONSONANCE_SEED is not an unsigned integer: ") + env);
    }
  }
  return 0;
}

struct StateArgs {
  std::string state;
  std::string family;
  bool no_validate = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--state", state, "State file (JSON) or factory spec");
    cmd->add_option("--family", family, "Factory spec, e.g. werner:a=0.5");
    cmd->add_flag("--no-validate", no_validate, "Accept non-physical state files");
  }

  AnyState resolve(FamilySpec& spec, bool& have_family) const {
    if (state.empty() == family.empty()) throw UsageError("give exactly one of --state or --family");
    if (!family.empty()) {
      spec = FamilySpec::parse(family);
      have_family = true;
      return build_state(spec);
    }
    have_family = false;
    FamilySpec parsed;
    AnyState s = resolve_state(state, !no_validate, &parsed);
    if (!parsed.name.empty()) {
      spec = std::move(parsed);
      have_family = true;
    }
    return s;
  }
};

struct OptimizerArgs {
  std::string preset = "single_party";
  int depth = 3;
  std::string supports;
  int restarts = 32;
  std::uint64_t seed = 0;
  double eps_l = 1e-6;
  int max_evals = 20000;
  unsigned threads = 0;

  void add(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "single_party | nonglobal_circuit");
    cmd->add_option("--depth", depth, "Layers for nonglobal_circuit");
    cmd->add_option("--supports", supports, "Layer supports for nonglobal_circuit, e.g. \"0,1;0,2;0\"");
    cmd->add_option("--restarts", restarts, "Random restarts in addition to the identity start");
    cmd->add_option("--seed", seed, "Seed (default: $CONSONANCE_SEED or 0)");
    cmd->add_option("--eps-l", eps_l, "Feasibility threshold on local coherence");
    cmd->add_option("--max-evals", max_evals, "Objective evaluations per restart");
    cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
  }

  OptimizerConfig config() const {
    OptimizerConfig c;
    c.preset = preset_from_string(preset);
    c.depth = depth;
    c.restarts = restarts;
    c.seed = seed;
    c.eps_l = eps_l;
    c.max_evals = max_evals;
    c.threads = threads;
    if (!supports.empty()) {
      std::stringstream groups(supports);
      std::string group;
      while (std::getline(groups, group, ';')) {
        std::vector<int> s;
        std::stringstream parties(group);
        std::string p;
        while (std::getline(parties, p, ',')) s.push_back(std::stoi(p));
        c.supports.push_back(std::move(s));
      }
    }
    c.check();
    return c;
  }
};

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw UsageError("cannot write '" + path + "'");
  return file;
}

json measure_json(const MeasureResult& r) {
  json j = {{"name", r.name}, {"value", r.value}, {"method", to_string(r.method)}};
  if (!r.family.empty()) j["family"] = r.family;
  if (r.method == Method::Optimized) j["feasible"] = r.feasible;
  if (r.preset_dependent_claim) j["claim"] = "preset-dependent";
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consonance: nonlocal-coherence measure of quantum correlation"};
  app.require_subcommand(1);

  StateArgs state_args;
  OptimizerArgs opt_args;

  // measure
  auto* measure = app.add_subcommand("measure", "Evaluate measures on a state");
  StateArgs measure_state;
  OptimizerArgs measure_opt;
  std::vector<std::string> measure_names_arg;
  std::string measure_format = "json";
  measure_state.add(measure);
  measure_opt.add(measure);
  measure->add_option("--measure", measure_names_arg, "Measure name (repeatable)")->required();
  measure->add_option("--format", measure_format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  // optimize
  auto* optimize = app.add_subcommand("optimize", "Compute consonance with the constrained optimizer");
  std::string report_path;
  state_args.add(optimize);
  opt_args.add(optimize);
  optimize->add_option("--report", report_path, "Write the full JSON report here");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Parameter sweep to CSV");
  std::string sweep_recipe, sweep_family, sweep_axis, sweep_out, sweep_measures;
  std::vector<std::string> sweep_fixed;
  double sweep_start = 0.0, sweep_stop = 1.0;
  int sweep_points = 11;
  OptimizerArgs sweep_opt;
  sweep->add_option("--recipe", sweep_recipe, "Built-in recipe: fig2 | fig3 | fig4");
  sweep->add_option("--family", sweep_family, "State family for a custom sweep");
  sweep->add_option("--axis", sweep_axis, "Swept parameter");
  sweep->add_option("--start", sweep_start, "Grid start");
  sweep->add_option("--stop", sweep_stop, "Grid stop");
  sweep->add_option("--points", sweep_points, "Grid points (>= 2)");
  sweep->add_option("--fixed", sweep_fixed, "Fixed parameter key=value (repeatable)");
  sweep->add_option("--measures", sweep_measures, "Comma-separated measure names");
  sweep->add_option("--out", sweep_out, "CSV output path (default stdout)");
  sweep_opt.add(sweep);

  // schmidt
  auto* schmidt = app.add_subcommand("schmidt", "Schmidt decomposition of a bipartite pure state");
  StateArgs schmidt_state;
  schmidt_state.add(schmidt);

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "Per-element coherence classification (CSV)");
  StateArgs classify_state;
  bool classify_all = false;
  std::string classify_out;
  classify_state.add(classify_cmd);
  classify_cmd->add_flag("--all", classify_all, "List every index pair");
  classify_cmd->add_option("--out", classify_out, "CSV output path (default stdout)");

  // remap
  auto* remap = app.add_subcommand("remap", "Relabel the tensor product structure of a state");
  StateArgs remap_state;
  std::string relabeling = "werner-F-prime", remap_out;
  remap_state.add(remap);
  remap->add_option("--relabeling", relabeling, "Named relabeling (werner-F-prime)");
  remap->add_option("--out", remap_out, "Write the remapped state JSON here");

  try {
    const std::uint64_t seed = default_seed();
    opt_args.seed = measure_opt.seed = sweep_opt.seed = seed;
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    (void)app.exit(e);
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*measure) {
      FamilySpec spec;
      bool have_family = false;
      const AnyState state = measure_state.resolve(spec, have_family);
      const OptimizerConfig cfg = measure_opt.config();
      std::vector<MeasureResult> results;
      for (const auto& name : measure_names_arg) {
        results.push_back(evaluate_measure(name, state, have_family ? &spec : nullptr, cfg));
      }
      if (measure_format == "csv") {
        std::cout << "name,value,method,family\n";
        for (const auto& r : results) {
          std::cout << r.name << ',' << format_number(r.value) << ',' << to_string(r.method) << ',' << r.family << '\n';
        }
      } else if (results.size() == 1) {
        std::cout << measure_json(results.front()).dump(2) << '\n';
      } else {
        json arr = json::array();
        for (const auto& r : results) arr.push_back(measure_json(r));
        std::cout << arr.dump(2) << '\n';
      }
    } else if (*optimize) {
      FamilySpec spec;
      bool have_family = false;
      const AnyState state = state_args.resolve(spec, have_family);
      const OptimizerConfig cfg = opt_args.config();
      const ConsonanceReport report = consonance::consonance(as_density(state), cfg);
      json full = {{"state", have_family ? spec.str() : state_args.state},
                   {"config", config_to_json(cfg)},
                   {"report", report_to_json(report)}};
      if (!report_path.empty()) {
        std::ofstream out(report_path);
        if (!out) throw UsageError("cannot write '" + report_path + "'");
        out << full.dump(2) << '\n';
      }
      std::cout << json{{"value", report.value},
                        {"l_residual", report.l_residual},
                        {"feasible", report.feasible},
                        {"best_restart", report.best_restart},
                        {"preset", to_string(cfg.preset)}}
                       .dump(2)
                << '\n';
    } else if (*sweep) {
      SweepSpec spec;
      if (!sweep_recipe.empty()) {
        spec = recipe(sweep_recipe);
      } else {
        if (sweep_family.empty()) throw UsageError("sweep: give --recipe or --family/--axis/--measures");
        spec.family = sweep_family;
        spec.axis = sweep_axis;
        spec.grid = {sweep_start, sweep_stop, sweep_points};
        for (const auto& kv : sweep_fixed) {
          const auto eq = kv.find('=');
          if (eq == std::string::npos) throw UsageError("--fixed expects key=value, got '" + kv + "'");
          spec.fixed[kv.substr(0, eq)] = kv.substr(eq + 1);
        }
        std::stringstream ss(sweep_measures);
        std::string m;
        while (std::getline(ss, m, ',')) spec.measures.push_back(m);
      }
      spec.optimizer = sweep_opt.config();
      const SweepTable table = run_sweep(spec, sweep_opt.threads);
      std::ofstream file;
      write_csv(open_output(sweep_out, file), table);
    } else if (*schmidt) {
      FamilySpec spec;
      bool have_family = false;
      const AnyState state = schmidt_state.resolve(spec, have_family);
      const auto* psi = std::get_if<PureState>(&state);
      if (!psi) throw UsageError("schmidt: needs a pure state");
      const SchmidtDecomposition sd = schmidt_decompose(*psi);
      std::cout << json{{"coefficients", sd.coefficients},
                        {"lambdas", [&] {
                           std::vector<double> l;
                           for (double p : sd.coefficients) l.push_back(p * p);
                           return l;
                         }()},
                        {"consonance", consonance_pure_bipartite(*psi)}}
                       .dump(2)
                << '\n';
    } else if (*classify_cmd) {
      FamilySpec spec;
      bool have_family = false;
      const DensityMatrix rho = as_density(classify_state.resolve(spec, have_family));
      const Dims& dims = rho.dims();
      const CoherenceMask mask(dims);
      constexpr double zero = 1e-15;
      auto multi = [&](int flat) {
        std::string s;
        for (std::size_t k = 0; k < dims.parties(); ++k) s += (k ? ":" : "") + std::to_string(dims.digit(flat, k));
        return s;
      };
      std::ostringstream body;
      int listed_nonlocal = 0, listed_local = 0, listed_diag = 0;
      for (int r = 0; r < dims.total(); ++r) {
        for (int c = 0; c < dims.total(); ++c) {
          const CoherenceClass cls = mask(r, c);
          const double mod = std::abs(rho(r, c));
          // Default listing: every nonlocal element (the objective's support)
          // plus any nonzero local-coherence element (a constraint violation).
          const bool listed = classify_all || cls == CoherenceClass::NonlocalCoherence ||
                              (cls == CoherenceClass::LocalCoherence && mod > zero);
          if (!listed) continue;
          if (cls == CoherenceClass::NonlocalCoherence) ++listed_nonlocal;
          if (cls == CoherenceClass::LocalCoherence) ++listed_local;
          if (cls == CoherenceClass::Diagonal) ++listed_diag;
          body << r << ',' << c << ',' << multi(r) << ',' << multi(c) << ',' << to_string(cls) << ','
               << format_number(mod) << '\n';
        }
      }
      const CoherenceProfile p = profile(rho);
      std::ofstream file;
      std::ostream& out = open_output(classify_out, file);
      out << "# dims=" << dims.str() << '\n'
          << "# listed NonlocalCoherence=" << listed_nonlocal << " LocalCoherence=" << listed_local
          << " Diagonal=" << listed_diag << '\n'
          << "# nonlocal_sum=" << format_number(p.s_value) << " local_coherence=" << format_number(p.l_value)
          << " diag_mass=" << format_number(p.diag_mass) << '\n'
          << "row,col,row_index,col_index,class,modulus\n"
          << body.str();
    } else if (*remap) {
      FamilySpec spec;
      bool have_family = false;
      const DensityMatrix rho = as_density(remap_state.resolve(spec, have_family));
      const DensityMatrix out = tps_remap(rho, TpsRelabeling::named(relabeling));
      if (!remap_out.empty()) save_state_file(remap_out, out);
      const CoherenceProfile p = profile(out);
      std::cout << json{{"relabeling", relabeling},
                        {"nonlocal_sum", p.s_value},
                        {"local_coherence", p.l_value},
                        {"diag_mass", p.diag_mass},
                        {"state", state_to_json(out)}}
                       .dump(2)
                << '\n';
    }
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  return 0;
}
