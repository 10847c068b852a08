#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "consonance/coherence.hpp"
#include "consonance/state_io.hpp"
#include "consonance/sweep.hpp"
#include "test_util.hpp"

using namespace consonance;
using consonance::test::max_abs_diff;
using nlohmann::json;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("consonance_test_" + name)).string();
}

std::string csv_of(const SweepTable& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

}  // namespace

TEST_CASE("state JSON round-trip") {
  const auto rho = random_density(Dims{2, 3}, 4, 3);
  const auto back = as_density(state_from_json(state_to_json(rho)));
  CHECK(back.dims() == rho.dims());
  CHECK(max_abs_diff(back.entries(), rho.entries()) == 0.0);

  const auto psi = random_pure(Dims{2, 2}, 5);
  const auto j = state_to_json(psi);
  CHECK(j.at("kind") == "pure");
  CHECK(j.at("data").size() == 4);
  CHECK(max_abs_diff(std::get<PureState>(state_from_json(j)).amps(), psi.amps()) == 0.0);

  const auto path = temp_path("state.json");
  save_state_file(path, rho);
  CHECK(max_abs_diff(as_density(load_state_file(path)).entries(), rho.entries()) == 0.0);
  FamilySpec used;
  (void)resolve_state(path, true, &used);
  CHECK(used.name.empty());
  std::filesystem::remove(path);
}

TEST_CASE("state JSON rejects malformed or non-physical input") {
  json j = state_to_json(werner(0.5));
  j["data"].erase(0);
  CHECK_THROWS_AS((void)state_from_json(j), UsageError);

  const Matrix pt = partial_transpose(density_from_pure(bell(BellKind::PsiMinus)), 1);
  const json bad = state_to_json(DensityMatrix::unchecked(Dims{2, 2}, pt));
  CHECK_THROWS_AS((void)state_from_json(bad), ValidationError);
  CHECK_NOTHROW((void)state_from_json(bad, false));

  json nk = state_to_json(werner(0.5));
  nk["kind"] = "mixed";
  CHECK_THROWS_AS((void)state_from_json(nk), UsageError);
}

TEST_CASE("resolve_state falls back to factory specs") {
  FamilySpec used;
  const auto s = resolve_state("werner:a=0.25", true, &used);
  CHECK(used.name == "werner");
  CHECK(nonlocal_sum(as_density(s)) == doctest::Approx(0.25));
}

TEST_CASE("circuit and report JSON replay") {
  const auto rho = werner(0.4);
  OptimizerConfig c;
  c.restarts = 2;
  c.seed = 3;
  c.max_evals = 2000;
  const auto r = consonance::consonance(rho, c);
  const json rep = report_to_json(r);
  CHECK(rep.at("value") == r.value);
  CHECK(rep.at("feasible") == r.feasible);
  const auto replayed = replay(rep, rho);
  CHECK(std::abs(nonlocal_sum(replayed) - r.value) < 1e-12);

  const auto back = circuit_from_json(circuit_to_json(r.circuit), rho.dims());
  CHECK(back.parameters() == r.circuit.parameters());
  CHECK(back.preset() == r.circuit.preset());

  const json cj = config_to_json(c);
  CHECK(cj.at("seed") == 3);
  CHECK(cj.at("preset") == "single_party");
}

TEST_CASE("format_number and Grid") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333");
  CHECK(format_number(0.1) == "0.1");
  const Grid g{0.0, 0.79, 80};
  CHECK(g.at(0) == 0.0);
  CHECK(g.at(79) == 0.79);
  CHECK(g.at(7) == doctest::Approx(0.07).epsilon(1e-14));
}

TEST_CASE("evaluate_measure") {
  const auto f = FamilySpec::parse("werner:a=0.5");
  const auto st = build_state(f);
  CHECK(evaluate_measure("discord", st, &f).value == doctest::Approx(0.26248318376373436).epsilon(1e-12));
  CHECK(evaluate_measure("consonance_cf", st, &f).method == Method::ClosedForm);
  CHECK(evaluate_measure("concurrence", st, &f).value == doctest::Approx(0.25));
  CHECK_THROWS_AS((void)evaluate_measure("discord", st, nullptr), UsageError);
  CHECK_THROWS_AS((void)evaluate_measure("bogus", st, &f), UsageError);
  const auto f3 = FamilySpec::parse("two_param_2x3:alpha=0.1,gamma=0.3");
  CHECK_THROWS_AS((void)evaluate_measure("concurrence", build_state(f3), &f3), UsageError);
}

TEST_CASE("sweep spec validation") {
  SweepSpec s = recipe("fig3");
  CHECK_NOTHROW(s.check());
  s.grid.points = 1;
  CHECK_THROWS_AS(s.check(), UsageError);
  s = recipe("fig3");
  s.axis = "b";
  CHECK_THROWS_AS(s.check(), UsageError);
  s = recipe("fig3");
  s.measures.push_back("nope");
  CHECK_THROWS_AS(s.check(), UsageError);
  s = recipe("fig3");
  s.family = "nosuch";
  CHECK_THROWS_AS(s.check(), UsageError);
  CHECK_THROWS_AS((void)recipe("fig9"), UsageError);
}

TEST_CASE("fig3 recipe") {
  const auto t = run_sweep(recipe("fig3"), 1);
  REQUIRE(t.rows.size() == 31);
  const auto ci = t.column("consonance_minus_concurrence");
  std::size_t argmax = 0;
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    if (t.rows[k][ci] > t.rows[argmax][ci]) argmax = k;
  }
  CHECK(t.rows[argmax][0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(t.rows[argmax][ci] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(std::abs(t.rows.back()[ci]) < 1e-9);
  const std::string csv = csv_of(t);
  CHECK(csv.find("dissonance") != std::string::npos);
  CHECK(csv.find("a,consonance_cf,concurrence,consonance_minus_concurrence\n") != std::string::npos);
}

TEST_CASE("fig4 closed-form columns vanish at gamma = beta") {
  SweepSpec s = recipe("fig4");
  s.measures = {"consonance_cf", "discord", "negativity"};
  const auto t = run_sweep(s, 1);
  REQUIRE(t.rows.size() == 80);
  const auto& row = t.rows[7];
  CHECK(row[0] == doctest::Approx(0.07).epsilon(1e-14));
  for (std::size_t k = 1; k < row.size(); ++k) CHECK(std::abs(row[k]) < 1e-9);
}

TEST_CASE("property: sweeps are deterministic and order-independent") {
  SweepSpec s;
  s.family = "werner";
  s.axis = "a";
  s.grid = {0.0, 1.0, 5};
  s.measures = {"consonance_cf", "consonance_opt", "discord"};
  s.optimizer.restarts = 2;
  s.optimizer.max_evals = 2000;
  s.optimizer.seed = 11;
  const std::string one = csv_of(run_sweep(s, 1));
  const std::string two = csv_of(run_sweep(s, 3));
  CHECK(one == two);
  CHECK(one.find("# seed=11") != std::string::npos);
  CHECK(one.find("consonance_opt_feasible") != std::string::npos);
  const auto t = run_sweep(s, 1);
  const auto cf = t.column("consonance_cf"), opt = t.column("consonance_opt"), fe = t.column("consonance_opt_feasible");
  for (const auto& row : t.rows) {
    CHECK(row[fe] == 1.0);
    CHECK(std::abs(row[cf] - row[opt]) < 2e-3);
  }
}
