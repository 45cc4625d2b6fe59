// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "oct/oct.hpp"

namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

bool within_rel(double actual, double expected, double rel) {
  return std::abs(actual - expected) <= rel * std::abs(expected);
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

const oct::TurbineParameters kParams;

Outcome mass_model() {
  Outcome o;
  const auto check = [&](const char* name, double actual, double expected, double rel) {
    o.require(within_rel(actual, expected, rel), std::string(name) + " = " + fmt(actual) + ", want " + fmt(expected));
  };
  check("rotor_mass(20)", oct::rotor_mass(20.0, kParams), 61191.0, 1e-3);
  check("rotor_mass(22)", oct::rotor_mass(22.0, kParams), 80795.0, 1e-3);
  check("generator_mass(700)", oct::generator_mass(700.0, kParams), 2247.0, 1e-3);
  check("generator_mass(495)", oct::generator_mass(495.0, kParams), 1633.0, 1e-3);
  check("tank_mass(18.824)", oct::tank_mass(18.824, kParams), 12372.0, 1e-3);
  check("total(700, 20, 31.215)", oct::total_mass({700.0, 20.0, 31.215}, kParams).total_mass, 497418.0, 5e-3);
  check("total(700, 22, 31.215)", oct::total_mass({700.0, 22.0, 31.215}, kParams).total_mass, 517021.0, 5e-3);
  check("total(495, 22, 18.824)", oct::total_mass({495.0, 22.0, 18.824}, kParams).total_mass, 508353.0, 5e-3);
  if (o.pass) {
    o.detail = "totals " + fmt(oct::total_mass({700.0, 20.0, 31.215}, kParams).total_mass) + " / " +
               fmt(oct::total_mass({700.0, 22.0, 31.215}, kParams).total_mass) + " / " +
               fmt(oct::total_mass({495.0, 22.0, 18.824}, kParams).total_mass) + " kg";
  }
  return o;
}

Outcome power_to_weight() {
  Outcome o;
  const struct {
    oct::DesignVector design;
    double power, expected;
  } cases[] = {{{700.0, 20.0, 31.215}, 212.34, 4.269e-4},
               {{700.0, 22.0, 31.215}, 256.99, 4.971e-4},
               {{495.0, 22.0, 18.824}, 256.99, 5.055e-4}};
  std::string values;
  for (const auto& c : cases) {
    const double f = oct::power_to_weight(c.power, oct::total_mass(c.design, kParams));
    o.require(within_rel(f, c.expected, 1e-3), "fitness " + fmt(f) + ", want " + fmt(c.expected));
    values += (values.empty() ? "" : " / ") + fmt(f);
  }
  if (o.pass) o.detail = values + " kW/kg";
  return o;
}

constexpr std::uint64_t kInstances = 400;

Outcome dp_exactness() {
  Outcome o;
  int feasible = 0, mismatches = 0;
  for (std::uint64_t seed = 1; seed <= kInstances; ++seed) {
    const auto in = oct_test::random_instance(seed);
    const auto oracle = oct_test::brute_force(in);
    const auto bound = oct_test::bind(in);
    if (!oracle) {
      try {
        oct::solve_horizon(bound.problem);
        ++mismatches;
      } catch (const oct::InfeasibleError&) {
      }
      continue;
    }
    ++feasible;
    const auto sol = oct::solve_horizon(bound.problem);
    if (sol.total_net != oracle->value || sol.path != oracle->path) ++mismatches;
  }
  o.require(feasible >= 200, "only " + std::to_string(feasible) + " feasible instances");
  o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  if (o.pass) o.detail = std::to_string(feasible) + " feasible of " + std::to_string(kInstances) + " instances, all exact";
  return o;
}

Outcome fill_reduction() {
  Outcome o;
  int feasible = 0, set_mismatch = 0, value_mismatch = 0;
  for (std::uint64_t seed = 1; seed <= kInstances; ++seed) {
    const auto in = oct_test::random_instance(seed);
    const auto aug = oct_test::augmented_dp(in);
    if (aug.reachable != oct_test::closed_form_reachable(in)) ++set_mismatch;
    const auto bound = oct_test::bind(in);
    if (!aug.best) {
      try {
        oct::solve_horizon(bound.problem);
        ++value_mismatch;
      } catch (const oct::InfeasibleError&) {
      }
      continue;
    }
    ++feasible;
    const auto sol = oct::solve_horizon(bound.problem);
    if (sol.total_net != aug.best->value || sol.path != aug.best->path) ++value_mismatch;
  }
  o.require(feasible >= 200, "only " + std::to_string(feasible) + " feasible instances");
  o.require(set_mismatch == 0, std::to_string(set_mismatch) + " feasible-set mismatches");
  o.require(value_mismatch == 0, std::to_string(value_mismatch) + " optimum mismatches");
  if (o.pass) o.detail = std::to_string(kInstances) + " instances, feasible sets and optima identical";
  return o;
}

Outcome diameter_squared() {
  Outcome o;
  const auto field = oct::synthesize(1);
  const oct::PlannerConfig cfg;
  const oct::DesignVector base = oct::default_design(kParams);
  oct::DesignVector big = base;
  big.rotor_diameter = 22.0;
  const auto plan = oct::plan_mission(field, base, kParams, cfg);
  const auto a = oct::evaluate_path(field, plan.depths, big, kParams, cfg);
  const auto b = oct::evaluate_path(field, plan.depths, base, kParams, cfg);
  double ga = 0.0, gb = 0.0;
  bool clamped = false;
  for (const auto& p : a.power) {
    ga += p.generated;
    clamped |= p.generated >= big.generator_rating;
  }
  for (const auto& p : b.power) gb += p.generated;
  o.require(!clamped, "rated clamp binds on the test field");
  const double ratio = ga / gb;
  o.require(within_rel(ratio, 1.21, 1e-9), "ratio " + fmt(ratio));
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12f", ratio);
  if (o.pass) o.detail = std::string("generated-power ratio ") + buf;
  return o;
}

Outcome boundary_optimum() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const oct::Config cfg;
  const auto r = oct::run_ga(oct::synthesize(1), cfg.params, cfg.bounds, cfg.ga, cfg.planner);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  o.require(within_rel(r.best_design.rotor_diameter, 22.0, 1e-2), "rotor " + fmt(r.best_design.rotor_diameter));
  o.require(r.best_design.generator_rating < 700.0, "generator " + fmt(r.best_design.generator_rating));
  o.require(seconds < 120.0, "took " + fmt(seconds) + " s");
  if (o.pass) {
    o.detail = "rotor " + fmt(r.best_design.rotor_diameter) + " m, generator " +
               fmt(r.best_design.generator_rating) + " kW, tank " + fmt(r.best_design.tank_volume) + " m^3, " +
               fmt(seconds) + " s";
  }
  return o;
}

Outcome sensitivity() {
  Outcome o;
  const auto table = oct::sensitivity_sweep(oct::synthesize(1), kParams, oct::PlannerConfig{});
  double rotor = 0.0, generator = 0.0, tank = 0.0;
  for (const auto& row : table) {
    switch (row.parameter) {
      case oct::DesignParameter::rotor: rotor = row.spread(); break;
      case oct::DesignParameter::generator: generator = row.spread(); break;
      case oct::DesignParameter::tank: tank = row.spread(); break;
    }
  }
  o.detail = "spreads rotor " + fmt(rotor) + ", generator " + fmt(generator) + ", tank " + fmt(tank);
  o.require(rotor > generator && rotor > tank, "rotor not dominant");
  return o;
}

Outcome dynamics() {
  namespace dyn = oct::dynamics;
  Outcome o;
  oct::Rng rng(2024);
  int asym = 0;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto in = oct_test::random_inertia(rng);
    const auto M = dyn::assemble_mass_matrix(in);
    if (M != M.transpose()) ++asym;
    const dyn::RigidBody body(in);
    const auto s = oct_test::random_state(rng);
    const auto f = oct_test::random_forces(rng);
    const dyn::Vector6 F = dyn::assemble_forcing(s, f, in);
    const dyn::Vector6 a = body.accelerations(s, f).head<6>();
    worst = std::max(worst, (M * a - F).norm() / F.norm());
  }
  o.require(asym == 0, std::to_string(asym) + " asymmetric mass matrices");
  o.require(worst <= 1e-10, "solve residual " + fmt(worst));

  const double order = std::log2(oct_test::harmonic_error(0.05, 10.0) / oct_test::harmonic_error(0.025, 10.0));
  o.require(order >= 3.8, "RK4 order " + fmt(order));

  oct_test::AffineForceModel model;
  for (int i = 0; i < model.K.size(); ++i) model.K.data()[i] = rng.uniform(-1.0, 1.0);
  for (int i = 0; i < model.L.size(); ++i) model.L.data()[i] = rng.uniform(-1.0, 1.0);
  const auto lm = dyn::linearize(model, dyn::Vector13::Zero(), dyn::Vector3::Zero(), oct_test::decoupled_inertia());
  dyn::MatrixA A = dyn::MatrixA::Zero();
  dyn::MatrixB B = dyn::MatrixB::Zero();
  const int load_row[] = {0, 1, 2, 3, -1, 4, 5};
  for (int r = 0; r < 7; ++r) {
    if (load_row[r] < 0) continue;
    A.row(r) = model.K.row(load_row[r]);
    B.row(r) = model.L.row(load_row[r]);
  }
  A.block<3, 3>(7, 0).setIdentity();
  A(10, 3) = A(11, 5) = A(12, 6) = 1.0;
  const double err = std::max((lm.A - A).cwiseAbs().maxCoeff(), (lm.B - B).cwiseAbs().maxCoeff());
  o.require(err <= 1e-8, "linearization error " + fmt(err));
  if (o.pass) {
    o.detail = "symmetric 1000/1000, residual " + fmt(worst) + ", RK4 order " + fmt(order) +
               ", linearization error " + fmt(err);
  }
  return o;
}

Outcome power_units() {
  Outcome o;
  const double hd = oct::hold_depth_power(0.1, 1.0, kParams);
  const double cd = oct::change_depth_power(-10.0, 1.0, kParams);
  o.require(within_rel(hd, 0.9113, 1e-6), "P_HD " + fmt(hd));
  o.require(within_rel(cd, 0.36452, 1e-6), "P_CD " + fmt(cd));
  o.require(oct::hold_depth_power(0.0, 1.0, kParams) == 0.0 && oct::hold_depth_power(-0.1, 1.0, kParams) == 0.0,
            "P_HD zero branch");
  o.require(oct::change_depth_power(0.0, 1.0, kParams) == 0.0 && oct::change_depth_power(10.0, 1.0, kParams) == 0.0,
            "P_CD zero branch");
  if (o.pass) o.detail = "P_HD " + fmt(hd) + " kW, P_CD " + fmt(cd) + " kW";
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / ("octcd_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto run = [&](const std::string& args) {
    const std::string cmd = "cd '" + dir.string() + "' && '" OCTCD_PATH "' " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  std::ofstream(dir / "run.cfg") << "mission_hours = 96\nga.population_size = 10\nga.generations = 6\n";

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"gen-current --seed 7 --out ", ".csv"},
      {"plan --config run.cfg --field field.csv --out ", ".csv"},
      {"codesign --config run.cfg --field field.csv --seed 5 --out ", ".json"},
      {"codesign --config run.cfg --field field.csv --seed 5 --single tank --out ", ".json"},
      {"sensitivity --config run.cfg --field field.csv --out ", ".csv"},
      {"simulate-dynamics --dt 0.01 --steps 200 --out ", ".csv"},
      {"linearize --out ", ".json"},
  };
  if (run("gen-current --seed 7 --out field.csv") != 0) o.require(false, "gen-current failed");
  int identical = 0;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    const auto& [cmd, ext] = commands[i];
    const std::string a = "out" + std::to_string(i) + "a" + ext;
    const std::string b = "out" + std::to_string(i) + "b" + ext;
    const std::string name = cmd.substr(0, cmd.find(' '));
    if (run(cmd + a) != 0 || run(cmd + b) != 0) {
      o.require(false, name + " exited nonzero");
      continue;
    }
    const std::string ta = slurp(dir / a);
    if (ta.empty() || ta != slurp(dir / b)) {
      o.require(false, name + " outputs differ");
      continue;
    }
    if (!fs::exists(dir / (a + ".manifest.json"))) {
      o.require(false, name + " wrote no manifest");
      continue;
    }
    ++identical;
  }
  fs::remove_all(dir);
  if (o.pass) o.detail = std::to_string(identical) + " command runs byte-identical";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"mass model", mass_model},
      {"power-to-weight arithmetic", power_to_weight},
      {"DP exactness vs enumeration", dp_exactness},
      {"fill-state reduction", fill_reduction},
      {"diameter-squared law", diameter_squared},
      {"boundary optimum", boundary_optimum},
      {"sensitivity dominance", sensitivity},
      {"dynamics properties", dynamics},
      {"power-model units", power_units},
      {"CLI determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu %-30s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
