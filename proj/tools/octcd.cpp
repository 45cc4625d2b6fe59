// octcd: command-line driver for the turbine co-design toolkit.
//
//   octcd gen-current --seed 7 --out field.csv
//   octcd plan --field field.csv --out plan.csv
//   octcd codesign --field field.csv --seed 1 --out result.json [--single rotor]
//   octcd sensitivity --field field.csv --out table.csv
//   octcd simulate-dynamics --dt 0.001 --steps 1000 --out traj.csv
//   octcd linearize --out AB.json
//
// Exit codes: 0 success, 2 usage, 3 input/parse, 4 infeasible, 5 numerical.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "manifest.hpp"
#include "oct/oct.hpp"

#ifndef OCT_VERSION
#define OCT_VERSION "unknown"
#endif

namespace {

using nlohmann::ordered_json;

struct CommonOptions {
  std::string config_path;
  std::string out;
};

oct::Config load_config_or_default(const std::string& path) {
  return path.empty() ? oct::parse_config("") : oct::load_config(path);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw oct::InputError("cannot write '" + path + "'");
  f << text;
  if (!f) throw oct::InputError("failed writing '" + path + "'");
}

ordered_json design_json(const oct::DesignVector& d) {
  return {{"generator_rating_kW", d.generator_rating},
          {"rotor_diameter_m", d.rotor_diameter},
          {"tank_volume_m3", d.tank_volume}};
}

ordered_json mass_json(const oct::MassBreakdown& m) {
  return {{"rotor_kg", m.rotor_mass},
          {"generator_kg", m.generator_mass},
          {"tank_kg", m.tank_mass},
          {"total_kg", m.total_mass}};
}

template <typename Rows>
ordered_json matrix_json(const Rows& M) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

oct::cli::RunManifest make_manifest(const std::string& command, const std::vector<std::string>& args,
                                    const oct::Config* config) {
  oct::cli::RunManifest m;
  m.command = command;
  m.arguments = args;
  m.tool_version = OCT_VERSION;
  if (config) m.config_snapshot = oct::serialize_config(*config);
  return m;
}

// --- gen-current -------------------------------------------------------------

struct GenCurrentOptions : CommonOptions {
  std::uint64_t seed = 1;
  oct::SynthesisSpec spec;
};

void add_gen_current(CLI::App& app, GenCurrentOptions& o) {
  auto* cmd = app.add_subcommand("gen-current", "Write a synthetic current field as CSV");
  cmd->add_option("--config", o.config_path, "Configuration file (recorded in the manifest)");
  cmd->add_option("--seed", o.seed, "Noise seed")->capture_default_str();
  cmd->add_option("--out", o.out, "Output CSV")->required();
  cmd->add_option("--mean", o.spec.mean, "Mean surface speed, m/s")->capture_default_str();
  cmd->add_option("--amp", o.spec.amplitude, "Sinusoid amplitude, m/s")->capture_default_str();
  cmd->add_option("--period", o.spec.period, "Sinusoid period, h")->capture_default_str();
  cmd->add_option("--noise", o.spec.noise_stddev, "AR(1) noise standard deviation, m/s")->capture_default_str();
  cmd->add_option("--noise-correlation", o.spec.noise_correlation, "AR(1) lag-one correlation")
      ->capture_default_str();
  cmd->add_option("--decay", o.spec.decay_length, "Shear decay length, m")->capture_default_str();
  cmd->add_option("--reference-depth", o.spec.reference_depth, "Depth of full-strength flow, m")
      ->capture_default_str();
  cmd->add_option("--hours", o.spec.duration, "Field duration, h")->capture_default_str();
}

void run_gen_current(const GenCurrentOptions& o, const std::vector<std::string>& args) {
  const Timer timer;
  const oct::Config config = load_config_or_default(o.config_path);
  const oct::CurrentField field = oct::synthesize(o.seed, o.spec);
  oct::save_csv(field, o.out);
  auto m = make_manifest("gen-current", args, &config);
  m.seed = o.seed;
  if (!o.config_path.empty()) m.inputs.push_back(o.config_path);
  m.outputs.push_back(o.out);
  m.wall_clock_seconds = timer.seconds();
  m.write_next_to(o.out);
}

// --- plan --------------------------------------------------------------------

struct DesignOverrides {
  std::optional<double> generator_rating;
  std::optional<double> rotor_diameter;
  std::optional<double> tank_volume;

  oct::DesignVector apply(oct::DesignVector d) const {
    if (generator_rating) d.generator_rating = *generator_rating;
    if (rotor_diameter) d.rotor_diameter = *rotor_diameter;
    if (tank_volume) d.tank_volume = *tank_volume;
    return d;
  }
};

struct PlanOptions : CommonOptions {
  std::string field;
  DesignOverrides design;
};

void add_design_flags(CLI::App* cmd, DesignOverrides& d) {
  cmd->add_option("--generator-rating", d.generator_rating, "Generator rating, kW (default: base)");
  cmd->add_option("--rotor-diameter", d.rotor_diameter, "Rotor diameter, m (default: base)");
  cmd->add_option("--tank-volume", d.tank_volume, "Volume of each buoyancy tank, m^3 (default: base)");
}

void add_plan(CLI::App& app, PlanOptions& o) {
  auto* cmd = app.add_subcommand("plan", "Receding-horizon depth plan for one design");
  cmd->add_option("--config", o.config_path, "Configuration file");
  cmd->add_option("--field", o.field, "Current field CSV")->required();
  cmd->add_option("--out", o.out, "Output plan CSV")->required();
  add_design_flags(cmd, o.design);
}

void run_plan(const PlanOptions& o, const std::vector<std::string>& args) {
  const Timer timer;
  const oct::Config config = load_config_or_default(o.config_path);
  const oct::CurrentField field = oct::load_csv(o.field);
  const oct::DesignVector design = o.design.apply(oct::default_design(config.params));
  const oct::DepthPlan plan = oct::plan_mission(field, design, config.params, config.planner);
  for (const auto& w : plan.warnings) std::cerr << "warning: " << w << '\n';
  write_text(o.out, oct::plan_to_csv(plan));

  const oct::MassBreakdown mass = oct::total_mass(design, config.params);
  std::cout << "steps=" << plan.steps() << " mission_average_net_kW=" << oct::format_double(plan.mission_average_net)
            << " total_mass_kg=" << oct::format_double(mass.total_mass)
            << " power_to_weight_kW_per_kg=" << oct::format_double(oct::power_to_weight(plan.mission_average_net, mass))
            << " fill_bound_rejections=" << plan.activity.fill_bound_rejections
            << " slew_rejections=" << plan.activity.slew_rejections << '\n';

  auto m = make_manifest("plan", args, &config);
  if (!o.config_path.empty()) m.inputs.push_back(o.config_path);
  m.inputs.push_back(o.field);
  m.outputs.push_back(o.out);
  m.wall_clock_seconds = timer.seconds();
  m.write_next_to(o.out);
}

// --- codesign ----------------------------------------------------------------

struct CodesignOptions : CommonOptions {
  std::string field;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string single;
};

void add_codesign(CLI::App& app, CodesignOptions& o) {
  auto* cmd = app.add_subcommand("codesign", "Genetic-algorithm design optimization");
  cmd->add_option("--config", o.config_path, "Configuration file");
  cmd->add_option("--field", o.field, "Current field CSV")->required();
  cmd->add_option("--seed", o.seed, "GA seed (overrides ga.rng_seed)");
  cmd->add_option("--out", o.out, "Output JSON")->required();
  cmd->add_option("--single", o.single, "Optimize one parameter only")
      ->check(CLI::IsMember({"rotor", "generator", "tank"}));
  cmd->add_option("--threads", o.threads, "Concurrent fitness evaluations (overrides ga.threads)");
}

void run_codesign(const CodesignOptions& o, const std::vector<std::string>& args) {
  const Timer timer;
  oct::Config config = load_config_or_default(o.config_path);
  if (o.seed) config.ga.rng_seed = *o.seed;
  if (o.threads) config.ga.threads = *o.threads;
  oct::validate(config);
  const oct::CurrentField field = oct::load_csv(o.field);

  const oct::GeneMask mask =
      o.single.empty() ? oct::kAllGenes : oct::single_gene(oct::parse_design_parameter(o.single));
  const oct::CodesignResult r = oct::run_ga(field, config.params, config.bounds, config.ga, config.planner, mask);
  if (r.best_fitness == oct::kInfeasibleFitness) {
    throw oct::InfeasibleError("no feasible design found in " + std::to_string(r.evaluations) + " evaluations");
  }

  ordered_json j;
  j["mode"] = o.single.empty() ? "all" : o.single;
  j["seed"] = config.ga.rng_seed;
  j["best_design"] = design_json(r.best_design);
  j["best_power_kW"] = r.best_power;
  j["best_fitness_kW_per_kg"] = r.best_fitness;
  j["best_mass"] = mass_json(r.best_mass);
  j["evaluations"] = r.evaluations;
  ordered_json hist = ordered_json::array();
  for (std::size_t g = 0; g < r.history.size(); ++g) {
    const auto& h = r.history[g];
    hist.push_back({{"generation", g},
                    {"best_fitness", h.best_fitness},
                    {"mean_fitness", h.feasible_count > 0 ? ordered_json(h.mean_fitness) : ordered_json(nullptr)},
                    {"feasible", h.feasible_count}});
  }
  j["history"] = std::move(hist);
  write_text(o.out, j.dump(2) + "\n");

  std::cout << "rotor_diameter_m=" << oct::format_double(r.best_design.rotor_diameter)
            << " generator_rating_kW=" << oct::format_double(r.best_design.generator_rating)
            << " tank_volume_m3=" << oct::format_double(r.best_design.tank_volume)
            << " fitness_kW_per_kg=" << oct::format_double(r.best_fitness) << '\n';

  auto m = make_manifest("codesign", args, &config);
  m.seed = config.ga.rng_seed;
  if (!o.config_path.empty()) m.inputs.push_back(o.config_path);
  m.inputs.push_back(o.field);
  m.outputs.push_back(o.out);
  m.wall_clock_seconds = timer.seconds();
  m.write_next_to(o.out);
}

// --- sensitivity -------------------------------------------------------------

struct SensitivityOptions : CommonOptions {
  std::string field;
  double delta = 0.10;
};

void add_sensitivity(CLI::App& app, SensitivityOptions& o) {
  auto* cmd = app.add_subcommand("sensitivity", "One-at-a-time +/- sweep of the design parameters");
  cmd->add_option("--config", o.config_path, "Configuration file");
  cmd->add_option("--field", o.field, "Current field CSV")->required();
  cmd->add_option("--out", o.out, "Output CSV")->required();
  cmd->add_option("--delta", o.delta, "Relative change from base")->capture_default_str()->check(CLI::Range(0.0, 0.9));
}

void run_sensitivity(const SensitivityOptions& o, const std::vector<std::string>& args) {
  const Timer timer;
  const oct::Config config = load_config_or_default(o.config_path);
  const oct::CurrentField field = oct::load_csv(o.field);
  const auto table = oct::sensitivity_sweep(field, config.params, config.planner, o.delta);
  write_text(o.out, oct::sensitivity_to_csv(table));

  auto m = make_manifest("sensitivity", args, &config);
  if (!o.config_path.empty()) m.inputs.push_back(o.config_path);
  m.inputs.push_back(o.field);
  m.outputs.push_back(o.out);
  m.wall_clock_seconds = timer.seconds();
  m.write_next_to(o.out);
}

// --- simulate-dynamics / linearize ---------------------------------------------

struct DynamicsOptions : CommonOptions {
  std::string inertia;
  double dt = 0.001;
  long steps = 1000;
  double current = 1.6;
  std::optional<double> forward_fill;
  std::optional<double> aft_fill;
  std::optional<double> torque;
  double fd_step = 1e-5;
};

void add_dynamics_common(CLI::App* cmd, DynamicsOptions& o) {
  cmd->add_option("--config", o.config_path, "Configuration file (recorded in the manifest)");
  cmd->add_option("--inertia", o.inertia, "Inertia file (default: built-in illustrative set)");
  cmd->add_option("--current", o.current, "Surrogate current speed, m/s")->capture_default_str();
  cmd->add_option("--forward-fill", o.forward_fill, "Forward tank fill (default: nominal)");
  cmd->add_option("--aft-fill", o.aft_fill, "Aft tank fill (default: nominal)");
  cmd->add_option("--torque", o.torque, "Generator shaft torque, N m (default: nominal)");
}

void add_simulate(CLI::App& app, DynamicsOptions& o) {
  auto* cmd = app.add_subcommand("simulate-dynamics", "RK4 simulation from the nominal state under the surrogate loads");
  add_dynamics_common(cmd, o);
  cmd->add_option("--dt", o.dt, "Step, s")->capture_default_str();
  cmd->add_option("--steps", o.steps, "Number of steps")->capture_default_str();
  cmd->add_option("--out", o.out, "Output trajectory CSV")->required();
}

void add_linearize(CLI::App& app, DynamicsOptions& o) {
  auto* cmd = app.add_subcommand("linearize", "Linear model A, B about the nominal condition");
  add_dynamics_common(cmd, o);
  cmd->add_option("--fd-step", o.fd_step, "Relative finite-difference step")->capture_default_str();
  cmd->add_option("--out", o.out, "Output JSON")->required();
}

oct::dynamics::Controls controls_from(const DynamicsOptions& o) {
  const auto u = oct::dynamics::nominal_controls();
  return {o.forward_fill.value_or(u(0)), o.aft_fill.value_or(u(1)), o.torque.value_or(u(2))};
}

oct::dynamics::InertiaSet inertia_from(const DynamicsOptions& o) {
  return o.inertia.empty() ? oct::dynamics::default_inertia() : oct::dynamics::load_inertia(o.inertia);
}

void run_simulate(const DynamicsOptions& o, const std::vector<std::string>& args) {
  namespace dyn = oct::dynamics;
  const Timer timer;
  const dyn::InertiaSet inertia = inertia_from(o);
  dyn::SurrogateEnvironment env;
  env.current_speed = o.current;
  const dyn::Controls u = controls_from(o);
  const dyn::RigidBodyState x0 = dyn::expand_reduced(dyn::nominal_state());
  const auto traj = dyn::integrate(
      x0, [&](const dyn::RigidBodyState& s, double) { return dyn::surrogate_force_model(s, u, env); }, inertia, o.dt,
      o.steps);
  write_text(o.out, dyn::trajectory_to_csv(traj));

  auto m = make_manifest("simulate-dynamics", args, nullptr);
  if (!o.inertia.empty()) m.inputs.push_back(o.inertia);
  m.outputs.push_back(o.out);
  m.wall_clock_seconds = timer.seconds();
  m.write_next_to(o.out);
}

void run_linearize(const DynamicsOptions& o, const std::vector<std::string>& args) {
  namespace dyn = oct::dynamics;
  const Timer timer;
  const dyn::InertiaSet inertia = inertia_from(o);
  dyn::SurrogateEnvironment env;
  env.current_speed = o.current;
  const dyn::Controls c = controls_from(o);
  const dyn::Vector3 u_eq(c.forward_fill, c.aft_fill, c.shaft_torque);
  const auto model = [&](const dyn::RigidBodyState& s, const dyn::Controls& u) {
    return dyn::surrogate_force_model(s, u, env);
  };
  const dyn::LinearModel lm = dyn::linearize(model, dyn::nominal_state(), u_eq, inertia, o.fd_step);
  if (lm.equilibrium_residual > 1e-6) {
    std::cerr << "warning: nominal point is not an equilibrium of the force model (|f(x_eq, u_eq)| = "
              << oct::format_double(lm.equilibrium_residual) << ")\n";
  }

  ordered_json j;
  j["state_order"] = {"u", "v", "w", "p_b", "p_r", "q", "r", "x", "y", "z", "phi", "theta", "psi"};
  j["input_order"] = {"B_f", "B_a", "tau_em"};
  j["A"] = matrix_json(lm.A);
  j["B"] = matrix_json(lm.B);
  j["x_eq"] = std::vector<double>(lm.x_eq.data(), lm.x_eq.data() + lm.x_eq.size());
  j["u_eq"] = std::vector<double>(lm.u_eq.data(), lm.u_eq.data() + lm.u_eq.size());
  j["equilibrium_residual"] = lm.equilibrium_residual;
  write_text(o.out, j.dump(2) + "\n");

  auto m = make_manifest("linearize", args, nullptr);
  if (!o.inertia.empty()) m.inputs.push_back(o.inertia);
  m.outputs.push_back(o.out);
  m.wall_clock_seconds = timer.seconds();
  m.write_next_to(o.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Control co-design toolkit for a buoyancy-controlled ocean current turbine", "octcd"};
  app.set_version_flag("--version", std::string("octcd ") + OCT_VERSION);
  app.require_subcommand(1);

  GenCurrentOptions gen;
  PlanOptions plan;
  CodesignOptions codesign;
  SensitivityOptions sensitivity;
  DynamicsOptions simulate;
  DynamicsOptions linearize;
  add_gen_current(app, gen);
  add_plan(app, plan);
  add_codesign(app, codesign);
  add_sensitivity(app, sensitivity);
  add_simulate(app, simulate);
  add_linearize(app, linearize);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(oct::ExitCode::usage);
  }

  const std::vector<std::string> args(argv + 1, argv + argc);
  try {
    if (app.got_subcommand("gen-current")) run_gen_current(gen, args);
    else if (app.got_subcommand("plan")) run_plan(plan, args);
    else if (app.got_subcommand("codesign")) run_codesign(codesign, args);
    else if (app.got_subcommand("sensitivity")) run_sensitivity(sensitivity, args);
    else if (app.got_subcommand("simulate-dynamics")) run_simulate(simulate, args);
    else if (app.got_subcommand("linearize")) run_linearize(linearize, args);
  } catch (const oct::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(oct::ExitCode::numerical);
  }
  return 0;
}
