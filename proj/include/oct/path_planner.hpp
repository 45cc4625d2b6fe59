#pragma once

// Receding-horizon depth planning. Each horizon is solved exactly by forward
// dynamic programming over a layered (time, depth-level) graph.
//
// The fill fraction is not part of the DP state: because every transition
// changes the fill by kappa1*dv + kappa2*dz, the fill at a node is
//   B(z, t) = B0 + kappa1 * (v(z, t) - v0) + kappa2 * (z - z0)
// whatever path led there, so fill bounds are a per-node check and the slew
// bound a per-edge check.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "oct/current_field.hpp"
#include "oct/errors.hpp"
#include "oct/format.hpp"
#include "oct/params.hpp"
#include "oct/power_model.hpp"

namespace oct {

/// Discrete operating depths, ascending, in m.
struct DepthGrid {
  std::vector<double> levels;

  static DepthGrid uniform(double depth_min, double depth_max, int count) {
    if (count < 2) throw InputError("depth grid needs at least two levels");
    DepthGrid g;
    g.levels.resize(static_cast<std::size_t>(count));
    const double spacing = (depth_max - depth_min) / static_cast<double>(count - 1);
    for (int i = 0; i < count; ++i) g.levels[static_cast<std::size_t>(i)] = depth_min + spacing * i;
    g.levels.back() = depth_max;
    return g;
  }

  static DepthGrid from_config(const TurbineParameters& params, const PlannerConfig& config) {
    return uniform(params.depth_min, params.depth_max, config.depth_levels);
  }

  std::size_t size() const { return levels.size(); }

  /// Index of the level equal to z (to 1e-9 m); throws if z is off-grid.
  std::size_t index_of(double z) const {
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (std::abs(levels[i] - z) <= 1e-9) return i;
    }
    throw InputError("depth " + format_double(z) + " m is not a grid level");
  }
};

/// Counts of candidate nodes/edges removed by the fill constraints.
struct ConstraintActivity {
  long fill_bound_rejections = 0;
  long slew_rejections = 0;

  ConstraintActivity& operator+=(const ConstraintActivity& o) {
    fill_bound_rejections += o.fill_bound_rejections;
    slew_rejections += o.slew_rejections;
    return *this;
  }
};

/// One horizon's planning problem with flow speeds already sampled on the grid.
/// speeds[i * levels + j] is v at level j and stage i; stage 0 is the current
/// time, stages 1..T the horizon.
struct HorizonProblem {
  std::span<const double> levels;
  std::span<const double> speeds;
  int horizon_steps = 0;
  std::size_t start_level = 0;
  FillState start_fill;
  double dt_hours = 1.0;
  DesignVector design;
  const TurbineParameters* params = nullptr;
};

struct HorizonSolution {
  std::vector<std::size_t> path;  // level index at stages 1..T
  double first_move = 0.0;        // depth of stage 1, m
  double total_net = 0.0;         // sum of per-step net power, kW
  double horizon_value = 0.0;     // total_net / T, kW
  ConstraintActivity activity;
};

namespace detail {

// Strict "a is preferred over b" for two equal-length level paths that both
// start at `start`: smaller |dz| first, then shallower, step by step.
inline bool preferred_path(std::span<const std::size_t> a, std::span<const std::size_t> b,
                           std::size_t start, std::span<const double> levels) {
  std::size_t pa = start;
  std::size_t pb = start;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = std::abs(levels[a[i]] - levels[pa]);
    const double db = std::abs(levels[b[i]] - levels[pb]);
    if (da != db) return da < db;
    if (a[i] != b[i]) return levels[a[i]] < levels[b[i]];
    pa = a[i];
    pb = b[i];
  }
  return false;
}

inline constexpr std::size_t kNoPredecessor = static_cast<std::size_t>(-1);

}  // namespace detail

/// Path ordering used by the planner: higher total net power wins; on exact
/// ties the path with the smaller depth change (then the shallower depth) at
/// the first differing step wins.
inline bool better_path(double value_a, std::span<const std::size_t> path_a, double value_b,
                        std::span<const std::size_t> path_b, std::size_t start,
                        std::span<const double> levels) {
  if (value_a != value_b) return value_a > value_b;
  return detail::preferred_path(path_a, path_b, start, levels);
}

/// Exact maximizer of summed net power over all grid paths of length T.
inline HorizonSolution solve_horizon(const HorizonProblem& prob) {
  const auto& params = *prob.params;
  const std::size_t n_levels = prob.levels.size();
  const auto n_stages = static_cast<std::size_t>(prob.horizon_steps);
  if (prob.horizon_steps < 1) throw InputError("horizon_steps must be >= 1");
  if (prob.speeds.size() < (n_stages + 1) * n_levels) {
    throw InputError("horizon speed table is too small");
  }
  if (prob.start_level >= n_levels) throw InputError("start level outside the depth grid");

  const auto v = [&](std::size_t stage, std::size_t level) {
    return prob.speeds[stage * n_levels + level];
  };
  const FillLimits limits = fill_limits(prob.design, params);
  const double z0 = prob.levels[prob.start_level];
  const double v0 = v(0, prob.start_level);
  const double b0 = prob.start_fill.forward_fill;
  const double a0 = prob.start_fill.aft_fill;

  HorizonSolution sol;
  std::vector<double> value((n_stages + 1) * n_levels, 0.0);
  std::vector<std::size_t> pred((n_stages + 1) * n_levels, detail::kNoPredecessor);
  std::vector<char> reachable((n_stages + 1) * n_levels, 0);
  reachable[prob.start_level] = 1;

  // Path to node (stage, level) followed by `next`, as level indices for stages 1..stage+1.
  std::vector<std::size_t> buf_a(n_stages), buf_b(n_stages);
  const auto trace = [&](std::vector<std::size_t>& buf, std::size_t stage, std::size_t level,
                         std::size_t next) -> std::span<const std::size_t> {
    buf[stage] = next;
    for (std::size_t s = stage; s >= 1; --s) {
      buf[s - 1] = level;
      level = pred[s * n_levels + level];
    }
    return std::span<const std::size_t>(buf.data(), stage + 1);
  };

  const double max_delta = max_fill_change(prob.dt_hours, params);
  for (std::size_t stage = 1; stage <= n_stages; ++stage) {
    bool any = false;
    for (std::size_t j = 0; j < n_levels; ++j) {
      const double zj = prob.levels[j];
      const double vj = v(stage, j);
      const double shift = fill_change(vj - v0, zj - z0, params);
      if (!limits.contains(b0 + shift) || !limits.contains(a0 + shift)) {
        ++sol.activity.fill_bound_rejections;
        continue;
      }
      double best = 0.0;
      std::size_t best_pred = detail::kNoPredecessor;
      for (std::size_t p = 0; p < n_levels; ++p) {
        if (!reachable[(stage - 1) * n_levels + p]) continue;
        const double vp = v(stage - 1, p);
        const double dz = zj - prob.levels[p];
        if (std::abs(fill_change(vj - vp, dz, params)) > max_delta) {
          ++sol.activity.slew_rejections;
          continue;
        }
        const double cand =
            value[(stage - 1) * n_levels + p] + net_power(vp, vj, dz, prob.dt_hours, prob.design, params).net;
        if (best_pred == detail::kNoPredecessor || cand > best ||
            (cand == best &&
             detail::preferred_path(trace(buf_a, stage - 1, p, j), trace(buf_b, stage - 1, best_pred, j),
                                    prob.start_level, prob.levels))) {
          best = cand;
          best_pred = p;
        }
      }
      if (best_pred == detail::kNoPredecessor) continue;
      value[stage * n_levels + j] = best;
      pred[stage * n_levels + j] = best_pred;
      reachable[stage * n_levels + j] = 1;
      any = true;
    }
    if (!any) {
      throw InfeasibleError("no feasible depth at horizon stage " + std::to_string(stage) +
                            " (fill or slew limits exclude every level)");
    }
  }

  // Best terminal node, with the same ordering.
  std::size_t best_end = detail::kNoPredecessor;
  for (std::size_t j = 0; j < n_levels; ++j) {
    if (!reachable[n_stages * n_levels + j]) continue;
    if (best_end == detail::kNoPredecessor) {
      best_end = j;
      continue;
    }
    const double vj = value[n_stages * n_levels + j];
    const double vb = value[n_stages * n_levels + best_end];
    if (vj > vb || (vj == vb && detail::preferred_path(
                                    trace(buf_a, n_stages - 1, pred[n_stages * n_levels + j], j),
                                    trace(buf_b, n_stages - 1, pred[n_stages * n_levels + best_end], best_end),
                                    prob.start_level, prob.levels))) {
      best_end = j;
    }
  }

  sol.path.resize(n_stages);
  std::size_t level = best_end;
  for (std::size_t s = n_stages; s >= 1; --s) {
    sol.path[s - 1] = level;
    level = pred[s * n_levels + level];
  }
  sol.total_net = value[n_stages * n_levels + best_end];
  sol.horizon_value = sol.total_net / static_cast<double>(n_stages);
  sol.first_move = prob.levels[sol.path.front()];
  return sol;
}

/// Samples v at every grid level for stages t0, t0 + dt, ..., t0 + n_stages*dt.
inline std::vector<double> sample_speeds(const CurrentField& field, const DepthGrid& grid, double t0,
                                         double dt_hours, std::size_t n_stages) {
  std::vector<double> out((n_stages + 1) * grid.size());
  for (std::size_t k = 0; k <= n_stages; ++k) {
    const double t = t0 + dt_hours * static_cast<double>(k);
    for (std::size_t j = 0; j < grid.size(); ++j) out[k * grid.size() + j] = speed_at(field, grid.levels[j], t);
  }
  return out;
}

inline void check_coverage(const CurrentField& field, const DepthGrid& grid) {
  if (!field.covers_depth(grid.levels.front()) || !field.covers_depth(grid.levels.back())) {
    throw InputError("current field depth range [" + format_double(field.depth_bins().front()) + ", " +
                     format_double(field.depth_bins().back()) + "] m does not cover the planning grid [" +
                     format_double(grid.levels.front()) + ", " + format_double(grid.levels.back()) + "] m");
  }
}

/// Solves the horizon starting at time t0 (h) and depth z0 (m) on the
/// configured grid. Returns the first move and the horizon-average net power.
inline HorizonSolution solve_horizon(double t0, double z0, const FillState& fill0, const CurrentField& field,
                                     const DesignVector& design, const TurbineParameters& params,
                                     const PlannerConfig& config) {
  const DepthGrid grid = DepthGrid::from_config(params, config);
  check_coverage(field, grid);
  const auto n_stages = static_cast<std::size_t>(config.horizon_steps);
  const double t_end = t0 + config.time_step * static_cast<double>(n_stages);
  if (!field.covers_time(t0) || !field.covers_time(t_end)) {
    throw InputError("planning horizon [" + format_double(t0) + ", " + format_double(t_end) +
                     "] h lies outside the current field");
  }
  const FillLimits limits = fill_limits(design, params);
  if (!limits.contains(fill0.forward_fill) || !limits.contains(fill0.aft_fill)) {
    throw InfeasibleError("initial fill lies outside the design's fill range [" +
                          format_double(limits.lower) + ", " + format_double(limits.upper) + "]");
  }
  const std::vector<double> speeds = sample_speeds(field, grid, t0, config.time_step, n_stages);
  HorizonProblem prob{grid.levels, speeds, config.horizon_steps, grid.index_of(z0), fill0,
                      config.time_step, design, &params};
  return solve_horizon(prob);
}

/// Result of a mission rollout. Node vectors (times, depths, speeds, fills)
/// have one entry more than the per-step `power` vector; entry 0 is the start.
struct DepthPlan {
  std::vector<double> times;   // h
  std::vector<double> depths;  // m
  std::vector<double> speeds;  // m/s at (depth, time)
  std::vector<FillState> fills;
  std::vector<PowerBreakdown> power;
  double mission_average_net = 0.0;  // kW
  ConstraintActivity activity;
  bool truncated = false;
  std::vector<std::string> warnings;

  std::size_t steps() const { return power.size(); }
};

namespace detail {

struct MissionWindow {
  std::size_t steps = 0;
  bool truncated = false;
  std::string warning;
};

inline MissionWindow mission_window(const CurrentField& field, const PlannerConfig& config, int lookahead) {
  const double t0 = field.time_stamps().front();
  const double span = field.time_stamps().back() - t0;
  const auto stages_available = static_cast<long>(std::floor(span / config.time_step + 1e-9));
  const long requested = static_cast<long>(std::floor(config.mission_hours / config.time_step + 1e-9));
  if (requested < 1) throw InputError("mission shorter than one time step");
  const long available = stages_available - lookahead + 1;
  if (available < 1) {
    throw InputError("current field spans " + format_double(span) +
                     " h, too short for a single planning horizon");
  }
  MissionWindow w;
  w.steps = static_cast<std::size_t>(std::min(requested, available));
  if (available < requested) {
    w.truncated = true;
    w.warning = "mission truncated from " + std::to_string(requested) + " to " + std::to_string(available) +
                " steps to fit the current field";
  }
  return w;
}

inline FillState initial_fill_state(const DesignVector& design, const TurbineParameters& params,
                                    const PlannerConfig& config) {
  const FillState fill{config.initial_fill, config.initial_fill};
  const FillLimits limits = fill_limits(design, params);
  if (!limits.contains(fill.forward_fill)) {
    throw InfeasibleError("initial fill " + format_double(config.initial_fill) + " lies outside [" +
                          format_double(limits.lower) + ", " + format_double(limits.upper) +
                          "] for tank volume " + format_double(design.tank_volume) + " m^3");
  }
  return fill;
}

inline void finish_plan(DepthPlan& plan) {
  double sum = 0.0;
  for (const auto& p : plan.power) sum += p.net;
  plan.mission_average_net = plan.power.empty() ? 0.0 : sum / static_cast<double>(plan.power.size());
}

}  // namespace detail

/// Receding-horizon rollout: at every step solve the T-step horizon, commit
/// its first move, update the fills and advance one time step. The mission
/// starts at the field's first time stamp.
inline DepthPlan plan_mission(const CurrentField& field, const DesignVector& design,
                              const TurbineParameters& params, const PlannerConfig& config) {
  const DepthGrid grid = DepthGrid::from_config(params, config);
  check_coverage(field, grid);
  const detail::MissionWindow window = detail::mission_window(field, config, config.horizon_steps);
  const std::size_t n_levels = grid.size();
  const double t0 = field.time_stamps().front();
  const double dt = config.time_step;
  const std::vector<double> speeds =
      sample_speeds(field, grid, t0, dt, window.steps - 1 + static_cast<std::size_t>(config.horizon_steps));

  DepthPlan plan;
  plan.truncated = window.truncated;
  if (window.truncated) plan.warnings.push_back(window.warning);

  std::size_t level = grid.index_of(config.initial_depth);
  FillState fill = detail::initial_fill_state(design, params, config);
  plan.times.push_back(t0);
  plan.depths.push_back(grid.levels[level]);
  plan.speeds.push_back(speeds[level]);
  plan.fills.push_back(fill);

  const std::size_t stride = n_levels;
  for (std::size_t k = 0; k < window.steps; ++k) {
    HorizonProblem prob{grid.levels,
                        std::span<const double>(speeds).subspan(k * stride),
                        config.horizon_steps,
                        level,
                        fill,
                        dt,
                        design,
                        &params};
    HorizonSolution sol;
    try {
      sol = solve_horizon(prob);
    } catch (const InfeasibleError& e) {
      throw InfeasibleError("mission step " + std::to_string(k) + " (t=" +
                            format_double(t0 + dt * static_cast<double>(k)) + " h): " + e.what());
    }
    plan.activity += sol.activity;

    const std::size_t next = sol.path.front();
    const double v_prev = speeds[k * stride + level];
    const double v_next = speeds[(k + 1) * stride + next];
    const double dz = grid.levels[next] - grid.levels[level];
    plan.power.push_back(net_power(v_prev, v_next, dz, dt, design, params));
    fill = step_fill(fill, v_next - v_prev, dz, dt, design, params);
    level = next;

    plan.times.push_back(t0 + dt * static_cast<double>(k + 1));
    plan.depths.push_back(grid.levels[level]);
    plan.speeds.push_back(v_next);
    plan.fills.push_back(fill);
  }
  detail::finish_plan(plan);
  return plan;
}

/// Rolls out a fixed depth path (depths[0] must be the configured initial
/// depth). Fill constraints are enforced; the path is not optimized.
inline DepthPlan evaluate_path(const CurrentField& field, std::span<const double> depths,
                               const DesignVector& design, const TurbineParameters& params,
                               const PlannerConfig& config) {
  if (depths.size() < 2) throw InputError("a forced path needs at least two depths");
  const DepthGrid grid = DepthGrid::from_config(params, config);
  check_coverage(field, grid);
  const std::size_t steps = depths.size() - 1;
  if (grid.index_of(depths.front()) != grid.index_of(config.initial_depth)) {
    throw InputError("forced path must start at the initial depth");
  }
  const double t0 = field.time_stamps().front();
  const double dt = config.time_step;
  if (!field.covers_time(t0 + dt * static_cast<double>(steps))) {
    throw InputError("forced path runs past the end of the current field");
  }

  DepthPlan plan;
  FillState fill = detail::initial_fill_state(design, params, config);
  double v_prev = speed_at(field, depths[0], t0);
  plan.times.push_back(t0);
  plan.depths.push_back(depths[0]);
  plan.speeds.push_back(v_prev);
  plan.fills.push_back(fill);
  for (std::size_t k = 0; k < steps; ++k) {
    const double z_next = grid.levels[grid.index_of(depths[k + 1])];
    const double t_next = t0 + dt * static_cast<double>(k + 1);
    const double v_next = speed_at(field, z_next, t_next);
    const double dz = z_next - plan.depths.back();
    plan.power.push_back(net_power(v_prev, v_next, dz, dt, design, params));
    fill = step_fill(fill, v_next - v_prev, dz, dt, design, params);
    plan.times.push_back(t_next);
    plan.depths.push_back(z_next);
    plan.speeds.push_back(v_next);
    plan.fills.push_back(fill);
    v_prev = v_next;
  }
  detail::finish_plan(plan);
  return plan;
}

/// Mission-average net power of the receding-horizon plan, in kW.
inline double evaluate_design(const CurrentField& field, const DesignVector& design,
                              const TurbineParameters& params, const PlannerConfig& config) {
  return plan_mission(field, design, params, config).mission_average_net;
}

/// CSV of a plan: one row per committed step giving the state reached at the
/// end of the step and that step's power terms, then a summary comment line.
inline std::string plan_to_csv(const DepthPlan& plan) {
  std::string out = "t_h,depth_m,v_mps,B_f,B_a,P_gen_kW,P_HD_kW,P_CD_kW,P_net_kW\n";
  for (std::size_t k = 0; k < plan.steps(); ++k) {
    const auto& p = plan.power[k];
    const auto& f = plan.fills[k + 1];
    for (double x : {plan.times[k + 1], plan.depths[k + 1], plan.speeds[k + 1], f.forward_fill, f.aft_fill,
                     p.generated, p.hold_depth_cost, p.change_depth_cost}) {
      out += format_double(x);
      out += ',';
    }
    out += format_double(p.net);
    out += '\n';
  }
  out += "# mission_average_net_kW=" + format_double(plan.mission_average_net) + '\n';
  return out;
}

}  // namespace oct
