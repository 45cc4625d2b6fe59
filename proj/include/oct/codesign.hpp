#pragma once

// Outer design loop: a real-coded genetic algorithm maximizing the
// power-to-weight ratio P / m_t, where P is the mission-average net power of
// the receding-horizon depth plan for each candidate design.

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "oct/current_field.hpp"
#include "oct/errors.hpp"
#include "oct/mass_model.hpp"
#include "oct/params.hpp"
#include "oct/path_planner.hpp"
#include "oct/random.hpp"

namespace oct {

/// Fitness assigned to designs whose plan or mass is infeasible.
inline constexpr double kInfeasibleFitness = -1.0e9;

inline double power_to_weight(double power_kw, const MassBreakdown& mass) {
  return power_kw / mass.total_mass;
}

struct FitnessEvaluation {
  DesignVector design;
  double fitness = kInfeasibleFitness;  // kW/kg
  double power = 0.0;                   // kW
  MassBreakdown mass;
  bool feasible = false;
  std::string infeasibility;
};

/// Evaluates P / m_t for one design. Infeasible plans or masses do not
/// throw; they yield kInfeasibleFitness with the reason recorded.
inline FitnessEvaluation evaluate_fitness(const DesignVector& design, const CurrentField& field,
                                          const TurbineParameters& params, const PlannerConfig& config) {
  FitnessEvaluation e;
  e.design = design;
  try {
    e.mass = total_mass(design, params);
    e.power = evaluate_design(field, design, params, config);
    e.fitness = power_to_weight(e.power, e.mass);
    e.feasible = true;
  } catch (const InfeasibleError& err) {
    e.fitness = kInfeasibleFitness;
    e.feasible = false;
    e.infeasibility = err.what();
  }
  return e;
}

inline double fitness(const DesignVector& design, const CurrentField& field, const TurbineParameters& params,
                      const PlannerConfig& config) {
  return evaluate_fitness(design, field, params, config).fitness;
}

struct GenerationStats {
  double best_fitness = kInfeasibleFitness;  // best seen so far
  double mean_fitness = kInfeasibleFitness;  // over feasible members of this generation
  int feasible_count = 0;
};

struct CodesignResult {
  DesignVector best_design;
  double best_fitness = kInfeasibleFitness;
  double best_power = 0.0;
  MassBreakdown best_mass;
  std::vector<GenerationStats> history;
  long evaluations = 0;
};

/// Which genes the GA may change; frozen genes stay at their base values.
using GeneMask = std::array<bool, 3>;

inline constexpr GeneMask kAllGenes = {true, true, true};

inline GeneMask single_gene(DesignParameter p) {
  GeneMask m = {false, false, false};
  m[static_cast<std::size_t>(p)] = true;
  return m;
}

namespace detail {

inline void evaluate_population(std::vector<FitnessEvaluation>& pop, std::size_t first,
                                const CurrentField& field, const TurbineParameters& params,
                                const PlannerConfig& config, int threads) {
  const std::size_t n = pop.size() - first;
  const auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = first + begin; i < pop.size(); i += stride) {
      pop[i] = evaluate_fitness(pop[i].design, field, params, config);
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::max(1, threads));
  if (n_threads == 1 || n < 2) {
    work(0, 1);
    return;
  }
  // Results land in fixed slots, so the outcome does not depend on scheduling.
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < std::min(n_threads, n); ++t) pool.emplace_back(work, t, std::min(n_threads, n));
}

inline std::size_t tournament(const std::vector<FitnessEvaluation>& pop, int size, Rng& rng) {
  std::size_t best = rng.index(pop.size());
  for (int i = 1; i < size; ++i) {
    const std::size_t c = rng.index(pop.size());
    if (pop[c].fitness > pop[best].fitness) best = c;
  }
  return best;
}

inline constexpr double kBlendAlpha = 0.5;

}  // namespace detail

/// Real-coded GA: uniform initialization, tournament selection, BLX-0.5
/// blend crossover, Gaussian mutation clipped to the bounds, elitism. Each
/// (generation, slot) draws from its own derived random stream.
inline CodesignResult run_ga(const CurrentField& field, const TurbineParameters& params,
                             const DesignBounds& bounds, const GaConfig& ga, const PlannerConfig& config,
                             const GeneMask& active = kAllGenes) {
  validate(params);
  validate(bounds);
  validate(ga);
  validate(config);

  const DesignVector base = bounds.clamp(default_design(params));
  const auto pop_size = static_cast<std::size_t>(ga.population_size);

  std::vector<FitnessEvaluation> pop(pop_size);
  for (std::size_t i = 0; i < pop_size; ++i) {
    Rng rng = Rng::derived(ga.rng_seed, 0, i);
    DesignVector d = base;
    for (auto g : kAllDesignParameters) {
      if (active[static_cast<std::size_t>(g)]) gene(d, g) = rng.uniform(gene(bounds.lower, g), gene(bounds.upper, g));
    }
    pop[i].design = bounds.clamp(d);
  }

  CodesignResult result;
  const auto record = [&](const std::vector<FitnessEvaluation>& members) {
    GenerationStats s;
    double sum = 0.0;
    for (const auto& m : members) {
      if (!m.feasible) continue;
      ++s.feasible_count;
      sum += m.fitness;
      if (m.fitness > result.best_fitness) {
        result.best_fitness = m.fitness;
        result.best_design = m.design;
        result.best_power = m.power;
        result.best_mass = m.mass;
      }
    }
    s.best_fitness = result.best_fitness;
    if (s.feasible_count > 0) s.mean_fitness = sum / s.feasible_count;
    result.history.push_back(s);
  };

  detail::evaluate_population(pop, 0, field, params, config, ga.threads);
  result.evaluations += static_cast<long>(pop_size);
  record(pop);

  std::vector<std::size_t> order(pop_size);
  for (int gen = 1; gen <= ga.generations; ++gen) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pop[a].fitness > pop[b].fitness; });

    std::vector<FitnessEvaluation> next;
    next.reserve(pop_size);
    for (std::size_t i = 0; i < static_cast<std::size_t>(ga.elite_count); ++i) {
      if (pop[order[i]].feasible) next.push_back(pop[order[i]]);
    }
    const std::size_t n_elite = next.size();

    for (std::size_t slot = n_elite; slot < pop_size; ++slot) {
      Rng rng = Rng::derived(ga.rng_seed, static_cast<std::uint64_t>(gen), slot);
      const DesignVector& a = pop[detail::tournament(pop, ga.tournament_size, rng)].design;
      const DesignVector& b = pop[detail::tournament(pop, ga.tournament_size, rng)].design;
      const bool cross = rng.uniform() < ga.crossover_rate;

      DesignVector child = a;
      for (auto g : kAllDesignParameters) {
        if (!active[static_cast<std::size_t>(g)]) continue;
        const double lo = gene(bounds.lower, g);
        const double hi = gene(bounds.upper, g);
        double x = gene(a, g);
        if (cross) {
          const double x_min = std::min(gene(a, g), gene(b, g));
          const double width = std::abs(gene(a, g) - gene(b, g));
          x = rng.uniform(x_min - detail::kBlendAlpha * width, x_min + (1.0 + detail::kBlendAlpha) * width);
        }
        x += ga.mutation_stddev * (hi - lo) * rng.normal();
        gene(child, g) = std::clamp(x, lo, hi);
      }
      FitnessEvaluation e;
      e.design = child;
      next.push_back(e);
    }

    detail::evaluate_population(next, n_elite, field, params, config, ga.threads);
    result.evaluations += static_cast<long>(pop_size - n_elite);
    pop = std::move(next);
    record(pop);
  }
  return result;
}

/// GA over one gene with the other two frozen at their base values.
inline CodesignResult optimize_single(DesignParameter parameter, const CurrentField& field,
                                      const TurbineParameters& params, const DesignBounds& bounds,
                                      const GaConfig& ga, const PlannerConfig& config) {
  return run_ga(field, params, bounds, ga, config, single_gene(parameter));
}

/// Fitness at base * (1 - delta), base, base * (1 + delta) for one gene.
struct SensitivityRow {
  DesignParameter parameter = DesignParameter::rotor;
  std::array<double, 3> fitness{};
  std::array<double, 3> power{};
  std::array<double, 3> total_mass{};

  double spread() const {
    const auto [lo, hi] = std::minmax_element(fitness.begin(), fitness.end());
    return *hi - *lo;
  }
};

/// One-at-a-time sweep of every gene by +/- `delta` (fraction of base).
inline std::vector<SensitivityRow> sensitivity_sweep(const CurrentField& field, const TurbineParameters& params,
                                                     const PlannerConfig& config, double delta = 0.10) {
  const DesignVector base = default_design(params);
  std::vector<SensitivityRow> table;
  for (auto g : kAllDesignParameters) {
    SensitivityRow row;
    row.parameter = g;
    const std::array<double, 3> factors = {1.0 - delta, 1.0, 1.0 + delta};
    for (std::size_t c = 0; c < factors.size(); ++c) {
      DesignVector d = base;
      gene(d, g) = gene(base, g) * factors[c];
      const FitnessEvaluation e = evaluate_fitness(d, field, params, config);
      row.fitness[c] = e.fitness;
      row.power[c] = e.power;
      row.total_mass[c] = e.mass.total_mass;
    }
    table.push_back(row);
  }
  return table;
}

inline std::string sensitivity_to_csv(const std::vector<SensitivityRow>& table) {
  std::string out = "parameter,fitness_minus_kW_per_kg,fitness_base_kW_per_kg,fitness_plus_kW_per_kg,spread\n";
  for (const auto& row : table) {
    out += std::string(to_string(row.parameter));
    for (double f : row.fitness) out += ',' + format_double(f);
    out += ',' + format_double(row.spread()) + '\n';
  }
  return out;
}

}  // namespace oct
