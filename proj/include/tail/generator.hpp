#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "tail/model.hpp"
#include "tail/scenario.hpp"

namespace tail {

/// Synthetic hub-and-spoke schedules. Each aircraft flies a rotation that
/// alternates hub and spoke airports, so a feasible assignment exists by
/// construction; other aircraft's rotations create swap opportunities.
struct InstanceConfig {
  int aircraft = 6;
  int legs = 100;
  int airports = 6;  ///< including the hub
  int horizon_days = 2;
  int maintenances = 2;
  int mandatory_connections = 0;
  double block_time_min = 60, block_time_max = 180;
  double min_turn_min = 25, min_turn_max = 45;
  /// Scheduled turn = minimum turn + uniform draw in this range.
  double sched_extra_min = -5, sched_extra_max = 40;
  /// Ground time beyond the minimum turn in the witness rotation.
  double ground_extra_min = 0, ground_extra_max = 60;
  double maintenance_min = 240, maintenance_max = 480;
  /// Leg cost = block time x per-aircraft rate.
  double cost_rate_min = 9.5, cost_rate_max = 10.5;
  double connection_cost_min = 0, connection_cost_max = 20;
  /// Ground-time cost per minute on connections between activities, charged
  /// up to `idle_cost_cap` minutes.
  double idle_cost_rate = 1;
  double idle_cost_cap = 120;
  std::vector<double> delay_kinks{0, 15, 60};
  std::vector<double> delay_slopes{10, 30, 60};
};

/// Deterministic in `seed`. Throws InputError on an unusable config.
Instance generate_instance(const InstanceConfig& config, std::uint64_t seed);

/// The rotation flown by each aircraft in the generated schedule; a feasible
/// solution of `generate_instance(config, seed)`.
Solution generate_witness(const InstanceConfig& config, std::uint64_t seed);

/// Departure delay: 0 with probability `dep_zero_prob`, otherwise exponential,
/// with overall mean `dep_mean`. Arrival delay: max(Exp(arr_mean) - arr_shift,
/// arr_floor).
struct DelayDistribution {
  double dep_zero_prob = 0.6;
  double dep_mean = 12;
  double arr_mean = 8;
  double arr_shift = 5;
  double arr_floor = -10;
  /// Delays are rounded to this many minutes (0 keeps full precision).
  double resolution = 0.1;
};

/// Deterministic in `seed`. Throws InputError on invalid parameters.
ScenarioSet generate_scenarios(const Instance& instance, int count, std::uint64_t seed,
                               const DelayDistribution& dist = {});

/// Uniform draw in [0, 1) from the top 53 bits of the engine.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace tail
