#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "esac/envs.hpp"
#include "esac/nnet.hpp"

namespace esac {

// One fitness episode: evaluate a parameter vector for one seeded episode.
// (generation, offspring, repeat) -> episode_seed is an injective mapping
// maintained by the callers via derive_seed.
struct EvalTask {
    int offspring_index = 0;
    std::shared_ptr<const ParamVector> params;
    NetSpec spec;
    std::string env_name;
    int action_dim = 0;
    std::uint64_t episode_seed = 0;
};

// Returns one episodic return per task, in task order, bitwise identical for
// any worker_count. A failing task aborts the batch with a diagnostic naming
// the offspring index.
std::vector<double> parallel_map_fitness(const std::vector<EvalTask>& tasks, int worker_count);

// Same contract, but keeps episode lengths (runners account env steps).
std::vector<EpisodeResult> parallel_map_episodes(const std::vector<EvalTask>& tasks,
                                                 int worker_count);

// Plain-loop reference implementations kept alongside the OpenMP path for
// testing and benchmarking.
std::vector<double> serial_map_fitness(const std::vector<EvalTask>& tasks);
std::vector<EpisodeResult> serial_map_episodes(const std::vector<EvalTask>& tasks);

struct TimingSample {
    int worker_count = 0;
    int population = 0;
    double mean_s = 0.0;
    double std_s = 0.0;
    int samples = 0;
};

// Times full-horizon cyclic-mdp generations (clockwise expert policy, so every
// episode runs 2000 steps) for each (worker_count, population) pair. Two
// warm-up generations are discarded; at least 20 are timed.
std::vector<TimingSample> measure_scaling(const std::vector<int>& worker_counts,
                                          const std::vector<int>& population_sizes,
                                          int timed_generations, std::uint64_t master_seed);

}  // namespace esac
