#include "esac/parallel_exec.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "esac/rng.hpp"

namespace esac {

namespace {
EpisodeResult run_task(const EvalTask& t) {
    auto env = make_env(t.env_name);
    Policy pol = [&](const std::vector<double>& obs) {
        return policy_action(*t.params, t.spec, obs, t.action_dim);
    };
    return run_episode(*env, pol, t.episode_seed);
}
}  // namespace

std::vector<EpisodeResult> serial_map_episodes(const std::vector<EvalTask>& tasks) {
    std::vector<EpisodeResult> out(tasks.size());
    for (size_t i = 0; i < tasks.size(); ++i) out[i] = run_task(tasks[i]);
    return out;
}

std::vector<EpisodeResult> parallel_map_episodes(const std::vector<EvalTask>& tasks,
                                                 int worker_count) {
    if (worker_count < 1)
        throw std::invalid_argument("parallel_map_fitness: worker_count must be >= 1");
    if (worker_count == 1) return serial_map_episodes(tasks);

    std::vector<EpisodeResult> out(tasks.size());
    int first_error = -1;
    std::string error_msg;
    const int n = static_cast<int>(tasks.size());
#pragma omp parallel for schedule(static) num_threads(worker_count)
    for (int i = 0; i < n; ++i) {
        try {
            out[i] = run_task(tasks[i]);
        } catch (const std::exception& e) {
#pragma omp critical
            {
                if (first_error < 0 ||
                    tasks[i].offspring_index < tasks[first_error].offspring_index) {
                    first_error = i;
                    error_msg = e.what();
                }
            }
        }
    }
    if (first_error >= 0)
        throw std::runtime_error("fitness evaluation failed at offspring " +
                                 std::to_string(tasks[first_error].offspring_index) + ": " +
                                 error_msg);
    return out;
}

std::vector<double> serial_map_fitness(const std::vector<EvalTask>& tasks) {
    std::vector<double> out(tasks.size());
    auto full = serial_map_episodes(tasks);
    for (size_t i = 0; i < tasks.size(); ++i) out[i] = full[i].episodic_return;
    return out;
}

std::vector<double> parallel_map_fitness(const std::vector<EvalTask>& tasks, int worker_count) {
    auto full = parallel_map_episodes(tasks, worker_count);
    std::vector<double> out(tasks.size());
    for (size_t i = 0; i < tasks.size(); ++i) out[i] = full[i].episodic_return;
    return out;
}

std::vector<TimingSample> measure_scaling(const std::vector<int>& worker_counts,
                                          const std::vector<int>& population_sizes,
                                          int timed_generations, std::uint64_t master_seed) {
    if (worker_counts.empty() || population_sizes.empty())
        throw std::invalid_argument("measure_scaling: empty sweep lists");
    if (timed_generations < 20) timed_generations = 20;

    CyclicMdp probe;
    NetSpec spec = policy_spec_for(probe, {64, 64});
    auto expert = std::make_shared<ParamVector>(cyclic_expert_params(spec));

    std::vector<TimingSample> samples;
    for (int wc : worker_counts) {
        for (int pop : population_sizes) {
            std::vector<double> times;
            const int warmup = 2;
            for (int gen = 0; gen < warmup + timed_generations; ++gen) {
                std::vector<EvalTask> tasks;
                tasks.reserve(pop);
                for (int i = 0; i < pop; ++i) {
                    EvalTask t;
                    t.offspring_index = i;
                    t.params = expert;
                    t.spec = spec;
                    t.env_name = "cyclic-mdp";
                    t.action_dim = 3;
                    t.episode_seed = derive_seed(master_seed, stream::scaling,
                                                 static_cast<std::uint64_t>(gen), i);
                    tasks.push_back(std::move(t));
                }
                auto t0 = std::chrono::steady_clock::now();
                parallel_map_fitness(tasks, wc);
                auto t1 = std::chrono::steady_clock::now();
                if (gen >= warmup)
                    times.push_back(std::chrono::duration<double>(t1 - t0).count());
            }
            double mean = 0.0;
            for (double t : times) mean += t;
            mean /= times.size();
            double var = 0.0;
            for (double t : times) var += (t - mean) * (t - mean);
            var /= times.size();
            samples.push_back({wc, pop, mean, std::sqrt(var),
                               static_cast<int>(times.size())});
        }
    }
    return samples;
}

}  // namespace esac
