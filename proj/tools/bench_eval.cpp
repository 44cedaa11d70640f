// Micro-benchmark for the population-evaluation kernel: the plain serial loop
// vs the OpenMP map at several worker counts, on identical task lists. Also
// cross-checks that both paths return identical results.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include <CLI11.hpp>

#include "esac/parallel_exec.hpp"

using namespace esac;

namespace {

std::vector<EvalTask> build_tasks(int population, std::uint64_t seed, int round,
                                  const std::shared_ptr<const ParamVector>& expert,
                                  const NetSpec& spec) {
    std::vector<EvalTask> tasks;
    tasks.reserve(population);
    for (int i = 0; i < population; ++i) {
        EvalTask t;
        t.offspring_index = i;
        t.params = expert;
        t.spec = spec;
        t.env_name = "cyclic-mdp";
        t.action_dim = 3;
        t.episode_seed = derive_seed(seed, stream::scaling, static_cast<std::uint64_t>(round), i);
        tasks.push_back(std::move(t));
    }
    return tasks;
}

template <typename F>
double time_rounds(int rounds, F&& body) {
    double total = 0.0;
    for (int r = 0; r < rounds; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        body(r);
        total += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return total / rounds;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Population-evaluation kernel benchmark: serial reference vs OpenMP"};
    int population = 50;
    int rounds = 10;
    std::uint64_t seed = 0;
    std::vector<int> workers{1, 2, 4};
    app.add_option("--population", population, "Tasks per round")->check(CLI::PositiveNumber);
    app.add_option("--rounds", rounds, "Timed rounds per configuration")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Episode-seed stream master");
    app.add_option("--workers", workers, "Worker counts for the OpenMP path");
    CLI11_PARSE(app, argc, argv);

    CyclicMdp probe;
    NetSpec spec = policy_spec_for(probe, {64, 64});
    auto expert = std::make_shared<const ParamVector>(cyclic_expert_params(spec));

    // Correctness cross-check before timing anything.
    {
        auto tasks = build_tasks(population, seed, 0, expert, spec);
        auto serial = serial_map_episodes(tasks);
        for (int wc : workers) {
            auto par = parallel_map_episodes(tasks, wc);
            for (std::size_t i = 0; i < serial.size(); ++i) {
                if (par[i].episodic_return != serial[i].episodic_return ||
                    par[i].length != serial[i].length) {
                    std::fprintf(stderr,
                                 "MISMATCH at task %zu with %d workers: %.17g/%d vs %.17g/%d\n",
                                 i, wc, par[i].episodic_return, par[i].length,
                                 serial[i].episodic_return, serial[i].length);
                    return 1;
                }
            }
        }
        std::printf("results identical across serial and all OpenMP worker counts\n");
    }

    // Warm-up round, then timings.
    {
        auto tasks = build_tasks(population, seed, 1, expert, spec);
        serial_map_episodes(tasks);
    }
    const double serial_s = time_rounds(rounds, [&](int r) {
        auto tasks = build_tasks(population, seed, 100 + r, expert, spec);
        serial_map_episodes(tasks);
    });
    std::printf("%-22s population=%d  %.4f s/round\n", "serial reference", population, serial_s);
    for (int wc : workers) {
        const double par_s = time_rounds(rounds, [&](int r) {
            auto tasks = build_tasks(population, seed, 100 + r, expert, spec);
            parallel_map_episodes(tasks, wc);
        });
        std::printf("openmp %2d worker(s)    population=%d  %.4f s/round  speedup %.2fx\n", wc,
                    population, par_s, serial_s / par_s);
    }
    return 0;
}
