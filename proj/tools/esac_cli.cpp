// Command-line front end: train / bench-scaling / sweep / compare-updates /
// validate-config. Exit codes: 0 success, 2 config error, 3 runtime failure.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "esac/checkpoint.hpp"
#include "esac/config.hpp"
#include "esac/metrics.hpp"

namespace fs = std::filesystem;
using namespace esac;

namespace {

struct SharedOpts {
    std::string config_path;
    std::uint64_t seed = 0;
    int workers = 1;
    int generations = 100;
    std::string out_dir = "esac_out";
};

struct CommonFlags {
    CLI::Option* config = nullptr;
    CLI::Option* seed = nullptr;
    CLI::Option* workers = nullptr;
    CLI::Option* generations = nullptr;
    CLI::Option* out = nullptr;
};

CommonFlags add_common(CLI::App* sub, SharedOpts& sh, bool config_required) {
    CommonFlags f;
    f.config = sub->add_option("--config", sh.config_path, "Config file (key = value lines)");
    if (config_required) f.config->required();
    f.seed = sub->add_option("--seed", sh.seed, "Master seed (overrides config)");
    f.workers = sub->add_option("--workers", sh.workers, "Worker count (overrides config)");
    f.generations =
        sub->add_option("--generations", sh.generations, "Generation budget (overrides config)");
    f.out = sub->add_option("--out", sh.out_dir, "Output directory");
    return f;
}

RunConfig resolve_config(const SharedOpts& sh, const CommonFlags& f) {
    RunConfig rc = sh.config_path.empty() ? RunConfig{} : load_config(sh.config_path);
    if (f.seed->count() > 0) rc.seed = sh.seed;
    if (f.workers->count() > 0) {
        if (sh.workers < 1) throw ConfigError("key 'workers': must be >= 1");
        rc.workers = sh.workers;
    }
    if (f.generations->count() > 0) {
        if (sh.generations < 1) throw ConfigError("key 'generations': must be >= 1");
        rc.generations = sh.generations;
    }
    return rc;
}

CheckpointData checkpoint_from_esac(const RunConfig& rc, const EsacRunner& runner) {
    CheckpointData ck;
    ck.algorithm = "esac";
    ck.env_name = rc.env_name;
    ck.master_seed = rc.seed;
    ck.next_generation = runner.next_generation();
    ck.completed_phases = runner.completed_phases();
    ck.incumbent_fitness = runner.incumbent_fitness();
    ck.mutation = runner.mutation_state();
    ck.blocks = {{"theta_es", runner.theta_es()},
                 {"sac_policy", runner.sac().policy_params()},
                 {"sac_value", runner.sac().value_params()},
                 {"sac_value_target", runner.sac().value_target_params()},
                 {"sac_q1", runner.sac().q1_params()},
                 {"sac_q2", runner.sac().q2_params()},
                 {"incumbent", runner.incumbent()}};
    return ck;
}

int cmd_train(const RunConfig& rc, const std::string& out_dir) {
    fs::create_directories(out_dir);
    fs::create_directories(out_dir + "/checkpoints");
    MetricsWriter metrics(out_dir + "/metrics.jsonl");
    RunSummary summary;

    if (rc.algorithm == "es") {
        EsRunner runner(make_es_config(rc));
        summary = runner.run([&](const GenerationRecord& rec) {
            metrics.write_generation(rec);
        });
        CheckpointData ck;
        ck.algorithm = "es";
        ck.env_name = rc.env_name;
        ck.master_seed = rc.seed;
        ck.next_generation = summary.generations_run + 1;
        ck.incumbent_fitness = summary.incumbent_fitness;
        ck.mutation = MutationState(rc.sigma, 0.0, rc.alpha_es, rc.n);
        ck.blocks = {{"theta_es", runner.theta_es()}, {"incumbent", summary.incumbent}};
        save_checkpoint(out_dir + "/checkpoints/final.ckpt", ck);
    } else if (rc.algorithm == "esac") {
        EsacRunner runner(make_esac_config(rc));
        runner.sac().on_update = [&](long counter, const SacLosses& losses) {
            metrics.write_sac_update(counter, losses);
        };
        summary = runner.run([&](const GenerationRecord& rec) {
            metrics.write_generation(rec);
            if (rec.has_validation) {
                char name[32];
                std::snprintf(name, sizeof(name), "gen_%05d.ckpt", rec.generation);
                save_checkpoint(out_dir + "/checkpoints/" + name,
                                checkpoint_from_esac(rc, runner));
            }
        });
        save_checkpoint(out_dir + "/checkpoints/final.ckpt", checkpoint_from_esac(rc, runner));
    } else {  // sac
        if (rc.step_budget == 0) {
            // Zero-step budget: empty metrics, clean exit.
            write_summary_csv(out_dir + "/summary.csv", rc.algorithm, rc.env_name, rc.seed,
                              RunSummary{});
            std::cout << "zero step budget: nothing to train\n";
            return 0;
        }
        SacRunner runner(make_sac_config(rc));
        runner.learner().on_update = [&](long counter, const SacLosses& losses) {
            metrics.write_sac_update(counter, losses);
        };
        summary = runner.run([&](const SacEpisodeRecord& rec) {
            metrics.write_sac_episode(rec);
        });
        CheckpointData ck;
        ck.algorithm = "sac";
        ck.env_name = rc.env_name;
        ck.master_seed = rc.seed;
        ck.next_generation = summary.generations_run + 1;
        ck.incumbent_fitness = summary.incumbent_fitness;
        ck.mutation = MutationState(rc.sigma, 0.0, rc.alpha_es, rc.n);
        const auto& lr = runner.learner();
        ck.blocks = {{"sac_policy", lr.policy_params()},
                     {"sac_value", lr.value_params()},
                     {"sac_value_target", lr.value_target_params()},
                     {"sac_q1", lr.q1_params()},
                     {"sac_q2", lr.q2_params()},
                     {"incumbent", summary.incumbent}};
        save_checkpoint(out_dir + "/checkpoints/final.ckpt", ck);
    }

    write_summary_csv(out_dir + "/summary.csv", rc.algorithm, rc.env_name, rc.seed, summary);
    std::cout << "done: algorithm=" << rc.algorithm << " env=" << rc.env_name
              << " seed=" << rc.seed << "\n"
              << "  best validation return:  " << summary.best_validation << "\n"
              << "  final validation return: " << summary.final_validation << "\n"
              << "  total gradient updates:  " << summary.total_updates << "\n"
              << "  total env steps:         " << summary.total_env_steps << "\n"
              << "  wall clock (s):          " << summary.wall_s << "\n";
    return 0;
}

int cmd_bench_scaling(const RunConfig& rc, const std::string& out_dir) {
    fs::create_directories(out_dir);
    auto samples = measure_scaling(rc.bench_workers, rc.bench_populations,
                                   rc.bench_timed_generations, rc.seed);
    write_timing_csv(out_dir + "/timing.csv", samples);
    std::cout << "timing table written to " << out_dir << "/timing.csv\n";
    for (int pop : rc.bench_populations) {
        const TimingSample* base = nullptr;
        for (const auto& s : samples)
            if (s.population == pop && (base == nullptr || s.worker_count < base->worker_count))
                base = &s;
        if (base == nullptr) continue;
        for (const auto& s : samples) {
            if (s.population != pop) continue;
            std::cout << "  population " << pop << ", workers " << s.worker_count << ": "
                      << s.mean_s << " s/gen (speedup vs " << base->worker_count
                      << " worker: " << (base->mean_s / s.mean_s) << "x)\n";
        }
    }
    return 0;
}

int cmd_sweep(const RunConfig& rc, const std::string& out_dir) {
    if (rc.sweep_values.size() < 2)
        throw ConfigError("key 'sweep.values': a sweep needs at least 2 values");
    if (rc.sweep_seeds.size() < 3)
        throw ConfigError("key 'sweep.seeds': a sweep needs at least 3 seeds");
    if (rc.algorithm == "sac")
        throw ConfigError("key 'algorithm': sweeps support es and esac only");
    if (rc.sweep_parameter == "zeta" && rc.algorithm != "esac")
        throw ConfigError("key 'sweep.parameter': the zeta sweep needs algorithm = esac");

    fs::create_directories(out_dir);
    struct Row {
        double value;
        std::uint64_t seed;
        double final_return;
    };
    std::vector<Row> rows;
    for (double value : rc.sweep_values) {
        for (std::uint64_t seed : rc.sweep_seeds) {
            RunConfig sub = rc;
            sub.seed = seed;
            if (rc.sweep_parameter == "zeta")
                sub.zeta = value;
            else
                sub.sigma = value;
            RunSummary summary;
            if (rc.algorithm == "es") {
                EsRunner runner(make_es_config(sub));
                summary = runner.run();
            } else {
                EsacRunner runner(make_esac_config(sub));
                summary = runner.run();
            }
            rows.push_back({value, seed, summary.final_validation});
            std::cout << "  " << rc.sweep_parameter << "=" << value << " seed=" << seed
                      << " final validation=" << summary.final_validation << "\n";
        }
    }

    // Normalize by the sweep best. Environments with all-negative returns
    // (pendulum) would invert the ordering under plain division, so fall back
    // to min-max scaling unless the best is positive.
    double best = rows.front().final_return, worst = rows.front().final_return;
    for (const auto& r : rows) {
        best = std::max(best, r.final_return);
        worst = std::min(worst, r.final_return);
    }
    auto normalize = [&](double x) {
        if (best > 0.0) return x / best;
        if (best == worst) return 1.0;
        return (x - worst) / (best - worst);
    };

    std::ofstream csv(out_dir + "/sweep.csv", std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot open sweep.csv for writing");
    csv << "parameter,value,seed,final_return,normalized_return\n";
    csv.precision(17);
    for (const auto& r : rows)
        csv << rc.sweep_parameter << ',' << r.value << ',' << r.seed << ',' << r.final_return
            << ',' << normalize(r.final_return) << "\n";
    std::cout << "sweep table written to " << out_dir << "/sweep.csv\n";
    return 0;
}

int cmd_compare_updates(const RunConfig& rc, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const long budget = rc.step_budget;

    // ESAC side: generations until the env-step budget is spent.
    std::vector<std::pair<long, long>> esac_traj;  // (env_steps_total, updates_total)
    long esac_updates = 0;
    {
        RunConfig sub = rc;
        sub.generations = std::numeric_limits<int>::max() - 1;
        EsacRunner runner(make_esac_config(sub));
        long steps = 0;
        while (steps < budget) {
            GenerationRecord rec = runner.run_generation();
            steps = rec.env_steps_total;
            esac_traj.emplace_back(rec.env_steps_total, rec.updates_total);
            esac_updates = rec.updates_total;
        }
    }

    // SAC side: identical step budget.
    std::vector<std::pair<long, long>> sac_traj;
    long sac_updates = 0;
    {
        RunConfig sub = rc;
        SacRunConfig sc = make_sac_config(sub);
        sc.step_budget = budget;
        SacRunner runner(sc);
        RunSummary summary = runner.run([&](const SacEpisodeRecord& rec) {
            sac_traj.emplace_back(rec.env_steps_total, rec.updates_total);
        });
        sac_updates = summary.total_updates;
    }

    // Merge the two cumulative-update step functions over the union of their
    // environment-step points.
    std::vector<long> points;
    for (const auto& [s, u] : esac_traj) points.push_back(s);
    for (const auto& [s, u] : sac_traj) points.push_back(s);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    auto updates_at = [](const std::vector<std::pair<long, long>>& traj, long step) {
        long u = 0;
        for (const auto& [s, v] : traj) {
            if (s > step) break;
            u = v;
        }
        return u;
    };

    std::ofstream csv(out_dir + "/compare_updates.csv", std::ios::trunc);
    if (!csv) throw std::runtime_error("cannot open compare_updates.csv for writing");
    csv << "env_steps,esac_updates,sac_updates\n";
    for (long p : points)
        csv << p << ',' << updates_at(esac_traj, p) << ',' << updates_at(sac_traj, p) << "\n";

    std::cout << "matched env-step budget: " << budget << "\n"
              << "  esac gradient updates: " << esac_updates << "\n"
              << "  sac gradient updates:  " << sac_updates << "\n";
    if (sac_updates > 0 && esac_updates >= sac_updates)
        throw std::runtime_error("update accounting violated: esac ran at least as many "
                                 "gradient updates as sac at the matched budget");
    std::cout << "compare table written to " << out_dir << "/compare_updates.csv\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evolution strategies with gated soft actor-critic phases"};
    app.require_subcommand(1);

    SharedOpts sh_train, sh_bench, sh_sweep, sh_compare, sh_validate;
    auto* train = app.add_subcommand("train", "Run one training job");
    auto f_train = add_common(train, sh_train, false);
    auto* bench = app.add_subcommand("bench-scaling", "Worker/population timing sweep");
    auto f_bench = add_common(bench, sh_bench, false);
    auto* sweep = app.add_subcommand("sweep", "Mutation-hyperparameter sensitivity sweep");
    auto f_sweep = add_common(sweep, sh_sweep, false);
    auto* compare = app.add_subcommand("compare-updates",
                                       "ESAC vs SAC gradient updates at a matched budget");
    auto f_compare = add_common(compare, sh_compare, false);
    auto* validate = app.add_subcommand("validate-config", "Parse and validate a config file");
    auto f_validate = add_common(validate, sh_validate, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (train->parsed()) return cmd_train(resolve_config(sh_train, f_train), sh_train.out_dir);
        if (bench->parsed())
            return cmd_bench_scaling(resolve_config(sh_bench, f_bench), sh_bench.out_dir);
        if (sweep->parsed()) return cmd_sweep(resolve_config(sh_sweep, f_sweep), sh_sweep.out_dir);
        if (compare->parsed())
            return cmd_compare_updates(resolve_config(sh_compare, f_compare), sh_compare.out_dir);
        if (validate->parsed()) {
            RunConfig rc = resolve_config(sh_validate, f_validate);
            std::cout << "config OK: algorithm=" << rc.algorithm << " env=" << rc.env_name
                      << "\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
