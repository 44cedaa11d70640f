#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "esac/esac_loop.hpp"

namespace esac {

// Raised for parse errors (with line numbers) and validation errors (naming
// the offending key). The CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flat `key = value` text, full-line # comments, dotted section prefixes
// (es., esac., amt., sac., sweep., bench.). Unknown and duplicate keys are
// rejected. Defaults below are the desk-scale constants.
struct RunConfig {
    std::string env_name = "cyclic-mdp";
    std::string algorithm = "esac";  // es | esac | sac
    std::uint64_t seed = 0;
    int generations = 100;
    int workers = 1;
    std::vector<int> hidden{64, 64};
    int episodes_per_offspring = 1;
    int validation_every = 5;
    double stop_at_validation = std::numeric_limits<double>::quiet_NaN();

    // es.
    int n = 50;
    double sigma = 5e-3;
    double alpha_es = 5e-3;

    // esac.
    double e = 0.4;
    int g = 10;
    double p_sac_initial = 1.0;
    double p_sac_decay = 0.8;
    int sac_episodes_per_phase = 5;
    double swap_prob = 0.5;

    // amt.
    double zeta = 5e-3;

    // sac. (gamma/lambda/tau/lr/batch_size/replay_capacity live in SacConfig)
    SacConfig sac;
    long step_budget = 100000;
    int start_steps = 500;
    int updates_per_step = 1;
    int validation_every_episodes = 5;

    // sweep.
    std::string sweep_parameter = "zeta";
    std::vector<double> sweep_values;
    std::vector<std::uint64_t> sweep_seeds;

    // bench.
    std::vector<int> bench_workers{1, 2, 4};
    std::vector<int> bench_populations{50};
    int bench_timed_generations = 20;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Runner-config builders so shared fields stay consistent across algorithms.
EsRunConfig make_es_config(const RunConfig& rc);
EsacRunConfig make_esac_config(const RunConfig& rc);
SacRunConfig make_sac_config(const RunConfig& rc);

}  // namespace esac
