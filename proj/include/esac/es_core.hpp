#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "esac/envs.hpp"
#include "esac/nnet.hpp"

namespace esac {

// Gaussian search distribution around theta_es. perturbations[i] is empty for
// members that were injected verbatim (SAC policy, crossed-over winners): they
// are ranked like everyone else but contribute nothing to the ES update.
struct Population {
    ParamVector base;
    std::vector<std::vector<double>> perturbations;
    int n = 0;
};

struct FitnessTable {
    std::vector<double> raw_returns;
    std::vector<double> normalized_scores;
    std::vector<int> order;  // indices sorted by raw return descending, ties by index
};

// i.i.d. N(0,1) entries; stream derived per (master, generation, offspring).
std::vector<std::vector<double>> sample_perturbations(std::uint64_t master_seed,
                                                      std::uint64_t generation, int n, int dim);

// Centered ranks: ascending-sort position mapped to pos/(n-1) - 0.5, ties
// broken by offspring index. Output sums to zero.
std::vector<double> rank_normalize(const std::vector<double>& raw);

FitnessTable make_fitness_table(const std::vector<double>& raw);

// theta_es + (alpha_es / (n * sigma)) * sum_i F_i * eps_i. Empty perturbation
// entries are skipped (zero contribution); n is the full population size.
ParamVector es_update(const ParamVector& theta_es, const std::vector<double>& normalized_scores,
                      const std::vector<std::vector<double>>& perturbations, double alpha_es,
                      double sigma, int n);

// Mean episodic return per member under the deterministic (tanh-mean) policy.
// members[i] are the already-perturbed/injected parameter vectors. Episode
// seeds are derived injectively from (master, generation, member, repeat).
struct MemberEvaluation {
    std::vector<double> mean_returns;
    std::uint64_t env_steps = 0;  // summed over every episode that was run
};

MemberEvaluation evaluate_members(const std::vector<ParamVector>& members, const NetSpec& spec,
                                  const std::string& env_name, int action_dim,
                                  int episodes_per_member, std::uint64_t master_seed,
                                  std::uint64_t generation, int worker_count);

// Mean return of 10 deterministic validation episodes (seeds from the
// validation stream, shared by all runners so reductions stay bitwise).
double validate_params(const ParamVector& params, const NetSpec& spec,
                       const std::string& env_name, int action_dim,
                       std::uint64_t master_seed, int episodes = 10);

// Per-generation record shared by the ES and ESAC runners.
struct GenerationRecord {
    int generation = 0;
    double best = 0.0;
    double mean = 0.0;
    double stddev = 0.0;
    double sigma = 0.0;    // mutation rate after any AMT update this generation
    double p_sac = 0.0;
    bool sac_phase_ran = false;
    long updates_this_gen = 0;
    long updates_total = 0;
    long env_steps_total = 0;
    long episodes_total = 0;
    double winner_mean = 0.0;
    bool has_validation = false;
    double validation = 0.0;  // mean validation return of the current theta_es
    double wall_s = 0.0;
};

struct RunSummary {
    int generations_run = 0;
    double best_validation = 0.0;
    double final_validation = 0.0;
    long total_updates = 0;
    long total_env_steps = 0;
    double wall_s = 0.0;
    ParamVector incumbent;       // best-raw-fitness member seen over the run
    double incumbent_fitness = 0.0;
};

struct EsRunConfig {
    std::string env_name;
    std::vector<int> hidden_dims{64, 64};
    int n = 50;
    double sigma = 5e-3;
    double alpha_es = 5e-3;
    int episodes_per_offspring = 1;
    int generations = 100;
    int validation_every = 5;
    int worker_count = 1;
    std::uint64_t master_seed = 0;
    // Stop once a validation reaches this value (quiet NaN disables).
    double stop_at_validation = std::numeric_limits<double>::quiet_NaN();
};

using GenerationCallback = std::function<void(const GenerationRecord&)>;

// Plain Evolution Strategies: perturb, evaluate, rank, update. The incumbent
// champion (highest mean raw fitness so far, earliest on ties) is what
// validation evaluates.
class EsRunner {
public:
    explicit EsRunner(const EsRunConfig& cfg);
    RunSummary run(const GenerationCallback& on_generation = nullptr);
    const NetSpec& spec() const { return spec_; }
    const ParamVector& theta_es() const { return theta_es_; }

private:
    EsRunConfig cfg_;
    NetSpec spec_;
    ParamVector theta_es_;
    int action_dim_ = 0;
};

}  // namespace esac
