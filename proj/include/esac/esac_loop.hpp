#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "esac/amt.hpp"
#include "esac/es_core.hpp"
#include "esac/sac_core.hpp"

namespace esac {

// Top-w offsprings by raw return (ties broken by offspring index). The stored
// params are the PERTURBED vectors, never the unperturbed base: winners
// re-enter the mutated pool next generation instead of being shielded.
struct WinnerSet {
    std::vector<ParamVector> params;
    std::vector<double> raw_returns;  // sorted descending
    std::vector<int> indices;         // originating offspring indices
};

// w = floor(n * e); e * n < 1 is a config error.
WinnerSet select_winners(const FitnessTable& table, const std::vector<ParamVector>& members,
                         double e);

// True iff generation % g == 0 and a Uniform(0,1) draw lands below p_sac. The
// draw only happens on gated generations.
bool should_run_sac(int generation, int g, double p_sac, Rng& rng);

// p_sac_initial * decay^completed_phases.
double anneal_p_sac(double p_sac_initial, double decay, int completed_phases);

// Elementwise uniform crossover: out[j] = winner[j] with probability
// swap_prob, else theta_es[j]. Inputs untouched.
ParamVector hindsight_crossover(const ParamVector& winner, const ParamVector& theta_es,
                                double swap_prob, Rng& rng);

struct EsacRunConfig {
    std::string env_name;
    std::vector<int> hidden_dims{64, 64};
    int n = 50;
    double sigma = 5e-3;
    double alpha_es = 5e-3;
    double e = 0.4;
    int g = 10;
    double p_sac_initial = 1.0;
    double p_sac_decay = 0.8;
    int sac_episodes_per_phase = 5;
    double crossover_swap_prob = 0.5;
    double zeta = 5e-3;
    SacConfig sac;
    int episodes_per_offspring = 1;
    int generations = 100;
    int validation_every = 5;
    int worker_count = 1;
    std::uint64_t master_seed = 0;
    double stop_at_validation = std::numeric_limits<double>::quiet_NaN();
};

// The full generation loop: perturb + evaluate, rank, select winners, ES
// update, gated SAC phase (with the mutation-rate update), crossovers, next
// population. Injection gating keeps degenerate configs honest: the SAC member
// only joins populations when p_sac_initial > 0, crossed winners only when
// crossover_swap_prob > 0, so p_sac_initial = 0 with swap 0 reduces bitwise to
// the plain ES runner under a shared seed.
class EsacRunner {
public:
    explicit EsacRunner(const EsacRunConfig& cfg);

    // One pass of the loop; advances the generation counter.
    GenerationRecord run_generation();

    RunSummary run(const GenerationCallback& on_generation = nullptr);

    const NetSpec& spec() const { return spec_; }
    const ParamVector& theta_es() const { return theta_es_; }
    const MutationState& mutation_state() const { return mutation_state_; }
    const SacLearner& sac() const { return sac_; }
    SacLearner& sac() { return sac_; }
    int completed_phases() const { return completed_phases_; }
    int next_generation() const { return gen_; }
    const ParamVector& incumbent() const { return incumbent_; }
    double incumbent_fitness() const { return incumbent_fitness_; }

    // Checkpoint restoration hooks.
    void restore(const ParamVector& theta_es, const MutationState& ms, int next_generation,
                 int completed_phases, const ParamVector& incumbent, double incumbent_fitness);

private:
    EsacRunConfig cfg_;
    NetSpec spec_;
    int action_dim_ = 0;
    int winner_count_ = 0;
    ParamVector theta_es_;
    MutationState mutation_state_;
    SacLearner sac_;
    int gen_ = 1;
    int completed_phases_ = 0;
    std::vector<std::pair<int, ParamVector>> injected_;  // slot -> verbatim member
    ParamVector incumbent_;
    double incumbent_fitness_;
    double best_validation_;
    double final_validation_ = 0.0;
    long env_steps_total_ = 0;
    long episodes_total_ = 0;
    long updates_at_last_record_ = 0;
};

}  // namespace esac
