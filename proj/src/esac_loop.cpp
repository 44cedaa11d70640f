#include "esac/esac_loop.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace esac {

WinnerSet select_winners(const FitnessTable& table, const std::vector<ParamVector>& members,
                         double e) {
    const int n = static_cast<int>(members.size());
    if (table.raw_returns.size() != members.size() || table.order.size() != members.size())
        throw std::invalid_argument("select_winners: table/population size mismatch");
    if (e <= 0.0 || e > 1.0)
        throw std::invalid_argument("select_winners: winner fraction must be in (0,1]");
    const int w = static_cast<int>(std::floor(n * e));
    if (w < 1) throw std::invalid_argument("select_winners: e * n < 1 leaves no winners");
    WinnerSet ws;
    ws.params.reserve(w);
    ws.raw_returns.reserve(w);
    ws.indices.reserve(w);
    for (int k = 0; k < w; ++k) {
        const int idx = table.order[k];
        ws.params.push_back(members[idx]);
        ws.raw_returns.push_back(table.raw_returns[idx]);
        ws.indices.push_back(idx);
    }
    return ws;
}

bool should_run_sac(int generation, int g, double p_sac, Rng& rng) {
    if (g < 1) throw std::invalid_argument("should_run_sac: g must be >= 1");
    if (generation % g != 0) return false;
    return rng.uniform() < p_sac;
}

double anneal_p_sac(double p_sac_initial, double decay, int completed_phases) {
    if (decay <= 0.0 || decay >= 1.0)
        throw std::invalid_argument("anneal_p_sac: decay must be in (0,1)");
    return p_sac_initial * std::pow(decay, static_cast<double>(completed_phases));
}

ParamVector hindsight_crossover(const ParamVector& winner, const ParamVector& theta_es,
                                double swap_prob, Rng& rng) {
    if (winner.values.size() != theta_es.values.size())
        throw std::invalid_argument("hindsight_crossover: length mismatch");
    if (swap_prob < 0.0 || swap_prob > 1.0)
        throw std::invalid_argument("hindsight_crossover: swap_prob must be in [0,1]");
    ParamVector out = theta_es;
    for (std::size_t j = 0; j < out.values.size(); ++j)
        if (rng.uniform() < swap_prob) out.values[j] = winner.values[j];
    return out;
}

EsacRunner::EsacRunner(const EsacRunConfig& cfg)
    : cfg_(cfg),
      mutation_state_(cfg.sigma, cfg.zeta, cfg.alpha_es, cfg.n),
      sac_([&] {
          SacConfig sc = cfg.sac;
          sc.hidden_dims = cfg.hidden_dims;  // architecture parity: one NetSpec for all
          return sc;
      }(), cfg.env_name, cfg.master_seed),
      incumbent_fitness_(-std::numeric_limits<double>::infinity()),
      best_validation_(-std::numeric_limits<double>::infinity()) {
    if (cfg.n < 2) throw std::invalid_argument("EsacRunner: population size must be >= 2");
    if (cfg.e <= 0.0 || cfg.e > 1.0)
        throw std::invalid_argument("EsacRunner: winner fraction must be in (0,1]");
    if (cfg.g < 1) throw std::invalid_argument("EsacRunner: gradient interval must be >= 1");
    if (cfg.p_sac_initial < 0.0 || cfg.p_sac_initial > 1.0)
        throw std::invalid_argument("EsacRunner: p_sac_initial must be in [0,1]");
    if (cfg.p_sac_decay <= 0.0 || cfg.p_sac_decay >= 1.0)
        throw std::invalid_argument("EsacRunner: p_sac_decay must be in (0,1)");
    if (cfg.sac_episodes_per_phase < 1)
        throw std::invalid_argument("EsacRunner: sac_episodes_per_phase must be >= 1");
    if (cfg.crossover_swap_prob < 0.0 || cfg.crossover_swap_prob > 1.0)
        throw std::invalid_argument("EsacRunner: crossover_swap_prob must be in [0,1]");
    if (cfg.sigma <= 0.0) throw std::invalid_argument("EsacRunner: sigma must be positive");
    if (cfg.zeta < 0.0) throw std::invalid_argument("EsacRunner: zeta must be >= 0");

    winner_count_ = static_cast<int>(std::floor(cfg.n * cfg.e));
    if (winner_count_ < 1)
        throw std::invalid_argument("EsacRunner: e * n < 1 leaves no winners");
    const bool injections = cfg.p_sac_initial > 0.0 || cfg.crossover_swap_prob > 0.0;
    if (injections && winner_count_ + 1 > cfg.n)
        throw std::invalid_argument(
            "EsacRunner: w + 1 exceeds the population size; reduce the winner fraction");

    auto env = make_env(cfg.env_name);
    spec_ = policy_spec_for(*env, cfg.hidden_dims);
    action_dim_ = env->action_dim();
    Rng init_rng(derive_seed(cfg.master_seed, stream::init_es));
    theta_es_ = init_params(spec_, init_rng);
}

void EsacRunner::restore(const ParamVector& theta_es, const MutationState& ms,
                         int next_generation, int completed_phases,
                         const ParamVector& incumbent, double incumbent_fitness) {
    theta_es_ = theta_es;
    mutation_state_ = ms;
    gen_ = next_generation;
    completed_phases_ = completed_phases;
    incumbent_ = incumbent;
    incumbent_fitness_ = incumbent_fitness;
    injected_.clear();  // resumed runs restart from a fresh perturbation round
}

GenerationRecord EsacRunner::run_generation() {
    const int gen = gen_;
    const int dim = spec_.param_count();
    const auto gen_start = std::chrono::steady_clock::now();

    // 1. Materialize this generation's members: injected slots enter verbatim
    // (empty perturbation), the rest are fresh draws around theta_es.
    auto eps = sample_perturbations(cfg_.master_seed, gen, cfg_.n, dim);
    std::vector<ParamVector> members(cfg_.n);
    std::vector<bool> is_injected(cfg_.n, false);
    for (const auto& [slot, vec] : injected_) {
        members[slot] = vec;
        is_injected[slot] = true;
        eps[slot].clear();
    }
    for (int i = 0; i < cfg_.n; ++i) {
        if (is_injected[i]) continue;
        members[i] = theta_es_;
        for (int j = 0; j < dim; ++j)
            members[i].values[j] += mutation_state_.sigma_current * eps[i][j];
    }

    // 2-3. Evaluate and rank.
    MemberEvaluation eval =
        evaluate_members(members, spec_, cfg_.env_name, action_dim_,
                         cfg_.episodes_per_offspring, cfg_.master_seed, gen, cfg_.worker_count);
    const std::vector<double>& raw = eval.mean_returns;
    FitnessTable table = make_fitness_table(raw);
    env_steps_total_ += static_cast<long>(eval.env_steps);
    episodes_total_ += static_cast<long>(cfg_.n) * cfg_.episodes_per_offspring;

    for (int i = 0; i < cfg_.n; ++i) {
        if (raw[i] > incumbent_fitness_) {
            incumbent_fitness_ = raw[i];
            incumbent_ = members[i];
        }
    }

    // 4. Winners: perturbed/injected vectors as evaluated, top w.
    WinnerSet winners = select_winners(table, members, cfg_.e);

    // 5. ES update (injected slots carry empty eps and contribute nothing).
    theta_es_ = es_update(theta_es_, table.normalized_scores, eps, cfg_.alpha_es,
                          mutation_state_.sigma_current, cfg_.n);

    // 6. Gated SAC phase: collect episodes, one gradient step per collected
    // env step, then the mutation-rate update.
    const double p_sac = anneal_p_sac(cfg_.p_sac_initial, cfg_.p_sac_decay, completed_phases_);
    bool phase_ran = false;
    long updates_this_gen = 0;
    if (cfg_.p_sac_initial > 0.0) {
        Rng gate(derive_seed(cfg_.master_seed, stream::sac_gate, gen));
        if (should_run_sac(gen, cfg_.g, p_sac, gate)) {
            phase_ran = true;
            long phase_steps = 0;
            for (int ep = 0; ep < cfg_.sac_episodes_per_phase; ++ep) {
                EpisodeResult res = sac_.collect_episode(
                    derive_seed(cfg_.master_seed, stream::sac_episode, gen, 2 * ep),
                    derive_seed(cfg_.master_seed, stream::sac_episode, gen, 2 * ep + 1));
                phase_steps += res.length;
                ++episodes_total_;
            }
            env_steps_total_ += phase_steps;
            for (long u = 0; u < phase_steps; ++u)
                if (sac_.update()) ++updates_this_gen;
            amt_update(mutation_state_, raw[table.order.front()],
                       std::accumulate(raw.begin(), raw.end(), 0.0) / cfg_.n);
            ++completed_phases_;
        }
    }

    // 7. Crossovers against the freshly updated theta_es; next generation's
    // verbatim members are the SAC policy (slot 0) and the crossed winners.
    injected_.clear();
    int slot = 0;
    if (cfg_.p_sac_initial > 0.0) injected_.emplace_back(slot++, sac_.policy_params());
    if (cfg_.crossover_swap_prob > 0.0) {
        for (int k = 0; k < winner_count_; ++k) {
            Rng cx(derive_seed(cfg_.master_seed, stream::crossover, gen, k));
            injected_.emplace_back(
                slot++, hindsight_crossover(winners.params[k], theta_es_,
                                            cfg_.crossover_swap_prob, cx));
        }
    }

    GenerationRecord rec;
    rec.generation = gen;
    rec.best = table.raw_returns[table.order.front()];
    double mean = std::accumulate(raw.begin(), raw.end(), 0.0) / cfg_.n;
    double var = 0.0;
    for (double r : raw) var += (r - mean) * (r - mean);
    rec.mean = mean;
    rec.stddev = std::sqrt(var / cfg_.n);
    rec.sigma = mutation_state_.sigma_current;
    rec.p_sac = p_sac;
    rec.sac_phase_ran = phase_ran;
    rec.updates_this_gen = updates_this_gen;
    rec.updates_total = sac_.update_count();
    rec.env_steps_total = env_steps_total_;
    rec.episodes_total = episodes_total_;
    rec.winner_mean =
        std::accumulate(winners.raw_returns.begin(), winners.raw_returns.end(), 0.0) /
        winners.raw_returns.size();
    if (gen % cfg_.validation_every == 0 || gen == cfg_.generations) {
        rec.has_validation = true;
        rec.validation = validate_params(theta_es_, spec_, cfg_.env_name, action_dim_,
                                         cfg_.master_seed);
        final_validation_ = rec.validation;
        best_validation_ = std::max(best_validation_, rec.validation);
    }
    rec.wall_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - gen_start).count();
    ++gen_;
    return rec;
}

RunSummary EsacRunner::run(const GenerationCallback& on_generation) {
    RunSummary summary;
    const auto run_start = std::chrono::steady_clock::now();
    while (gen_ <= cfg_.generations) {
        GenerationRecord rec = run_generation();
        summary.generations_run = rec.generation;
        if (on_generation) on_generation(rec);
        if (rec.has_validation && !std::isnan(cfg_.stop_at_validation) &&
            rec.validation >= cfg_.stop_at_validation)
            break;
    }
    summary.best_validation = best_validation_;
    summary.final_validation = final_validation_;
    summary.total_updates = sac_.update_count();
    summary.total_env_steps = env_steps_total_;
    summary.incumbent = incumbent_;
    summary.incumbent_fitness = incumbent_fitness_;
    summary.wall_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start).count();
    return summary;
}

}  // namespace esac
