#include "esac/es_core.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "esac/parallel_exec.hpp"
#include "esac/rng.hpp"

namespace esac {

std::vector<std::vector<double>> sample_perturbations(std::uint64_t master_seed,
                                                      std::uint64_t generation, int n, int dim) {
    if (n < 2 || dim < 1)
        throw std::invalid_argument("sample_perturbations: need n >= 2, dim >= 1");
    std::vector<std::vector<double>> eps(n);
    for (int i = 0; i < n; ++i) {
        Rng rng(derive_seed(master_seed, stream::perturb, generation, i));
        eps[i].resize(dim);
        for (int j = 0; j < dim; ++j) eps[i][j] = rng.normal();
    }
    return eps;
}

std::vector<double> rank_normalize(const std::vector<double>& raw) {
    int n = static_cast<int>(raw.size());
    if (n < 2) throw std::invalid_argument("rank_normalize: need at least 2 scores");
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&raw](int a, int b) {
        if (raw[a] != raw[b]) return raw[a] < raw[b];
        return a < b;
    });
    std::vector<double> out(n);
    for (int pos = 0; pos < n; ++pos)
        out[idx[pos]] = static_cast<double>(pos) / (n - 1) - 0.5;
    return out;
}

FitnessTable make_fitness_table(const std::vector<double>& raw) {
    FitnessTable t;
    t.raw_returns = raw;
    t.normalized_scores = rank_normalize(raw);
    t.order.resize(raw.size());
    std::iota(t.order.begin(), t.order.end(), 0);
    std::sort(t.order.begin(), t.order.end(), [&raw](int a, int b) {
        if (raw[a] != raw[b]) return raw[a] > raw[b];
        return a < b;
    });
    return t;
}

ParamVector es_update(const ParamVector& theta_es, const std::vector<double>& normalized_scores,
                      const std::vector<std::vector<double>>& perturbations, double alpha_es,
                      double sigma, int n) {
    if (sigma == 0.0) throw std::invalid_argument("es_update: sigma must be nonzero");
    if (normalized_scores.size() != perturbations.size())
        throw std::invalid_argument("es_update: scores/perturbations length mismatch");
    ParamVector out = theta_es;
    const double scale = alpha_es / (n * sigma);
    for (size_t i = 0; i < perturbations.size(); ++i) {
        const auto& eps = perturbations[i];
        if (eps.empty()) continue;  // injected member: ranked but no update term
        if (eps.size() != out.values.size())
            throw std::invalid_argument("es_update: perturbation length mismatch");
        const double w = scale * normalized_scores[i];
        for (size_t j = 0; j < eps.size(); ++j) out.values[j] += w * eps[j];
    }
    return out;
}

MemberEvaluation evaluate_members(const std::vector<ParamVector>& members, const NetSpec& spec,
                                  const std::string& env_name, int action_dim,
                                  int episodes_per_member, std::uint64_t master_seed,
                                  std::uint64_t generation, int worker_count) {
    if (episodes_per_member < 1)
        throw std::invalid_argument("evaluate_members: episodes_per_member must be >= 1");
    std::vector<EvalTask> tasks;
    tasks.reserve(members.size() * episodes_per_member);
    for (size_t i = 0; i < members.size(); ++i) {
        auto shared = std::make_shared<ParamVector>(members[i]);
        for (int r = 0; r < episodes_per_member; ++r) {
            EvalTask t;
            t.offspring_index = static_cast<int>(i);
            t.params = shared;
            t.spec = spec;
            t.env_name = env_name;
            t.action_dim = action_dim;
            t.episode_seed = derive_seed(master_seed, stream::eval_episode, generation,
                                         i * static_cast<std::uint64_t>(episodes_per_member) + r);
            tasks.push_back(std::move(t));
        }
    }
    std::vector<EpisodeResult> per_episode = parallel_map_episodes(tasks, worker_count);
    MemberEvaluation out;
    out.mean_returns.assign(members.size(), 0.0);
    for (size_t i = 0; i < members.size(); ++i) {
        double acc = 0.0;
        for (int r = 0; r < episodes_per_member; ++r) {
            const auto& ep = per_episode[i * episodes_per_member + r];
            acc += ep.episodic_return;
            out.env_steps += static_cast<std::uint64_t>(ep.length);
        }
        out.mean_returns[i] = acc / episodes_per_member;
    }
    return out;
}

double validate_params(const ParamVector& params, const NetSpec& spec,
                       const std::string& env_name, int action_dim,
                       std::uint64_t master_seed, int episodes) {
    auto env = make_env(env_name);
    Policy pol = [&](const std::vector<double>& obs) {
        return policy_action(params, spec, obs, action_dim);
    };
    double acc = 0.0;
    for (int i = 0; i < episodes; ++i)
        acc += run_episode(*env, pol, derive_seed(master_seed, stream::validation, i)).episodic_return;
    return acc / episodes;
}

EsRunner::EsRunner(const EsRunConfig& cfg) : cfg_(cfg) {
    auto env = make_env(cfg.env_name);
    spec_ = policy_spec_for(*env, cfg.hidden_dims);
    action_dim_ = env->action_dim();
    Rng init_rng(derive_seed(cfg.master_seed, stream::init_es));
    theta_es_ = init_params(spec_, init_rng);
}

RunSummary EsRunner::run(const GenerationCallback& on_generation) {
    RunSummary summary;
    summary.incumbent_fitness = -std::numeric_limits<double>::infinity();
    summary.best_validation = -std::numeric_limits<double>::infinity();
    long env_steps = 0, episodes = 0;
    auto run_start = std::chrono::steady_clock::now();
    const int dim = spec_.param_count();

    for (int gen = 1; gen <= cfg_.generations; ++gen) {
        auto gen_start = std::chrono::steady_clock::now();
        auto eps = sample_perturbations(cfg_.master_seed, gen, cfg_.n, dim);
        std::vector<ParamVector> members(cfg_.n);
        for (int i = 0; i < cfg_.n; ++i) {
            members[i] = theta_es_;
            for (int j = 0; j < dim; ++j) members[i].values[j] += cfg_.sigma * eps[i][j];
        }
        MemberEvaluation eval =
            evaluate_members(members, spec_, cfg_.env_name, action_dim_,
                             cfg_.episodes_per_offspring, cfg_.master_seed, gen,
                             cfg_.worker_count);
        const std::vector<double>& raw = eval.mean_returns;
        FitnessTable table = make_fitness_table(raw);
        for (int i = 0; i < cfg_.n; ++i) {
            if (raw[i] > summary.incumbent_fitness) {
                summary.incumbent_fitness = raw[i];
                summary.incumbent = members[i];
            }
        }
        theta_es_ = es_update(theta_es_, table.normalized_scores, eps, cfg_.alpha_es,
                              cfg_.sigma, cfg_.n);

        episodes += static_cast<long>(cfg_.n) * cfg_.episodes_per_offspring;
        env_steps += static_cast<long>(eval.env_steps);

        GenerationRecord rec;
        rec.generation = gen;
        rec.best = table.raw_returns[table.order.front()];
        double mean = 0.0;
        for (double r : raw) mean += r;
        mean /= cfg_.n;
        double var = 0.0;
        for (double r : raw) var += (r - mean) * (r - mean);
        rec.mean = mean;
        rec.stddev = std::sqrt(var / cfg_.n);
        rec.sigma = cfg_.sigma;
        rec.p_sac = 0.0;
        rec.episodes_total = episodes;
        rec.env_steps_total = env_steps;
        bool last = gen == cfg_.generations;
        if (gen % cfg_.validation_every == 0 || last) {
            rec.has_validation = true;
            rec.validation = validate_params(theta_es_, spec_, cfg_.env_name,
                                             action_dim_, cfg_.master_seed);
            summary.final_validation = rec.validation;
            summary.best_validation = std::max(summary.best_validation, rec.validation);
        }
        rec.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                   gen_start).count();
        summary.generations_run = gen;
        if (on_generation) on_generation(rec);
        if (rec.has_validation && !std::isnan(cfg_.stop_at_validation) &&
            rec.validation >= cfg_.stop_at_validation)
            break;
    }
    summary.total_env_steps = env_steps;
    summary.wall_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start).count();
    return summary;
}

}  // namespace esac
