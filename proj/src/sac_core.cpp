#include "esac/sac_core.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace esac {

namespace {
constexpr double kLogStdMin = -20.0;
constexpr double kLogStdMax = 2.0;
constexpr double kSquashEps = 1e-6;
constexpr double kLog2Pi = 1.8378770664093453;

std::vector<double> q_input(const std::vector<double>& s, const std::vector<double>& a) {
    std::vector<double> in;
    in.reserve(s.size() + a.size());
    in.insert(in.end(), s.begin(), s.end());
    in.insert(in.end(), a.begin(), a.end());
    return in;
}
}  // namespace

ReplayBuffer::ReplayBuffer(std::size_t capacity) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    slots_.resize(capacity);
}

void ReplayBuffer::push(Transition t) {
    slots_[next_] = std::move(t);
    ++next_;
    if (next_ == slots_.size()) {
        next_ = 0;
        full_ = true;
    }
}

std::vector<Transition> ReplayBuffer::sample(int batch_size, Rng& rng) const {
    if (batch_size < 1) throw std::invalid_argument("ReplayBuffer: batch_size must be >= 1");
    const std::size_t n = size();
    if (n == 0) throw std::runtime_error("ReplayBuffer: sample from empty buffer");
    std::vector<Transition> out;
    out.reserve(batch_size);
    for (int i = 0; i < batch_size; ++i) out.push_back(slots_[rng.next_u64() % n]);
    return out;
}

PolicySample squash_gaussian(const std::vector<double>& policy_out, int action_dim,
                             const std::vector<double>& xi) {
    if (static_cast<int>(policy_out.size()) != 2 * action_dim)
        throw std::invalid_argument("squash_gaussian: policy output must be 2 * action_dim");
    if (static_cast<int>(xi.size()) != action_dim)
        throw std::invalid_argument("squash_gaussian: noise length must be action_dim");
    PolicySample ps;
    ps.xi = xi;
    ps.action.resize(action_dim);
    ps.mean.resize(action_dim);
    ps.log_std.resize(action_dim);
    ps.std_dev.resize(action_dim);
    ps.clamp_mask.resize(action_dim);
    double logp = 0.0;
    for (int j = 0; j < action_dim; ++j) {
        const double mu = policy_out[j];
        const double raw = policy_out[action_dim + j];
        const double ell = std::clamp(raw, kLogStdMin, kLogStdMax);
        const double sd = std::exp(ell);
        const double a = std::tanh(mu + sd * xi[j]);
        ps.mean[j] = mu;
        ps.log_std[j] = ell;
        ps.std_dev[j] = sd;
        ps.clamp_mask[j] = (raw > kLogStdMin && raw < kLogStdMax) ? 1.0 : 0.0;
        ps.action[j] = a;
        logp += -0.5 * xi[j] * xi[j] - ell - 0.5 * kLog2Pi - std::log(1.0 - a * a + kSquashEps);
    }
    ps.log_prob = logp;
    return ps;
}

PolicySample sample_policy(const ParamVector& theta, const NetSpec& pi_spec,
                           const std::vector<double>& obs, int action_dim, Rng& rng) {
    std::vector<double> xi(action_dim);
    for (auto& x : xi) x = rng.normal();
    return squash_gaussian(forward(theta, pi_spec, obs), action_dim, xi);
}

LossResult compute_value_loss(const ParamVector& psi, const NetSpec& v_spec,
                              const ParamVector& theta, const NetSpec& pi_spec,
                              const ParamVector& phi1, const ParamVector& phi2,
                              const NetSpec& q_spec, const std::vector<Transition>& batch,
                              double lambda, const std::vector<std::vector<double>>& xi) {
    if (batch.empty()) throw std::invalid_argument("compute_value_loss: empty batch");
    if (xi.size() != batch.size())
        throw std::invalid_argument("compute_value_loss: noise rows must match batch");
    const int action_dim = pi_spec.output_dim / 2;
    const double B = static_cast<double>(batch.size());
    LossResult out;
    out.param_grads.assign(psi.values.size(), 0.0);
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const Transition& tr = batch[b];
        PolicySample ps = squash_gaussian(forward(theta, pi_spec, tr.obs), action_dim, xi[b]);
        const auto qin = q_input(tr.obs, ps.action);
        const double q1 = forward(phi1, q_spec, qin)[0];
        const double q2 = forward(phi2, q_spec, qin)[0];
        const double target = std::min(q1, q2) - lambda * ps.log_prob;
        ForwardCache cache;
        const double v = forward_cached(psi, v_spec, tr.obs, cache)[0];
        const double d = v - target;
        out.loss += 0.5 * d * d;
        auto bw = backward(psi, v_spec, cache, {d / B});
        for (std::size_t k = 0; k < out.param_grads.size(); ++k)
            out.param_grads[k] += bw.param_grads[k];
    }
    out.loss /= B;
    return out;
}

LossResult compute_q_loss(const ParamVector& phi, const NetSpec& q_spec,
                          const ParamVector& psi_bar, const NetSpec& v_spec,
                          const std::vector<Transition>& batch, double gamma) {
    if (batch.empty()) throw std::invalid_argument("compute_q_loss: empty batch");
    const double B = static_cast<double>(batch.size());
    LossResult out;
    out.param_grads.assign(phi.values.size(), 0.0);
    for (const Transition& tr : batch) {
        ForwardCache cache;
        const double q = forward_cached(phi, q_spec, q_input(tr.obs, tr.action), cache)[0];
        const double vbar = forward(psi_bar, v_spec, tr.next_obs)[0];
        const double target = tr.reward + gamma * (tr.done ? 0.0 : 1.0) * vbar;
        const double d = q - target;
        out.loss += 0.5 * d * d;
        auto bw = backward(phi, q_spec, cache, {d / B});
        for (std::size_t k = 0; k < out.param_grads.size(); ++k)
            out.param_grads[k] += bw.param_grads[k];
    }
    out.loss /= B;
    return out;
}

LossResult compute_policy_loss(const ParamVector& theta, const NetSpec& pi_spec,
                               const ParamVector& phi1, const ParamVector& phi2,
                               const NetSpec& q_spec, const std::vector<Transition>& batch,
                               double lambda, const std::vector<std::vector<double>>& xi) {
    if (batch.empty()) throw std::invalid_argument("compute_policy_loss: empty batch");
    if (xi.size() != batch.size())
        throw std::invalid_argument("compute_policy_loss: noise rows must match batch");
    const int action_dim = pi_spec.output_dim / 2;
    const int obs_dim = pi_spec.input_dim;
    const double B = static_cast<double>(batch.size());
    LossResult out;
    out.param_grads.assign(theta.values.size(), 0.0);
    for (std::size_t b = 0; b < batch.size(); ++b) {
        const Transition& tr = batch[b];
        ForwardCache cpi;
        PolicySample ps =
            squash_gaussian(forward_cached(theta, pi_spec, tr.obs, cpi), action_dim, xi[b]);
        const auto qin = q_input(tr.obs, ps.action);
        ForwardCache c1, c2;
        const double q1 = forward_cached(phi1, q_spec, qin, c1)[0];
        const double q2 = forward_cached(phi2, q_spec, qin, c2)[0];
        const bool use1 = q1 <= q2;
        out.loss += lambda * ps.log_prob - (use1 ? q1 : q2);

        // d(-minQ)/da via the winning head's input gradient, then chain
        // a = tanh(mu + std*xi) into the two policy heads.
        auto bq = backward(use1 ? phi1 : phi2, q_spec, use1 ? c1 : c2, {1.0});
        std::vector<double> up(2 * action_dim, 0.0);
        for (int j = 0; j < action_dim; ++j) {
            const double a = ps.action[j];
            const double one_m = 1.0 - a * a;
            const double t = 2.0 * a * one_m / (one_m + kSquashEps);
            const double gq = -bq.input_grad[obs_dim + j];
            const double sx = ps.std_dev[j] * ps.xi[j];
            up[j] = (lambda * t + gq * one_m) / B;
            up[action_dim + j] =
                ps.clamp_mask[j] * (lambda * (-1.0 + t * sx) + gq * one_m * sx) / B;
        }
        auto bw = backward(theta, pi_spec, cpi, up);
        for (std::size_t k = 0; k < out.param_grads.size(); ++k)
            out.param_grads[k] += bw.param_grads[k];
    }
    out.loss /= B;
    return out;
}

void target_update(ParamVector& psi_bar, const ParamVector& psi, double tau) {
    if (psi_bar.values.size() != psi.values.size())
        throw std::invalid_argument("target_update: shape mismatch");
    if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("target_update: tau must be in [0,1]");
    for (std::size_t i = 0; i < psi.values.size(); ++i)
        psi_bar.values[i] = tau * psi.values[i] + (1.0 - tau) * psi_bar.values[i];
}

SacLearner::SacLearner(const SacConfig& cfg, const std::string& env_name,
                       std::uint64_t master_seed)
    : cfg_(cfg),
      env_name_(env_name),
      master_seed_(master_seed),
      adam_pi_(0),
      adam_v_(0),
      adam_q1_(0),
      adam_q2_(0),
      replay_(static_cast<std::size_t>(std::max(cfg.replay_capacity, 1))) {
    if (cfg.gamma <= 0.0 || cfg.gamma >= 1.0)
        throw std::invalid_argument("SacLearner: gamma must be in (0,1)");
    if (cfg.lambda < 0.0) throw std::invalid_argument("SacLearner: lambda must be >= 0");
    if (cfg.tau < 0.0 || cfg.tau > 1.0)
        throw std::invalid_argument("SacLearner: tau must be in [0,1]");
    if (cfg.lr < 0.0) throw std::invalid_argument("SacLearner: lr must be >= 0");
    if (cfg.batch_size < 1) throw std::invalid_argument("SacLearner: batch_size must be >= 1");
    if (cfg.replay_capacity < 1)
        throw std::invalid_argument("SacLearner: replay_capacity must be >= 1");

    auto env = make_env(env_name);
    obs_dim_ = env->obs_dim();
    action_dim_ = env->action_dim();
    pi_spec_ = policy_spec_for(*env, cfg.hidden_dims);
    v_spec_ = NetSpec{obs_dim_, cfg.hidden_dims, 1, OutputActivation::linear};
    q_spec_ = NetSpec{obs_dim_ + action_dim_, cfg.hidden_dims, 1, OutputActivation::linear};

    Rng r0(derive_seed(master_seed, stream::init_sac, 0));
    theta_ = init_params(pi_spec_, r0);
    Rng r1(derive_seed(master_seed, stream::init_sac, 1));
    psi_ = init_params(v_spec_, r1);
    psi_bar_ = psi_;
    Rng r2(derive_seed(master_seed, stream::init_sac, 2));
    phi1_ = init_params(q_spec_, r2);
    Rng r3(derive_seed(master_seed, stream::init_sac, 3));
    phi2_ = init_params(q_spec_, r3);

    adam_pi_ = AdamState(theta_.size());
    adam_v_ = AdamState(psi_.size());
    adam_q1_ = AdamState(phi1_.size());
    adam_q2_ = AdamState(phi2_.size());
}

std::vector<double> SacLearner::stochastic_action(const std::vector<double>& obs,
                                                  Rng& noise_rng) {
    std::vector<double> xi(action_dim_);
    for (auto& x : xi) x = noise_rng.normal();
    return squash_gaussian(forward(theta_, pi_spec_, obs), action_dim_, xi).action;
}

EpisodeResult SacLearner::collect_episode(std::uint64_t env_seed, std::uint64_t noise_seed) {
    auto env = make_env(env_name_);
    Rng noise(noise_seed);
    EnvState st = env->reset(env_seed);
    std::vector<double> obs = st.observation;
    bool done = st.done;
    EpisodeResult res;
    while (!done) {
        auto a = stochastic_action(obs, noise);
        StepResult sr = env->step(a);
        replay_.push({obs, a, sr.reward, sr.next_observation, sr.terminal});
        res.episodic_return += sr.reward;
        res.length += 1;
        obs = sr.next_observation;
        done = sr.done;
    }
    return res;
}

bool SacLearner::update() {
    if (replay_.size() < static_cast<std::size_t>(cfg_.batch_size)) {
        ++skipped_updates_;
        return false;
    }
    Rng rng(derive_seed(master_seed_, stream::sac_update,
                        static_cast<std::uint64_t>(update_count_)));
    auto batch = replay_.sample(cfg_.batch_size, rng);
    std::vector<std::vector<double>> xi(batch.size(), std::vector<double>(action_dim_));
    for (auto& row : xi)
        for (auto& x : row) x = rng.normal();

    auto lv = compute_value_loss(psi_, v_spec_, theta_, pi_spec_, phi1_, phi2_, q_spec_, batch,
                                 cfg_.lambda, xi);
    auto lq1 = compute_q_loss(phi1_, q_spec_, psi_bar_, v_spec_, batch, cfg_.gamma);
    auto lq2 = compute_q_loss(phi2_, q_spec_, psi_bar_, v_spec_, batch, cfg_.gamma);
    auto lp =
        compute_policy_loss(theta_, pi_spec_, phi1_, phi2_, q_spec_, batch, cfg_.lambda, xi);

    adam_step(psi_, lv.param_grads, adam_v_, cfg_.lr);
    adam_step(phi1_, lq1.param_grads, adam_q1_, cfg_.lr);
    adam_step(phi2_, lq2.param_grads, adam_q2_, cfg_.lr);
    adam_step(theta_, lp.param_grads, adam_pi_, cfg_.lr);
    target_update(psi_bar_, psi_, cfg_.tau);
    ++update_count_;
    last_losses_ = {lv.loss, lq1.loss, lq2.loss, lp.loss};
    if (on_update) on_update(update_count_, last_losses_);
    return true;
}

SacRunner::SacRunner(const SacRunConfig& cfg)
    : cfg_(cfg), learner_(cfg.sac, cfg.env_name, cfg.master_seed) {
    if (cfg.step_budget < 1) throw std::invalid_argument("SacRunner: step_budget must be >= 1");
    if (cfg.updates_per_step < 0)
        throw std::invalid_argument("SacRunner: updates_per_step must be >= 0");
    if (cfg.validation_every_episodes < 1)
        throw std::invalid_argument("SacRunner: validation_every_episodes must be >= 1");
    action_dim_ = make_env(cfg.env_name)->action_dim();
}

RunSummary SacRunner::run(const SacEpisodeCallback& on_episode) {
    RunSummary summary;
    summary.best_validation = -std::numeric_limits<double>::infinity();
    summary.incumbent_fitness = -std::numeric_limits<double>::infinity();
    const auto run_start = std::chrono::steady_clock::now();
    auto env = make_env(cfg_.env_name);
    long total_steps = 0;
    int episode = 0;
    while (total_steps < cfg_.step_budget) {
        ++episode;
        const auto ep_start = std::chrono::steady_clock::now();
        EnvState st = env->reset(derive_seed(cfg_.master_seed, stream::sac_episode, episode, 0));
        Rng noise(derive_seed(cfg_.master_seed, stream::sac_episode, episode, 1));
        std::vector<double> obs = st.observation;
        bool done = st.done;
        double ep_ret = 0.0;
        int ep_len = 0;
        while (!done && total_steps < cfg_.step_budget) {
            std::vector<double> a;
            if (total_steps < cfg_.start_steps) {
                a.resize(action_dim_);
                for (auto& x : a) x = noise.uniform(-1.0, 1.0);
            } else {
                a = learner_.stochastic_action(obs, noise);
            }
            StepResult sr = env->step(a);
            learner_.push({obs, a, sr.reward, sr.next_observation, sr.terminal});
            ++total_steps;
            ep_ret += sr.reward;
            ++ep_len;
            if (total_steps >= cfg_.start_steps)
                for (int k = 0; k < cfg_.updates_per_step; ++k) learner_.update();
            obs = sr.next_observation;
            done = sr.done;
        }
        SacEpisodeRecord rec;
        rec.episode = episode;
        rec.episodic_return = ep_ret;
        rec.length = ep_len;
        rec.env_steps_total = total_steps;
        rec.updates_total = learner_.update_count();
        rec.skipped_updates_total = learner_.skipped_updates();
        rec.losses = learner_.last_losses();
        const bool budget_spent = total_steps >= cfg_.step_budget;
        if (episode % cfg_.validation_every_episodes == 0 || budget_spent) {
            rec.has_validation = true;
            rec.validation = validate_params(learner_.policy_params(), learner_.policy_spec(),
                                             cfg_.env_name, action_dim_, cfg_.master_seed);
            summary.final_validation = rec.validation;
            if (rec.validation > summary.best_validation) {
                summary.best_validation = rec.validation;
                summary.incumbent = learner_.policy_params();
                summary.incumbent_fitness = rec.validation;
            }
        }
        rec.wall_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - ep_start).count();
        summary.generations_run = episode;
        if (on_episode) on_episode(rec);
    }
    summary.total_updates = learner_.update_count();
    summary.total_env_steps = total_steps;
    summary.wall_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - run_start).count();
    return summary;
}

}  // namespace esac
