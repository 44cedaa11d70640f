#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "esac/envs.hpp"
#include "esac/es_core.hpp"
#include "esac/nnet.hpp"
#include "esac/rng.hpp"

namespace esac {

// One replayed step. `done` is true only for reward-triggered termination and
// masks the bootstrap; horizon timeouts store done = false so the value target
// keeps bootstrapping across them.
struct Transition {
    std::vector<double> obs;
    std::vector<double> action;
    double reward = 0.0;
    std::vector<double> next_obs;
    bool done = false;
};

class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);
    void push(Transition t);
    std::size_t size() const { return full_ ? slots_.size() : next_; }
    std::size_t capacity() const { return slots_.size(); }
    const Transition& at(std::size_t i) const { return slots_[i]; }
    // Uniform over occupied slots, with replacement.
    std::vector<Transition> sample(int batch_size, Rng& rng) const;

private:
    std::vector<Transition> slots_;
    std::size_t next_ = 0;
    bool full_ = false;
};

struct SacConfig {
    double gamma = 0.99;
    double lambda = 0.2;  // entropy temperature
    double tau = 0.005;
    double lr = 3e-4;
    int batch_size = 128;
    int replay_capacity = 100000;
    std::vector<int> hidden_dims{64, 64};
};

// a = tanh(mu + std * xi) with the change-of-variables log density. The raw
// log-std head is clamped to [-20, 2] before exponentiation; clamp_mask notes
// where the clamp did NOT bind (gradient passes through there only).
struct PolicySample {
    std::vector<double> action;
    std::vector<double> mean;
    std::vector<double> log_std;
    std::vector<double> std_dev;
    std::vector<double> clamp_mask;
    std::vector<double> xi;
    double log_prob = 0.0;
};

PolicySample squash_gaussian(const std::vector<double>& policy_out, int action_dim,
                             const std::vector<double>& xi);

PolicySample sample_policy(const ParamVector& theta, const NetSpec& pi_spec,
                           const std::vector<double>& obs, int action_dim, Rng& rng);

struct LossResult {
    double loss = 0.0;
    std::vector<double> param_grads;
};

// 0.5 * mean_b (V_psi(s) - [min_i Q_phi_i(s, a~) - lambda * log pi(a~|s)])^2
// where a~ comes from the given per-sample noise (one fresh sample per state,
// shared with the policy loss inside an update step). The target is treated as
// a constant: the gradient flows through psi only.
LossResult compute_value_loss(const ParamVector& psi, const NetSpec& v_spec,
                              const ParamVector& theta, const NetSpec& pi_spec,
                              const ParamVector& phi1, const ParamVector& phi2,
                              const NetSpec& q_spec, const std::vector<Transition>& batch,
                              double lambda, const std::vector<std::vector<double>>& xi);

// 0.5 * mean_b (Q_phi(s, a) - [r + gamma * (1 - done) * Vbar(s')])^2.
LossResult compute_q_loss(const ParamVector& phi, const NetSpec& q_spec,
                          const ParamVector& psi_bar, const NetSpec& v_spec,
                          const std::vector<Transition>& batch, double gamma);

// mean_b (lambda * log pi(a~|s) - min_i Q_phi_i(s, a~)) with a~ reparameterized
// through the given noise; gradient w.r.t. theta only (Q params frozen).
LossResult compute_policy_loss(const ParamVector& theta, const NetSpec& pi_spec,
                               const ParamVector& phi1, const ParamVector& phi2,
                               const NetSpec& q_spec, const std::vector<Transition>& batch,
                               double lambda, const std::vector<std::vector<double>>& xi);

// Polyak move psi_bar <- tau * psi + (1 - tau) * psi_bar.
void target_update(ParamVector& psi_bar, const ParamVector& psi, double tau);

struct SacLosses {
    double value = 0.0;
    double q1 = 0.0;
    double q2 = 0.0;
    double policy = 0.0;
};

// The learner shared by the standalone SAC baseline and the ESAC gradient
// phase: five networks (policy, V, Polyak V target, twin Q), one replay
// buffer, one Adam state per trained net.
class SacLearner {
public:
    SacLearner(const SacConfig& cfg, const std::string& env_name, std::uint64_t master_seed);

    // Stochastic squashed-Gaussian action for rollouts.
    std::vector<double> stochastic_action(const std::vector<double>& obs, Rng& noise_rng);

    void push(Transition t) { replay_.push(std::move(t)); }

    // Roll one full stochastic episode into the replay buffer (no updates).
    EpisodeResult collect_episode(std::uint64_t env_seed, std::uint64_t noise_seed);

    // One gradient step: all four gradients at the pre-update parameters, then
    // four Adam steps, then the Polyak target move. Batch indices and policy
    // noise come from a stream keyed by the update counter, so results do not
    // depend on how updates are grouped into phases. Returns false (and counts
    // a skipped-update warning) when the buffer holds fewer than batch_size
    // transitions.
    bool update();

    const ParamVector& policy_params() const { return theta_; }
    void set_policy_params(const ParamVector& p) { theta_ = p; }
    const NetSpec& policy_spec() const { return pi_spec_; }
    const ReplayBuffer& replay() const { return replay_; }
    long update_count() const { return update_count_; }
    long skipped_updates() const { return skipped_updates_; }
    const SacLosses& last_losses() const { return last_losses_; }
    const SacConfig& config() const { return cfg_; }
    const ParamVector& value_params() const { return psi_; }
    const ParamVector& value_target_params() const { return psi_bar_; }
    const ParamVector& q1_params() const { return phi1_; }
    const ParamVector& q2_params() const { return phi2_; }

    // Invoked after every performed update with (counter, losses); the harness
    // wires it to the metrics stream.
    std::function<void(long, const SacLosses&)> on_update;

private:
    SacConfig cfg_;
    std::string env_name_;
    std::uint64_t master_seed_ = 0;
    int obs_dim_ = 0;
    int action_dim_ = 0;
    NetSpec pi_spec_, v_spec_, q_spec_;
    ParamVector theta_, psi_, psi_bar_, phi1_, phi2_;
    AdamState adam_pi_, adam_v_, adam_q1_, adam_q2_;
    ReplayBuffer replay_;
    long update_count_ = 0;
    long skipped_updates_ = 0;
    SacLosses last_losses_;
};

struct SacRunConfig {
    std::string env_name = "pendulum";
    SacConfig sac;
    long step_budget = 100000;
    int start_steps = 500;  // uniform-random warmup actions, no updates yet
    int updates_per_step = 1;
    int validation_every_episodes = 5;
    std::uint64_t master_seed = 0;
};

struct SacEpisodeRecord {
    int episode = 0;
    double episodic_return = 0.0;
    int length = 0;
    long env_steps_total = 0;
    long updates_total = 0;
    long skipped_updates_total = 0;
    SacLosses losses;  // from the last update of the episode
    bool has_validation = false;
    double validation = 0.0;
    double wall_s = 0.0;
};

using SacEpisodeCallback = std::function<void(const SacEpisodeRecord&)>;

// Standalone SAC baseline: one gradient update per environment step once the
// warmup is over, until the step budget is spent. Validation evaluates the
// current policy with deterministic (tanh-mean) actions on the shared
// validation stream.
class SacRunner {
public:
    explicit SacRunner(const SacRunConfig& cfg);
    RunSummary run(const SacEpisodeCallback& on_episode = nullptr);
    const SacLearner& learner() const { return learner_; }
    SacLearner& learner() { return learner_; }

private:
    SacRunConfig cfg_;
    SacLearner learner_;
    int action_dim_ = 0;
};

}  // namespace esac
