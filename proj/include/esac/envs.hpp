#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "esac/nnet.hpp"
#include "esac/rng.hpp"

namespace esac {

struct EnvState {
    std::vector<double> observation;
    int step_index = 0;
    bool done = false;
};

struct StepResult {
    std::vector<double> next_observation;
    double reward = 0.0;
    bool done = false;
    // True only for reward-triggered termination; horizon timeouts leave it
    // false so value bootstrapping continues across them.
    bool terminal = false;
};

// Episodic environment. step() takes a normalized action in [-1,1]^action_dim
// (the environment applies its own scaling); cyclic-mdp interprets the vector
// via argmax and also exposes the discrete step directly.
class Env {
public:
    virtual ~Env() = default;
    virtual const char* name() const = 0;
    virtual int obs_dim() const = 0;
    virtual int action_dim() const = 0;
    virtual bool discrete() const = 0;
    virtual int horizon() const = 0;
    virtual double r_min() const = 0;
    virtual double r_max() const = 0;
    virtual EnvState reset(std::uint64_t seed) = 0;
    virtual StepResult step(const std::vector<double>& action) = 0;
    const EnvState& state() const { return state_; }

protected:
    EnvState state_;
};

// Three states visited S0 -> S1 -> S2 -> S0; the action index picks the state
// to occupy next. Moving to the clockwise neighbour pays +1, anything else
// pays -1 and ends the episode. Observation is one-hot over the states.
class CyclicMdp : public Env {
public:
    const char* name() const override { return "cyclic-mdp"; }
    int obs_dim() const override { return 3; }
    int action_dim() const override { return 3; }
    bool discrete() const override { return true; }
    int horizon() const override { return 2000; }
    double r_min() const override { return -1.0; }
    double r_max() const override { return 1.0; }
    EnvState reset(std::uint64_t seed) override;
    StepResult step(const std::vector<double>& action) override;
    StepResult step_discrete(int target_state);

private:
    int current_ = 0;
};

// Classic swing-up pendulum: obs (cos th, sin th, omega), torque = 2 * action,
// reward -(th^2 + 0.1 omega^2 + 0.001 u^2), dt 0.05, horizon 200. Episodes
// start close to hanging: |th0| in [pi - 0.1, pi], |omega0| <= 0.05.
class Pendulum : public Env {
public:
    const char* name() const override { return "pendulum"; }
    int obs_dim() const override { return 3; }
    int action_dim() const override { return 1; }
    bool discrete() const override { return false; }
    int horizon() const override { return 200; }
    double r_min() const override { return -16.2736044; }
    double r_max() const override { return 0.0; }
    EnvState reset(std::uint64_t seed) override;
    StepResult step(const std::vector<double>& action) override;

private:
    double theta_ = 0.0;
    double omega_ = 0.0;
    std::vector<double> obs() const;
};

// Sparse-reward point mass on [-1,1]^2: obs (px, py, vx, vy), force = action,
// v <- 0.95 (v + 0.1 a), p <- clip(p + 0.1 v), reward 1.0 while the post-move
// position is inside the goal disk of radius 0.1 at the origin, else 0.
// Starts on a ring of radius U[0.30, 0.35] at a uniform angle, at rest.
class PointMass : public Env {
public:
    const char* name() const override { return "pointmass-sparse"; }
    int obs_dim() const override { return 4; }
    int action_dim() const override { return 2; }
    bool discrete() const override { return false; }
    int horizon() const override { return 300; }
    double r_min() const override { return 0.0; }
    double r_max() const override { return 1.0; }
    EnvState reset(std::uint64_t seed) override;
    StepResult step(const std::vector<double>& action) override;

private:
    double p_[2] = {0, 0};
    double v_[2] = {0, 0};
    std::vector<double> obs() const;
};

std::unique_ptr<Env> make_env(const std::string& name);

using Policy = std::function<std::vector<double>(const std::vector<double>&)>;

struct EpisodeResult {
    double episodic_return = 0.0;
    int length = 0;
};

EpisodeResult run_episode(Env& env, const Policy& policy, std::uint64_t seed);

// Deterministic evaluation policy for a parameter vector: tanh of the action
// means (the first action_dim outputs).
std::vector<double> policy_action(const ParamVector& params, const NetSpec& spec,
                                  const std::vector<double>& obs, int action_dim);

// Policy NetSpec shared by ES offsprings and the SAC actor: outputs action_dim
// means followed by action_dim log-stds.
NetSpec policy_spec_for(const Env& env, const std::vector<int>& hidden_dims);

// Hand-wired parameter vector whose greedy action always moves clockwise on
// cyclic-mdp (used by timing benchmarks and max-reward tests). Requires the
// spec produced by policy_spec_for with hidden widths >= 3.
ParamVector cyclic_expert_params(const NetSpec& spec);

}  // namespace esac
