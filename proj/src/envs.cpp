#include "esac/envs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace esac {

namespace {
constexpr double kPi = 3.14159265358979323846;

double wrap_angle(double th) {
    th = std::fmod(th + kPi, 2.0 * kPi);
    if (th < 0) th += 2.0 * kPi;
    return th - kPi;
}

int argmax(const std::vector<double>& v) {
    return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}
}  // namespace

// ---- CyclicMdp ----

EnvState CyclicMdp::reset(std::uint64_t) {
    current_ = 0;  // the agent always starts in S0
    state_.observation = {1.0, 0.0, 0.0};
    state_.step_index = 0;
    state_.done = false;
    return state_;
}

StepResult CyclicMdp::step_discrete(int target_state) {
    if (state_.done) throw std::logic_error("cyclic-mdp: step on a finished episode");
    if (target_state < 0 || target_state > 2)
        throw std::invalid_argument("cyclic-mdp: action index out of range");
    StepResult r;
    bool clockwise = target_state == (current_ + 1) % 3;
    r.reward = clockwise ? 1.0 : -1.0;
    current_ = target_state;
    state_.step_index += 1;
    r.terminal = !clockwise;  // a negative reward ends the episode
    r.done = r.terminal || state_.step_index >= horizon();
    state_.done = r.done;
    r.next_observation.assign(3, 0.0);
    r.next_observation[current_] = 1.0;
    state_.observation = r.next_observation;
    return r;
}

StepResult CyclicMdp::step(const std::vector<double>& action) {
    if (static_cast<int>(action.size()) != 3)
        throw std::invalid_argument("cyclic-mdp: expected a 3-dim action vector");
    return step_discrete(argmax(action));
}

// ---- Pendulum ----

std::vector<double> Pendulum::obs() const {
    return {std::cos(theta_), std::sin(theta_), omega_};
}

EnvState Pendulum::reset(std::uint64_t seed) {
    Rng rng(seed);
    theta_ = rng.uniform(kPi - 0.1, kPi + 0.1);
    if (rng.uniform() < 0.5) theta_ = -theta_;
    theta_ = wrap_angle(theta_);
    omega_ = rng.uniform(-0.05, 0.05);
    state_.observation = obs();
    state_.step_index = 0;
    state_.done = false;
    return state_;
}

StepResult Pendulum::step(const std::vector<double>& action) {
    if (state_.done) throw std::logic_error("pendulum: step on a finished episode");
    if (action.size() != 1)
        throw std::invalid_argument("pendulum: expected a 1-dim action");
    double u = 2.0 * std::clamp(action[0], -1.0, 1.0);
    StepResult r;
    r.reward = -(theta_ * theta_ + 0.1 * omega_ * omega_ + 0.001 * u * u);
    // g = 10, m = l = 1, dt = 0.05
    omega_ = std::clamp(omega_ + 0.05 * (15.0 * std::sin(theta_) + 3.0 * u), -8.0, 8.0);
    theta_ = wrap_angle(theta_ + 0.05 * omega_);
    state_.step_index += 1;
    r.done = state_.step_index >= horizon();
    r.terminal = false;
    state_.done = r.done;
    r.next_observation = obs();
    state_.observation = r.next_observation;
    return r;
}

// ---- PointMass ----

std::vector<double> PointMass::obs() const { return {p_[0], p_[1], v_[0], v_[1]}; }

EnvState PointMass::reset(std::uint64_t seed) {
    Rng rng(seed);
    double ang = rng.uniform(0.0, 2.0 * kPi);
    double rad = rng.uniform(0.30, 0.35);
    p_[0] = rad * std::cos(ang);
    p_[1] = rad * std::sin(ang);
    v_[0] = v_[1] = 0.0;
    state_.observation = obs();
    state_.step_index = 0;
    state_.done = false;
    return state_;
}

StepResult PointMass::step(const std::vector<double>& action) {
    if (state_.done) throw std::logic_error("pointmass-sparse: step on a finished episode");
    if (action.size() != 2)
        throw std::invalid_argument("pointmass-sparse: expected a 2-dim action");
    StepResult r;
    for (int i = 0; i < 2; ++i) {
        double a = std::clamp(action[i], -1.0, 1.0);
        v_[i] = 0.95 * (v_[i] + 0.1 * a);
    }
    for (int i = 0; i < 2; ++i)
        p_[i] = std::clamp(p_[i] + 0.1 * v_[i], -1.0, 1.0);
    r.reward = (p_[0] * p_[0] + p_[1] * p_[1] < 0.01) ? 1.0 : 0.0;
    state_.step_index += 1;
    r.done = state_.step_index >= horizon();
    r.terminal = false;
    state_.done = r.done;
    r.next_observation = obs();
    state_.observation = r.next_observation;
    return r;
}

// ---- helpers ----

std::unique_ptr<Env> make_env(const std::string& name) {
    if (name == "cyclic-mdp") return std::make_unique<CyclicMdp>();
    if (name == "pendulum") return std::make_unique<Pendulum>();
    if (name == "pointmass-sparse") return std::make_unique<PointMass>();
    throw std::invalid_argument("unknown environment: " + name);
}

EpisodeResult run_episode(Env& env, const Policy& policy, std::uint64_t seed) {
    EnvState s = env.reset(seed);
    EpisodeResult out;
    while (!s.done) {
        StepResult r = env.step(policy(s.observation));
        out.episodic_return += r.reward;
        out.length += 1;
        s = env.state();
    }
    return out;
}

std::vector<double> policy_action(const ParamVector& params, const NetSpec& spec,
                                  const std::vector<double>& obs, int action_dim) {
    std::vector<double> raw = forward(params, spec, obs);
    std::vector<double> a(action_dim);
    for (int i = 0; i < action_dim; ++i) a[i] = std::tanh(raw[i]);
    return a;
}

NetSpec policy_spec_for(const Env& env, const std::vector<int>& hidden_dims) {
    NetSpec spec;
    spec.input_dim = env.obs_dim();
    spec.hidden_dims = hidden_dims;
    spec.output_dim = 2 * env.action_dim();
    spec.output_activation = OutputActivation::linear;
    return spec;
}

ParamVector cyclic_expert_params(const NetSpec& spec) {
    if (spec.input_dim != 3 || spec.output_dim < 3 || spec.hidden_dims.empty())
        throw std::invalid_argument("cyclic_expert_params: spec is not a cyclic-mdp policy");
    for (int h : spec.hidden_dims)
        if (h < 3) throw std::invalid_argument("cyclic_expert_params: hidden width < 3");

    ParamVector p;
    p.spec_id = spec.hash();
    p.values.assign(spec.param_count(), 0.0);

    // Thread the one-hot state through the first three units of every hidden
    // layer, then rotate it so that mean (j) peaks when the state is (j+2)%3;
    // argmax over the means then selects (current+1)%3.
    auto dims = spec.layer_dims();
    int off = 0;
    for (size_t l = 0; l + 1 < dims.size(); ++l) {
        int in = dims[l], out = dims[l + 1];
        bool last = l + 2 == dims.size();
        for (int j = 0; j < 3; ++j) {
            int src = last ? (j + 2) % 3 : j;
            p.values[off + j * in + src] = 1.0;
        }
        off += in * out + out;
    }
    return p;
}

}  // namespace esac
