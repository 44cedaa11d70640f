#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "esac/envs.hpp"
#include "esac/rng.hpp"

using namespace esac;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("cyclic-mdp: clockwise moves pay +1, anything else ends the episode") {
    CyclicMdp env;
    EnvState s = env.reset(0);
    CHECK(s.observation == std::vector<double>{1.0, 0.0, 0.0});

    StepResult r = env.step_discrete(1);  // S0 -> S1 is clockwise
    CHECK(r.reward == 1.0);
    CHECK_FALSE(r.done);
    CHECK_FALSE(r.terminal);
    CHECK(r.next_observation == std::vector<double>{0.0, 1.0, 0.0});

    r = env.step_discrete(2);  // S1 -> S2
    CHECK(r.reward == 1.0);

    r = env.step_discrete(1);  // S2 -> S1 is wrong
    CHECK(r.reward == -1.0);
    CHECK(r.done);
    CHECK(r.terminal);

    CHECK_THROWS(env.step_discrete(0));  // episode is over
}

TEST_CASE("cyclic-mdp: horizon timeout is done but not terminal") {
    CyclicMdp env;
    env.reset(0);
    StepResult r;
    int target = 1;
    for (int i = 0; i < env.horizon(); ++i) {
        r = env.step_discrete(target);
        target = (target + 1) % 3;
    }
    CHECK(r.done);
    CHECK_FALSE(r.terminal);  // ran out of steps, no failure reward
}

TEST_CASE("cyclic-mdp: vector actions go through argmax") {
    CyclicMdp env;
    env.reset(0);
    StepResult r = env.step({0.1, 0.9, -0.5});  // argmax 1 = clockwise from S0
    CHECK(r.reward == 1.0);
}

TEST_CASE("cyclic-mdp: the wired expert collects the full +2000") {
    CyclicMdp env;
    NetSpec spec = policy_spec_for(env, {64, 64});
    ParamVector expert = cyclic_expert_params(spec);
    Policy pol = [&](const std::vector<double>& obs) {
        return policy_action(expert, spec, obs, env.action_dim());
    };
    EpisodeResult res = run_episode(env, pol, 123);
    CHECK(res.episodic_return == doctest::Approx(2000.0));
    CHECK(res.length == 2000);

    // Works for any hidden stack of width >= 3.
    NetSpec small = policy_spec_for(env, {3});
    ParamVector tiny_expert = cyclic_expert_params(small);
    Policy tiny = [&](const std::vector<double>& obs) {
        return policy_action(tiny_expert, small, obs, env.action_dim());
    };
    CHECK(run_episode(env, tiny, 7).episodic_return == doctest::Approx(2000.0));

    CHECK_THROWS(cyclic_expert_params(policy_spec_for(env, {2})));
}

TEST_CASE("pendulum: start states hang near the bottom") {
    Pendulum env;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        EnvState s = env.reset(seed);
        REQUIRE(s.observation.size() == 3);
        double theta = std::atan2(s.observation[1], s.observation[0]);
        double omega = s.observation[2];
        CHECK(std::abs(theta) >= kPi - 0.1 - 1e-12);
        CHECK(std::abs(theta) <= kPi + 1e-12);
        CHECK(std::abs(omega) <= 0.05);
        CHECK(s.observation[0] == doctest::Approx(std::cos(theta)));
    }
}

TEST_CASE("pendulum: reward and dynamics match the written model") {
    // reward = -(th^2 + 0.1 w^2 + 0.001 u^2) on the pre-step state;
    // w' = clip(w + 0.05 (15 sin th + 3u), -8, 8); th' = wrap(th + 0.05 w').
    Pendulum env;
    EnvState s = env.reset(5);
    double theta = std::atan2(s.observation[1], s.observation[0]);
    double omega = s.observation[2];

    const double a = 0.25, u = 2.0 * a;
    StepResult r = env.step({a});
    CHECK(r.reward ==
          doctest::Approx(-(theta * theta + 0.1 * omega * omega + 0.001 * u * u)));

    double omega2 = omega + 0.05 * (15.0 * std::sin(theta) + 3.0 * u);
    double theta2 = theta + 0.05 * omega2;
    theta2 = std::atan2(std::sin(theta2), std::cos(theta2));  // wrap to (-pi, pi]
    CHECK(r.next_observation[2] == doctest::Approx(omega2));
    CHECK(r.next_observation[0] == doctest::Approx(std::cos(theta2)));
    CHECK(r.next_observation[1] == doctest::Approx(std::sin(theta2)));
}

TEST_CASE("pendulum: torque saturates outside [-1,1] actions") {
    Pendulum env1, env2;
    env1.reset(9);
    env2.reset(9);
    StepResult a = env1.step({5.0});
    StepResult b = env2.step({1.0});
    CHECK(a.reward == doctest::Approx(b.reward));
    CHECK(a.next_observation[2] == doctest::Approx(b.next_observation[2]));
}

TEST_CASE("pendulum: full horizon, no terminal transitions") {
    Pendulum env;
    Policy zero = [](const std::vector<double>&) { return std::vector<double>{0.0}; };
    EpisodeResult res = run_episode(env, zero, 3);
    CHECK(res.length == 200);
    CHECK(res.episodic_return < 0.0);
    CHECK(res.episodic_return >= env.r_min() * 200);
}

TEST_CASE("pointmass: starts at rest on the ring, radius in [0.30, 0.35]") {
    PointMass env;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        EnvState s = env.reset(seed);
        REQUIRE(s.observation.size() == 4);
        double radius = std::hypot(s.observation[0], s.observation[1]);
        CHECK(radius >= 0.30);
        CHECK(radius <= 0.35);
        CHECK(s.observation[2] == 0.0);
        CHECK(s.observation[3] == 0.0);
    }
}

TEST_CASE("pointmass: dynamics follow v' = 0.95(v + 0.1a), p' = clip(p + 0.1 v')") {
    PointMass env;
    EnvState s = env.reset(11);
    double p0 = s.observation[0], p1 = s.observation[1];

    StepResult r = env.step({0.8, -0.4});
    double v0 = 0.95 * (0.0 + 0.1 * 0.8);
    double v1 = 0.95 * (0.0 + 0.1 * -0.4);
    CHECK(r.next_observation[2] == doctest::Approx(v0));
    CHECK(r.next_observation[3] == doctest::Approx(v1));
    CHECK(r.next_observation[0] == doctest::Approx(p0 + 0.1 * v0));
    CHECK(r.next_observation[1] == doctest::Approx(p1 + 0.1 * v1));
    CHECK(r.reward == 0.0);  // still far from the goal
}

TEST_CASE("pointmass: reward is 1 exactly while inside the goal disk") {
    // Steer straight at the origin; once the post-move position is inside
    // radius 0.1 the env pays 1 per step, and 0 before that.
    PointMass env;
    EnvState s = env.reset(21);
    double ret = 0.0;
    bool saw_zero = false, saw_one = false;
    while (!s.done) {
        double px = s.observation[0], py = s.observation[1];
        double norm = std::max(std::hypot(px, py), 1e-9);
        StepResult r = env.step({-px / norm, -py / norm});
        double rad = std::hypot(r.next_observation[0], r.next_observation[1]);
        if (rad < 0.1 - 1e-9) CHECK(r.reward == 1.0);
        if (rad > 0.1 + 1e-9) CHECK(r.reward == 0.0);
        (r.reward == 1.0 ? saw_one : saw_zero) = true;
        ret += r.reward;
        s = env.state();
    }
    CHECK(saw_zero);
    CHECK(saw_one);  // the homing controller does reach the goal
    CHECK(ret > 100.0);
}

TEST_CASE("pointmass: horizon is 300 with no terminal transitions") {
    PointMass env;
    Policy zero = [](const std::vector<double>&) { return std::vector<double>{0.0, 0.0}; };
    EpisodeResult res = run_episode(env, zero, 2);
    CHECK(res.length == 300);
    CHECK(res.episodic_return == 0.0);  // it never moves
}

TEST_CASE("make_env: names map to envs, unknown names throw") {
    CHECK(std::string(make_env("cyclic-mdp")->name()) == "cyclic-mdp");
    CHECK(std::string(make_env("pendulum")->name()) == "pendulum");
    CHECK(std::string(make_env("pointmass-sparse")->name()) == "pointmass-sparse");
    CHECK_THROWS(make_env("cartpole"));
}

TEST_CASE("run_episode is deterministic in (params, seed)") {
    Pendulum env;
    NetSpec spec = policy_spec_for(env, {8});
    Rng rng(77);
    ParamVector p = init_params(spec, rng);
    Policy pol = [&](const std::vector<double>& obs) {
        return policy_action(p, spec, obs, env.action_dim());
    };
    EpisodeResult a = run_episode(env, pol, 42);
    EpisodeResult b = run_episode(env, pol, 42);
    CHECK(a.episodic_return == b.episodic_return);
    CHECK(a.length == b.length);
    EpisodeResult c = run_episode(env, pol, 43);
    CHECK(a.episodic_return != c.episodic_return);
}

TEST_CASE("policy_action is tanh of the first action_dim outputs") {
    Pendulum env;
    NetSpec spec = policy_spec_for(env, {6});
    CHECK(spec.output_dim == 2);  // mean and log-std
    CHECK(spec.input_dim == 3);
    Rng rng(5);
    ParamVector p = init_params(spec, rng);
    std::vector<double> obs{0.2, -0.9, 1.4};
    std::vector<double> raw = forward(p, spec, obs);
    std::vector<double> a = policy_action(p, spec, obs, 1);
    REQUIRE(a.size() == 1);
    CHECK(a[0] == doctest::Approx(std::tanh(raw[0])));
}
