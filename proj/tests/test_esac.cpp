#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "esac/esac_loop.hpp"

using namespace esac;

namespace {

std::vector<ParamVector> fake_members(const std::vector<double>& tags) {
    std::vector<ParamVector> members(tags.size());
    for (size_t i = 0; i < tags.size(); ++i) members[i].values = {tags[i], -tags[i]};
    return members;
}

EsacRunConfig small_pendulum_config() {
    EsacRunConfig cfg;
    cfg.env_name = "pendulum";
    cfg.hidden_dims = {4};
    cfg.n = 6;
    cfg.sigma = 0.05;
    cfg.alpha_es = 0.01;
    cfg.e = 0.5;  // w = 3
    cfg.g = 1;
    cfg.p_sac_initial = 1.0;
    cfg.p_sac_decay = 0.5;
    cfg.sac_episodes_per_phase = 1;
    cfg.crossover_swap_prob = 0.5;
    cfg.zeta = 1e-3;
    cfg.sac.batch_size = 16;
    cfg.episodes_per_offspring = 1;
    cfg.generations = 3;
    cfg.validation_every = 1;
    cfg.master_seed = 1;
    return cfg;
}

}  // namespace

TEST_CASE("select_winners: pinned example with a tie") {
    FitnessTable table = make_fitness_table({3.0, 9.0, 1.0, 9.0, 2.0});
    auto members = fake_members({10, 11, 12, 13, 14});
    WinnerSet ws = select_winners(table, members, 0.4);  // w = floor(2.0) = 2
    REQUIRE(ws.indices.size() == 2);
    CHECK(ws.indices == std::vector<int>{1, 3});  // tie at 9.0 broken by index
    CHECK(ws.raw_returns == std::vector<double>{9.0, 9.0});
    CHECK(ws.params[0].values == members[1].values);
    CHECK(ws.params[1].values == members[3].values);
}

TEST_CASE("select_winners: e = 1 returns the descending full sort") {
    FitnessTable table = make_fitness_table({0.5, -2.0, 4.0});
    auto members = fake_members({0, 1, 2});
    WinnerSet ws = select_winners(table, members, 1.0);
    CHECK(ws.indices == std::vector<int>{2, 0, 1});
    CHECK(ws.raw_returns == std::vector<double>{4.0, 0.5, -2.0});
}

TEST_CASE("select_winners rejects degenerate inputs") {
    FitnessTable table = make_fitness_table({1.0, 2.0, 3.0});
    auto members = fake_members({0, 1, 2});
    CHECK_THROWS(select_winners(table, members, 0.2));  // w = floor(0.6) = 0
    CHECK_THROWS(select_winners(table, members, 0.0));
    CHECK_THROWS(select_winners(table, members, 1.5));
    auto short_members = fake_members({0, 1});
    CHECK_THROWS(select_winners(table, short_members, 0.5));
}

TEST_CASE("should_run_sac: off-cycle generations do not consume randomness") {
    Rng rng(42);
    auto before = rng.state();
    CHECK_FALSE(should_run_sac(3, 2, 1.0, rng));
    CHECK(rng.state() == before);

    CHECK(should_run_sac(4, 2, 1.0, rng));  // p = 1 always passes on-cycle
    CHECK(rng.state() != before);

    auto mid = rng.state();
    CHECK_FALSE(should_run_sac(4, 2, 0.0, rng));  // p = 0 never passes...
    CHECK(rng.state() != mid);                    // ...but the draw is spent

    CHECK_THROWS(should_run_sac(4, 0, 0.5, rng));
}

TEST_CASE("anneal_p_sac: geometric decay in completed phases") {
    CHECK(anneal_p_sac(1.0, 0.5, 3) == doctest::Approx(0.125));
    CHECK(anneal_p_sac(0.7, 0.9, 0) == 0.7);
    CHECK(anneal_p_sac(0.5, 0.8, 2) == doctest::Approx(0.5 * 0.64));
    CHECK_THROWS(anneal_p_sac(1.0, 0.0, 1));
    CHECK_THROWS(anneal_p_sac(1.0, 1.0, 1));
    CHECK_THROWS(anneal_p_sac(1.0, 1.5, 1));
}

TEST_CASE("hindsight_crossover: endpoints copy one parent exactly") {
    Rng rng(7);
    ParamVector winner, base;
    for (int j = 0; j < 64; ++j) {
        winner.values.push_back(j + 0.5);
        base.values.push_back(-j - 0.5);
    }
    ParamVector all_base = hindsight_crossover(winner, base, 0.0, rng);
    CHECK(all_base.values == base.values);
    ParamVector all_winner = hindsight_crossover(winner, base, 1.0, rng);
    CHECK(all_winner.values == winner.values);
}

TEST_CASE("hindsight_crossover: swap fraction tracks swap_prob, parents untouched") {
    Rng rng(19);
    const int dim = 10000;
    ParamVector winner, base;
    winner.values.assign(dim, 1.0);
    base.values.assign(dim, 0.0);
    ParamVector child = hindsight_crossover(winner, base, 0.5, rng);
    double frac = 0.0;
    for (double v : child.values) frac += v;
    frac /= dim;
    CHECK(frac > 0.47);  // sd of the fraction is 0.005; this is +-6 sd
    CHECK(frac < 0.53);
    CHECK(winner.values == std::vector<double>(dim, 1.0));
    CHECK(base.values == std::vector<double>(dim, 0.0));

    ParamVector short_vec;
    short_vec.values = {1.0};
    CHECK_THROWS(hindsight_crossover(short_vec, base, 0.5, rng));
    CHECK_THROWS(hindsight_crossover(winner, base, -0.1, rng));
    CHECK_THROWS(hindsight_crossover(winner, base, 1.1, rng));
}

TEST_CASE("EsacRunner: constructor validates the config") {
    EsacRunConfig ok = small_pendulum_config();
    CHECK_NOTHROW(EsacRunner{ok});

    auto bad = ok;
    bad.e = 0.1;  // w = floor(0.6) = 0
    CHECK_THROWS(EsacRunner{bad});

    bad = ok;
    bad.n = 2;
    bad.e = 1.0;  // w = 2, +1 injected slot exceeds n
    CHECK_THROWS(EsacRunner{bad});

    // ...but the same shape is fine with every injection disabled.
    bad.p_sac_initial = 0.0;
    bad.crossover_swap_prob = 0.0;
    CHECK_NOTHROW(EsacRunner{bad});

    bad = ok;
    bad.g = 0;
    CHECK_THROWS(EsacRunner{bad});
    bad = ok;
    bad.p_sac_decay = 1.0;
    CHECK_THROWS(EsacRunner{bad});
    bad = ok;
    bad.sigma = 0.0;
    CHECK_THROWS(EsacRunner{bad});
    bad = ok;
    bad.zeta = -1e-9;
    CHECK_THROWS(EsacRunner{bad});
    bad = ok;
    bad.env_name = "no-such-env";
    CHECK_THROWS(EsacRunner{bad});
}

TEST_CASE("EsacRunner: per-generation accounting with a phase every generation") {
    EsacRunConfig cfg = small_pendulum_config();
    EsacRunner runner(cfg);

    GenerationRecord r1 = runner.run_generation();
    CHECK(r1.generation == 1);
    CHECK(r1.p_sac == 1.0);  // annealed with zero completed phases
    CHECK(r1.sac_phase_ran);
    // One 200-step pendulum episode was collected, then one gradient attempt
    // per collected step; the buffer already holds >= batch_size transitions.
    CHECK(r1.updates_this_gen == 200);
    CHECK(r1.updates_total == 200);
    CHECK(runner.completed_phases() == 1);
    CHECK(runner.mutation_state().history.size() == 1);
    CHECK(r1.sigma == runner.mutation_state().sigma_current);
    CHECK(r1.sigma >= cfg.sigma);  // AMT never shrinks the mutation rate
    CHECK(r1.episodes_total == cfg.n + 1);
    CHECK(r1.env_steps_total >= 200L * (cfg.n + 1));
    CHECK(r1.winner_mean >= r1.mean);  // top-half mean dominates the full mean
    CHECK(r1.best >= r1.winner_mean);
    CHECK(r1.has_validation);

    GenerationRecord r2 = runner.run_generation();
    CHECK(r2.generation == 2);
    CHECK(r2.p_sac == doctest::Approx(cfg.p_sac_decay));  // one phase completed
    CHECK(r2.sac_phase_ran);  // gate draw < 0.5 for this seed; phase ran again
    CHECK(runner.completed_phases() == 2);
    CHECK(r2.sigma >= r1.sigma);
    CHECK(r2.env_steps_total > r1.env_steps_total);
    CHECK(r2.updates_total == r2.updates_this_gen + r1.updates_total);
}

TEST_CASE("EsacRunner: run summary is coherent with the per-generation records") {
    EsacRunConfig cfg = small_pendulum_config();
    cfg.generations = 4;
    cfg.validation_every = 2;
    EsacRunner runner(cfg);
    std::vector<GenerationRecord> recs;
    RunSummary s = runner.run([&](const GenerationRecord& r) { recs.push_back(r); });

    REQUIRE(recs.size() == 4);
    CHECK(s.generations_run == 4);
    double best_fitness = -1e300, best_val = -1e300;
    for (const auto& r : recs) best_fitness = std::max(best_fitness, r.best);
    CHECK(s.incumbent_fitness == best_fitness);
    CHECK(recs[0].has_validation == false);  // gens 2 and 4 validate
    CHECK(recs[1].has_validation);
    CHECK(recs[3].has_validation);
    for (const auto& r : recs)
        if (r.has_validation) best_val = std::max(best_val, r.validation);
    CHECK(s.best_validation == best_val);
    CHECK(s.final_validation == recs[3].validation);
    CHECK(s.total_env_steps == recs[3].env_steps_total);
    CHECK(s.total_updates == recs[3].updates_total);
    CHECK(s.incumbent.values.size() == static_cast<std::size_t>(runner.spec().param_count()));
}

TEST_CASE("EsacRunner: with injections disabled it reduces bitwise to plain ES") {
    EsacRunConfig ec = small_pendulum_config();
    ec.p_sac_initial = 0.0;
    ec.crossover_swap_prob = 0.0;
    ec.generations = 5;
    ec.validation_every = 2;
    ec.n = 8;
    ec.e = 0.5;

    EsRunConfig pc;
    pc.env_name = ec.env_name;
    pc.hidden_dims = ec.hidden_dims;
    pc.n = ec.n;
    pc.sigma = ec.sigma;
    pc.alpha_es = ec.alpha_es;
    pc.episodes_per_offspring = ec.episodes_per_offspring;
    pc.generations = ec.generations;
    pc.validation_every = ec.validation_every;
    pc.master_seed = ec.master_seed;

    std::vector<GenerationRecord> er, pr;
    EsacRunner esac(ec);
    RunSummary es_sum = esac.run([&](const GenerationRecord& r) { er.push_back(r); });
    EsRunner plain(pc);
    RunSummary pl_sum = plain.run([&](const GenerationRecord& r) { pr.push_back(r); });

    REQUIRE(er.size() == pr.size());
    for (size_t i = 0; i < er.size(); ++i) {
        CHECK(er[i].best == pr[i].best);
        CHECK(er[i].mean == pr[i].mean);
        CHECK(er[i].stddev == pr[i].stddev);
        CHECK(er[i].has_validation == pr[i].has_validation);
        if (er[i].has_validation) CHECK(er[i].validation == pr[i].validation);
        CHECK(er[i].updates_total == 0);
        CHECK_FALSE(er[i].sac_phase_ran);
    }
    CHECK(esac.theta_es().values == plain.theta_es().values);
    CHECK(es_sum.incumbent.values == pl_sum.incumbent.values);
    CHECK(es_sum.incumbent_fitness == pl_sum.incumbent_fitness);
    CHECK(es_sum.total_updates == 0);
}

TEST_CASE("EsacRunner: restore resumes a pure-ES run bitwise") {
    EsacRunConfig cfg = small_pendulum_config();
    cfg.p_sac_initial = 0.0;
    cfg.crossover_swap_prob = 0.0;
    cfg.generations = 5;
    cfg.validation_every = 1;

    EsacRunner reference(cfg);
    std::vector<GenerationRecord> full;
    for (int i = 0; i < 5; ++i) full.push_back(reference.run_generation());

    EsacRunner first_half(cfg);
    for (int i = 0; i < 3; ++i) first_half.run_generation();

    EsacRunner resumed(cfg);
    resumed.restore(first_half.theta_es(), first_half.mutation_state(),
                    first_half.next_generation(), first_half.completed_phases(),
                    first_half.incumbent(), first_half.incumbent_fitness());
    CHECK(resumed.next_generation() == 4);
    for (int i = 3; i < 5; ++i) {
        GenerationRecord r = resumed.run_generation();
        CHECK(r.generation == full[i].generation);
        CHECK(r.best == full[i].best);
        CHECK(r.mean == full[i].mean);
        CHECK(r.stddev == full[i].stddev);
        CHECK(r.validation == full[i].validation);
    }
    CHECK(resumed.theta_es().values == reference.theta_es().values);
}
