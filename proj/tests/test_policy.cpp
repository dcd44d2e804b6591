#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "b2g/building/profiles.hpp"
#include "b2g/cosim/engine.hpp"
#include "b2g/policy/droop.hpp"
#include "b2g/policy/trainer.hpp"
#include "b2g/power/network_io.hpp"

using namespace b2g;
using namespace b2g::policy;

namespace {

cosim::Observation make_obs(std::vector<double> volts, std::vector<std::size_t> bus_of, double v_ref = 1.0) {
    cosim::Observation o;
    o.v_ref = v_ref;
    o.bus_voltages = std::move(volts);
    o.building_bus = std::move(bus_of);
    return o;
}

// One step, two buildings sitting at fixed deviations above the reference.
// The reward peaks when the actions hit the two targets exactly.
struct TargetEnv {
    double d0 = 0.03, d1 = 0.05, t0 = 0.4, t1 = 0.8;
    bool done = false;
    double bias = 0.0;

    struct Outcome {
        cosim::Observation observation;
        double reward;
    };

    void reset() { done = false; }
    bool finished() const { return done; }
    cosim::Observation observe() const { return make_obs({1.0, 1.0 + d0, 1.0 + d1}, {1, 2}); }
    Outcome step(const std::vector<double>& a) {
        done = true;
        const double r = bias - (a[0] - t0) * (a[0] - t0) - (a[1] - t1) * (a[1] - t1);
        return {observe(), r};
    }
};

struct FlatEnv : TargetEnv {
    Outcome step(const std::vector<double>&) {
        done = true;
        return {observe(), 1.0};
    }
};

struct NanEnv : TargetEnv {
    Outcome step(const std::vector<double>& a) {
        auto out = TargetEnv::step(a);
        if (a[1] > 0.9) out.reward = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
};

double grid_search_best(TargetEnv env, double max_db, double max_slope) {
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 400; ++i) {
        for (int j = 0; j <= 400; ++j) {
            PolicyParams p{max_db * i / 400.0, max_slope * j / 400.0, ControlMode::decentralized};
            best = std::max(best, rollout(env, p));
        }
    }
    return best;
}

cosim::SimulationConfig horizon(std::size_t n) {
    cosim::SimulationConfig c;
    c.horizon_steps = n;
    return c;
}

}  // namespace

TEST(Droop, ExampleActions) {
    const PolicyParams p{0.01, 20.0, ControlMode::decentralized};
    const auto obs = make_obs({1.0, 1.005, 1.03, 0.95, 1.2}, {1, 2, 3, 4});
    const auto a = act(p, obs);
    ASSERT_EQ(a.size(), 4u);
    EXPECT_DOUBLE_EQ(a[0], 0.0);
    EXPECT_NEAR(a[1], 0.4, 1e-12);
    EXPECT_NEAR(a[2], -0.8, 1e-12);
    EXPECT_DOUBLE_EQ(a[3], 1.0);
}

TEST(Droop, DeadbandEdges) {
    EXPECT_DOUBLE_EQ(deadbanded(0.01, 0.01), 0.0);
    EXPECT_DOUBLE_EQ(deadbanded(-0.01, 0.01), 0.0);
    EXPECT_NEAR(deadbanded(0.02, 0.01), 0.01, 1e-15);
    EXPECT_NEAR(deadbanded(-0.02, 0.01), -0.01, 1e-15);
}

TEST(Droop, AntisymmetricBoundedAndStateless) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dev(-0.2, 0.2), db(0.0, 0.1), sl(0.0, 200.0);
    for (int trial = 0; trial < 500; ++trial) {
        const PolicyParams p{db(rng), sl(rng), ControlMode::decentralized};
        const double d = dev(rng);
        const auto up = act(p, make_obs({1.0, 1.0 + d}, {1}));
        const auto down = act(p, make_obs({1.0, 1.0 - d}, {1}));
        EXPECT_NEAR(up[0], -down[0], 1e-12);
        EXPECT_LE(std::abs(up[0]), 1.0);
        if (std::abs(d) <= p.deadband_pu) {
            EXPECT_EQ(up[0], 0.0);
        }
        EXPECT_EQ(act(p, make_obs({1.0, 1.0 + d}, {1})), up);
    }
}

TEST(Droop, ModesCoincideOnASharedBus) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> v(0.9, 1.1);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> volts(33);
        for (auto& x : volts) x = v(rng);
        const std::size_t bus = 1 + rng() % 32;
        const auto obs = make_obs(volts, std::vector<std::size_t>(7, bus));
        PolicyParams c{0.005, 30.0, ControlMode::centralized}, d = c;
        d.mode = ControlMode::decentralized;
        EXPECT_EQ(act(c, obs), act(d, obs));
    }
}

TEST(Droop, CentralizedUsesHostedBusMean) {
    const auto obs = make_obs({1.0, 1.04, 1.0, 0.98}, {1, 1, 3});
    EXPECT_NEAR(hosted_mean_voltage(obs), 1.01, 1e-15);
    const auto a = act({0.0, 10.0, ControlMode::centralized}, obs);
    for (double x : a) EXPECT_NEAR(x, 0.1, 1e-12);
}

TEST(Droop, NoControlIsZero) {
    const auto a = NoControlPolicy{}.act(make_obs({1.0, 1.2}, {1, 1, 1}));
    EXPECT_EQ(a, std::vector<double>(3, 0.0));
}

TEST(Params, JsonRoundTrip) {
    const PolicyParams p{0.0123456789, 17.25, ControlMode::centralized};
    const auto back = params_from_json(params_to_json(p));
    EXPECT_EQ(back.deadband_pu, p.deadband_pu);
    EXPECT_EQ(back.slope, p.slope);
    EXPECT_EQ(back.mode, p.mode);

    const auto path = std::filesystem::temp_directory_path() / "b2g_policy_roundtrip.json";
    save_params(p, path);
    const auto loaded = load_params(path);
    EXPECT_EQ(loaded.slope, p.slope);
    std::filesystem::remove(path);
}

TEST(Params, RejectsBadDocuments) {
    auto j = params_to_json({});
    j["extra"] = 1;
    EXPECT_THROW(params_from_json(j), FormatError);
    j = params_to_json({});
    j["mode"] = "hybrid";
    EXPECT_THROW(params_from_json(j), FormatError);
    j = params_to_json({});
    j["slope"] = -1.0;
    EXPECT_THROW(params_from_json(j), ModelError);
    j = params_to_json({});
    j["format"] = "b2g-policy/9";
    EXPECT_THROW(params_from_json(j), FormatError);
}

TEST(Trainer, ConfigValidation) {
    TrainerConfig c;
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.elite_count(), 4);
    c.population_size = 1;
    EXPECT_THROW(c.validate(), ModelError);
    c = {};
    c.elite_fraction = 1.0;
    EXPECT_THROW(c.validate(), ModelError);
    c = {};
    c.iterations = 0;
    EXPECT_THROW(c.validate(), ModelError);
}

TEST(Trainer, FlatObjectiveKeepsFlatHistory) {
    TrainerConfig c;
    c.iterations = 5;
    const auto res = train([](std::uint64_t) { return FlatEnv{}; }, c);
    ASSERT_EQ(res.elite_mean_history.size(), 5u);
    for (double m : res.elite_mean_history) EXPECT_EQ(m, 1.0);
    EXPECT_EQ(res.best.deadband_pu, c.initial.deadband_pu);
    EXPECT_EQ(res.best.slope, c.initial.slope);
    EXPECT_EQ(res.evaluations, 1 + 5 * c.population_size);
}

TEST(Trainer, FindsAnalyticOptimum) {
    TrainerConfig c;
    c.iterations = 40;
    c.population_size = 32;
    c.initial = {0.03, 5.0, ControlMode::decentralized};
    const auto res = train([](std::uint64_t) { return TargetEnv{}; }, c);
    const double oracle = grid_search_best(TargetEnv{}, c.max_deadband, c.max_slope);
    EXPECT_NEAR(oracle, 0.0, 1e-3);
    EXPECT_GE(res.best_score, oracle - 1e-3);
    EXPECT_NEAR(res.best.deadband_pu, 0.01, 2e-3);
    EXPECT_NEAR(res.best.slope, 20.0, 2.0);
    EXPECT_GT(res.best_score, res.initial_score);
}

TEST(Trainer, EliteMeanNeverDecreases) {
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        TrainerConfig c;
        c.seed = seed;
        c.iterations = 15;
        c.population_size = 8;
        const auto res = train([](std::uint64_t) { return TargetEnv{}; }, c);
        for (std::size_t i = 1; i < res.elite_mean_history.size(); ++i)
            EXPECT_GE(res.elite_mean_history[i], res.elite_mean_history[i - 1]);
    }
}

TEST(Trainer, NonFiniteRewardsAreWarnedAndDiscarded) {
    TrainerConfig c;
    c.iterations = 10;
    c.initial = {0.0, 50.0, ControlMode::decentralized};
    c.initial_std_slope = 30.0;
    const auto res = train([](std::uint64_t) { return NanEnv{}; }, c);
    EXPECT_FALSE(res.warnings.empty());
    EXPECT_TRUE(std::isfinite(res.best_score));
    for (double m : res.elite_mean_history) EXPECT_TRUE(std::isfinite(m));
}

TEST(Trainer, AllNonFiniteThrows) {
    struct AlwaysNan : TargetEnv {
        Outcome step(const std::vector<double>&) {
            done = true;
            return {observe(), std::numeric_limits<double>::quiet_NaN()};
        }
    };
    TrainerConfig c;
    c.iterations = 2;
    EXPECT_THROW(train([](std::uint64_t) { return AlwaysNan{}; }, c), Error);
}

TEST(Trainer, ThreadCountDoesNotChangeResult) {
    const auto net = power::build_ieee33();
    auto opts = building::SyntheticFleetOptions::high_pv();
    opts.horizon_steps = 24;
    const auto fleet = building::synthesize_fleet(net, opts);
    auto make = [&](std::uint64_t) { return cosim::CosimEnvironment(net, fleet, horizon(24)); };
    TrainerConfig c;
    c.iterations = 3;
    c.population_size = 8;
    const auto serial = train(make, c);
    c.threads = 4;
    const auto parallel = train(make, c);
    EXPECT_EQ(serial.best.deadband_pu, parallel.best.deadband_pu);
    EXPECT_EQ(serial.best.slope, parallel.best.slope);
    EXPECT_EQ(serial.elite_mean_history, parallel.elite_mean_history);
}

TEST(Trainer, TrainedDroopBeatsNoControlOnHighPv) {
    const auto net = power::build_ieee33();
    const auto fleet = building::synthesize_fleet(net, building::SyntheticFleetOptions::high_pv());
    auto make = [&](std::uint64_t) { return cosim::CosimEnvironment(net, fleet, horizon(72)); };
    TrainerConfig c;
    c.iterations = 6;
    c.threads = 0;
    const auto res = train(make, c);

    auto env = make(0);
    const auto base = cosim::run_episode(env, NoControlPolicy{});
    const auto ctl = cosim::run_episode(env, DroopPolicy{res.best});
    EXPECT_GT(ctl.kpis.cumulative_reward, base.kpis.cumulative_reward);
    EXPECT_LT(ctl.kpis.voltage_std, base.kpis.voltage_std);
    EXPECT_LE(ctl.kpis.over_voltage_steps, base.kpis.over_voltage_steps);
}
