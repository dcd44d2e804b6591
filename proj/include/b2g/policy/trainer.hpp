#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "b2g/policy/droop.hpp"

namespace b2g::policy {

/// Cross-entropy search over (deadband_pu, slope). Each iteration samples a
/// fresh population from a diagonal Gaussian, scores every candidate by its
/// mean cumulative reward, and refits the Gaussian to the elite set. Elites
/// survive into the next iteration with their cached scores.
struct TrainerConfig {
    int population_size = 16;
    double elite_fraction = 0.25;
    int iterations = 10;
    int episodes_per_candidate = 1;
    std::uint64_t seed = 1;

    PolicyParams initial{0.01, 10.0, ControlMode::decentralized};
    double initial_std_deadband = 0.01;
    double initial_std_slope = 15.0;
    double max_deadband = 0.1;
    double max_slope = 100.0;
    double min_std_deadband = 1e-4;
    double min_std_slope = 0.05;
    /// Worker threads for candidate evaluation; 0 uses hardware concurrency.
    unsigned threads = 1;

    int elite_count() const {
        return std::max(1, static_cast<int>(std::floor(elite_fraction * population_size)));
    }

    void validate() const {
        if (population_size < 2) throw ModelError("population_size must be >= 2");
        if (!(elite_fraction > 0.0 && elite_fraction < 1.0)) throw ModelError("elite_fraction must lie in (0, 1)");
        if (iterations < 1) throw ModelError("iterations must be >= 1");
        if (episodes_per_candidate < 1) throw ModelError("episodes_per_candidate must be >= 1");
        if (!(max_deadband >= 0.0 && max_slope >= 0.0)) throw ModelError("parameter bounds must be >= 0");
        initial.validate();
    }
};

struct TrainerWarning {
    int iteration = 0;
    int candidate = 0;
    std::string message;
};

struct ScoredParams {
    PolicyParams params;
    double score = 0.0;
};

struct TrainingResult {
    PolicyParams best;
    double best_score = -std::numeric_limits<double>::infinity();
    double initial_score = 0.0;  // score of the initial mean
    std::vector<double> elite_mean_history;  // one entry per iteration
    std::vector<TrainerWarning> warnings;
    int evaluations = 0;
};

/// Total reward of one episode of `params` in `env`. The environment needs
/// reset(), observe(), finished() and step(actions) returning an object with
/// `observation` and `reward` members.
template <class Env>
double rollout(Env& env, const PolicyParams& params) {
    env.reset();
    auto obs = env.observe();
    double total = 0.0;
    while (!env.finished()) {
        auto outcome = env.step(act(params, obs));
        total += outcome.reward;
        obs = std::move(outcome.observation);
    }
    return total;
}

/// Mean episode reward over `episodes` environments made by `make_env(seed)`.
/// Every candidate sees the same seeds.
template <class EnvFactory>
double evaluate_params(EnvFactory& make_env, const PolicyParams& params, int episodes, std::uint64_t seed) {
    double sum = 0.0;
    for (int e = 0; e < episodes; ++e) {
        auto env = make_env(seed + static_cast<std::uint64_t>(e));
        sum += rollout(env, params);
    }
    return sum / episodes;
}

template <class EnvFactory>
TrainingResult train(EnvFactory&& make_env, const TrainerConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::uint64_t episode_seed = config.seed * 1000003ULL;
    const int n_elite = config.elite_count();

    double mean_db = config.initial.deadband_pu, mean_slope = config.initial.slope;
    double std_db = config.initial_std_deadband, std_slope = config.initial_std_slope;
    unsigned workers = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;

    TrainingResult result;
    auto score_all = [&](const std::vector<PolicyParams>& cands) {
        std::vector<double> scores(cands.size());
        auto run_range = [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i)
                scores[i] = evaluate_params(make_env, cands[i], config.episodes_per_candidate, episode_seed);
        };
        const unsigned w = std::min<unsigned>(workers, static_cast<unsigned>(cands.size()));
        if (w <= 1) {
            run_range(0, cands.size());
        } else {
            std::vector<std::future<void>> jobs;
            const std::size_t chunk = (cands.size() + w - 1) / w;
            for (std::size_t b = 0; b < cands.size(); b += chunk)
                jobs.push_back(std::async(std::launch::async, run_range, b, std::min(cands.size(), b + chunk)));
            for (auto& j : jobs) j.get();
        }
        result.evaluations += static_cast<int>(cands.size());
        return scores;
    };

    result.initial_score = score_all({config.initial}).front();
    std::vector<ScoredParams> elites;
    if (std::isfinite(result.initial_score)) elites.push_back({config.initial, result.initial_score});
    else result.warnings.push_back({0, -1, "initial params produced a non-finite reward"});

    for (int it = 0; it < config.iterations; ++it) {
        std::vector<PolicyParams> population;
        for (int i = 0; i < config.population_size; ++i) {
            PolicyParams p = config.initial;
            p.deadband_pu = std::clamp(mean_db + std_db * normal(rng), 0.0, config.max_deadband);
            p.slope = std::clamp(mean_slope + std_slope * normal(rng), 0.0, config.max_slope);
            population.push_back(p);
        }
        const auto scores = score_all(population);

        std::vector<ScoredParams> pool = elites;
        for (std::size_t i = 0; i < population.size(); ++i) {
            if (!std::isfinite(scores[i])) {
                result.warnings.push_back({it, static_cast<int>(i), "non-finite reward; candidate discarded"});
                continue;
            }
            pool.push_back({population[i], scores[i]});
        }
        if (pool.empty()) continue;
        std::stable_sort(pool.begin(), pool.end(),
                         [](const ScoredParams& a, const ScoredParams& b) { return a.score > b.score; });
        pool.resize(std::min<std::size_t>(pool.size(), static_cast<std::size_t>(n_elite)));
        elites = pool;

        double m_db = 0.0, m_sl = 0.0, m_score = 0.0;
        for (const auto& e : elites) {
            m_db += e.params.deadband_pu;
            m_sl += e.params.slope;
            m_score += e.score;
        }
        const double n = static_cast<double>(elites.size());
        m_db /= n;
        m_sl /= n;
        double v_db = 0.0, v_sl = 0.0;
        for (const auto& e : elites) {
            v_db += (e.params.deadband_pu - m_db) * (e.params.deadband_pu - m_db);
            v_sl += (e.params.slope - m_sl) * (e.params.slope - m_sl);
        }
        mean_db = m_db;
        mean_slope = m_sl;
        std_db = std::max(config.min_std_deadband, std::sqrt(v_db / n));
        std_slope = std::max(config.min_std_slope, std::sqrt(v_sl / n));
        result.elite_mean_history.push_back(m_score / n);
    }

    if (elites.empty()) throw Error("trainer found no candidate with a finite reward");
    result.best = elites.front().params;
    result.best_score = elites.front().score;
    return result;
}

}  // namespace b2g::policy
