#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "b2g/building/fleet.hpp"
#include "b2g/grid/analysis.hpp"
#include "b2g/power/power_flow.hpp"

namespace b2g::cosim {

struct SimulationConfig {
    std::size_t horizon_steps = 72;
    double dt_hours = 1.0;
    double start_hour = 0.0;
    double v_ref = 1.0;
    /// Per-bus scaling factors of the voltage-deviation reward, aligned with
    /// net.buses. Empty means `default_alpha` everywhere.
    std::vector<double> alpha;
    /// 1 / 0.1: a 0.1 p.u. deviation zeroes the bus term.
    double default_alpha = 10.0;
    grid::SecurityLimits limits = grid::SecurityLimits::from_tolerance(0.05);
    std::uint64_t seed = 0;
    power::PowerFlowOptions power_flow;

    double alpha_at(std::size_t bus) const { return alpha.empty() ? default_alpha : alpha[bus]; }

    void validate(std::size_t bus_count) const {
        if (horizon_steps == 0) throw ModelError("horizon_steps must be positive");
        if (!(dt_hours > 0.0)) throw ModelError("dt_hours must be positive");
        if (!(v_ref > 0.0)) throw ModelError("v_ref must be positive");
        if (!alpha.empty() && alpha.size() != bus_count) throw ModelError("alpha needs one entry per bus");
        if (!(default_alpha > 0.0)) throw ModelError("alpha values must be positive");
        for (double a : alpha)
            if (!(a > 0.0)) throw ModelError("alpha values must be positive");
        limits.validate();
    }
};

/// Reward penalising voltage deviation across all buses:
/// r = mean_i { V_ref - [alpha_i (V_i - V_ref)]^2 }.
inline double reward(std::span<const double> voltages, const SimulationConfig& config) {
    if (voltages.empty()) throw ModelError("reward needs bus voltages");
    if (!config.alpha.empty() && voltages.size() != config.alpha.size())
        throw ModelError("missing bus voltage: expected " + std::to_string(config.alpha.size()) + " entries");
    double sum = 0.0;
    for (std::size_t i = 0; i < voltages.size(); ++i) {
        if (!std::isfinite(voltages[i])) throw ModelError("missing bus voltage at position " + std::to_string(i));
        const double dev = config.alpha_at(i) * (voltages[i] - config.v_ref);
        sum += config.v_ref - dev * dev;
    }
    return sum / static_cast<double>(voltages.size());
}

/// Reward assigned to a step whose power flow did not converge.
inline constexpr double kDivergedReward = 0.0;

struct Observation {
    std::size_t step = 0;
    double hour_of_day = 0.0;
    double v_ref = 1.0;
    std::vector<double> soc_fraction;  // per building
    std::vector<double> base_load_kw;  // per building, current step
    std::vector<double> pv_kw;         // per building, current step
    std::vector<double> bus_voltages;  // per bus, from the previous solve
    std::vector<std::size_t> building_bus;  // bus position of each building
};

struct StepRecord {
    std::size_t step = 0;
    std::vector<double> bus_voltages;    // p.u.; NaN when diverged
    std::vector<double> line_flows_mva;  // NaN when diverged
    std::vector<double> net_loads_kw;    // per building
    std::vector<double> actions;         // per building, as applied
    double total_p_mw = 0.0;
    double reward = 0.0;
    bool diverged = false;
    int power_flow_iterations = 0;
};

enum class VoltageRegime { over_voltage, under_voltage, nominal };

inline const char* to_string(VoltageRegime r) {
    switch (r) {
        case VoltageRegime::over_voltage: return "over_voltage";
        case VoltageRegime::under_voltage: return "under_voltage";
        case VoltageRegime::nominal: return "nominal";
    }
    return "nominal";
}

/// Over-voltage takes precedence: a step with buses on both sides of the band
/// counts as over-voltage. Diverged records are reported as nominal.
inline VoltageRegime classify_step_voltage_regime(const StepRecord& record, const grid::SecurityLimits& limits) {
    bool over = false, under = false;
    for (double v : record.bus_voltages) {
        if (!std::isfinite(v)) continue;
        over = over || v > limits.v_max;
        under = under || v < limits.v_min;
    }
    if (over) return VoltageRegime::over_voltage;
    if (under) return VoltageRegime::under_voltage;
    return VoltageRegime::nominal;
}

inline VoltageRegime classify_step_voltage_regime(const StepRecord& record, const SimulationConfig& config) {
    return classify_step_voltage_regime(record, config.limits);
}

struct StepOutcome {
    Observation observation;
    double reward = 0.0;
    StepRecord record;
};

/// Building-grid co-simulation over a fixed horizon. Each step applies the
/// building actions, maps the resulting net loads onto buses, solves the power
/// flow and feeds the new voltages back into the next observation.
class CosimEnvironment {
public:
    CosimEnvironment(power::PowerNetwork net, building::Fleet fleet, SimulationConfig config)
        : net_(std::move(net)), fleet_(std::move(fleet)), config_(std::move(config)) {
        power::validate_network(net_);
        config_.validate(net_.bus_count());
        building::validate_fleet(fleet_, net_, config_.horizon_steps);
        building_bus_.assign(fleet_.buildings.size(), net_.slack_index());
        std::vector<bool> mapped(fleet_.buildings.size(), false);
        for (const auto& a : fleet_.mapping) {
            const auto b = fleet_.index_of(a.building);
            if (!mapped[b]) building_bus_[b] = net_.bus_index(a.bus);
            mapped[b] = true;
        }
        reset();
    }

    void reset() {
        step_ = 0;
        states_ = fleet_.initial_states();
        last_voltages_.assign(net_.bus_count(), config_.v_ref);
    }

    bool finished() const { return step_ >= config_.horizon_steps; }
    std::size_t current_step() const { return step_; }
    std::size_t building_count() const { return fleet_.buildings.size(); }

    const power::PowerNetwork& network() const { return net_; }
    const building::Fleet& fleet() const { return fleet_; }
    const SimulationConfig& config() const { return config_; }
    const std::vector<building::BuildingState>& states() const { return states_; }

    Observation observe() const {
        Observation obs;
        obs.step = step_;
        obs.hour_of_day = std::fmod(config_.start_hour + static_cast<double>(step_) * config_.dt_hours, 24.0);
        obs.v_ref = config_.v_ref;
        obs.bus_voltages = last_voltages_;
        obs.building_bus = building_bus_;
        const std::size_t t = std::min(step_, config_.horizon_steps - 1);
        for (std::size_t b = 0; b < fleet_.buildings.size(); ++b) {
            const auto& model = fleet_.buildings[b];
            obs.soc_fraction.push_back(model.battery_capacity_kwh > 0.0 ? states_[b].soc_kwh / model.battery_capacity_kwh
                                                                         : 0.0);
            obs.base_load_kw.push_back(model.base_load_kw[t]);
            obs.pv_kw.push_back(model.pv_kw[t]);
        }
        return obs;
    }

    StepOutcome step(std::span<const double> actions) {
        if (finished()) throw Error("episode already finished");
        if (actions.size() != fleet_.buildings.size())
            throw ModelError("expected " + std::to_string(fleet_.buildings.size()) + " actions");

        StepRecord record;
        record.step = step_;
        record.actions.assign(actions.begin(), actions.end());
        record.net_loads_kw.resize(fleet_.buildings.size());
        for (std::size_t b = 0; b < fleet_.buildings.size(); ++b) {
            const auto r = building::step_building(fleet_.buildings[b], states_[b], actions[b], step_, config_.dt_hours);
            states_[b] = r.state;
            record.net_loads_kw[b] = r.net_load_kw;
        }
        const auto loads = building::aggregate_bus_loads(fleet_, record.net_loads_kw, net_);
        for (const auto& l : loads) record.total_p_mw += l.p_mw;

        const auto pf = power::solve_power_flow(net_, loads, config_.power_flow);
        record.power_flow_iterations = pf.iterations;
        if (pf.converged) {
            record.bus_voltages = pf.magnitudes();
            record.line_flows_mva = pf.line_flows;
            record.reward = reward(record.bus_voltages, config_);
            last_voltages_ = record.bus_voltages;
        } else {
            record.diverged = true;
            record.bus_voltages.assign(net_.bus_count(), std::numeric_limits<double>::quiet_NaN());
            record.line_flows_mva.assign(net_.lines.size(), std::numeric_limits<double>::quiet_NaN());
            record.reward = kDivergedReward;
        }
        ++step_;
        return {observe(), record.reward, std::move(record)};
    }

private:
    power::PowerNetwork net_;
    building::Fleet fleet_;
    SimulationConfig config_;
    std::vector<std::size_t> building_bus_;
    std::vector<building::BuildingState> states_;
    std::vector<double> last_voltages_;
    std::size_t step_ = 0;
};

/// Fixed-width histogram with explicit out-of-range and invalid counters.
struct Histogram {
    double lower = 0.0;
    double width = 1.0;
    std::vector<std::size_t> counts;
    std::size_t underflow = 0;
    std::size_t overflow = 0;
    std::size_t invalid = 0;

    Histogram() = default;
    Histogram(double lo, double w, std::size_t bins) : lower(lo), width(w), counts(bins, 0) {}

    double upper() const { return lower + width * static_cast<double>(counts.size()); }
    double bin_lower(std::size_t i) const { return lower + width * static_cast<double>(i); }

    void add(double x) {
        if (!std::isfinite(x)) {
            ++invalid;
        } else if (x < lower) {
            ++underflow;
        } else {
            const auto bin = static_cast<std::size_t>(std::floor((x - lower) / width));
            if (bin >= counts.size()) ++overflow;
            else ++counts[bin];
        }
    }

    std::size_t in_range() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }
    std::size_t total() const { return in_range() + underflow + overflow + invalid; }

    /// Share of all samples falling in the bin that contains `x`.
    double fraction_at(double x) const {
        const auto n = total();
        if (n == 0 || x < lower || x >= upper()) return 0.0;
        return static_cast<double>(counts[static_cast<std::size_t>(std::floor((x - lower) / width))]) /
               static_cast<double>(n);
    }
};

/// Net-load bins of 2 kW over [-3, 13).
inline Histogram make_net_load_histogram() { return Histogram(-3.0, 2.0, 8); }
/// Voltage-magnitude bins of 0.01 p.u. over [0.6, 1.4).
inline Histogram make_voltage_histogram() { return Histogram(0.6, 0.01, 80); }

struct EpisodeKpis {
    double mean_voltage = 0.0;
    double min_voltage = 0.0;
    double max_voltage = 0.0;
    double voltage_std = 0.0;            // over all buses and steps
    double voltage_deviation_rms = 0.0;  // sqrt(mean (V - V_ref)^2)
    double cumulative_reward = 0.0;
    std::size_t over_voltage_steps = 0;
    std::size_t under_voltage_steps = 0;
    std::size_t bus_voltage_violations = 0;  // bus-steps outside the band
    std::size_t line_loading_violations = 0; // line-steps above the threshold
    std::size_t diverged_steps = 0;
    std::vector<double> mean_voltage_series;  // network mean per step
    Histogram voltage_histogram = make_voltage_histogram();
    Histogram net_load_over = make_net_load_histogram();
    Histogram net_load_under = make_net_load_histogram();
    Histogram net_load_nominal = make_net_load_histogram();
};

struct EpisodeTrace {
    std::vector<StepRecord> records;
    EpisodeKpis kpis;
};

inline EpisodeKpis compute_kpis(const std::vector<StepRecord>& records, const power::PowerNetwork& net,
                                const SimulationConfig& config) {
    EpisodeKpis k;
    double sum = 0.0, sum_sq = 0.0, dev_sq = 0.0;
    std::size_t n = 0;
    k.min_voltage = std::numeric_limits<double>::infinity();
    k.max_voltage = -std::numeric_limits<double>::infinity();
    for (const auto& r : records) {
        k.cumulative_reward += r.reward;
        const auto regime = classify_step_voltage_regime(r, config);
        k.over_voltage_steps += regime == VoltageRegime::over_voltage;
        k.under_voltage_steps += regime == VoltageRegime::under_voltage;
        auto& hist = regime == VoltageRegime::over_voltage    ? k.net_load_over
                     : regime == VoltageRegime::under_voltage ? k.net_load_under
                                                              : k.net_load_nominal;
        for (double p : r.net_loads_kw) hist.add(p);
        for (double v : r.bus_voltages) k.voltage_histogram.add(v);
        if (r.diverged) {
            ++k.diverged_steps;
            k.mean_voltage_series.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        double step_sum = 0.0;
        for (double v : r.bus_voltages) {
            step_sum += v;
            sum += v;
            sum_sq += v * v;
            dev_sq += (v - config.v_ref) * (v - config.v_ref);
            ++n;
            k.min_voltage = std::min(k.min_voltage, v);
            k.max_voltage = std::max(k.max_voltage, v);
            k.bus_voltage_violations += v < config.limits.v_min || v > config.limits.v_max;
        }
        k.mean_voltage_series.push_back(step_sum / static_cast<double>(r.bus_voltages.size()));
        for (std::size_t l = 0; l < net.lines.size(); ++l) {
            if (!net.lines[l].in_service) continue;
            k.line_loading_violations += r.line_flows_mva[l] > config.limits.loading_threshold * net.lines[l].rating_mva;
        }
    }
    if (n > 0) {
        k.mean_voltage = sum / static_cast<double>(n);
        k.voltage_std = std::sqrt(std::max(0.0, sum_sq / static_cast<double>(n) - k.mean_voltage * k.mean_voltage));
        k.voltage_deviation_rms = std::sqrt(dev_sq / static_cast<double>(n));
    } else {
        k.min_voltage = k.max_voltage = std::numeric_limits<double>::quiet_NaN();
    }
    return k;
}

/// Resets the environment and runs one full episode under `policy`, which
/// must provide `std::vector<double> act(const Observation&)`.
template <class Policy>
EpisodeTrace run_episode(CosimEnvironment& env, Policy&& policy) {
    env.reset();
    EpisodeTrace trace;
    trace.records.reserve(env.config().horizon_steps);
    Observation obs = env.observe();
    while (!env.finished()) {
        const std::vector<double> actions = policy.act(obs);
        auto outcome = env.step(actions);
        obs = std::move(outcome.observation);
        trace.records.push_back(std::move(outcome.record));
    }
    trace.kpis = compute_kpis(trace.records, env.network(), env.config());
    return trace;
}

}  // namespace b2g::cosim
