#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "b2g/power/network.hpp"
#include "b2g/power/ybus.hpp"

namespace b2g::power {

/// Raised when some buses cannot be reached from the slack bus.
class IslandedError : public ModelError {
public:
    explicit IslandedError(std::vector<int> buses)
        : ModelError(make_message(buses)), buses_(std::move(buses)) {}

    const std::vector<int>& buses() const { return buses_; }

private:
    static std::string make_message(const std::vector<int>& buses) {
        std::string msg = "islanded bus set:";
        for (int b : buses) msg += " " + std::to_string(b);
        return msg;
    }
    std::vector<int> buses_;
};

struct PowerFlowOptions {
    double tolerance = 1e-8;  // max |dP|, |dQ| in p.u.
    int max_iterations = 50;
};

struct PowerFlowResult {
    std::vector<Complex> voltages;   // p.u., aligned with net.buses
    std::vector<double> line_flows;  // MVA, max of both ends, aligned with net.lines
    bool converged = false;
    int iterations = 0;
    double max_mismatch = 0.0;
    Complex slack_power_mva{0.0, 0.0};  // injection from the external grid
    Complex losses_mva{0.0, 0.0};

    double vm(std::size_t bus_idx) const { return std::abs(voltages[bus_idx]); }

    std::vector<double> magnitudes() const {
        std::vector<double> out(voltages.size());
        std::transform(voltages.begin(), voltages.end(), out.begin(), [](Complex v) { return std::abs(v); });
        return out;
    }
};

namespace detail {

inline void fill_flows(const PowerNetwork& net, const ComplexVector& v, PowerFlowResult& result) {
    result.voltages.assign(v.data(), v.data() + v.size());
    result.line_flows.assign(net.lines.size(), 0.0);
    Complex losses{0.0, 0.0};
    for (std::size_t k = 0; k < net.lines.size(); ++k) {
        const auto& line = net.lines[k];
        if (!line.in_service) continue;
        const auto y = line_admittance_pu(net, line);
        const auto vi = v(static_cast<Eigen::Index>(net.bus_index(line.from_bus)));
        const auto vj = v(static_cast<Eigen::Index>(net.bus_index(line.to_bus)));
        const Complex s_ij = vi * std::conj((vi - vj) * y) * net.base_mva;
        const Complex s_ji = vj * std::conj((vj - vi) * y) * net.base_mva;
        result.line_flows[k] = std::max(std::abs(s_ij), std::abs(s_ji));
        losses += s_ij + s_ji;
    }
    result.losses_mva = losses;
}

}  // namespace detail

/// Newton-Raphson AC power flow in polar coordinates from a flat start.
/// Loads are constant power in MW/MVAr, aligned with net.buses. A solve that
/// fails to reach `tolerance` is reported through `converged == false`.
inline PowerFlowResult solve_power_flow(const PowerNetwork& net, const BusLoads& loads,
                                        const PowerFlowOptions& options = {}) {
    validate_network(net);
    if (loads.size() != net.bus_count())
        throw ModelError("load vector has " + std::to_string(loads.size()) + " entries for " +
                         std::to_string(net.bus_count()) + " buses");
    if (auto island = islanded_buses(net); !island.empty()) throw IslandedError(std::move(island));

    const auto n = static_cast<Eigen::Index>(net.bus_count());
    const auto slack = static_cast<Eigen::Index>(net.slack_index());
    const ComplexMatrix ybus = assemble_ybus(net);

    std::vector<Eigen::Index> pq;
    pq.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i != slack) pq.push_back(i);
    }
    const auto m = static_cast<Eigen::Index>(pq.size());

    ComplexVector s_spec(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& load = loads[static_cast<std::size_t>(i)];
        s_spec(i) = -Complex(load.p_mw, load.q_mvar) / net.base_mva;
    }

    Eigen::VectorXd va = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd vm = Eigen::VectorXd::Ones(n);
    vm(slack) = net.external_grid.v_setpoint_pu;

    auto build_v = [&] {
        ComplexVector v(n);
        for (Eigen::Index i = 0; i < n; ++i) v(i) = std::polar(vm(i), va(i));
        return v;
    };

    PowerFlowResult result;
    ComplexVector v = build_v();
    Eigen::VectorXd mismatch(2 * m);

    auto evaluate_mismatch = [&](const ComplexVector& volts) {
        const ComplexVector current = ybus * volts;
        double worst = 0.0;
        for (Eigen::Index k = 0; k < m; ++k) {
            const auto i = pq[static_cast<std::size_t>(k)];
            const Complex s = volts(i) * std::conj(current(i)) - s_spec(i);
            mismatch(k) = s.real();
            mismatch(m + k) = s.imag();
            worst = std::max({worst, std::abs(s.real()), std::abs(s.imag())});
        }
        return worst;
    };

    result.max_mismatch = evaluate_mismatch(v);
    while (true) {
        if (!std::isfinite(result.max_mismatch)) break;
        if (result.max_mismatch <= options.tolerance) {
            result.converged = true;
            break;
        }
        if (result.iterations >= options.max_iterations || result.max_mismatch > 1e8) break;

        // dS/dVa = j diag(V) conj(diag(I) - Y diag(V)),
        // dS/dVm = diag(V) conj(Y diag(V/|V|)) + conj(diag(I)) diag(V/|V|)
        const ComplexVector current = ybus * v;
        Eigen::MatrixXd jac(2 * m, 2 * m);
        for (Eigen::Index r = 0; r < m; ++r) {
            const auto i = pq[static_cast<std::size_t>(r)];
            for (Eigen::Index c = 0; c < m; ++c) {
                const auto k = pq[static_cast<std::size_t>(c)];
                const Complex vk_unit = v(k) / vm(k);
                Complex ds_dva = Complex(0.0, 1.0) * v(i) * std::conj(-ybus(i, k) * v(k));
                Complex ds_dvm = v(i) * std::conj(ybus(i, k) * vk_unit);
                if (i == k) {
                    ds_dva += Complex(0.0, 1.0) * v(i) * std::conj(current(i));
                    ds_dvm += std::conj(current(i)) * vk_unit;
                }
                jac(r, c) = ds_dva.real();
                jac(r, m + c) = ds_dvm.real();
                jac(m + r, c) = ds_dva.imag();
                jac(m + r, m + c) = ds_dvm.imag();
            }
        }
        const Eigen::VectorXd dx = jac.partialPivLu().solve(-mismatch);
        for (Eigen::Index k = 0; k < m; ++k) {
            const auto i = pq[static_cast<std::size_t>(k)];
            va(i) += dx(k);
            vm(i) += dx(m + k);
        }
        ++result.iterations;
        v = build_v();
        result.max_mismatch = evaluate_mismatch(v);
    }

    const ComplexVector current = ybus * v;
    result.slack_power_mva = v(slack) * std::conj(current(slack)) * net.base_mva;
    detail::fill_flows(net, v, result);
    return result;
}

}  // namespace b2g::power
