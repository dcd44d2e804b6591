#pragma once

#include <complex>
#include <string>

#include <Eigen/Dense>

#include "b2g/power/network.hpp"

namespace b2g::power {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Series admittance of a line in per-unit on (base_mva, nominal_kv).
inline Complex line_admittance_pu(const PowerNetwork& net, const Line& line) {
    const Complex z_ohm(line.r_ohm, line.x_ohm);
    if (std::abs(z_ohm) == 0.0)
        throw ModelError("degenerate branch: line " + std::to_string(line.id) + " has zero impedance");
    const double z_base = net.base_impedance_ohm(net.bus_index(line.from_bus));
    return 1.0 / (z_ohm / z_base);
}

/// Admittance of a shunt in per-unit. Consumer convention: S = conj(Y) |V|^2.
inline Complex shunt_admittance_pu(const PowerNetwork& net, const Shunt& shunt) {
    return Complex(0.0, -shunt.q_mvar / net.base_mva);
}

/// Nodal admittance matrix over all buses, positions as in net.buses.
/// Only in-service lines contribute; shunts are added on the diagonal unless
/// `include_shunts` is false.
inline ComplexMatrix assemble_ybus(const PowerNetwork& net, bool include_shunts = true) {
    const auto n = static_cast<Eigen::Index>(net.bus_count());
    ComplexMatrix y = ComplexMatrix::Zero(n, n);
    for (const auto& line : net.lines) {
        if (!line.in_service) continue;
        const auto yl = line_admittance_pu(net, line);
        const auto i = static_cast<Eigen::Index>(net.bus_index(line.from_bus));
        const auto j = static_cast<Eigen::Index>(net.bus_index(line.to_bus));
        y(i, i) += yl;
        y(j, j) += yl;
        y(i, j) -= yl;
        y(j, i) -= yl;
    }
    if (include_shunts) {
        for (const auto& shunt : net.shunts) {
            const auto i = static_cast<Eigen::Index>(net.bus_index(shunt.bus));
            y(i, i) += shunt_admittance_pu(net, shunt);
        }
    }
    return y;
}

}  // namespace b2g::power
