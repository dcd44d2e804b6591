#pragma once

#include <string_view>

namespace b2g::power {

/// Baran & Wu 33-bus radial feeder (12.66 kV) in the network file format.
/// Line ratings are not part of the published data; a uniform 6 MVA is used.
/// Source impedance corresponds to a 1000 MVA short-circuit level, R/X = 0.1.
inline constexpr std::string_view ieee33_network_text = R"json({
  "format": "b2g-network/1",
  "shunt_q_sign": "consumer",
  "name": "ieee33",
  "base_mva": 10.0,
  "external_grid": {"bus": 1, "v_setpoint_pu": 1.0, "source_r_ohm": 0.015948, "source_x_ohm": 0.159480},
  "buses": [
    {"id": 1, "kind": "slack", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 2, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 3, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 4, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 5, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 6, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 7, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 8, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 9, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 10, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 11, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 12, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 13, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 14, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 15, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 16, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 17, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 18, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 19, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 20, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 21, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 22, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 23, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 24, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 25, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 26, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 27, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 28, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 29, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 30, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 31, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 32, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1},
    {"id": 33, "kind": "load", "nominal_kv": 12.66, "v_min": 0.9, "v_max": 1.1}
  ],
  "lines": [
    {"id": 1, "from_bus": 1, "to_bus": 2, "r_ohm": 0.0922, "x_ohm": 0.0470, "rating_mva": 6.0, "in_service": true},
    {"id": 2, "from_bus": 2, "to_bus": 3, "r_ohm": 0.4930, "x_ohm": 0.2511, "rating_mva": 6.0, "in_service": true},
    {"id": 3, "from_bus": 3, "to_bus": 4, "r_ohm": 0.3660, "x_ohm": 0.1864, "rating_mva": 6.0, "in_service": true},
    {"id": 4, "from_bus": 4, "to_bus": 5, "r_ohm": 0.3811, "x_ohm": 0.1941, "rating_mva": 6.0, "in_service": true},
    {"id": 5, "from_bus": 5, "to_bus": 6, "r_ohm": 0.8190, "x_ohm": 0.7070, "rating_mva": 6.0, "in_service": true},
    {"id": 6, "from_bus": 6, "to_bus": 7, "r_ohm": 0.1872, "x_ohm": 0.6188, "rating_mva": 6.0, "in_service": true},
    {"id": 7, "from_bus": 7, "to_bus": 8, "r_ohm": 0.7114, "x_ohm": 0.2351, "rating_mva": 6.0, "in_service": true},
    {"id": 8, "from_bus": 8, "to_bus": 9, "r_ohm": 1.0300, "x_ohm": 0.7400, "rating_mva": 6.0, "in_service": true},
    {"id": 9, "from_bus": 9, "to_bus": 10, "r_ohm": 1.0440, "x_ohm": 0.7400, "rating_mva": 6.0, "in_service": true},
    {"id": 10, "from_bus": 10, "to_bus": 11, "r_ohm": 0.1966, "x_ohm": 0.0650, "rating_mva": 6.0, "in_service": true},
    {"id": 11, "from_bus": 11, "to_bus": 12, "r_ohm": 0.3744, "x_ohm": 0.1238, "rating_mva": 6.0, "in_service": true},
    {"id": 12, "from_bus": 12, "to_bus": 13, "r_ohm": 1.4680, "x_ohm": 1.1550, "rating_mva": 6.0, "in_service": true},
    {"id": 13, "from_bus": 13, "to_bus": 14, "r_ohm": 0.5416, "x_ohm": 0.7129, "rating_mva": 6.0, "in_service": true},
    {"id": 14, "from_bus": 14, "to_bus": 15, "r_ohm": 0.5910, "x_ohm": 0.5260, "rating_mva": 6.0, "in_service": true},
    {"id": 15, "from_bus": 15, "to_bus": 16, "r_ohm": 0.7463, "x_ohm": 0.5450, "rating_mva": 6.0, "in_service": true},
    {"id": 16, "from_bus": 16, "to_bus": 17, "r_ohm": 1.2890, "x_ohm": 1.7210, "rating_mva": 6.0, "in_service": true},
    {"id": 17, "from_bus": 17, "to_bus": 18, "r_ohm": 0.7320, "x_ohm": 0.5740, "rating_mva": 6.0, "in_service": true},
    {"id": 18, "from_bus": 2, "to_bus": 19, "r_ohm": 0.1640, "x_ohm": 0.1565, "rating_mva": 6.0, "in_service": true},
    {"id": 19, "from_bus": 19, "to_bus": 20, "r_ohm": 1.5042, "x_ohm": 1.3554, "rating_mva": 6.0, "in_service": true},
    {"id": 20, "from_bus": 20, "to_bus": 21, "r_ohm": 0.4095, "x_ohm": 0.4784, "rating_mva": 6.0, "in_service": true},
    {"id": 21, "from_bus": 21, "to_bus": 22, "r_ohm": 0.7089, "x_ohm": 0.9373, "rating_mva": 6.0, "in_service": true},
    {"id": 22, "from_bus": 3, "to_bus": 23, "r_ohm": 0.4512, "x_ohm": 0.3083, "rating_mva": 6.0, "in_service": true},
    {"id": 23, "from_bus": 23, "to_bus": 24, "r_ohm": 0.8980, "x_ohm": 0.7091, "rating_mva": 6.0, "in_service": true},
    {"id": 24, "from_bus": 24, "to_bus": 25, "r_ohm": 0.8960, "x_ohm": 0.7011, "rating_mva": 6.0, "in_service": true},
    {"id": 25, "from_bus": 6, "to_bus": 26, "r_ohm": 0.2030, "x_ohm": 0.1034, "rating_mva": 6.0, "in_service": true},
    {"id": 26, "from_bus": 26, "to_bus": 27, "r_ohm": 0.2842, "x_ohm": 0.1447, "rating_mva": 6.0, "in_service": true},
    {"id": 27, "from_bus": 27, "to_bus": 28, "r_ohm": 1.0590, "x_ohm": 0.9337, "rating_mva": 6.0, "in_service": true},
    {"id": 28, "from_bus": 28, "to_bus": 29, "r_ohm": 0.8042, "x_ohm": 0.7006, "rating_mva": 6.0, "in_service": true},
    {"id": 29, "from_bus": 29, "to_bus": 30, "r_ohm": 0.5075, "x_ohm": 0.2585, "rating_mva": 6.0, "in_service": true},
    {"id": 30, "from_bus": 30, "to_bus": 31, "r_ohm": 0.9744, "x_ohm": 0.9630, "rating_mva": 6.0, "in_service": true},
    {"id": 31, "from_bus": 31, "to_bus": 32, "r_ohm": 0.3105, "x_ohm": 0.3619, "rating_mva": 6.0, "in_service": true},
    {"id": 32, "from_bus": 32, "to_bus": 33, "r_ohm": 0.3410, "x_ohm": 0.5302, "rating_mva": 6.0, "in_service": true}
  ],
  "shunts": [],
  "loads": [
    {"bus": 2, "p_mw": 0.1, "q_mvar": 0.06},
    {"bus": 3, "p_mw": 0.09, "q_mvar": 0.04},
    {"bus": 4, "p_mw": 0.12, "q_mvar": 0.08},
    {"bus": 5, "p_mw": 0.06, "q_mvar": 0.03},
    {"bus": 6, "p_mw": 0.06, "q_mvar": 0.02},
    {"bus": 7, "p_mw": 0.2, "q_mvar": 0.1},
    {"bus": 8, "p_mw": 0.2, "q_mvar": 0.1},
    {"bus": 9, "p_mw": 0.06, "q_mvar": 0.02},
    {"bus": 10, "p_mw": 0.06, "q_mvar": 0.02},
    {"bus": 11, "p_mw": 0.045, "q_mvar": 0.03},
    {"bus": 12, "p_mw": 0.06, "q_mvar": 0.035},
    {"bus": 13, "p_mw": 0.06, "q_mvar": 0.035},
    {"bus": 14, "p_mw": 0.12, "q_mvar": 0.08},
    {"bus": 15, "p_mw": 0.06, "q_mvar": 0.01},
    {"bus": 16, "p_mw": 0.06, "q_mvar": 0.02},
    {"bus": 17, "p_mw": 0.06, "q_mvar": 0.02},
    {"bus": 18, "p_mw": 0.09, "q_mvar": 0.04},
    {"bus": 19, "p_mw": 0.09, "q_mvar": 0.04},
    {"bus": 20, "p_mw": 0.09, "q_mvar": 0.04},
    {"bus": 21, "p_mw": 0.09, "q_mvar": 0.04},
    {"bus": 22, "p_mw": 0.09, "q_mvar": 0.04},
    {"bus": 23, "p_mw": 0.09, "q_mvar": 0.05},
    {"bus": 24, "p_mw": 0.42, "q_mvar": 0.2},
    {"bus": 25, "p_mw": 0.42, "q_mvar": 0.2},
    {"bus": 26, "p_mw": 0.06, "q_mvar": 0.025},
    {"bus": 27, "p_mw": 0.06, "q_mvar": 0.025},
    {"bus": 28, "p_mw": 0.06, "q_mvar": 0.02},
    {"bus": 29, "p_mw": 0.12, "q_mvar": 0.07},
    {"bus": 30, "p_mw": 0.2, "q_mvar": 0.6},
    {"bus": 31, "p_mw": 0.15, "q_mvar": 0.07},
    {"bus": 32, "p_mw": 0.21, "q_mvar": 0.1},
    {"bus": 33, "p_mw": 0.06, "q_mvar": 0.04}
  ]
}
)json";

/// Normally-open tie switches of the same feeder (from, to, r_ohm, x_ohm).
struct TieLineData {
    int from_bus;
    int to_bus;
    double r_ohm;
    double x_ohm;
};

inline constexpr TieLineData ieee33_tie_lines[] = {
    {8, 21, 2.0, 2.0}, {9, 15, 2.0, 2.0}, {12, 22, 2.0, 2.0}, {18, 33, 0.5, 0.5}, {25, 29, 0.5, 0.5},
};

}  // namespace b2g::power
