#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "b2g/core/error.hpp"
#include "b2g/power/ieee33_data.hpp"
#include "b2g/power/network.hpp"

namespace b2g::io {

using nlohmann::json;

/// Rejects any key of `obj` not listed in `allowed`; `where` prefixes the message.
inline void require_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
    if (!obj.is_object()) throw FormatError(where + ": expected an object");
    std::string unknown;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (auto key : allowed) ok = ok || key == it.key();
        if (!ok) unknown += (unknown.empty() ? "" : ", ") + it.key();
    }
    if (!unknown.empty()) throw FormatError(where + ": unknown keys: " + unknown);
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("key '") + key + "': " + e.what());
    }
}

template <class T>
T get_required(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw FormatError(where + ": missing key '" + key + "'");
    try {
        return it->get<T>();
    } catch (const json::exception& e) {
        throw FormatError(where + ": key '" + key + "': " + e.what());
    }
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline json parse_json_text(std::string_view text, const std::string& origin) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw FormatError(origin + ": " + e.what());
    }
}

}  // namespace b2g::io

namespace b2g::power {

inline const char* to_string(BusKind kind) { return kind == BusKind::slack ? "slack" : "load"; }

/// Parses a network document. Field names follow the data model one-to-one;
/// units are kV, ohm, MW, MVAr and MVA.
inline PowerNetwork network_from_json(const io::json& doc) {
    using namespace b2g::io;
    require_keys(doc, {"format", "name", "shunt_q_sign", "base_mva", "external_grid", "buses", "lines",
                       "shunts", "loads"},
                 "network");
    if (doc.contains("shunt_q_sign") && doc["shunt_q_sign"] != "consumer")
        throw FormatError("network: shunt_q_sign must be \"consumer\"");

    PowerNetwork net;
    net.base_mva = get_or(doc, "base_mva", 10.0);

    for (const auto& b : get_required<json>(doc, "buses", "network")) {
        require_keys(b, {"id", "kind", "nominal_kv", "v_min", "v_max"}, "bus");
        Bus bus;
        bus.id = get_required<int>(b, "id", "bus");
        const auto kind = get_or<std::string>(b, "kind", "load");
        if (kind != "slack" && kind != "load") throw FormatError("bus: unknown kind '" + kind + "'");
        bus.kind = kind == "slack" ? BusKind::slack : BusKind::load;
        bus.nominal_kv = get_required<double>(b, "nominal_kv", "bus");
        bus.v_min = get_or(b, "v_min", 0.9);
        bus.v_max = get_or(b, "v_max", 1.1);
        net.buses.push_back(bus);
    }
    for (const auto& l : get_or<json>(doc, "lines", json::array())) {
        require_keys(l, {"id", "from_bus", "to_bus", "r_ohm", "x_ohm", "rating_mva", "in_service"}, "line");
        Line line;
        line.id = get_required<int>(l, "id", "line");
        line.from_bus = get_required<int>(l, "from_bus", "line");
        line.to_bus = get_required<int>(l, "to_bus", "line");
        line.r_ohm = get_required<double>(l, "r_ohm", "line");
        line.x_ohm = get_required<double>(l, "x_ohm", "line");
        line.rating_mva = get_or(l, "rating_mva", 6.0);
        line.in_service = get_or(l, "in_service", true);
        net.lines.push_back(line);
    }
    for (const auto& s : get_or<json>(doc, "shunts", json::array())) {
        require_keys(s, {"bus", "q_mvar"}, "shunt");
        net.shunts.push_back({get_required<int>(s, "bus", "shunt"), get_required<double>(s, "q_mvar", "shunt")});
    }
    for (const auto& s : get_or<json>(doc, "loads", json::array())) {
        require_keys(s, {"bus", "p_mw", "q_mvar"}, "load");
        net.loads.push_back({get_required<int>(s, "bus", "load"), get_or(s, "p_mw", 0.0), get_or(s, "q_mvar", 0.0)});
    }
    const auto& eg = get_required<json>(doc, "external_grid", "network");
    require_keys(eg, {"bus", "v_setpoint_pu", "source_r_ohm", "source_x_ohm"}, "external_grid");
    net.external_grid.bus = get_required<int>(eg, "bus", "external_grid");
    net.external_grid.v_setpoint_pu = get_or(eg, "v_setpoint_pu", 1.0);
    net.external_grid.source_r_ohm = get_or(eg, "source_r_ohm", 0.0);
    net.external_grid.source_x_ohm = get_or(eg, "source_x_ohm", 0.0);

    validate_network(net);
    return net;
}

inline io::json network_to_json(const PowerNetwork& net) {
    using io::json;
    json doc;
    doc["format"] = "b2g-network/1";
    doc["shunt_q_sign"] = "consumer";
    doc["base_mva"] = net.base_mva;
    doc["external_grid"] = {{"bus", net.external_grid.bus},
                            {"v_setpoint_pu", net.external_grid.v_setpoint_pu},
                            {"source_r_ohm", net.external_grid.source_r_ohm},
                            {"source_x_ohm", net.external_grid.source_x_ohm}};
    doc["buses"] = json::array();
    for (const auto& b : net.buses) {
        doc["buses"].push_back({{"id", b.id},
                                {"kind", to_string(b.kind)},
                                {"nominal_kv", b.nominal_kv},
                                {"v_min", b.v_min},
                                {"v_max", b.v_max}});
    }
    doc["lines"] = json::array();
    for (const auto& l : net.lines) {
        doc["lines"].push_back({{"id", l.id},
                                {"from_bus", l.from_bus},
                                {"to_bus", l.to_bus},
                                {"r_ohm", l.r_ohm},
                                {"x_ohm", l.x_ohm},
                                {"rating_mva", l.rating_mva},
                                {"in_service", l.in_service}});
    }
    doc["shunts"] = json::array();
    for (const auto& s : net.shunts) doc["shunts"].push_back({{"bus", s.bus}, {"q_mvar", s.q_mvar}});
    doc["loads"] = json::array();
    for (const auto& s : net.loads)
        doc["loads"].push_back({{"bus", s.bus}, {"p_mw", s.p_mw}, {"q_mvar", s.q_mvar}});
    return doc;
}

inline PowerNetwork load_network(const std::filesystem::path& path) {
    return network_from_json(io::parse_json_text(io::read_text_file(path), path.string()));
}

inline void save_network(const PowerNetwork& net, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path.string());
    out << network_to_json(net).dump(2) << '\n';
}

/// The standard 33-bus, 32-line radial test feeder, bus 1 as slack.
inline PowerNetwork build_ieee33() {
    return network_from_json(io::parse_json_text(ieee33_network_text, "ieee33"));
}

/// Adds the five normally-open tie lines of the 33-bus feeder (ids 33..37),
/// out of service unless `closed` is set.
inline void add_ieee33_tie_lines(PowerNetwork& net, bool closed, double rating_mva = 6.0) {
    int next_id = 33;
    for (const auto& tie : ieee33_tie_lines) {
        net.lines.push_back({next_id++, tie.from_bus, tie.to_bus, tie.r_ohm, tie.x_ohm, rating_mva, closed});
    }
}

}  // namespace b2g::power
