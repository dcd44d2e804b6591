#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "b2g/building/fleet.hpp"
#include "b2g/power/network_io.hpp"

namespace b2g::building {

/// Reads a two-column profile (header `step,kw`, steps 0..n-1 in order).
inline std::vector<double> parse_profile_csv(const std::string& text, const std::string& origin) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw FormatError(origin + ": empty profile");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "step,kw") throw FormatError(origin + ": expected header 'step,kw'");
    std::vector<double> out;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw FormatError(origin + ": row " + std::to_string(row) + " has no comma");
        std::size_t used = 0;
        long step = 0;
        double kw = 0.0;
        try {
            step = std::stol(line.substr(0, comma), &used);
            if (used != comma) throw std::invalid_argument("step");
            const std::string value = line.substr(comma + 1);
            kw = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument("kw");
        } catch (const std::exception&) {
            throw FormatError(origin + ": row " + std::to_string(row) + " is not numeric");
        }
        if (step != static_cast<long>(out.size()))
            throw FormatError(origin + ": steps must run 0..n-1 in order (row " + std::to_string(row) + ")");
        out.push_back(kw);
    }
    return out;
}

inline std::string profile_to_csv(const std::vector<double>& values) {
    std::ostringstream out;
    out.precision(17);
    out << "step,kw\n";
    for (std::size_t i = 0; i < values.size(); ++i) out << i << ',' << values[i] << '\n';
    return out.str();
}

namespace detail {

inline std::vector<double> read_profile(const io::json& node, const std::filesystem::path& base_dir,
                                        const std::string& where) {
    if (node.is_array()) {
        try {
            return node.get<std::vector<double>>();
        } catch (const io::json::exception& e) {
            throw FormatError(where + ": " + e.what());
        }
    }
    if (node.is_object()) {
        io::require_keys(node, {"csv"}, where);
        const auto rel = io::get_required<std::string>(node, "csv", where);
        const auto path = base_dir / rel;
        return parse_profile_csv(io::read_text_file(path), path.string());
    }
    throw FormatError(where + ": expected an array or {\"csv\": path}");
}

}  // namespace detail

/// Parses a fleet document. Profiles are inline arrays or `{"csv": path}`
/// references resolved against `base_dir`. Structural checks only; call
/// validate_fleet once the network and horizon are known.
inline Fleet fleet_from_json(const io::json& doc, const std::filesystem::path& base_dir = ".") {
    io::require_keys(doc, {"format", "buildings", "mapping"}, "fleet");
    if (auto fmt = io::get_or<std::string>(doc, "format", "b2g-fleet/1"); fmt != "b2g-fleet/1")
        throw FormatError("fleet: unsupported format '" + fmt + "'");
    Fleet fleet;
    const auto& buildings = doc.at("buildings");
    if (!buildings.is_array()) throw FormatError("fleet: 'buildings' must be an array");
    for (const auto& jb : buildings) {
        io::require_keys(jb,
                         {"id", "base_load_kw", "pv_kw", "battery_capacity_kwh", "battery_max_kw",
                          "round_trip_efficiency", "power_factor", "initial_soc_kwh"},
                         "building");
        BuildingModel b;
        b.id = io::get_required<std::string>(jb, "id", "building");
        const std::string where = "building '" + b.id + "'";
        if (!jb.contains("base_load_kw")) throw FormatError(where + ": missing key 'base_load_kw'");
        b.base_load_kw = detail::read_profile(jb.at("base_load_kw"), base_dir, where + " base_load_kw");
        b.pv_kw = jb.contains("pv_kw") ? detail::read_profile(jb.at("pv_kw"), base_dir, where + " pv_kw")
                                       : std::vector<double>(b.base_load_kw.size(), 0.0);
        b.battery_capacity_kwh = io::get_or(jb, "battery_capacity_kwh", 0.0);
        b.battery_max_kw = io::get_or(jb, "battery_max_kw", 0.0);
        b.round_trip_efficiency = io::get_or(jb, "round_trip_efficiency", 0.9);
        b.power_factor = io::get_or(jb, "power_factor", 0.95);
        b.initial_soc_kwh = io::get_or(jb, "initial_soc_kwh", 0.0);
        fleet.buildings.push_back(std::move(b));
    }
    const auto& mapping = doc.at("mapping");
    if (!mapping.is_array()) throw FormatError("fleet: 'mapping' must be an array");
    for (const auto& jm : mapping) {
        io::require_keys(jm, {"bus", "building", "replication"}, "mapping");
        fleet.mapping.push_back({io::get_required<int>(jm, "bus", "mapping"),
                                 io::get_required<std::string>(jm, "building", "mapping"),
                                 io::get_or(jm, "replication", 1)});
    }
    return fleet;
}

inline io::json fleet_to_json(const Fleet& fleet) {
    io::json doc;
    doc["format"] = "b2g-fleet/1";
    doc["buildings"] = io::json::array();
    for (const auto& b : fleet.buildings) {
        doc["buildings"].push_back({{"id", b.id},
                                    {"base_load_kw", b.base_load_kw},
                                    {"pv_kw", b.pv_kw},
                                    {"battery_capacity_kwh", b.battery_capacity_kwh},
                                    {"battery_max_kw", b.battery_max_kw},
                                    {"round_trip_efficiency", b.round_trip_efficiency},
                                    {"power_factor", b.power_factor},
                                    {"initial_soc_kwh", b.initial_soc_kwh}});
    }
    doc["mapping"] = io::json::array();
    for (const auto& a : fleet.mapping)
        doc["mapping"].push_back({{"bus", a.bus}, {"building", a.building}, {"replication", a.replication}});
    return doc;
}

inline Fleet load_fleet(const std::filesystem::path& path) {
    return fleet_from_json(io::parse_json_text(io::read_text_file(path), path.string()), path.parent_path());
}

}  // namespace b2g::building
