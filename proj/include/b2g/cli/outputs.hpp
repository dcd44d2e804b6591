#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "b2g/cosim/engine.hpp"
#include "b2g/grid/analysis.hpp"
#include "b2g/power/network_io.hpp"

namespace b2g::cli {

namespace fs = std::filesystem;

inline constexpr const char* kToolVersion = "0.1.0";

inline void write_text_file(const fs::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path.string());
    out << text;
    if (!out.flush()) throw FormatError("cannot write " + path.string());
}

inline std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 failed");
    std::string out;
    for (unsigned int i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
    return out;
}

inline std::string sha256_file(const fs::path& path) { return sha256_hex(io::read_text_file(path)); }

// ---------------------------------------------------------------- CSV

/// Shortest representation that reads back to the same double.
inline std::string num(double x) { return fmt::format("{}", x); }

inline std::string trace_table(const cosim::EpisodeTrace& trace, const std::vector<std::string>& columns,
                               const std::vector<double> cosim::StepRecord::*field, double scale_by_rating = 0.0,
                               const power::PowerNetwork* net = nullptr) {
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "step");
    for (const auto& c : columns) fmt::format_to(std::back_inserter(buf), ",{}", c);
    buf.push_back('\n');
    for (const auto& r : trace.records) {
        fmt::format_to(std::back_inserter(buf), "{}", r.step);
        const auto& values = r.*field;
        for (std::size_t i = 0; i < values.size(); ++i) {
            double v = values[i];
            if (scale_by_rating != 0.0 && net) v /= net->lines[i].rating_mva;
            fmt::format_to(std::back_inserter(buf), ",{}", num(v));
        }
        buf.push_back('\n');
    }
    return fmt::to_string(buf);
}

inline std::vector<std::pair<std::string, std::string>> kpi_rows(const cosim::EpisodeKpis& k) {
    return {{"mean_voltage_pu", num(k.mean_voltage)},
            {"min_voltage_pu", num(k.min_voltage)},
            {"max_voltage_pu", num(k.max_voltage)},
            {"voltage_std_pu", num(k.voltage_std)},
            {"voltage_deviation_rms_pu", num(k.voltage_deviation_rms)},
            {"cumulative_reward", num(k.cumulative_reward)},
            {"over_voltage_steps", std::to_string(k.over_voltage_steps)},
            {"under_voltage_steps", std::to_string(k.under_voltage_steps)},
            {"bus_voltage_violations", std::to_string(k.bus_voltage_violations)},
            {"line_loading_violations", std::to_string(k.line_loading_violations)},
            {"diverged_steps", std::to_string(k.diverged_steps)}};
}

inline std::string kpi_summary_csv(const cosim::EpisodeKpis& k) {
    std::string out = "key,value\n";
    for (const auto& [key, value] : kpi_rows(k)) out += key + "," + value + "\n";
    return out;
}

/// voltages.csv, line_loading.csv, net_load.csv and kpi_summary.csv.
/// Line loading is the flow as a fraction of the line rating.
inline std::vector<fs::path> write_trace_csv(const cosim::EpisodeTrace& trace, const power::PowerNetwork& net,
                                             const std::vector<std::string>& building_ids, const fs::path& dir) {
    std::vector<std::string> buses, lines;
    for (const auto& b : net.buses) buses.push_back("bus_" + std::to_string(b.id));
    for (const auto& l : net.lines) lines.push_back("line_" + std::to_string(l.id));
    std::vector<fs::path> out{dir / "voltages.csv", dir / "line_loading.csv", dir / "net_load.csv",
                              dir / "kpi_summary.csv"};
    write_text_file(out[0], trace_table(trace, buses, &cosim::StepRecord::bus_voltages));
    write_text_file(out[1], trace_table(trace, lines, &cosim::StepRecord::line_flows_mva, 1.0, &net));
    write_text_file(out[2], trace_table(trace, building_ids, &cosim::StepRecord::net_loads_kw));
    write_text_file(out[3], kpi_summary_csv(trace.kpis));
    return out;
}

/// (entity_id, metric_value, limit, violated). Buses report |V| against the
/// nearer band edge, lines their flow against the loading limit.
inline std::string screening_csv(const power::PowerFlowResult& result, const power::PowerNetwork& net,
                                 const grid::SecurityLimits& limits) {
    if (!result.converged) throw Error("cannot screen diverged state");
    limits.validate();
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "entity_id,metric_value,limit,violated\n");
    for (std::size_t i = 0; i < net.bus_count(); ++i) {
        const double vm = result.vm(i);
        const bool low = std::abs(vm - limits.v_min) <= std::abs(vm - limits.v_max);
        const double limit = low ? limits.v_min : limits.v_max;
        const bool violated = vm < limits.v_min || vm > limits.v_max;
        fmt::format_to(std::back_inserter(buf), "bus_{},{},{},{}\n", net.buses[i].id, num(vm), num(limit), violated);
    }
    for (std::size_t k = 0; k < net.lines.size(); ++k) {
        const auto& line = net.lines[k];
        if (!line.in_service) continue;
        const double limit = limits.loading_threshold * line.rating_mva;
        fmt::format_to(std::back_inserter(buf), "line_{},{},{},{}\n", line.id, num(result.line_flows[k]), num(limit),
                       result.line_flows[k] > limit);
    }
    return fmt::to_string(buf);
}

inline std::string contingency_csv(const grid::NMinus1Report& report) {
    std::string out = "line_id,classification,cause\n";
    for (const auto& o : report.outcomes)
        out += fmt::format("{},{},{}\n", o.outage_line, grid::to_string(o.classification), grid::to_string(o.cause));
    return out;
}

inline std::string short_circuit_csv(const power::PowerNetwork& net, const std::vector<int>& buses) {
    std::string out = "bus_id,u_nom_kv,r_th_ohm,x_th_ohm,z_th_ohm,i_sc_ka\n";
    for (int bus : buses) {
        const auto thev = grid::thevenin_at(net, bus);
        const double kv = net.buses[net.bus_index(bus)].nominal_kv;
        out += fmt::format("{},{},{},{},{},{}\n", bus, num(kv), num(thev.r_th_ohm), num(thev.x_th_ohm),
                           num(thev.magnitude_ohm()), num(grid::short_circuit_current(thev, kv)));
    }
    return out;
}

/// Side-by-side KPI columns, one per labelled run.
inline std::string kpi_comparison_csv(const std::vector<std::pair<std::string, cosim::EpisodeKpis>>& runs) {
    std::string out = "key";
    for (const auto& r : runs) out += "," + r.first;
    out += "\n";
    if (runs.empty()) return out;
    const auto first = kpi_rows(runs.front().second);
    for (std::size_t i = 0; i < first.size(); ++i) {
        out += first[i].first;
        for (const auto& r : runs) out += "," + kpi_rows(r.second)[i].second;
        out += "\n";
    }
    return out;
}

inline std::string kpi_table(const std::vector<std::pair<std::string, cosim::EpisodeKpis>>& runs) {
    std::vector<std::vector<std::string>> rows{{"kpi"}};
    for (const auto& r : runs) rows[0].push_back(r.first);
    if (!runs.empty()) {
        const auto keys = kpi_rows(runs.front().second);
        for (std::size_t i = 0; i < keys.size(); ++i) {
            std::vector<std::string> row{keys[i].first};
            for (const auto& r : runs) {
                const auto v = kpi_rows(r.second)[i].second;
                const double d = std::stod(v);
                row.push_back(v.find_first_of(".en") == std::string::npos ? v : fmt::format("{:.6g}", d));
            }
            rows.push_back(std::move(row));
        }
    }
    std::vector<std::size_t> width(rows[0].size(), 0);
    for (const auto& row : rows)
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out += c == 0 ? fmt::format("{:<{}}", row[c], width[c]) : fmt::format("  {:>{}}", row[c], width[c]);
        out += "\n";
    }
    return out;
}

inline std::string kpi_table(const cosim::EpisodeKpis& kpis) { return kpi_table({{"value", kpis}}); }

// ---------------------------------------------------------------- SVG

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

namespace svg {

inline constexpr double kWidth = 640, kHeight = 400, kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
inline const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '"') out += "&quot;";
        else out += c;
    }
    return out;
}

struct Frame {
    double x0, x1, y0, y1;

    double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
    double py(double y) const { return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom); }
};

inline std::pair<double, double> padded(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) return {0.0, 1.0};
    if (hi - lo < 1e-12) return {lo - 0.5 * std::max(1e-3, std::abs(lo) * 1e-3), hi + 0.5 * std::max(1e-3, std::abs(hi) * 1e-3)};
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

inline std::string header(const std::string& title) {
    return fmt::format(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
        "<rect x=\"0\" y=\"0\" width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
        "<text x=\"{2}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{3}</text>\n",
        kWidth, kHeight, (kLeft + kWidth - kRight) / 2, escape(title));
}

inline std::string axes(const Frame& f, const std::string& xlabel, const std::string& ylabel) {
    std::string out;
    const double bottom = kHeight - kBottom, right = kWidth - kRight;
    out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", kLeft, bottom, right);
    out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", kLeft, bottom, kTop);
    for (int i = 0; i <= 5; ++i) {
        const double xv = f.x0 + (f.x1 - f.x0) * i / 5.0, yv = f.y0 + (f.y1 - f.y0) * i / 5.0;
        out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"black\"/>\n", f.px(xv),
                           bottom, bottom + 5);
        out += fmt::format(
            "<text x=\"{:.2f}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{:.4g}</text>\n",
            f.px(xv), bottom + 18, xv);
        out += fmt::format("<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"black\"/>\n", kLeft - 5,
                           f.py(yv), kLeft);
        out += fmt::format(
            "<text x=\"{}\" y=\"{:.2f}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{:.4g}</text>\n",
            kLeft - 8, f.py(yv) + 4, yv);
    }
    out += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
                       (kLeft + right) / 2, kHeight - 10, escape(xlabel));
    out += fmt::format(
        "<text x=\"16\" y=\"{0}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" "
        "transform=\"rotate(-90 16 {0})\">{1}</text>\n",
        (kTop + bottom) / 2, escape(ylabel));
    return out;
}

inline std::string legend(const std::vector<std::string>& labels) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double y = kTop + 10 + 18.0 * static_cast<double>(i);
        out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n", kWidth - kRight + 12,
                           y - 10, kPalette[i % 6]);
        out += fmt::format("<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
                           kWidth - kRight + 30, y, escape(labels[i]));
    }
    return out;
}

}  // namespace svg

/// Line chart. Non-finite points break the polyline.
inline std::string line_plot_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                                 const std::vector<Series>& series) {
    double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            xlo = std::min(xlo, s.x[i]);
            xhi = std::max(xhi, s.x[i]);
            ylo = std::min(ylo, s.y[i]);
            yhi = std::max(yhi, s.y[i]);
        }
    const auto [x0, x1] = svg::padded(xlo, xhi);
    const auto [y0, y1] = svg::padded(ylo, yhi);
    const svg::Frame f{x0, x1, y0, y1};
    std::string out = svg::header(title) + svg::axes(f, xlabel, ylabel);
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        labels.push_back(s.label);
        std::string points;
        auto flush = [&] {
            if (!points.empty())
                out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                                   svg::kPalette[k % 6], points);
            points.clear();
        };
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                flush();
                continue;
            }
            points += fmt::format("{}{:.2f},{:.2f}", points.empty() ? "" : " ", f.px(s.x[i]), f.py(s.y[i]));
        }
        flush();
    }
    return out + svg::legend(labels) + "</svg>\n";
}

/// Grouped bar chart over shared bins. `values[k][b]` is series k in bin b.
inline std::string bar_plot_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                                const std::vector<double>& bin_lower, double bin_width,
                                const std::vector<std::string>& labels, const std::vector<std::vector<double>>& values) {
    double yhi = 0.0;
    for (const auto& v : values)
        for (double x : v) yhi = std::max(yhi, x);
    if (yhi <= 0.0) yhi = 1.0;
    const double x0 = bin_lower.empty() ? 0.0 : bin_lower.front();
    const double x1 = bin_lower.empty() ? 1.0 : bin_lower.back() + bin_width;
    const svg::Frame f{x0, x1, 0.0, yhi * 1.05};
    std::string out = svg::header(title) + svg::axes(f, xlabel, ylabel);
    const double groups = static_cast<double>(std::max<std::size_t>(1, values.size()));
    for (std::size_t k = 0; k < values.size(); ++k) {
        for (std::size_t b = 0; b < bin_lower.size() && b < values[k].size(); ++b) {
            if (values[k][b] <= 0.0) continue;
            const double left = bin_lower[b] + bin_width * static_cast<double>(k) / groups;
            const double px0 = f.px(left), px1 = f.px(left + bin_width / groups);
            const double top = f.py(values[k][b]);
            out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\"/>\n", px0,
                               top, std::max(0.5, px1 - px0), f.py(0.0) - top, svg::kPalette[k % 6]);
        }
    }
    return out + svg::legend(labels) + "</svg>\n";
}

// ---------------------------------------------------------------- plots

struct PlotOptions {
    bool svg = true;
    bool histograms = true;
    double dt_hours = 1.0;
    double start_hour = 0.0;
};

inline std::string mean_voltage_csv(const std::vector<std::pair<std::string, const cosim::EpisodeTrace*>>& runs) {
    std::string out = "step";
    for (const auto& r : runs) out += "," + r.first;
    out += "\n";
    const std::size_t n = runs.empty() ? 0 : runs.front().second->kpis.mean_voltage_series.size();
    for (std::size_t t = 0; t < n; ++t) {
        out += std::to_string(t);
        for (const auto& r : runs) {
            const auto& s = r.second->kpis.mean_voltage_series;
            out += "," + (t < s.size() ? num(s[t]) : std::string("nan"));
        }
        out += "\n";
    }
    return out;
}

inline std::string mean_voltage_svg(const std::vector<std::pair<std::string, const cosim::EpisodeTrace*>>& runs,
                                    const PlotOptions& options) {
    std::vector<Series> series;
    for (const auto& [label, trace] : runs) {
        Series s{label, {}, {}};
        const auto& m = trace->kpis.mean_voltage_series;
        for (std::size_t t = 0; t < m.size(); ++t) {
            s.x.push_back(options.start_hour + static_cast<double>(t) * options.dt_hours);
            s.y.push_back(m[t]);
        }
        series.push_back(std::move(s));
    }
    return line_plot_svg("Network-mean voltage", "time [h]", "mean |V| [p.u.]", series);
}

inline std::string histogram_csv(const std::vector<std::string>& labels, const std::vector<const cosim::Histogram*>& h) {
    std::string out = "bin_lower,bin_upper";
    for (const auto& l : labels) out += "," + l;
    out += "\n";
    const auto& ref = *h.front();
    for (std::size_t b = 0; b < ref.counts.size(); ++b) {
        out += num(ref.bin_lower(b)) + "," + num(ref.bin_lower(b + 1));
        for (const auto* x : h) out += "," + std::to_string(x->counts[b]);
        out += "\n";
    }
    auto extra = [&](const char* lo, const char* hi, std::size_t cosim::Histogram::*field) {
        out += std::string(lo) + "," + hi;
        for (const auto* x : h) out += "," + std::to_string(x->*field);
        out += "\n";
    };
    extra("-inf", num(ref.lower).c_str(), &cosim::Histogram::underflow);
    extra(num(ref.upper()).c_str(), "inf", &cosim::Histogram::overflow);
    extra("nan", "nan", &cosim::Histogram::invalid);
    return out;
}

inline std::string histogram_svg(const std::string& title, const std::string& xlabel,
                                 const std::vector<std::string>& labels, const std::vector<const cosim::Histogram*>& h) {
    std::vector<double> lower;
    for (std::size_t b = 0; b < h.front()->counts.size(); ++b) lower.push_back(h.front()->bin_lower(b));
    std::vector<std::vector<double>> shares;
    for (const auto* x : h) {
        std::vector<double> s;
        const double n = static_cast<double>(x->total());
        for (auto c : x->counts) s.push_back(n > 0 ? static_cast<double>(c) / n : 0.0);
        shares.push_back(std::move(s));
    }
    return bar_plot_svg(title, xlabel, "share of samples", lower, h.front()->width, labels, shares);
}

/// Mean voltage over time, the voltage-magnitude histogram and the net-load
/// histograms split by voltage regime. Every plot gets a CSV with its numbers.
inline std::vector<fs::path> emit_plots(const cosim::EpisodeTrace& trace, const fs::path& dir,
                                        const PlotOptions& options = {}) {
    if (trace.records.empty()) throw ModelError("cannot plot an empty trace");
    std::vector<fs::path> files;
    auto put = [&](const std::string& name, const std::string& text) {
        write_text_file(dir / name, text);
        files.push_back(dir / name);
    };
    const std::vector<std::pair<std::string, const cosim::EpisodeTrace*>> one{{"mean_voltage_pu", &trace}};
    put("mean_voltage.csv", mean_voltage_csv(one));
    if (options.svg) put("mean_voltage.svg", mean_voltage_svg(one, options));
    if (options.histograms) {
        const std::vector<const cosim::Histogram*> v{&trace.kpis.voltage_histogram};
        put("voltage_histogram.csv", histogram_csv({"count"}, v));
        if (options.svg) put("voltage_histogram.svg", histogram_svg("Bus voltage magnitudes", "|V| [p.u.]", {"all steps"}, v));
        const std::vector<const cosim::Histogram*> nl{&trace.kpis.net_load_over, &trace.kpis.net_load_under,
                                                      &trace.kpis.net_load_nominal};
        const std::vector<std::string> labels{"over_voltage", "under_voltage", "nominal"};
        put("net_load_histograms.csv", histogram_csv(labels, nl));
        if (options.svg) put("net_load_histograms.svg", histogram_svg("Net load by voltage regime", "net load [kW]", labels, nl));
    }
    return files;
}

// ---------------------------------------------------------------- manifest

struct ManifestFile {
    std::string path;  // relative to the output directory, '/' separated
    std::uintmax_t bytes = 0;
    std::string sha256;
};

struct RunManifest {
    std::string name;
    std::uint64_t seed = 0;
    std::string tool_version = kToolVersion;
    io::json config;
    std::vector<std::string> stages_completed;
    std::string failed_stage;
    std::string error;
    std::vector<ManifestFile> files;

    bool ok() const { return failed_stage.empty(); }
};

inline io::json manifest_to_json(const RunManifest& m) {
    io::json files = io::json::array();
    for (const auto& f : m.files) files.push_back({{"path", f.path}, {"bytes", f.bytes}, {"sha256", f.sha256}});
    io::json out = {{"format", "b2g-manifest/1"},
                    {"name", m.name},
                    {"seed", m.seed},
                    {"tool_version", m.tool_version},
                    {"config", m.config},
                    {"stages_completed", m.stages_completed},
                    {"failed_stage", m.failed_stage.empty() ? io::json(nullptr) : io::json(m.failed_stage)},
                    {"error", m.error.empty() ? io::json(nullptr) : io::json(m.error)},
                    {"files", files}};
    return out;
}

inline RunManifest manifest_from_json(const io::json& doc) {
    io::require_keys(doc, {"format", "name", "seed", "tool_version", "config", "stages_completed", "failed_stage",
                           "error", "files"},
                     "manifest");
    if (io::get_required<std::string>(doc, "format", "manifest") != "b2g-manifest/1")
        throw FormatError("manifest: unsupported format");
    RunManifest m;
    m.name = io::get_required<std::string>(doc, "name", "manifest");
    m.seed = io::get_required<std::uint64_t>(doc, "seed", "manifest");
    m.tool_version = io::get_required<std::string>(doc, "tool_version", "manifest");
    m.config = doc.at("config");
    m.stages_completed = io::get_required<std::vector<std::string>>(doc, "stages_completed", "manifest");
    if (!doc.at("failed_stage").is_null()) m.failed_stage = doc["failed_stage"].get<std::string>();
    if (!doc.at("error").is_null()) m.error = doc["error"].get<std::string>();
    for (const auto& f : doc.at("files"))
        m.files.push_back({f.at("path").get<std::string>(), f.at("bytes").get<std::uintmax_t>(),
                           f.at("sha256").get<std::string>()});
    return m;
}

/// Records size and checksum of each file (sorted by relative path) and
/// writes manifest.json into `out_dir`.
inline fs::path write_manifest(RunManifest& manifest, const std::vector<fs::path>& files, const fs::path& out_dir) {
    manifest.files.clear();
    for (const auto& p : files) {
        const auto rel = p.lexically_relative(out_dir).generic_string();
        if (rel.empty() || rel.starts_with("..")) throw Error("output file outside the output directory: " + p.string());
        manifest.files.push_back({rel, fs::file_size(p), sha256_file(p)});
    }
    std::sort(manifest.files.begin(), manifest.files.end(),
              [](const ManifestFile& a, const ManifestFile& b) { return a.path < b.path; });
    manifest.files.erase(std::unique(manifest.files.begin(), manifest.files.end(),
                                     [](const ManifestFile& a, const ManifestFile& b) { return a.path == b.path; }),
                         manifest.files.end());
    const auto path = out_dir / "manifest.json";
    write_text_file(path, manifest_to_json(manifest).dump(2) + "\n");
    return path;
}

/// Files whose size or checksum no longer match the manifest, or are missing.
inline std::vector<std::string> verify_manifest(const fs::path& out_dir) {
    const auto m = manifest_from_json(io::parse_json_text(io::read_text_file(out_dir / "manifest.json"), "manifest.json"));
    std::vector<std::string> bad;
    for (const auto& f : m.files) {
        const auto p = out_dir / f.path;
        if (!fs::exists(p) || fs::file_size(p) != f.bytes || sha256_file(p) != f.sha256) bad.push_back(f.path);
    }
    return bad;
}

}  // namespace b2g::cli
