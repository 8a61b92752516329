// Copyright 2026 The collapse-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "collapse/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "collapse/numeric.hpp"

namespace collapse::io {

namespace {

using nlohmann::json;

json number(double x) {
    if (std::isfinite(x)) {
        return x;
    }
    return format_double(x);
}

} // namespace

std::string ensemble_to_json(const EnsembleStats &stats, const RunConfig &config) {
    json doc;
    doc["format"] = "collapse-sim/ensemble";
    doc["version"] = 1;
    json cfg;
    cfg["weights"] = config.weights;
    cfg["phases"] = config.phases;
    cfg["epsilon"] = config.params.epsilon;
    cfg["tau"] = config.params.tau;
    cfg["phase_dist"] = to_string(config.params.phase_dist);
    cfg["seed"] = config.params.seed;
    cfg["trajectories"] = config.n_trajectories;
    cfg["max_steps"] = config.max_steps;
    cfg["record_every"] = config.record_every;
    doc["config"] = cfg;

    json s;
    s["total_trajectories"] = stats.total_trajectories;
    s["unresolved"] = stats.unresolved;
    s["survival_counts"] = stats.survival_counts;
    json freq = json::array();
    for (std::size_t i = 0; i < stats.packet_count(); ++i) {
        freq.push_back(number(stats.survival_frequency(i)));
    }
    s["survival_frequencies"] = freq;
    s["mean_collapse_steps"] = number(stats.mean_collapse_steps());
    s["record_every"] = stats.record_every;
    s["sample_steps"] = stats.sample_steps;
    s["mean_weights"] = stats.mean_weights;
    json amps = json::array();
    for (const auto &row : stats.mean_amplitudes) {
        json r = json::array();
        for (const auto &a : row) {
            r.push_back(json::array({a.real(), a.imag()}));
        }
        amps.push_back(std::move(r));
    }
    s["mean_amplitudes"] = std::move(amps);
    json hist = json::array();
    for (const auto &[steps, count] : stats.collapse_time_histogram) {
        hist.push_back(json::array({steps, count}));
    }
    s["collapse_time_histogram"] = std::move(hist);
    s["cascade_length_histogram"] = stats.cascade_length_histogram;
    doc["stats"] = std::move(s);
    return doc.dump(2) + "\n";
}

EnsembleStats ensemble_from_json(std::string_view text) {
    try {
        const json doc = json::parse(text);
        const json &s = doc.at("stats");
        EnsembleStats stats;
        stats.total_trajectories = s.at("total_trajectories").get<std::uint64_t>();
        stats.unresolved = s.at("unresolved").get<std::uint64_t>();
        stats.survival_counts =
            s.at("survival_counts").get<std::vector<std::uint64_t>>();
        stats.record_every = s.at("record_every").get<std::uint64_t>();
        stats.sample_steps = s.at("sample_steps").get<std::vector<std::uint64_t>>();
        stats.mean_weights =
            s.at("mean_weights").get<std::vector<std::vector<double>>>();
        for (const auto &row : s.at("mean_amplitudes")) {
            std::vector<std::complex<double>> r;
            for (const auto &a : row) {
                r.emplace_back(a.at(0).get<double>(), a.at(1).get<double>());
            }
            stats.mean_amplitudes.push_back(std::move(r));
        }
        for (const auto &entry : s.at("collapse_time_histogram")) {
            stats.collapse_time_histogram[entry.at(0).get<std::uint64_t>()] =
                entry.at(1).get<std::uint64_t>();
        }
        stats.cascade_length_histogram =
            s.at("cascade_length_histogram").get<std::vector<std::uint64_t>>();
        return stats;
    } catch (const json::exception &e) {
        throw FormatError(std::string("invalid ensemble JSON: ") + e.what());
    }
}

void write_series_csv(std::ostream &out, const EnsembleStats &stats) {
    out << "step,packet_index,mean_weight,mean_amp_re,mean_amp_im\n";
    for (std::size_t k = 0; k < stats.sample_steps.size(); ++k) {
        for (std::size_t i = 0; i < stats.packet_count(); ++i) {
            const auto a = stats.mean_amplitudes[k][i];
            out << stats.sample_steps[k] << ',' << i << ','
                << format_double(stats.mean_weights[k][i]) << ','
                << format_double(a.real()) << ',' << format_double(a.imag())
                << '\n';
        }
    }
}

void write_survival_csv(std::ostream &out, const EnsembleStats &stats,
                        const WaveState &initial) {
    out << "packet_index,initial_weight,survival_count,survival_frequency\n";
    for (std::size_t i = 0; i < stats.packet_count(); ++i) {
        out << i << ',' << format_double(initial.weight(i)) << ','
            << stats.survival_counts[i] << ','
            << format_double(stats.survival_frequency(i)) << '\n';
    }
    out << "unresolved,," << stats.unresolved << ','
        << format_double(stats.total_trajectories == 0
                             ? 0.0
                             : double(stats.unresolved) /
                                   double(stats.total_trajectories))
        << '\n';
}

std::filesystem::path survival_path(const std::filesystem::path &series_path) {
    std::filesystem::path p = series_path;
    p.replace_filename(series_path.stem().string() + ".survival.csv");
    return p;
}

void write_spectrum_csv(std::ostream &out, const SpectralResult &spectrum,
                        double eps, double tau) {
    out << "index,eigenvalue,relaxation_time\n";
    for (std::size_t k = 0; k < spectrum.eigenvalues.size(); ++k) {
        out << k << ',' << format_double(spectrum.eigenvalues[k]) << ','
            << format_double(spectrum.relaxation_times[k]) << '\n';
    }
    const double asymptote = tau / (2.0 * eps * eps);
    out << "# selection_time=" << format_double(spectrum.selection_time)
        << " asymptote=" << format_double(asymptote)
        << " ratio=" << format_double(spectrum.selection_time / asymptote)
        << '\n';
}

std::string reports_to_json(const std::vector<CheckReport> &reports,
                            const ConformanceConfig &config) {
    json doc;
    doc["format"] = "collapse-sim/conformance";
    doc["version"] = 1;
    doc["config"] = {{"epsilon", config.epsilon},
                     {"tau", config.tau},
                     {"weights", config.weights},
                     {"samples", config.samples},
                     {"seed", config.seed},
                     {"max_steps", config.max_steps},
                     {"start", config.start},
                     {"phase_dist", to_string(config.phase_dist)}};
    bool pass = true;
    json checks = json::array();
    for (const auto &r : reports) {
        json c;
        c["name"] = r.name;
        c["pass"] = r.pass;
        c["skipped"] = r.skipped;
        c["samples"] = r.samples;
        c["notes"] = r.notes;
        json ms = json::array();
        for (const auto &m : r.measurements) {
            ms.push_back({{"label", m.label},
                          {"measured", number(m.measured)},
                          {"expected", number(m.expected)},
                          {"tolerance", number(m.tolerance)},
                          {"reference", m.reference},
                          {"informational", m.informational},
                          {"pass", m.pass}});
        }
        c["measurements"] = std::move(ms);
        checks.push_back(std::move(c));
        pass = pass && r.pass;
    }
    doc["checks"] = std::move(checks);
    doc["pass"] = pass;
    return doc.dump(2) + "\n";
}

std::string reports_to_text(const std::vector<CheckReport> &reports) {
    std::ostringstream out;
    for (const auto &r : reports) {
        out << "[" << (r.skipped ? "SKIP" : (r.pass ? "PASS" : "FAIL")) << "] "
            << r.name << " (samples=" << r.samples << ")\n";
        for (const auto &m : r.measurements) {
            const char *mark = m.pass ? "ok  " : (m.informational ? "info" : "FAIL");
            out << "  " << mark << ' ' << m.label
                << ": measured=" << format_double(m.measured)
                << " expected=" << format_double(m.expected)
                << " tol=" << format_double(m.tolerance) << "  [" << m.reference
                << "]\n";
        }
        for (const auto &n : r.notes) {
            out << "  note: " << n << '\n';
        }
    }
    return out.str();
}

void write_text_file(const std::filesystem::path &path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FormatError("cannot open '" + path.string() + "' for writing");
    }
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) {
        throw FormatError("write to '" + path.string() + "' failed");
    }
}

std::string read_text_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace collapse::io
