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

// Acceptance gate: one PASS/FAIL line per criterion. Exits non-zero if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "collapse/conformance.hpp"
#include "collapse/ensemble.hpp"
#include "collapse/fluctuation.hpp"
#include "collapse/io.hpp"
#include "collapse/numeric.hpp"
#include "collapse/spectral.hpp"
#include "collapse/walk.hpp"

using namespace collapse;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

/// Passes iff every listed measurement of the report passes.
Outcome require(const CheckReport &report,
                const std::function<bool(const std::string &)> &select) {
    Outcome out;
    std::ostringstream detail;
    std::size_t used = 0;
    for (const auto &m : report.measurements) {
        if (!select(m.label)) {
            continue;
        }
        ++used;
        if (!m.pass) {
            out.pass = false;
            detail << m.label << "=" << format_double(m.measured) << " vs "
                   << format_double(m.expected) << " (tol "
                   << format_double(m.tolerance) << ") ";
        }
    }
    if (used == 0) {
        out.pass = false;
        detail << "no measurements selected";
    }
    if (out.pass) {
        detail << used << " measurements within tolerance";
    }
    out.detail = detail.str();
    return out;
}

bool starts_with(const std::string &s, const std::string &prefix) {
    return s.rfind(prefix, 0) == 0;
}

bool contains(const std::string &s, const std::string &part) {
    return s.find(part) != std::string::npos;
}

Outcome criterion_1() {
    RunConfig c;
    c.weights = {0.3, 0.7};
    c.params.epsilon = 0.05;
    c.params.seed = 1;
    c.n_trajectories = 10000;
    c.max_steps = 1000000;
    const auto t0 = std::chrono::steady_clock::now();
    const EnsembleStats s = run_ensemble(c);
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    const double f = s.survival_frequency(0);
    Outcome out;
    out.pass = std::abs(f - 0.3) <= 0.0137 && s.unresolved == 0;
    out.detail = "packet-0 survival " + format_double(f) +
                 " (target 0.3 +- 0.0137), unresolved " +
                 std::to_string(s.unresolved) + ", " +
                 format_double(std::round(secs * 100) / 100) + " s";
    return out;
}

Outcome criterion_2() {
    double worst = 0.0;
    std::size_t points = 0;
    for (double eps : {0.25, 0.1, 0.01}) {
        const WalkGrid grid = WalkGrid::from_epsilon(eps);
        std::vector<TransitionScheme> schemes{TransitionScheme::combined(eps)};
        for (auto &[name, q] : sample_miss_functions()) {
            schemes.push_back(TransitionScheme::generic(eps, q));
        }
        for (const auto &scheme : schemes) {
            for (std::size_t m = 0; m <= grid.intervals(); ++m) {
                const double x = grid.point(m);
                worst = std::max(worst, std::abs(absorption_oracle(scheme, x) - x));
                ++points;
            }
        }
    }
    Outcome out;
    out.pass = worst <= 1e-10;
    out.detail = "max |w(x) - x| = " + format_double(worst) + " over " +
                 std::to_string(points) + " (scheme, grid point) pairs";
    return out;
}

WaveState random_state(RandomStream &rng) {
    const std::size_t n = 2 + std::size_t(rng.uniform() * 7.0);
    std::vector<double> w(n);
    double sum = 0.0;
    for (auto &x : w) {
        x = rng.uniform() + 1e-9;
        sum += x;
    }
    for (auto &x : w) {
        x /= sum;
    }
    return WaveState::create(w);
}

Outcome criterion_3() {
    const double eps_values[] = {0.01, 0.05, 0.1, 0.2};
    RandomStream gen(3, 0);
    RandomStream rng(3, 1);
    double worst_nsf = 0.0, worst_psf = 0.0;
    std::uint64_t done = 0;
    std::size_t which = 0;
    WaveState state = random_state(gen);
    FluctuationParams p;
    p.epsilon = eps_values[0];
    while (done < 1000000) {
        if (state.is_collapsed()) {
            state = random_state(gen);
            which = (which + 1) % 4;
            p.epsilon = eps_values[which];
        }
        const auto nsf = apply_nsf_cascade(state, p, rng);
        worst_nsf = std::max(
            worst_nsf, std::abs(nsf.state.total_weight() - (1.0 - p.epsilon)));
        state = apply_psf(nsf.state, p, rng);
        worst_psf = std::max(worst_psf, std::abs(state.total_weight() - 1.0));
        ++done;
    }
    Outcome out;
    out.pass = worst_nsf <= 1e-12 && worst_psf <= 1e-12;
    out.detail = std::to_string(done) + " fluctuations, max |N - (1-eps)| = " +
                 format_double(worst_nsf) + ", max |N - 1| = " +
                 format_double(worst_psf);
    return out;
}

ConformanceConfig base(std::uint64_t samples) {
    ConformanceConfig c;
    c.epsilon = 0.1;
    c.samples = samples;
    c.seed = 2026;
    return c;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char *name;
        std::function<Outcome()> run;
    };

    CheckReport nsf, psf;
    bool means_ready = false;
    auto means = [&] {
        if (!means_ready) {
            nsf = check_nsf_means(base(100000));
            psf = check_psf_means(base(100000));
            means_ready = true;
        }
    };

    const std::vector<Criterion> criteria{
        {1, "measurement axiom", criterion_1},
        {2, "exact oracle identity", criterion_2},
        {3, "norm ladder", criterion_3},
        {4, "NSF mean-weight contraction",
         [&] {
             means();
             return require(nsf, [](const std::string &l) {
                 return starts_with(l, "large.mean_weight") || l == "two.delta";
             });
         }},
        {5, "mean-amplitude factors",
         [&] {
             means();
             Outcome a = require(nsf, [](const std::string &l) {
                 return starts_with(l, "large.mean_amp") ||
                        starts_with(l, "two.small_amp") ||
                        starts_with(l, "phase_minus");
             });
             Outcome b = require(psf, [](const std::string &l) {
                 return starts_with(l, "mean_amp") || starts_with(l, "phase_plus");
             });
             return Outcome{a.pass && b.pass,
                            "NSF: " + a.detail + "; PSF: " + b.detail};
         }},
        {6, "additivity",
         [] {
             const auto r = check_additivity(base(1000000));
             return require(r, [](const std::string &l) {
                 return starts_with(l, "analytic.") ||
                        l == "empirical.pair_vs_merged";
             });
         }},
        {7, "walk-operator equivalence",
         [] {
             ConformanceConfig c = base(1000000);
             c.weights = {0.5, 0.5};
             const auto r = check_walk_equivalence(c);
             Outcome out = require(r, [](const std::string &l) {
                 return starts_with(l, "x=0.5.");
             });
             std::string freq;
             for (const auto &m : r.measurements) {
                 if (starts_with(m.label, "x=0.5.")) {
                     freq += m.label.substr(6) + "=" + format_double(m.measured) + " ";
                 }
             }
             out.detail = freq + "| " + out.detail;
             return out;
         }},
        {8, "spectrum",
         [] {
             const auto r = check_spectral(base(2));
             Outcome out = require(r, [](const std::string &l) {
                 return l == "lambda_0" || l == "lambda_1" ||
                        l == "unit_eigenvalue_count" || l == "T2_ratio" ||
                        l == "evolved_mass_at_1";
             });
             for (const auto &m : r.measurements) {
                 if (m.label == "T2") {
                     out.detail += " [T2 = " + format_double(m.measured) +
                                   ", tau/(2 eps^2) = " +
                                   format_double(m.expected) + "]";
                 }
             }
             return out;
         }},
        {9, "determinism",
         [] {
             RunConfig c;
             c.weights = {0.2, 0.3, 0.5};
             c.phases = {0.0, 1.0, 2.0};
             c.params.epsilon = 0.1;
             c.params.seed = 99;
             c.n_trajectories = 3000;
             c.max_steps = default_max_steps(0.1);
             c.record_every = 2;
             std::string reference;
             std::string ref_csv;
             bool same = true;
             for (unsigned w : {1u, 2u, 5u, 16u}) {
                 c.worker_count = w;
                 const EnsembleStats s = run_ensemble(c);
                 const std::string json = io::ensemble_to_json(s, c);
                 std::ostringstream csv;
                 io::write_series_csv(csv, s);
                 io::write_survival_csv(csv, s, c.initial_state());
                 if (reference.empty()) {
                     reference = json;
                     ref_csv = csv.str();
                 } else {
                     same = same && json == reference && csv.str() == ref_csv;
                 }
             }
             ConformanceConfig cc = base(20000);
             std::string conf_ref;
             for (unsigned w : {1u, 3u}) {
                 cc.workers = w;
                 const auto json =
                     io::reports_to_json(run_checks("axiom", cc), cc);
                 if (conf_ref.empty()) {
                     conf_ref = json;
                 } else {
                     same = same && json == conf_ref;
                 }
             }
             Outcome out;
             out.pass = same;
             out.detail = same ? "ensemble JSON/CSV and conformance JSON "
                                 "byte-identical across worker counts"
                               : "outputs differ across worker counts";
             return out;
         }},
    };

    int failures = 0;
    for (const auto &c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o = Outcome{false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
