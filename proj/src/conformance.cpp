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

#include "collapse/conformance.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <complex>

#include "collapse/ensemble.hpp"
#include "collapse/fluctuation.hpp"
#include "collapse/numeric.hpp"
#include "collapse/rng.hpp"
#include "collapse/spectral.hpp"
#include "collapse/walk.hpp"

namespace collapse {

namespace {

enum CheckTag : std::uint64_t {
    kAxiomTag = 0x10,
    kNsfTag = 0x20,
    kPsfTag = 0x30,
    kAdditivityTag = 0x40,
    kWalkTag = 0x50,
};

/// Welford running mean and variance.
class RunningMean {
  public:
    void add(double x) noexcept {
        ++n_;
        const double delta = x - mean_;
        mean_ += delta / double(n_);
        m2_ += delta * (x - mean_);
    }
    [[nodiscard]] double mean() const noexcept { return mean_; }
    /// Standard error of the mean.
    [[nodiscard]] double stderr_mean() const noexcept {
        if (n_ < 2) {
            return 0.0;
        }
        return std::sqrt(m2_ / double(n_ - 1) / double(n_));
    }

  private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct PacketMeans {
    std::vector<RunningMean> weight, re, im;
    explicit PacketMeans(std::size_t n) : weight(n), re(n), im(n) {}
    void add(const WaveState &s) {
        for (std::size_t i = 0; i < s.size(); ++i) {
            const auto a = s.amplitude(i);
            weight[i].add(s.weight(i));
            re[i].add(a.real());
            im[i].add(a.imag());
        }
    }
};

double stat_tol(double sigmas, double stderr_value) {
    return sigmas * stderr_value + kToleranceFloor;
}

double binomial_tol(double sigmas, double p, double n) {
    return sigmas * std::sqrt(std::max(p * (1.0 - p), 0.0) / n) +
           kToleranceFloor;
}

FluctuationParams params_for(const ConformanceConfig &c) {
    FluctuationParams p;
    p.epsilon = c.epsilon;
    p.tau = c.tau;
    p.phase_dist = c.phase_dist;
    p.seed = c.seed;
    return p;
}

std::string idx(const std::string &base, std::size_t i) {
    return base + "[" + std::to_string(i) + "]";
}

bool all_at_least(const std::vector<double> &w, double eps) {
    return !w.empty() &&
           std::all_of(w.begin(), w.end(), [eps](double x) { return x >= eps; });
}

/// NSF-only replicas of `state`; records per-packet means.
PacketMeans nsf_replicas(const WaveState &state, const FluctuationParams &p,
                         std::uint64_t n, std::uint64_t seed,
                         std::uint64_t stream) {
    PacketMeans means(state.size());
    RandomStream rng(seed, stream);
    for (std::uint64_t k = 0; k < n; ++k) {
        means.add(apply_nsf_cascade(state, p, rng).state);
    }
    return means;
}

} // namespace

Measurement &CheckReport::add(std::string label, double measured,
                              double expected, double tolerance,
                              std::string reference, bool informational) {
    Measurement m;
    m.label = std::move(label);
    m.measured = measured;
    m.expected = expected;
    m.tolerance = tolerance;
    m.reference = std::move(reference);
    m.informational = informational;
    m.pass = std::abs(measured - expected) <= tolerance;
    if (!m.pass && !informational) {
        pass = false;
    }
    measurements.push_back(std::move(m));
    return measurements.back();
}

void ConformanceConfig::validate() const {
    FluctuationParams p;
    p.epsilon = epsilon;
    p.tau = tau;
    (void)p.validate();
    if (samples < 2) {
        throw InvalidArgument("conformance needs at least 2 samples");
    }
    if (!weights.empty()) {
        (void)WaveState::create(weights);
    }
    if (!(start >= 0.0 && start <= 1.0)) {
        throw InvalidArgument("start weight must lie in [0, 1]");
    }
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag) {
    // splitmix64 finalizer
    std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (tag + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::vector<std::pair<std::string, std::function<double(double)>>>
sample_miss_functions() {
    return {
        {"q=0", [](double) { return 0.0; }},
        {"q=1/2", [](double) { return 0.5; }},
        {"q=0.5+0.4sin(7x)",
         [](double x) { return 0.5 + 0.4 * std::sin(7.0 * x); }},
    };
}

namespace cascade_deviation {

double bound(double x, double eps) {
    const double s = x / eps;
    return eps * eps * s * (1.0 - s);
}

double two_packet(double x, double eps) { return bound(x, eps); }

std::pair<double, double> three_packet(double x, double y, double eps) {
    if (x + y >= eps) {
        // one redraw finishes the cascade
        const double dx = bound(x, eps) - (x / eps) * (eps / (1.0 - y)) * bound(y, eps);
        const double dy = bound(y, eps) - (y / eps) * (eps / (1.0 - x)) * bound(x, eps);
        return {dx, dy};
    }
    auto dev = [eps](double a, double other) {
        const double s = a / (eps * (1.0 - other));
        return eps * eps * (1.0 - other) * s * (1.0 - s);
    };
    return {dev(x, y), dev(y, x)};
}

} // namespace cascade_deviation

CheckReport check_measurement_axiom(const ConformanceConfig &config) {
    config.validate();
    CheckReport report;
    report.name = "axiom";

    RunConfig run;
    run.weights = config.weights.empty() ? std::vector<double>{0.3, 0.7}
                                         : config.weights;
    run.params = params_for(config);
    run.params.seed = derive_seed(config.seed, kAxiomTag);
    run.n_trajectories = config.samples;
    run.max_steps = config.max_steps > 0 ? config.max_steps
                                         : default_max_steps(config.epsilon);
    run.worker_count = config.workers;
    const WaveState initial = run.initial_state();
    const EnsembleStats stats = run_ensemble(run);
    report.samples = stats.total_trajectories;

    const double resolved = double(stats.resolved());
    for (std::size_t i = 0; i < initial.size(); ++i) {
        const double w = initial.weight(i);
        report.add(idx("survival_frequency", i), stats.survival_frequency(i), w,
                   binomial_tol(kMeanSigmas, w, resolved),
                   "w_inf(x) = x, 3 sigma binomial");
    }
    report.add("unresolved_fraction",
               double(stats.unresolved) / double(stats.total_trajectories), 0.0,
               1e-3, "collapse within max_steps");
    NeumaierSum total;
    for (std::size_t i = 0; i < initial.size(); ++i) {
        total += stats.survival_frequency(i);
    }
    report.add("survival_frequency_sum", total.value(), 1.0, 1e-12,
               "exactly one packet survives");

    // exact companion: absorption oracle on the grid
    const double inverse = 1.0 / config.epsilon;
    if (std::abs(std::round(inverse) * config.epsilon - 1.0) <= 1e-12 &&
        config.epsilon <= 0.5) {
        const auto grid = WalkGrid::from_epsilon(config.epsilon);
        std::vector<std::pair<std::string, TransitionScheme>> schemes{
            {"combined", TransitionScheme::combined(config.epsilon)}};
        for (auto &[label, q] : sample_miss_functions()) {
            schemes.emplace_back(label,
                                 TransitionScheme::generic(config.epsilon, q));
        }
        for (const auto &[label, scheme] : schemes) {
            double worst = 0.0;
            for (std::size_t m = 0; m <= grid.intervals(); ++m) {
                const double x = grid.point(m);
                worst = std::max(worst, std::abs(absorption_oracle(scheme, x) - x));
            }
            report.add("oracle_max_deviation[" + label + "]", worst, 0.0, 1e-10,
                       "exact absorption solve, w(x) = x");
        }
    } else {
        report.notes.push_back("oracle branch skipped: 1/eps is not an "
                               "integer or eps > 1/2");
    }
    return report;
}

CheckReport check_nsf_means(const ConformanceConfig &config) {
    config.validate();
    CheckReport report;
    report.name = "nsf-means";
    const double eps = config.epsilon;
    const FluctuationParams params = params_for(config);
    const std::uint64_t seed = derive_seed(config.seed, kNsfTag);
    const std::uint64_t n = config.samples;
    report.samples = n;

    // Large packets only: k_- = c_- = 1 - eps exactly.
    {
        std::vector<double> w = all_at_least(config.weights, eps)
                                    ? config.weights
                                    : std::vector<double>{0.6, 0.4};
        std::vector<double> phases(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            phases[i] = 0.3 + 0.8 * double(i);
        }
        const WaveState s = WaveState::create(w, phases);
        const PacketMeans m = nsf_replicas(s, params, n, seed, 1);
        for (std::size_t i = 0; i < s.size(); ++i) {
            const auto a = s.amplitude(i);
            report.add(idx("large.mean_weight", i), m.weight[i].mean(),
                       (1.0 - eps) * s.weight(i),
                       stat_tol(kMeanSigmas, m.weight[i].stderr_mean()),
                       "k_- = 1 - eps for x >= eps");
            report.add(idx("large.mean_amp_re", i), m.re[i].mean(),
                       (1.0 - eps) * a.real(),
                       stat_tol(kMeanSigmas, m.re[i].stderr_mean()),
                       "c_- = 1 - eps for x >= eps");
            report.add(idx("large.mean_amp_im", i), m.im[i].mean(),
                       (1.0 - eps) * a.imag(),
                       stat_tol(kMeanSigmas, m.im[i].stderr_mean()),
                       "c_- = 1 - eps for x >= eps");
        }
    }

    // Two packets, x = eps/2: deviation reaches its maximum eps^2/4.
    {
        const double x = 0.5 * eps;
        const std::vector<double> w{x, 1.0 - x};
        const std::vector<double> phases{0.7, 2.0};
        const WaveState s = WaveState::create(w, phases);
        const PacketMeans m = nsf_replicas(s, params, n, seed, 2);
        report.add("two.delta", m.weight[0].mean() - (1.0 - eps) * s.weight(0),
                   cascade_deviation::two_packet(s.weight(0), eps),
                   stat_tol(kMeanSigmas, m.weight[0].stderr_mean()),
                   "Delta = eps^2 (x/eps)(1 - x/eps) = eps^2/4 at x = eps/2");
        const auto a = s.amplitude(0);
        report.add("two.small_amp_re", m.re[0].mean(), (1.0 - x) * a.real(),
                   stat_tol(kMeanSigmas, m.re[0].stderr_mean()),
                   "c_- = 1 - x_i for x_i < eps");
        report.add("two.small_amp_im", m.im[0].mean(), (1.0 - x) * a.imag(),
                   stat_tol(kMeanSigmas, m.im[0].stderr_mean()),
                   "c_- = 1 - x_i for x_i < eps");
    }

    // Two small packets plus one large: one redraw (x + y >= eps) and two
    // redraws (x + y < eps).
    const std::pair<double, double> small_pairs[] = {{0.6 * eps, 0.7 * eps},
                                                     {0.3 * eps, 0.4 * eps}};
    for (std::size_t c = 0; c < 2; ++c) {
        const auto [x, y] = small_pairs[c];
        const std::string tag = c == 0 ? "three.one_redraw" : "three.two_redraws";
        const std::vector<double> w{x, y, 1.0 - x - y};
        const WaveState s = WaveState::create(w);
        const PacketMeans m = nsf_replicas(s, params, n, seed, 3 + c);
        const auto [dx, dy] = cascade_deviation::three_packet(s.weight(0),
                                                              s.weight(1), eps);
        report.add(tag + ".delta_x",
                   m.weight[0].mean() - (1.0 - eps) * s.weight(0), dx,
                   stat_tol(kMeanSigmas, m.weight[0].stderr_mean()),
                   "cascade tree mean");
        report.add(tag + ".delta_y",
                   m.weight[1].mean() - (1.0 - eps) * s.weight(1), dy,
                   stat_tol(kMeanSigmas, m.weight[1].stderr_mean()),
                   "cascade tree mean");
        // analytic: dx <= eps^2 (x/eps)(1 - x/eps) <= eps^2/4
        const double bx = cascade_deviation::bound(s.weight(0), eps);
        const double by = cascade_deviation::bound(s.weight(1), eps);
        report.add(tag + ".delta_x_within_bound",
                   dx <= bx && bx <= 0.25 * eps * eps ? 1.0 : 0.0,
                   1.0, 0.0, "Delta_x <= eps^2 (x/eps)(1 - x/eps) <= eps^2/4");
        report.add(tag + ".delta_y_within_bound",
                   dy <= by && by <= 0.25 * eps * eps ? 1.0 : 0.0,
                   1.0, 0.0, "Delta_y <= eps^2 (y/eps)(1 - y/eps) <= eps^2/4");
    }

    // Equal small packets: exact by symmetry.
    {
        const auto count = static_cast<std::size_t>(std::floor(1.0 / eps)) + 1;
        const std::vector<double> w(count, 1.0 / double(count));
        const WaveState s = WaveState::create(w);
        const PacketMeans m = nsf_replicas(s, params, n, seed, 5);
        for (std::size_t i = 0; i < count; ++i) {
            report.add(idx("equal_small.mean_weight", i), m.weight[i].mean(),
                       (1.0 - eps) * s.weight(i),
                       stat_tol(kMeanSigmas, m.weight[i].stderr_mean()),
                       "equal small packets: (1 - eps) x by symmetry");
        }
    }

    // Phase sampler: mean of e^{i xi} is sqrt(1 - eps/x).
    if (config.phase_dist == PhaseDistribution::ThreePoint) {
        const double x = std::min(1.0, 4.0 * eps);
        RandomStream rng(seed, 6);
        RunningMean re, im;
        for (std::uint64_t k = 0; k < n; ++k) {
            const auto v = sample_phase_negative(x, eps, rng, params).value();
            re.add(v.real());
            im.add(v.imag());
        }
        report.add("phase_minus.mean_re", re.mean(), negative_phase_mean(x, eps),
                   stat_tol(kMeanSigmas, re.stderr_mean()),
                   "theta_- = sqrt(1 - eps/x)");
        report.add("phase_minus.mean_im", im.mean(), 0.0,
                   stat_tol(kMeanSigmas, im.stderr_mean()), "theta_- is real");
    } else {
        report.notes.push_back("phase-sampler means skipped: distribution is " +
                               to_string(config.phase_dist));
    }
    return report;
}

CheckReport check_psf_means(const ConformanceConfig &config) {
    config.validate();
    CheckReport report;
    report.name = "psf-means";
    const double eps = config.epsilon;
    const FluctuationParams params = params_for(config);
    const std::uint64_t seed = derive_seed(config.seed, kPsfTag);
    const std::uint64_t n = config.samples;
    report.samples = n;

    {
        const std::vector<double> base =
            config.weights.empty() ? std::vector<double>{0.5, 0.5}
                                   : config.weights;
        std::vector<double> w(base.size()), phases(base.size());
        for (std::size_t i = 0; i < base.size(); ++i) {
            w[i] = (1.0 - eps) * base[i];
            phases[i] = 0.4 + 0.9 * double(i);
        }
        const WaveState s = WaveState::unnormalized(w, phases);
        PacketMeans m(s.size());
        RandomStream rng(seed, 1);
        for (std::uint64_t k = 0; k < n; ++k) {
            m.add(apply_psf(s, params, rng));
        }
        for (std::size_t i = 0; i < s.size(); ++i) {
            const auto a = s.amplitude(i);
            report.add(idx("mean_weight", i), m.weight[i].mean(),
                       s.weight(i) / (1.0 - eps),
                       stat_tol(kMeanSigmas, m.weight[i].stderr_mean()),
                       "k_+ = 1/(1 - eps)");
            report.add(idx("mean_amp_re", i), m.re[i].mean(), a.real(),
                       stat_tol(kMeanSigmas, m.re[i].stderr_mean()), "c_+ = 1");
            report.add(idx("mean_amp_im", i), m.im[i].mean(), a.imag(),
                       stat_tol(kMeanSigmas, m.im[i].stderr_mean()), "c_+ = 1");
        }
    }

    // Sole live packet: the PSF is deterministic in weight.
    {
        const std::vector<double> w{0.0, 1.0 - eps};
        const WaveState s = WaveState::unnormalized(w);
        RandomStream rng(seed, 2);
        double worst = 0.0;
        const std::uint64_t reps = std::min<std::uint64_t>(n, 1000);
        for (std::uint64_t k = 0; k < reps; ++k) {
            const WaveState out = apply_psf(s, params, rng);
            worst = std::max({worst, std::abs(out.weight(0)),
                              std::abs(out.weight(1) - 1.0)});
        }
        report.add("single_live.max_deviation", worst, 0.0, kNormTolerance,
                   "(0, 1 - eps) -> (0, 1)");
    }

    if (config.phase_dist == PhaseDistribution::ThreePoint) {
        const double x = 0.5;
        RandomStream rng(seed, 3);
        RunningMean re, im;
        for (std::uint64_t k = 0; k < n; ++k) {
            const auto v = sample_phase_positive(x, eps, rng, params).value();
            re.add(v.real());
            im.add(v.imag());
        }
        report.add("phase_plus.mean_re", re.mean(), positive_phase_mean(x, eps),
                   stat_tol(kMeanSigmas, re.stderr_mean()),
                   "theta_+ = (1 + eps/x')^(-1/2)");
        report.add("phase_plus.mean_im", im.mean(), 0.0,
                   stat_tol(kMeanSigmas, im.stderr_mean()), "theta_+ is real");
    } else {
        report.notes.push_back("phase-sampler means skipped: distribution is " +
                               to_string(config.phase_dist));
    }
    return report;
}

CheckReport check_additivity(const ConformanceConfig &config) {
    config.validate();
    CheckReport report;
    report.name = "additivity";
    const std::uint64_t seed = derive_seed(config.seed, kAdditivityTag);
    const std::uint64_t n = config.samples;
    report.samples = n;

    const std::vector<double> w = config.weights.size() >= 3
                                      ? config.weights
                                      : std::vector<double>{0.2, 0.3, 0.5};
    const WaveState s = WaveState::create(w);
    const std::size_t pair[] = {0, 1};

    std::vector<double> merged_w{s.weight(0) + s.weight(1)};
    for (std::size_t i = 2; i < s.size(); ++i) {
        merged_w.push_back(s.weight(i));
    }
    const WaveState merged = WaveState::create(merged_w);

    const double p_pair = group_hit_probability(s, pair);
    const double p_sum = hit_probability(s, 0) + hit_probability(s, 1);
    const double p_merged = hit_probability(merged, 0);
    report.add("analytic.pair_vs_sum", p_pair, p_sum, 4.0 * DBL_EPSILON,
               "p(x1 + x2) = p(x1) + p(x2)");
    report.add("analytic.pair_vs_merged", p_pair, p_merged, 4.0 * DBL_EPSILON,
               "merged packet hit probability");

    // a destroyed packet in the group changes nothing
    std::vector<double> padded = w;
    padded.push_back(0.0);
    const WaveState with_dead = WaveState::create(padded);
    const std::size_t dead_pair[] = {0, 1, padded.size() - 1};
    report.add("analytic.destroyed_member", group_hit_probability(with_dead, dead_pair),
               p_pair, 4.0 * DBL_EPSILON, "zero weight contributes nothing");

    std::uint64_t pair_hits = 0;
    std::uint64_t merged_hits = 0;
    RandomStream rng_a(seed, 1);
    RandomStream rng_b(seed, 2);
    for (std::uint64_t k = 0; k < n; ++k) {
        const std::size_t a = draw_packet(s, rng_a);
        pair_hits += (a == 0 || a == 1) ? 1 : 0;
        merged_hits += draw_packet(merged, rng_b) == 0 ? 1 : 0;
    }
    const double f_pair = double(pair_hits) / double(n);
    const double f_merged = double(merged_hits) / double(n);
    const double two_sample =
        kFrequencySigmas * std::sqrt(2.0 * p_pair * (1.0 - p_pair) / double(n)) +
        kToleranceFloor;
    report.add("empirical.pair_vs_merged", f_pair, f_merged, two_sample,
               "two-sample frequency test, 4 sigma");
    report.add("empirical.pair_vs_analytic", f_pair, p_pair,
               binomial_tol(kFrequencySigmas, p_pair, double(n)),
               "(x1 + x2) / total weight, 4 sigma");

    // the whole state as the group
    std::vector<std::size_t> all(s.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = i;
    }
    report.add("analytic.all_packets", group_hit_probability(s, all), 1.0,
               4.0 * DBL_EPSILON, "the semi-fluctuation happens somewhere");
    return report;
}

CheckReport check_walk_equivalence(const ConformanceConfig &config) {
    config.validate();
    CheckReport report;
    report.name = "walk";
    const double eps = config.epsilon;
    const std::uint64_t seed = derive_seed(config.seed, kWalkTag);
    const std::uint64_t n = config.samples;
    report.samples = n;
    if (eps > 0.5) {
        report.skipped = true;
        report.notes.push_back("combined scheme needs eps <= 1/2");
        return report;
    }
    const FluctuationParams params = params_for(config);
    const TransitionScheme combined = TransitionScheme::combined(eps);

    std::vector<double> starts;
    if (config.weights.size() == 2 && config.weights[0] >= eps &&
        config.weights[0] <= 1.0 - eps) {
        starts.push_back(config.weights[0]);
    } else {
        starts.push_back(0.5);
    }
    starts.push_back(eps);

    for (std::size_t c = 0; c < starts.size(); ++c) {
        const double x = starts[c];
        const std::vector<double> w{x, 1.0 - x};
        const WaveState s = WaveState::create(w);
        RandomStream rng(seed, c + 1);
        std::uint64_t down = 0, stay = 0, up = 0;
        for (std::uint64_t k = 0; k < n; ++k) {
            const double after = fluctuate(s, params, rng).state.weight(0);
            const double delta = after - s.weight(0);
            if (delta < -0.5 * eps) {
                ++down;
            } else if (delta > 0.5 * eps) {
                ++up;
            } else {
                ++stay;
            }
        }
        const auto t = transition_probs(s.weight(0), combined);
        const std::string tag = "x=" + format_double(x);
        const double nn = double(n);
        report.add(tag + ".p", double(down) / nn, t.p,
                   binomial_tol(kFrequencySigmas, t.p, nn),
                   "p = x(1 - x)/(1 - eps)");
        report.add(tag + ".q", double(stay) / nn, t.q,
                   binomial_tol(kFrequencySigmas, t.q, nn),
                   "q = 1 - 2x(1 - x)/(1 - eps)");
        report.add(tag + ".r", double(up) / nn, t.r,
                   binomial_tol(kFrequencySigmas, t.r, nn),
                   "r = x(1 - x)/(1 - eps)");
    }

    // The x < eps row meets the middle row at x = eps for every q.
    const double below = std::nextafter(eps, 0.0);
    for (const auto &[label, q] : sample_miss_functions()) {
        const auto scheme = TransitionScheme::generic(eps, q);
        const auto left = transition_probs(below, scheme);
        const auto right = transition_probs(eps, scheme);
        const double gap = std::max({std::abs(left.p - right.p),
                                     std::abs(left.q - right.q),
                                     std::abs(left.r - right.r)});
        report.add("boundary_continuity[" + label + "]", gap, 0.0, 1e-9,
                   "rows agree at x = eps");
    }
    const auto lo = transition_probs(eps, combined);
    const auto hi = transition_probs(1.0 - eps, combined);
    report.add("mirror.p_hi_vs_r_lo", hi.p, lo.r, 1e-15, "x <-> 1 - x, p <-> r");
    report.add("mirror.r_hi_vs_p_lo", hi.r, lo.p, 1e-15, "x <-> 1 - x, p <-> r");
    return report;
}

CheckReport check_spectral(const ConformanceConfig &config) {
    config.validate();
    CheckReport report;
    report.name = "spectral";
    const double eps = config.epsilon;
    const double tau = config.tau;
    const StatMatrix S = build_stat_matrix(eps); // throws off-grid
    const std::size_t M = S.intervals;
    const bool asymptotic = M >= 10;
    const bool vectors = M <= 400;
    SpectralOptions options;
    options.tau = tau;
    options.eigenvectors = vectors;
    const SpectralResult spec = eigen_spectrum(S, options);

    report.add("lambda_0", spec.eigenvalues[0], 1.0, kUnitEigenvalueTolerance,
               "lambda_0 = 1");
    report.add("lambda_1", spec.eigenvalues[1], 1.0, kUnitEigenvalueTolerance,
               "lambda_1 = 1");
    std::size_t unit = 0;
    double lowest = 1.0;
    for (double l : spec.eigenvalues) {
        unit += std::abs(l - 1.0) <= kUnitEigenvalueTolerance ? 1 : 0;
        lowest = std::min(lowest, l);
    }
    report.add("unit_eigenvalue_count", double(unit), 2.0, 0.0,
               "two absorbing states");
    report.add("lowest_eigenvalue_nonnegative", lowest >= -1e-12 ? 1.0 : 0.0,
               1.0, 0.0, "remaining eigenvalues in [0, 1)");

    const double t2 = spec.selection_time;
    const double asymptote = tau / (2.0 * eps * eps);
    report.add("T2_ratio", t2 / asymptote, 1.0, 0.1,
               "T2 ~ tau/(2 eps^2), 10% (asserted for M >= 10)", !asymptotic);
    report.add("T2", t2, asymptote, 0.1 * asymptote, "tau/(2 eps^2)", true);
    report.add("lambda_2_closed_form", spec.eigenvalues[2],
               1.0 - 2.0 * eps * eps / (1.0 - eps), 1e-10,
               "1 - k(k-1) eps^2/(1 - eps) at k = 2");

    if (vectors) {
        const Eigen::MatrixXd gram = spec.left.transpose() * spec.right;
        const double err =
            (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols()))
                .cwiseAbs()
                .maxCoeff();
        report.add("biorthonormality", err, 0.0, 1e-8, "<L_k|R_k'> = delta");
    }

    const WalkGrid grid = WalkGrid::from_epsilon(eps);
    if (grid.contains(config.start)) {
        const double x0 = grid.point(grid.index_of(config.start));
        const auto steps =
            static_cast<std::size_t>(std::ceil(100.0 * t2 / tau));
        const auto phi = evolve_distribution(S, point_distribution(S, x0), steps);
        const double oracle =
            absorption_oracle(TransitionScheme::combined(eps), x0);
        report.add("evolved_mass_at_1", phi.back(), oracle, 1e-3,
                   "100 T2 steps vs absorption oracle");
        report.samples = steps;
    } else {
        report.notes.push_back("start " + format_double(config.start) +
                               " is off the grid; evolution check skipped");
    }
    if (!asymptotic) {
        report.notes.push_back("M = " + std::to_string(M) +
                               " < 10: T2 ratio reported, not asserted");
    }
    return report;
}

const std::vector<std::string> &check_names() {
    static const std::vector<std::string> names{
        "axiom", "nsf-means", "psf-means", "additivity", "walk", "spectral"};
    return names;
}

std::vector<CheckReport> run_checks(const std::string &name,
                                    const ConformanceConfig &config) {
    config.validate();
    auto one = [&](const std::string &n) -> CheckReport {
        if (n == "axiom") {
            return check_measurement_axiom(config);
        }
        if (n == "nsf-means") {
            return check_nsf_means(config);
        }
        if (n == "psf-means") {
            return check_psf_means(config);
        }
        if (n == "additivity") {
            return check_additivity(config);
        }
        if (n == "walk") {
            return check_walk_equivalence(config);
        }
        if (n == "spectral") {
            return check_spectral(config);
        }
        throw InvalidArgument("unknown check '" + n + "'");
    };
    if (name != "all") {
        return {one(name)};
    }
    std::vector<CheckReport> reports;
    for (const auto &n : check_names()) {
        if (n == "spectral") {
            try {
                reports.push_back(one(n));
            } catch (const InvalidArgument &e) {
                CheckReport skipped;
                skipped.name = n;
                skipped.skipped = true;
                skipped.notes.push_back(std::string("skipped: ") + e.what());
                reports.push_back(std::move(skipped));
            }
            continue;
        }
        reports.push_back(one(n));
    }
    return reports;
}

} // namespace collapse
