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

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "collapse/state.hpp"

namespace collapse {

/// One compared quantity. pass <=> |measured - expected| <= tolerance,
/// unless the entry is informational (then it never fails the check).
struct Measurement {
    std::string label;
    double measured = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    /// What the expected value comes from.
    std::string reference;
    bool informational = false;
    bool pass = false;
};

struct CheckReport {
    std::string name;
    std::vector<Measurement> measurements;
    std::vector<std::string> notes;
    std::uint64_t samples = 0;
    bool skipped = false;
    bool pass = true;

    /// Appends and updates pass.
    Measurement &add(std::string label, double measured, double expected,
                     double tolerance, std::string reference,
                     bool informational = false);
};

struct ConformanceConfig {
    double epsilon = 0.1;
    double tau = 1.0;
    /// Empty: each check uses its own default state.
    std::vector<double> weights;
    /// Trajectories, draws or replicas per experiment.
    std::uint64_t samples = 100'000;
    std::uint64_t seed = 0;
    /// 0 picks default_max_steps(epsilon).
    std::uint64_t max_steps = 0;
    unsigned workers = 0;
    /// Start weight for the spectral evolution check.
    double start = 0.3;
    PhaseDistribution phase_dist = PhaseDistribution::ThreePoint;

    /// Throws InvalidArgument on bad values.
    void validate() const;
};

/// z-score multipliers: means use 3 sigma, frequency matching 4 sigma.
inline constexpr double kMeanSigmas = 3.0;
inline constexpr double kFrequencySigmas = 4.0;

/// Floor added to statistical tolerances so identically-zero quantities
/// (sigma = 0) compare cleanly.
inline constexpr double kToleranceFloor = 1e-12;

/// Named miss functions q(x) used to exercise the generic scheme.
std::vector<std::pair<std::string, std::function<double(double)>>>
sample_miss_functions();

/// Closed-form mean-weight deviations of the cascade NSF,
/// mean(x_after) - (1 - eps) x.
namespace cascade_deviation {
/// Two packets (x, 1 - x), x < eps.
double two_packet(double x, double eps);
/// Three packets (x, y, 1 - x - y), x, y < eps; returns (dx, dy).
std::pair<double, double> three_packet(double x, double y, double eps);
/// Upper bound eps^2 (x/eps)(1 - x/eps).
double bound(double x, double eps);
} // namespace cascade_deviation

CheckReport check_measurement_axiom(const ConformanceConfig &config);
CheckReport check_nsf_means(const ConformanceConfig &config);
CheckReport check_psf_means(const ConformanceConfig &config);
CheckReport check_additivity(const ConformanceConfig &config);
CheckReport check_walk_equivalence(const ConformanceConfig &config);
CheckReport check_spectral(const ConformanceConfig &config);

/// Check names accepted by run_checks: axiom, nsf-means, psf-means,
/// additivity, walk, spectral.
const std::vector<std::string> &check_names();

/// Runs the named check ("all" expands to every check). Throws
/// InvalidArgument for unknown names.
std::vector<CheckReport> run_checks(const std::string &name,
                                    const ConformanceConfig &config);

/// Seed for an independent consumer derived from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag);

} // namespace collapse
