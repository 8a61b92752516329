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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "collapse/fluctuation.hpp"
#include "collapse/state.hpp"

namespace collapse {

/// Stream tag reserved for ensemble trajectories.
inline constexpr std::uint64_t kTrajectoryStreamTag = 1;

struct RunConfig {
    std::vector<double> weights;
    std::vector<double> phases;
    FluctuationParams params;
    std::uint64_t n_trajectories = 1000;
    std::uint64_t max_steps = 1'000'000;
    /// Time-series stride in fluctuations; 0 records no series.
    std::uint64_t record_every = 0;
    /// 0 picks the hardware concurrency.
    unsigned worker_count = 0;

    /// Throws InvalidArgument on any violated precondition; returns the
    /// parameter warnings.
    std::vector<std::string> validate() const;
    [[nodiscard]] WaveState initial_state() const;
};

/// max_steps large enough that the slowest relaxation mode has decayed:
/// factor * tau / (2 eps^2) steps, at least `floor`.
std::uint64_t default_max_steps(double eps, double factor = 1000.0,
                                std::uint64_t floor = 1000);

struct TrajectoryResult {
    /// Set iff the state collapsed within max_steps.
    std::optional<std::size_t> surviving_packet;
    /// Fluctuations applied before collapse (max_steps when unresolved).
    std::uint64_t steps_to_collapse = 0;
    /// cascade_lengths[k] = number of NSF cascades with k draws.
    std::vector<std::uint64_t> cascade_lengths;
};

/// Random stream of trajectory `index` under master seed `seed`.
RandomStream trajectory_stream(std::uint64_t seed, std::uint64_t index);

/// Runs one trajectory to collapse or max_steps. Replays bit-exactly for a
/// given (seed, index).
TrajectoryResult run_trajectory(const RunConfig &config,
                                std::uint64_t trajectory_index);

struct EnsembleStats {
    std::uint64_t total_trajectories = 0;
    std::vector<std::uint64_t> survival_counts;
    std::uint64_t unresolved = 0;

    std::uint64_t record_every = 0;
    /// Fluctuation count at each recorded sample.
    std::vector<std::uint64_t> sample_steps;
    /// [sample][packet] ensemble means. Trajectories that already stopped
    /// (collapsed or capped) contribute their final state.
    std::vector<std::vector<double>> mean_weights;
    std::vector<std::vector<std::complex<double>>> mean_amplitudes;

    /// steps_to_collapse -> count, resolved trajectories only.
    std::map<std::uint64_t, std::uint64_t> collapse_time_histogram;
    /// length -> count over all cascades of all trajectories.
    std::vector<std::uint64_t> cascade_length_histogram;

    [[nodiscard]] std::size_t packet_count() const noexcept {
        return survival_counts.size();
    }
    [[nodiscard]] std::uint64_t resolved() const noexcept {
        return total_trajectories - unresolved;
    }
    /// Survival count over resolved trajectories.
    [[nodiscard]] double survival_frequency(std::size_t packet) const;
    [[nodiscard]] double mean_collapse_steps() const;

    friend bool operator==(const EnsembleStats &,
                           const EnsembleStats &) = default;
};

/// Runs n_trajectories trajectories on a worker pool. The result depends
/// only on the config (never on worker_count or scheduling).
EnsembleStats run_ensemble(const RunConfig &config);

/// Ensemble mean of the complex amplitude of `packet` at each sample.
std::vector<std::complex<double>>
mean_amplitude_series(const EnsembleStats &stats, std::size_t packet);
/// Ensemble mean weight of `packet` at each sample.
std::vector<double> mean_weight_series(const EnsembleStats &stats,
                                       std::size_t packet);

/// Worker count actually used for a requested count (0 = auto).
unsigned resolve_worker_count(unsigned requested);

} // namespace collapse
