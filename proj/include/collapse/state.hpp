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
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace collapse {

class RandomStream;

/// Raised when an argument violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Norm ladder tolerance: total weight after each semi-fluctuation.
inline constexpr double kNormTolerance = 1e-12;

/// Accepted distance of a user-supplied weight sum from 1 before rescaling.
inline constexpr double kInputNormTolerance = 1e-9;

/// One term a_i |i> of the superposition, stored as (|a_i|^2, arg a_i).
///
/// weight == 0 means the packet is destroyed; its phase is then 0.
struct PacketAmplitude {
    double weight = 0.0;
    double phase = 0.0;

    [[nodiscard]] bool alive() const noexcept { return weight > 0.0; }
    [[nodiscard]] std::complex<double> amplitude() const;

    friend bool operator==(const PacketAmplitude &,
                           const PacketAmplitude &) = default;
};

/// Wraps an angle into [0, 2*pi).
double wrap_phase(double angle);

/// Surrogate wave function: an ordered list of orthogonal packets.
///
/// The packet count is fixed at construction. Weights only change through
/// reduce/raise/destroy, and a destroyed packet can never be revived.
class WaveState {
  public:
    /// Validates and builds a state. Weight sums within 1e-9 of 1 are
    /// rescaled to sum to 1; an empty phase list means all phases 0.
    static WaveState create(std::span<const double> weights,
                            std::span<const double> phases = {});
    /// Builds a state without the unit-norm requirement, e.g. a post-NSF
    /// state of total weight 1 - eps. Weights must still be >= 0 and the
    /// total positive.
    static WaveState unnormalized(std::span<const double> weights,
                                  std::span<const double> phases = {});

    [[nodiscard]] std::size_t size() const noexcept { return packets_.size(); }
    [[nodiscard]] const PacketAmplitude &operator[](std::size_t i) const {
        return packets_.at(i);
    }
    [[nodiscard]] std::span<const PacketAmplitude> packets() const noexcept {
        return packets_;
    }

    [[nodiscard]] double weight(std::size_t i) const {
        return packets_.at(i).weight;
    }
    [[nodiscard]] std::complex<double> amplitude(std::size_t i) const {
        return packets_.at(i).amplitude();
    }

    /// Sum of all packet weights (compensated).
    [[nodiscard]] double total_weight() const noexcept;
    [[nodiscard]] std::size_t live_count() const noexcept;
    /// True iff exactly one packet has nonzero weight. No thresholding.
    [[nodiscard]] bool is_collapsed() const noexcept;
    /// Index of the sole live packet, if collapsed.
    [[nodiscard]] std::optional<std::size_t> survivor() const noexcept;

    /// Sets packet i to weight 0 and phase 0.
    void destroy(std::size_t i);
    /// Replaces the weight of a live packet with new_weight > 0 and
    /// rotates its phase by `rotation`.
    void reshape(std::size_t i, double new_weight, double rotation);

    friend bool operator==(const WaveState &, const WaveState &) = default;

  private:
    explicit WaveState(std::vector<PacketAmplitude> packets)
        : packets_(std::move(packets)) {}

    std::vector<PacketAmplitude> packets_;
};

/// Free-function spelling of WaveState::create.
WaveState new_state(std::span<const double> weights,
                    std::span<const double> phases = {});

inline double total_weight(const WaveState &state) noexcept {
    return state.total_weight();
}

inline bool is_collapsed(const WaveState &state) noexcept {
    return state.is_collapsed();
}

/// A realized unit phase factor e^{i angle}.
struct PhaseSample {
    double angle = 0.0;

    [[nodiscard]] std::complex<double> value() const {
        return std::polar(1.0, angle);
    }
    friend bool operator==(const PhaseSample &, const PhaseSample &) = default;
};

/// Distribution of the phase factors attached to each semi-fluctuation.
enum class PhaseDistribution {
    /// 1 with probability equal to the required mean, +i or -i otherwise.
    ThreePoint,
    /// Always 1. Breaks the mean-amplitude constraint; ablation only.
    DeterministicReal,
    /// Caller-supplied sampler in FluctuationParams::custom_sampler.
    Custom,
};

/// Draws a phase factor whose ensemble mean should equal target_mean.
using PhaseSampler =
    std::function<PhaseSample(double target_mean, RandomStream &rng)>;

/// Free parameters of the fluctuation model.
struct FluctuationParams {
    double epsilon = 0.1;
    double tau = 1.0;
    PhaseDistribution phase_dist = PhaseDistribution::ThreePoint;
    PhaseSampler custom_sampler;
    std::uint64_t seed = 0;

    /// Throws InvalidArgument on epsilon outside (0, 1), tau <= 0, or a
    /// Custom distribution without a sampler. Returns soft warnings.
    std::vector<std::string> validate() const;
};

std::string to_string(PhaseDistribution dist);
PhaseDistribution parse_phase_distribution(const std::string &name);

} // namespace collapse
