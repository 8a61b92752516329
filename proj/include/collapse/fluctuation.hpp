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

#include <cstddef>
#include <span>
#include <vector>

#include "collapse/rng.hpp"
#include "collapse/state.hpp"

namespace collapse {

/// Weights within this distance of the current loss target count as equal
/// to it, so the packet is destroyed instead of being left with a
/// round-off remnant that would almost never be drawn again.
inline constexpr double kDestroySnap = 1e-14;

struct CascadeDraw {
    std::size_t packet = 0;
    double removed = 0.0;

    friend bool operator==(const CascadeDraw &, const CascadeDraw &) = default;
};

/// Trace of one cascade negative semi-fluctuation.
struct CascadeRecord {
    std::vector<CascadeDraw> draws;
    /// Loss applied to the final, surviving packet; 0 when the last draw
    /// destroyed its packet.
    double residual_used = 0.0;

    [[nodiscard]] std::size_t length() const noexcept { return draws.size(); }
    [[nodiscard]] double total_removed() const noexcept;
};

struct FluctuationOutcome {
    WaveState state;
    CascadeRecord cascade;
};

// --- packet selection ----------------------------------------------------

/// Probability that a semi-fluctuation hits packet k: x_k / total weight.
double hit_probability(const WaveState &state, std::size_t k);

/// Probability that a semi-fluctuation hits any packet of `group`.
/// Duplicate indices are counted once.
double group_hit_probability(const WaveState &state,
                             std::span<const std::size_t> group);

/// Draws a packet index with probability x_k / total weight.
/// Consumes one uniform. Throws if every packet is destroyed.
std::size_t draw_packet(const WaveState &state, RandomStream &rng);

// --- phase factors -------------------------------------------------------

/// Required mean of the NSF phase factor: sqrt(1 - eps_prime / x).
double negative_phase_mean(double x, double eps_prime);
/// Required mean of the PSF phase factor: (1 + eps / x_prime)^(-1/2).
double positive_phase_mean(double x_prime, double eps);

/// 1 with probability p_one, +i or -i with probability (1 - p_one)/2 each.
/// Consumes one uniform.
PhaseSample sample_three_point(double p_one, RandomStream &rng);

/// Samples a phase factor with the given target mean according to
/// params.phase_dist. ThreePoint consumes one uniform, DeterministicReal
/// none, Custom whatever the sampler draws.
PhaseSample sample_phase(double target_mean, const FluctuationParams &params,
                         RandomStream &rng);

/// NSF phase factor for a packet of weight x losing eps_prime.
/// Requires x >= eps_prime > 0.
PhaseSample sample_phase_negative(double x, double eps_prime, RandomStream &rng,
                                  const FluctuationParams &params = {});

/// PSF phase factor for a packet of post-NSF weight x_prime gaining eps.
/// Requires x_prime > 0.
PhaseSample sample_phase_positive(double x_prime, double eps, RandomStream &rng,
                                  const FluctuationParams &params = {});

// --- semi-fluctuation operators -------------------------------------------

/// Single NSF draw on packet k: the weight drops by eps_prime and the phase
/// rotates by `phase`, or the packet is destroyed when x_k <= eps_prime.
WaveState apply_nsf_single(const WaveState &state, std::size_t k,
                           double eps_prime, PhaseSample phase);

/// Cascade NSF: draws and destroys packets lighter than the outstanding
/// loss until the total loss reaches exactly eps; the last packet drawn
/// only loses what is left. Consumes one uniform per draw plus one phase
/// sample when the cascade ends on a surviving packet.
FluctuationOutcome apply_nsf_cascade(const WaveState &state,
                                     const FluctuationParams &params,
                                     RandomStream &rng);
FluctuationOutcome apply_nsf_cascade(const WaveState &state, double eps,
                                     RandomStream &rng);

/// PSF on a post-NSF state of total weight 1 - eps: one packet drawn with
/// probability x'_k / (1 - eps) gains eps. Consumes one uniform plus one
/// phase sample. The gain is taken as 1 - (current total), which equals
/// eps within the norm tolerance and keeps round-off from drifting.
WaveState apply_psf(const WaveState &state, const FluctuationParams &params,
                    RandomStream &rng);
WaveState apply_psf(const WaveState &state, double eps, RandomStream &rng);

/// One full fluctuation: cascade NSF followed by one PSF. A collapsed
/// state is returned unchanged without consuming randomness.
FluctuationOutcome fluctuate(const WaveState &state,
                             const FluctuationParams &params,
                             RandomStream &rng);

} // namespace collapse
