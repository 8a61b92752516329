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

#include "collapse/fluctuation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "collapse/numeric.hpp"

namespace collapse {

namespace {

constexpr double kQuarterTurn = std::numbers::pi / 2.0;

void require_norm(double total, double expected, const char *what) {
    if (std::abs(total - expected) > kNormTolerance) {
        throw InvalidArgument(std::string(what) + ": total weight " +
                              format_double(total) + ", expected " +
                              format_double(expected));
    }
}

} // namespace

double CascadeRecord::total_removed() const noexcept {
    NeumaierSum sum;
    for (const auto &d : draws) {
        sum += d.removed;
    }
    return sum.value();
}

double hit_probability(const WaveState &state, std::size_t k) {
    const double total = state.total_weight();
    if (!(total > 0.0)) {
        throw InvalidArgument("state has no live packets");
    }
    return state.weight(k) / total;
}

double group_hit_probability(const WaveState &state,
                             std::span<const std::size_t> group) {
    const double total = state.total_weight();
    if (!(total > 0.0)) {
        throw InvalidArgument("state has no live packets");
    }
    std::vector<std::size_t> unique(group.begin(), group.end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    NeumaierSum merged;
    for (auto i : unique) {
        merged += state.weight(i);
    }
    return merged.value() / total;
}

std::size_t draw_packet(const WaveState &state, RandomStream &rng) {
    const double total = state.total_weight();
    if (!(total > 0.0)) {
        throw InvalidArgument("cannot draw from a state with no live packets");
    }
    const double target = rng.uniform() * total;
    const auto packets = state.packets();
    double cumulative = 0.0;
    std::size_t last_live = 0;
    for (std::size_t i = 0; i < packets.size(); ++i) {
        if (!packets[i].alive()) {
            continue;
        }
        cumulative += packets[i].weight;
        if (target < cumulative) {
            return i;
        }
        last_live = i;
    }
    // target fell past the rounded cumulative sum
    return last_live;
}

double negative_phase_mean(double x, double eps_prime) {
    if (!(eps_prime > 0.0) || !(x >= eps_prime)) {
        throw InvalidArgument("NSF phase needs x >= eps' > 0 (x = " +
                              format_double(x) +
                              ", eps' = " + format_double(eps_prime) + ")");
    }
    return std::sqrt(1.0 - eps_prime / x);
}

double positive_phase_mean(double x_prime, double eps) {
    if (!(x_prime > 0.0)) {
        throw InvalidArgument("PSF phase needs x' > 0, got " +
                              format_double(x_prime));
    }
    return 1.0 / std::sqrt(1.0 + eps / x_prime);
}

PhaseSample sample_three_point(double p_one, RandomStream &rng) {
    const double u = rng.uniform();
    if (u < p_one) {
        return {0.0};
    }
    const double half_rest = 0.5 * (1.0 - p_one);
    return {u < p_one + half_rest ? kQuarterTurn : -kQuarterTurn};
}

PhaseSample sample_phase(double target_mean, const FluctuationParams &params,
                         RandomStream &rng) {
    switch (params.phase_dist) {
    case PhaseDistribution::ThreePoint:
        return sample_three_point(target_mean, rng);
    case PhaseDistribution::DeterministicReal:
        return {0.0};
    case PhaseDistribution::Custom:
        if (!params.custom_sampler) {
            throw InvalidArgument("custom phase distribution needs a sampler");
        }
        return params.custom_sampler(target_mean, rng);
    }
    return {0.0};
}

PhaseSample sample_phase_negative(double x, double eps_prime, RandomStream &rng,
                                  const FluctuationParams &params) {
    return sample_phase(negative_phase_mean(x, eps_prime), params, rng);
}

PhaseSample sample_phase_positive(double x_prime, double eps, RandomStream &rng,
                                  const FluctuationParams &params) {
    return sample_phase(positive_phase_mean(x_prime, eps), params, rng);
}

WaveState apply_nsf_single(const WaveState &state, std::size_t k,
                           double eps_prime, PhaseSample phase) {
    if (k >= state.size()) {
        throw InvalidArgument("packet index out of range");
    }
    if (!state[k].alive()) {
        throw InvalidArgument("packet " + std::to_string(k) +
                              " is already destroyed");
    }
    if (!(eps_prime > 0.0)) {
        throw InvalidArgument("NSF loss must be positive");
    }
    WaveState out = state;
    const double x = state.weight(k);
    if (x <= eps_prime + kDestroySnap) {
        // both branches of n_k give -1 at x == eps'
        out.destroy(k);
    } else {
        out.reshape(k, x - eps_prime, phase.angle);
    }
    return out;
}

FluctuationOutcome apply_nsf_cascade(const WaveState &state,
                                     const FluctuationParams &params,
                                     RandomStream &rng) {
    const double eps = params.epsilon;
    require_norm(state.total_weight(), 1.0, "cascade NSF input");

    FluctuationOutcome out{state, {}};
    NeumaierSum removed;
    for (;;) {
        const std::size_t k = draw_packet(out.state, rng);
        const double x = out.state.weight(k);
        const double outstanding = eps - removed.value();
        if (x <= outstanding + kDestroySnap) {
            out.state.destroy(k);
            removed += x;
            out.cascade.draws.push_back({k, x});
            if (eps - removed.value() <= kDestroySnap) {
                out.cascade.residual_used = 0.0;
                break;
            }
            continue;
        }
        const PhaseSample phase =
            sample_phase_negative(x, outstanding, rng, params);
        out.state.reshape(k, x - outstanding, phase.angle);
        out.cascade.draws.push_back({k, outstanding});
        out.cascade.residual_used = outstanding;
        break;
    }
    return out;
}

FluctuationOutcome apply_nsf_cascade(const WaveState &state, double eps,
                                     RandomStream &rng) {
    FluctuationParams params;
    params.epsilon = eps;
    return apply_nsf_cascade(state, params, rng);
}

WaveState apply_psf(const WaveState &state, const FluctuationParams &params,
                    RandomStream &rng) {
    const double eps = params.epsilon;
    const double total = state.total_weight();
    require_norm(total, 1.0 - eps, "PSF input");

    const std::size_t k = draw_packet(state, rng);
    const double x = state.weight(k);
    const PhaseSample phase = sample_phase_positive(x, eps, rng, params);
    WaveState out = state;
    out.reshape(k, x + (1.0 - total), phase.angle);
    return out;
}

WaveState apply_psf(const WaveState &state, double eps, RandomStream &rng) {
    FluctuationParams params;
    params.epsilon = eps;
    return apply_psf(state, params, rng);
}

FluctuationOutcome fluctuate(const WaveState &state,
                             const FluctuationParams &params,
                             RandomStream &rng) {
    if (state.is_collapsed()) {
        return {state, {}};
    }
    FluctuationOutcome out = apply_nsf_cascade(state, params, rng);
    out.state = apply_psf(out.state, params, rng);
    return out;
}

} // namespace collapse
