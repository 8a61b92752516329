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

#include "collapse/state.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "collapse/numeric.hpp"

namespace collapse {

std::complex<double> PacketAmplitude::amplitude() const {
    return std::polar(std::sqrt(weight), phase);
}

double wrap_phase(double angle) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double wrapped = std::fmod(angle, two_pi);
    if (wrapped < 0.0) {
        wrapped += two_pi;
    }
    // fmod of a tiny negative angle can round back up to 2*pi
    return wrapped >= two_pi ? 0.0 : wrapped;
}

WaveState WaveState::create(std::span<const double> weights,
                            std::span<const double> phases) {
    if (weights.empty()) {
        throw InvalidArgument("state needs at least one packet");
    }
    if (!phases.empty() && phases.size() != weights.size()) {
        throw InvalidArgument("got " + std::to_string(weights.size()) +
                              " weights but " + std::to_string(phases.size()) +
                              " phases");
    }
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!std::isfinite(weights[i]) || weights[i] < 0.0) {
            throw InvalidArgument("weight " + std::to_string(i) +
                                  " is negative or not finite");
        }
        if (!phases.empty() && !std::isfinite(phases[i])) {
            throw InvalidArgument("phase " + std::to_string(i) +
                                  " is not finite");
        }
    }
    const double sum = compensated_sum(weights);
    if (std::abs(sum - 1.0) > kInputNormTolerance) {
        throw InvalidArgument("weights sum to " + format_double(sum) +
                              ", expected 1 within 1e-9");
    }

    std::vector<PacketAmplitude> packets(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        packets[i].weight = weights[i] / sum;
        packets[i].phase =
            packets[i].weight > 0.0 && !phases.empty() ? wrap_phase(phases[i])
                                                       : 0.0;
    }
    // Push the last rounding residue into the heaviest packet.
    WaveState state(std::move(packets));
    const double residue = 1.0 - state.total_weight();
    if (residue != 0.0) {
        auto heaviest = std::max_element(
            state.packets_.begin(), state.packets_.end(),
            [](const auto &a, const auto &b) { return a.weight < b.weight; });
        heaviest->weight += residue;
    }
    return state;
}

WaveState WaveState::unnormalized(std::span<const double> weights,
                                  std::span<const double> phases) {
    if (weights.empty()) {
        throw InvalidArgument("state needs at least one packet");
    }
    if (!phases.empty() && phases.size() != weights.size()) {
        throw InvalidArgument("weights and phases differ in length");
    }
    std::vector<PacketAmplitude> packets(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!std::isfinite(weights[i]) || weights[i] < 0.0) {
            throw InvalidArgument("weight " + std::to_string(i) +
                                  " is negative or not finite");
        }
        packets[i].weight = weights[i];
        packets[i].phase =
            weights[i] > 0.0 && !phases.empty() ? wrap_phase(phases[i]) : 0.0;
    }
    WaveState state(std::move(packets));
    if (!(state.total_weight() > 0.0)) {
        throw InvalidArgument("state has no live packets");
    }
    return state;
}

WaveState new_state(std::span<const double> weights,
                    std::span<const double> phases) {
    return WaveState::create(weights, phases);
}

double WaveState::total_weight() const noexcept {
    NeumaierSum sum;
    for (const auto &p : packets_) {
        sum += p.weight;
    }
    return sum.value();
}

std::size_t WaveState::live_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(
        packets_.begin(), packets_.end(),
        [](const PacketAmplitude &p) { return p.alive(); }));
}

bool WaveState::is_collapsed() const noexcept { return live_count() == 1; }

std::optional<std::size_t> WaveState::survivor() const noexcept {
    std::optional<std::size_t> found;
    for (std::size_t i = 0; i < packets_.size(); ++i) {
        if (packets_[i].alive()) {
            if (found) {
                return std::nullopt;
            }
            found = i;
        }
    }
    return found;
}

void WaveState::destroy(std::size_t i) {
    auto &p = packets_.at(i);
    p.weight = 0.0;
    p.phase = 0.0;
}

void WaveState::reshape(std::size_t i, double new_weight, double rotation) {
    auto &p = packets_.at(i);
    if (!p.alive()) {
        throw InvalidArgument("packet " + std::to_string(i) +
                              " is destroyed and cannot regain weight");
    }
    if (!(new_weight > 0.0)) {
        throw InvalidArgument("reshape needs a positive weight; use destroy");
    }
    p.weight = new_weight;
    p.phase = wrap_phase(p.phase + rotation);
}

std::vector<std::string> FluctuationParams::validate() const {
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw InvalidArgument("epsilon must lie in (0, 1), got " +
                              format_double(epsilon));
    }
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw InvalidArgument("tau must be positive, got " +
                              format_double(tau));
    }
    if (phase_dist == PhaseDistribution::Custom && !custom_sampler) {
        throw InvalidArgument("custom phase distribution needs a sampler");
    }
    std::vector<std::string> warnings;
    if (epsilon > 0.25) {
        warnings.push_back("epsilon = " + format_double(epsilon) +
                           " is not small; the model assumes epsilon << 1");
    }
    return warnings;
}

std::string to_string(PhaseDistribution dist) {
    switch (dist) {
    case PhaseDistribution::ThreePoint:
        return "three-point";
    case PhaseDistribution::DeterministicReal:
        return "deterministic-real";
    case PhaseDistribution::Custom:
        return "custom";
    }
    return "unknown";
}

PhaseDistribution parse_phase_distribution(const std::string &name) {
    if (name == "three-point") {
        return PhaseDistribution::ThreePoint;
    }
    if (name == "deterministic-real" || name == "deterministic") {
        return PhaseDistribution::DeterministicReal;
    }
    if (name == "custom") {
        return PhaseDistribution::Custom;
    }
    throw InvalidArgument("unknown phase distribution '" + name + "'");
}

} // namespace collapse
