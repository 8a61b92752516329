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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "collapse/state.hpp"

using namespace collapse;

TEST_CASE("create normalizes near-unit sums exactly") {
    const std::vector<double> w{0.1, 0.2, 0.7 + 5e-10};
    const WaveState s = WaveState::create(w);
    CHECK(s.size() == 3);
    CHECK(s.total_weight() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.live_count() == 3);
    CHECK_FALSE(s.is_collapsed());
    CHECK(s[0].phase == 0.0);
}

TEST_CASE("create rejects invalid input") {
    const std::vector<double> off{0.3, 0.3};
    CHECK_THROWS_AS((void)WaveState::create(off), InvalidArgument);
    const std::vector<double> neg{1.2, -0.2};
    CHECK_THROWS_AS((void)WaveState::create(neg), InvalidArgument);
    const std::vector<double> nan_w{std::nan(""), 1.0};
    CHECK_THROWS_AS((void)WaveState::create(nan_w), InvalidArgument);
    CHECK_THROWS_AS((void)WaveState::create(std::vector<double>{}),
                    InvalidArgument);
    const std::vector<double> w{0.5, 0.5};
    const std::vector<double> ph{0.1};
    CHECK_THROWS_AS((void)WaveState::create(w, ph), InvalidArgument);
}

TEST_CASE("amplitudes carry weight and phase") {
    const std::vector<double> w{0.25, 0.75};
    const std::vector<double> ph{std::numbers::pi / 2, 0.0};
    const WaveState s = WaveState::create(w, ph);
    CHECK(s.amplitude(0).real() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(s.amplitude(0).imag() == doctest::Approx(0.5));
    CHECK(std::norm(s.amplitude(1)) == doctest::Approx(0.75));
}

TEST_CASE("single live packet is collapsed; destroyed packets stay dead") {
    const std::vector<double> w{0.0, 1.0, 0.0};
    WaveState s = WaveState::create(w);
    CHECK(s.is_collapsed());
    REQUIRE(s.survivor().has_value());
    CHECK(*s.survivor() == 1);
    CHECK_THROWS_AS(s.reshape(0, 0.1, 0.0), InvalidArgument);

    const std::vector<double> two{0.4, 0.6};
    WaveState t = WaveState::create(two);
    t.destroy(0);
    CHECK(t.is_collapsed());
    CHECK(t[0] == PacketAmplitude{});
    CHECK_THROWS_AS(t.reshape(1, 0.0, 0.0), InvalidArgument);
}

TEST_CASE("collapse test does no thresholding") {
    const std::vector<double> w{1e-300, 1.0 - 1e-300};
    CHECK_FALSE(WaveState::unnormalized(w).is_collapsed());
}

TEST_CASE("reshape replaces weight and rotates phase") {
    const std::vector<double> w{0.5, 0.5};
    const std::vector<double> ph{1.0, 0.0};
    WaveState s = WaveState::create(w, ph);
    s.reshape(0, 0.3, 2 * std::numbers::pi - 0.5);
    CHECK(s.weight(0) == 0.3);
    CHECK(s[0].phase == doctest::Approx(0.5));
}

TEST_CASE("wrap_phase maps into [0, 2pi)") {
    const double two_pi = 2 * std::numbers::pi;
    for (double a : {-7.0, -two_pi, 0.0, 1.0, two_pi, 13.0}) {
        const double w = wrap_phase(a);
        CHECK(w >= 0.0);
        CHECK(w < two_pi);
        CHECK(std::cos(w) == doctest::Approx(std::cos(a)));
        CHECK(std::sin(w) == doctest::Approx(std::sin(a)).epsilon(1e-12));
    }
}

TEST_CASE("unnormalized keeps the given total") {
    const std::vector<double> w{0.45, 0.45};
    const WaveState s = WaveState::unnormalized(w);
    CHECK(s.total_weight() == doctest::Approx(0.9).epsilon(1e-15));
    const std::vector<double> dead{0.0, 0.0};
    CHECK_THROWS_AS((void)WaveState::unnormalized(dead), InvalidArgument);
}

TEST_CASE("fluctuation parameter validation") {
    FluctuationParams p;
    CHECK(p.validate().empty());
    p.epsilon = 0.3;
    CHECK(p.validate().size() == 1);
    p.epsilon = 0.0;
    CHECK_THROWS_AS((void)p.validate(), InvalidArgument);
    p.epsilon = 1.0;
    CHECK_THROWS_AS((void)p.validate(), InvalidArgument);
    p.epsilon = 0.1;
    p.tau = 0.0;
    CHECK_THROWS_AS((void)p.validate(), InvalidArgument);
    p.tau = 1.0;
    p.phase_dist = PhaseDistribution::Custom;
    CHECK_THROWS_AS((void)p.validate(), InvalidArgument);
}

TEST_CASE("phase distribution names round-trip") {
    for (auto d : {PhaseDistribution::ThreePoint,
                   PhaseDistribution::DeterministicReal,
                   PhaseDistribution::Custom}) {
        CHECK(parse_phase_distribution(to_string(d)) == d);
    }
    CHECK(parse_phase_distribution("deterministic") ==
          PhaseDistribution::DeterministicReal);
    CHECK_THROWS_AS((void)parse_phase_distribution("gaussian"), InvalidArgument);
}
