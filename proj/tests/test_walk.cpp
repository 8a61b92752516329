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
#include <vector>

#include "collapse/conformance.hpp"
#include "collapse/walk.hpp"
#include "oracles.hpp"

using namespace collapse;

namespace {

std::vector<TransitionScheme> schemes_for(double eps) {
    std::vector<TransitionScheme> out{TransitionScheme::combined(eps)};
    for (auto &[name, q] : sample_miss_functions()) {
        out.push_back(TransitionScheme::generic(eps, q));
    }
    return out;
}

} // namespace

TEST_CASE("grid construction") {
    const WalkGrid g = WalkGrid::from_epsilon(0.1);
    CHECK(g.intervals() == 10);
    CHECK(g.contains(0.3));
    CHECK(g.index_of(0.3) == 3);
    CHECK_FALSE(g.contains(0.35));
    CHECK_THROWS_AS((void)g.index_of(0.35), InvalidArgument);
    CHECK_THROWS_AS((void)WalkGrid::from_epsilon(0.3), InvalidArgument);
    CHECK_THROWS_AS((void)WalkGrid::from_epsilon(1.0), InvalidArgument);
    CHECK(WalkGrid::from_epsilon(0.01).intervals() == 100);
}

TEST_CASE("scheme validation") {
    CHECK_THROWS_AS(TransitionScheme::combined(0.6).validate(), InvalidArgument);
    CHECK_THROWS_AS(TransitionScheme::generic(0.1, nullptr).validate(),
                    InvalidArgument);
    const auto bad = TransitionScheme::generic(0.1, [](double) { return 1.5; });
    CHECK_THROWS_AS((void)transition_probs(0.5, bad), InvalidArgument);
}

TEST_CASE("property: rows are distributions with zero drift") {
    for (double eps : {0.5, 0.25, 0.1, 0.03}) {
        for (const auto &scheme : schemes_for(eps)) {
            for (int i = 0; i <= 1000; ++i) {
                const double x = i / 1000.0;
                const auto t = transition_probs(x, scheme);
                REQUIRE(t.p >= 0.0);
                REQUIRE(t.q >= 0.0);
                REQUIRE(t.r >= 0.0);
                REQUIRE(std::abs(t.p + t.q + t.r - 1.0) <= 1e-14);
                // down move is min(x, eps), up move is min(1 - x, eps)
                const double drift = -std::min(x, eps) * t.p +
                                     std::min(1.0 - x, eps) * t.r;
                REQUIRE(std::abs(drift) <= 1e-15);
            }
        }
    }
}

TEST_CASE("combined rows match the enumerated fluctuation law") {
    for (std::size_t M : {4u, 10u, 20u}) {
        const double eps = 1.0 / double(M);
        const auto scheme = TransitionScheme::combined(eps);
        for (std::size_t m = 1; m < M; ++m) {
            const double x = double(m) / double(M);
            CAPTURE(x);
            const auto law = oracle::two_packet_step(x, eps);
            const auto t = transition_probs(x, scheme);
            CHECK(t.p == doctest::Approx(law.down).epsilon(1e-12));
            CHECK(t.q == doctest::Approx(law.stay).epsilon(1e-12));
            CHECK(t.r == doctest::Approx(law.up).epsilon(1e-12));
        }
    }
}

TEST_CASE("combined scheme value at x = 0.5, eps = 0.1") {
    const auto t = transition_probs(0.5, TransitionScheme::combined(0.1));
    CHECK(t.p == doctest::Approx(0.25 / 0.9));
    CHECK(t.q == doctest::Approx(4.0 / 9.0));
    CHECK(t.r == doctest::Approx(0.25 / 0.9));
    const auto e = effective_probs(t);
    CHECK(e.down == doctest::Approx(0.5));
    CHECK(e.up == doctest::Approx(0.5));
    CHECK_THROWS_AS((void)effective_probs(0.0, 1.0, 0.0), InvalidArgument);
}

TEST_CASE("absorption oracle agrees with a dense first-step solve") {
    for (std::size_t M : {2u, 4u, 10u, 50u}) {
        const double eps = 1.0 / double(M);
        const auto dense = oracle::absorption_dense(
            M, [M](std::size_t m) { return oracle::combined_row(m, M); });
        const auto times = oracle::absorption_time_dense(
            M, [M](std::size_t m) { return oracle::combined_row(m, M); });
        const auto scheme = TransitionScheme::combined(eps);
        for (std::size_t m = 0; m <= M; ++m) {
            const double x = double(m) / double(M);
            CHECK(absorption_oracle(scheme, x) ==
                  doctest::Approx(dense[m]).epsilon(1e-12));
            CHECK(std::abs(absorption_oracle(scheme, x) - x) <= 1e-10);
            CHECK(expected_absorption_steps(scheme, x) ==
                  doctest::Approx(times[m]).epsilon(1e-10));
        }
    }
}

TEST_CASE("survival equals start weight for every scheme and grid point") {
    for (double eps : {0.25, 0.1, 0.01}) {
        const WalkGrid g = WalkGrid::from_epsilon(eps);
        for (const auto &scheme : schemes_for(eps)) {
            for (std::size_t m = 0; m <= g.intervals(); ++m) {
                const double x = g.point(m);
                REQUIRE(std::abs(absorption_oracle(scheme, x) - x) <= 1e-10);
            }
        }
    }
}

TEST_CASE("off-grid starts also survive with probability x0") {
    for (const auto &scheme : schemes_for(0.1)) {
        for (double x0 : {0.037, 0.12345, 0.5001, 0.95, 0.999}) {
            CHECK(std::abs(absorption_offgrid(scheme, x0) - x0) <= 1e-10);
        }
        CHECK_THROWS_AS((void)absorption_offgrid(scheme, 0.3), InvalidArgument);
    }
}

TEST_CASE("an absorbing interior point is reported") {
    const auto stuck = TransitionScheme::generic(
        0.25, [](double x) { return std::abs(x - 0.5) < 1e-9 ? 1.0 : 0.5; });
    CHECK_THROWS_AS((void)absorption_oracle(stuck, 0.25), InvalidArgument);
    CHECK_THROWS_AS((void)expected_absorption_steps(stuck, 0.25),
                    InvalidArgument);
}

TEST_CASE("simulated walks match the oracle") {
    const double eps = 0.1;
    const auto scheme = TransitionScheme::combined(eps);
    RandomStream rng(21, 0);
    const int n = 20000;
    int ones = 0;
    double steps = 0.0, steps_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto r = simulate_walk(scheme, 0.3, rng);
        REQUIRE(r.absorbed_at != Absorption::None);
        ones += r.absorbed_at == Absorption::One ? 1 : 0;
        steps += double(r.steps);
        steps_sq += double(r.steps) * double(r.steps);
    }
    const double f = ones / double(n);
    CHECK(std::abs(f - 0.3) <= 4 * std::sqrt(0.3 * 0.7 / n));
    const double mean = steps / n;
    const double sd = std::sqrt((steps_sq / n - mean * mean) / n);
    CHECK(std::abs(mean - expected_absorption_steps(scheme, 0.3)) <= 4 * sd);

    const auto capped = simulate_walk(scheme, 0.5, rng, 1);
    CHECK((capped.absorbed_at == Absorption::None || capped.steps <= 1));
    CHECK(simulate_walk(scheme, 1.0, rng).absorbed_at == Absorption::One);
    CHECK(simulate_walk(scheme, 0.0, rng).steps == 0);
}
