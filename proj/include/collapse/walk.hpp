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
#include <cstdint>
#include <functional>

#include "collapse/rng.hpp"

namespace collapse {

/// Single-packet weight walk: x -> x - eps (p), x (q), x + eps (r).
struct TransitionProbs {
    double p = 0.0;
    double q = 1.0;
    double r = 0.0;
};

/// Leaving probabilities with idle steps folded in: P = p/(p+r), R = r/(p+r).
struct EffectiveProbs {
    double down = 0.0;
    double up = 0.0;
};

enum class SchemeKind {
    /// Caller-supplied miss probability q(x); p, r follow from the
    /// requirement that survival probability equals x.
    Generic,
    /// q fixed by collapse additivity: q = 1 - 2x(1-x)/(1-eps).
    Combined,
};

struct TransitionScheme {
    double eps = 0.1;
    SchemeKind kind = SchemeKind::Combined;
    std::function<double(double)> miss;

    static TransitionScheme combined(double eps);
    static TransitionScheme generic(double eps,
                                    std::function<double(double)> miss);

    /// Throws InvalidArgument for eps outside (0, 1), a combined scheme
    /// with eps > 1/2 (q would go negative), or a generic scheme without q.
    void validate() const;
};

/// Weights x = m * eps, m = 0..M, for eps = 1/M.
class WalkGrid {
  public:
    /// Throws unless 1/eps is an integer M >= 2 (|M eps - 1| <= 1e-12).
    static WalkGrid from_epsilon(double eps);

    [[nodiscard]] std::size_t intervals() const noexcept { return M_; }
    [[nodiscard]] double eps() const noexcept { return 1.0 / double(M_); }
    [[nodiscard]] double point(std::size_t m) const noexcept {
        return double(m) / double(M_);
    }
    [[nodiscard]] bool contains(double x) const noexcept;
    /// Grid index of x; throws InvalidArgument when x is off the grid.
    [[nodiscard]] std::size_t index_of(double x) const;

  private:
    explicit WalkGrid(std::size_t M) : M_(M) {}
    std::size_t M_;
};

/// Piecewise transition probabilities at weight x in [0, 1].
TransitionProbs transition_probs(double x, const TransitionScheme &scheme);

/// Throws InvalidArgument when p + r == 0 (absorbing point).
EffectiveProbs effective_probs(const TransitionProbs &probs);
EffectiveProbs effective_probs(double p, double q, double r);

/// Exact probability that a walk started at grid weight x0 is absorbed at
/// 1, from the linear system w(x) = P w(x - eps) + R w(x + eps).
double absorption_oracle(const TransitionScheme &scheme, double x0);

/// Same quantity for a start point off the eps grid. The walk then lives
/// on the shifted lattice x0 + j eps and leaves it through the boundary
/// rows (0 < x < eps down to 0, 1 - eps < x < 1 up to 1).
double absorption_offgrid(const TransitionScheme &scheme, double x0);

/// Exact expected number of steps (idle steps included) to absorption from
/// grid weight x0.
double expected_absorption_steps(const TransitionScheme &scheme, double x0);

enum class Absorption { Zero, One, None };

struct WalkResult {
    Absorption absorbed_at = Absorption::None;
    std::uint64_t steps = 0;
};

inline constexpr std::uint64_t kDefaultWalkMaxSteps = 100'000'000;

/// Monte Carlo realization of the walk from grid weight x0. One uniform per
/// step; returns Absorption::None if max_steps is exhausted.
WalkResult simulate_walk(const TransitionScheme &scheme, double x0,
                         RandomStream &rng,
                         std::uint64_t max_steps = kDefaultWalkMaxSteps);

} // namespace collapse
