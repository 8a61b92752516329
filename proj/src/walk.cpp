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

#include "collapse/walk.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "collapse/numeric.hpp"
#include "collapse/state.hpp"

namespace collapse {

namespace {

constexpr double kGridTolerance = 1e-9;

/// Thomas algorithm for a[i] x[i-1] + b[i] x[i] + c[i] x[i+1] = d[i].
std::vector<double> solve_tridiagonal(std::vector<double> a,
                                      std::vector<double> b,
                                      std::vector<double> c,
                                      std::vector<double> d) {
    const std::size_t n = b.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = d[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
    }
    return x;
}

/// Absorption probabilities at 1 for a chain of interior nodes whose
/// neighbours beyond either end are the absorbing points 0 and 1.
std::vector<double> solve_absorption(const std::vector<EffectiveProbs> &moves) {
    const std::size_t n = moves.size();
    std::vector<double> a(n), b(n, 1.0), c(n), d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = -moves[i].down;
        c[i] = -moves[i].up;
    }
    d[n - 1] = moves[n - 1].up;
    return solve_tridiagonal(std::move(a), std::move(b), std::move(c),
                             std::move(d));
}

} // namespace

TransitionScheme TransitionScheme::combined(double eps) {
    TransitionScheme s{eps, SchemeKind::Combined, {}};
    s.validate();
    return s;
}

TransitionScheme TransitionScheme::generic(double eps,
                                           std::function<double(double)> miss) {
    TransitionScheme s{eps, SchemeKind::Generic, std::move(miss)};
    s.validate();
    return s;
}

void TransitionScheme::validate() const {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw InvalidArgument("scheme eps must lie in (0, 1), got " +
                              format_double(eps));
    }
    if (kind == SchemeKind::Combined && eps > 0.5) {
        throw InvalidArgument("combined scheme needs eps <= 1/2");
    }
    if (kind == SchemeKind::Generic && !miss) {
        throw InvalidArgument("generic scheme needs a miss function q(x)");
    }
}

WalkGrid WalkGrid::from_epsilon(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw InvalidArgument("grid eps must lie in (0, 1), got " +
                              format_double(eps));
    }
    const double inverse = 1.0 / eps;
    const double M = std::round(inverse);
    if (M < 2.0 || std::abs(M * eps - 1.0) > 1e-12) {
        throw InvalidArgument("1/eps must be an integer >= 2, got 1/" +
                              format_double(eps) + " = " +
                              format_double(inverse));
    }
    return WalkGrid(static_cast<std::size_t>(M));
}

bool WalkGrid::contains(double x) const noexcept {
    if (!(x >= -kGridTolerance && x <= 1.0 + kGridTolerance)) {
        return false;
    }
    const double scaled = x * double(M_);
    return std::abs(scaled - std::round(scaled)) <= kGridTolerance;
}

std::size_t WalkGrid::index_of(double x) const {
    if (!contains(x)) {
        throw InvalidArgument(format_double(x) + " is not on the grid m/" +
                              std::to_string(M_));
    }
    return static_cast<std::size_t>(std::round(x * double(M_)));
}

TransitionProbs transition_probs(double x, const TransitionScheme &scheme) {
    scheme.validate();
    if (!(x >= 0.0 && x <= 1.0)) {
        throw InvalidArgument("weight " + format_double(x) +
                              " lies outside [0, 1]");
    }
    if (x == 0.0 || x == 1.0) {
        return {0.0, 1.0, 0.0};
    }
    const double eps = scheme.eps;
    const double q = scheme.kind == SchemeKind::Combined
                         ? 1.0 - 2.0 * x * (1.0 - x) / (1.0 - eps)
                         : scheme.miss(x);
    if (!(q >= 0.0 && q <= 1.0)) {
        throw InvalidArgument("miss probability q(" + format_double(x) +
                              ") = " + format_double(q) +
                              " lies outside [0, 1]");
    }
    const double move = 1.0 - q;
    if (x < eps) {
        return {eps * move / (x + eps), q, x * move / (x + eps)};
    }
    if (x <= 1.0 - eps) {
        if (scheme.kind == SchemeKind::Combined) {
            const double hit = x * (1.0 - x) / (1.0 - eps);
            return {hit, q, hit};
        }
        return {0.5 * move, q, 0.5 * move};
    }
    const double gap = 1.0 - x;
    return {gap * move / (gap + eps), q, eps * move / (gap + eps)};
}

EffectiveProbs effective_probs(const TransitionProbs &probs) {
    const double leave = probs.p + probs.r;
    if (!(leave > 0.0)) {
        throw InvalidArgument("p + r = 0: absorbing point has no effective move");
    }
    return {probs.p / leave, probs.r / leave};
}

EffectiveProbs effective_probs(double p, double q, double r) {
    return effective_probs(TransitionProbs{p, q, r});
}

double absorption_oracle(const TransitionScheme &scheme, double x0) {
    scheme.validate();
    const WalkGrid grid = WalkGrid::from_epsilon(scheme.eps);
    const std::size_t m0 = grid.index_of(x0);
    const std::size_t M = grid.intervals();
    if (m0 == 0 || m0 == M) {
        return m0 == M ? 1.0 : 0.0;
    }
    std::vector<EffectiveProbs> moves;
    moves.reserve(M - 1);
    for (std::size_t m = 1; m < M; ++m) {
        moves.push_back(effective_probs(transition_probs(grid.point(m), scheme)));
    }
    return solve_absorption(moves)[m0 - 1];
}

double absorption_offgrid(const TransitionScheme &scheme, double x0) {
    scheme.validate();
    if (!(x0 >= 0.0 && x0 <= 1.0)) {
        throw InvalidArgument("start " + format_double(x0) +
                              " lies outside [0, 1]");
    }
    const double eps = scheme.eps;
    const double steps_below = std::floor(x0 / eps);
    const double offset = x0 - steps_below * eps;
    if (offset <= kGridTolerance || eps - offset <= kGridTolerance ||
        x0 == 0.0 || x0 == 1.0) {
        throw InvalidArgument(format_double(x0) +
                              " sits on the eps lattice; use absorption_oracle");
    }
    std::vector<double> nodes;
    for (std::size_t j = 0;; ++j) {
        const double y = offset + double(j) * eps;
        if (y >= 1.0) {
            break;
        }
        nodes.push_back(y);
    }
    if (1.0 - nodes.back() <= kGridTolerance) {
        throw InvalidArgument("shifted lattice from " + format_double(x0) +
                              " reaches 1; use absorption_oracle");
    }
    std::vector<EffectiveProbs> moves;
    moves.reserve(nodes.size());
    for (double y : nodes) {
        moves.push_back(effective_probs(transition_probs(y, scheme)));
    }
    const auto w = solve_absorption(moves);
    return w[static_cast<std::size_t>(steps_below)];
}

double expected_absorption_steps(const TransitionScheme &scheme, double x0) {
    scheme.validate();
    const WalkGrid grid = WalkGrid::from_epsilon(scheme.eps);
    const std::size_t m0 = grid.index_of(x0);
    const std::size_t M = grid.intervals();
    if (m0 == 0 || m0 == M) {
        return 0.0;
    }
    const std::size_t n = M - 1;
    std::vector<double> a(n), b(n), c(n), d(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto t = transition_probs(grid.point(i + 1), scheme);
        if (!(t.p + t.r > 0.0)) {
            throw InvalidArgument("interior point is absorbing; "
                                  "absorption time is infinite");
        }
        a[i] = -t.p;
        b[i] = t.p + t.r;
        c[i] = -t.r;
    }
    return solve_tridiagonal(std::move(a), std::move(b), std::move(c),
                             std::move(d))[m0 - 1];
}

WalkResult simulate_walk(const TransitionScheme &scheme, double x0,
                         RandomStream &rng, std::uint64_t max_steps) {
    scheme.validate();
    const WalkGrid grid = WalkGrid::from_epsilon(scheme.eps);
    const std::size_t M = grid.intervals();
    std::size_t m = grid.index_of(x0);

    // cumulative (p, p + r) per grid point
    std::vector<std::pair<double, double>> table(M + 1);
    for (std::size_t i = 0; i <= M; ++i) {
        const auto t = transition_probs(grid.point(i), scheme);
        table[i] = {t.p, t.p + t.r};
    }

    WalkResult result;
    while (m != 0 && m != M) {
        if (result.steps == max_steps) {
            result.absorbed_at = Absorption::None;
            return result;
        }
        const double u = rng.uniform();
        ++result.steps;
        if (u < table[m].first) {
            --m;
        } else if (u < table[m].second) {
            ++m;
        }
    }
    result.absorbed_at = m == M ? Absorption::One : Absorption::Zero;
    return result;
}

} // namespace collapse
