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

#include "collapse/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "collapse/numeric.hpp"
#include "collapse/state.hpp"

namespace collapse {

namespace {

constexpr double kColumnTolerance = 1e-12;

struct EigenPairs {
    std::vector<double> values;
    Eigen::MatrixXd right;
    Eigen::MatrixXd left;
};

/// Harmonic row vector h with h S = h, h_0 = 0, h_M = 1: the probability
/// of absorption at M from each grid point.
Eigen::VectorXd absorption_row(const StatMatrix &S) {
    const std::size_t M = S.intervals;
    const std::size_t n = M - 1;
    // loss[m] h[m-1] - (1 - stay[m]) h[m] + gain[m] h[m+1] = 0
    std::vector<double> a(n), b(n), c(n), d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t m = i + 1;
        a[i] = S.loss[m];
        b[i] = -(S.loss[m] + S.gain[m]);
        c[i] = S.gain[m];
    }
    d[n - 1] = -S.gain[M - 1];
    for (std::size_t i = 1; i < n; ++i) {
        const double w = a[i] / b[i - 1];
        b[i] -= w * c[i - 1];
        d[i] -= w * d[i - 1];
    }
    Eigen::VectorXd h = Eigen::VectorXd::Zero(Eigen::Index(M + 1));
    h[Eigen::Index(M)] = 1.0;
    h[Eigen::Index(n)] = d[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        h[Eigen::Index(i + 1)] = (d[i] - c[i] * h[Eigen::Index(i + 2)]) / b[i];
    }
    return h;
}

bool symmetrizable(const StatMatrix &S) {
    for (std::size_t m = 1; m + 1 < S.intervals; ++m) {
        if (!(S.loss[m + 1] > 0.0 && S.gain[m] > 0.0)) {
            return false;
        }
    }
    return true;
}

/// Interior block B (rows/cols 1..M-1) is similar to a symmetric
/// tridiagonal T = D^-1 B D when every off-diagonal pair is positive.
EigenPairs symmetric_path(const StatMatrix &S, bool vectors) {
    const std::size_t M = S.intervals;
    const auto n = Eigen::Index(M - 1);
    Eigen::VectorXd diag(n);
    Eigen::VectorXd off(std::max<Eigen::Index>(n - 1, 0));
    Eigen::VectorXd scale(n);
    scale[0] = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto m = std::size_t(i) + 1;
        diag[i] = S.stay[m];
        if (i + 1 < n) {
            const double upper = S.loss[m + 1]; // B(i, i+1)
            const double lower = S.gain[m];     // B(i+1, i)
            off[i] = std::sqrt(upper * lower);
            scale[i + 1] = scale[i] * std::sqrt(lower / upper);
        }
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off,
                                  vectors ? Eigen::ComputeEigenvectors
                                          : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw SpectralError("tridiagonal eigensolver did not converge");
    }

    EigenPairs out;
    const auto dim = Eigen::Index(M + 1);
    out.values.assign(2, 1.0);
    // ascending from Eigen; store descending
    for (Eigen::Index k = n; k-- > 0;) {
        out.values.push_back(solver.eigenvalues()[k]);
    }
    if (!vectors) {
        return out;
    }

    out.right = Eigen::MatrixXd::Zero(dim, dim);
    out.left = Eigen::MatrixXd::Zero(dim, dim);
    const Eigen::VectorXd h = absorption_row(S);
    out.right(0, 0) = 1.0;
    out.right(dim - 1, 1) = 1.0;
    out.left.col(0) = Eigen::VectorXd::Ones(dim) - h;
    out.left.col(1) = h;

    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index src = n - 1 - j;
        const double lambda = solver.eigenvalues()[src];
        const Eigen::VectorXd u = solver.eigenvectors().col(src);
        Eigen::VectorXd r = Eigen::VectorXd::Zero(dim);
        Eigen::VectorXd l = Eigen::VectorXd::Zero(dim);
        r.segment(1, n) = scale.cwiseProduct(u);
        l.segment(1, n) = u.cwiseQuotient(scale);
        // absorbing rows: lambda r_0 = r_0 + S(0,1) r_1
        r[0] = S.loss[1] * r[1] / (lambda - 1.0);
        r[dim - 1] = S.gain[M - 1] * r[dim - 2] / (lambda - 1.0);
        const double norm = r.norm();
        r /= norm;
        l /= l.dot(r);
        out.right.col(j + 2) = r;
        out.left.col(j + 2) = l;
    }
    return out;
}

EigenPairs dense_path(const StatMatrix &S, bool vectors) {
    const Eigen::MatrixXd dense = S.dense();
    Eigen::EigenSolver<Eigen::MatrixXd> solver(dense, vectors);
    if (solver.info() != Eigen::Success) {
        throw SpectralError("dense eigensolver did not converge");
    }
    const auto dim = dense.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(dim));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const auto &values = solver.eigenvalues();
    for (Eigen::Index k = 0; k < dim; ++k) {
        if (std::abs(values[k].imag()) > 1e-9) {
            throw SpectralError("statistical matrix has a complex eigenvalue");
        }
    }
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
        return values[a].real() > values[b].real();
    });

    EigenPairs out;
    for (auto k : order) {
        out.values.push_back(values[k].real());
    }
    if (!vectors) {
        return out;
    }
    const Eigen::MatrixXd vecs = solver.eigenvectors().real();
    out.right.resize(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        out.right.col(j) = vecs.col(order[std::size_t(j)]).normalized();
    }
    out.left = out.right.inverse().transpose();
    return out;
}

} // namespace

double StatMatrix::at(std::size_t row, std::size_t col) const {
    if (row > intervals || col > intervals) {
        throw InvalidArgument("matrix index out of range");
    }
    if (row == col) {
        return stay[col];
    }
    if (row + 1 == col) {
        return loss[col];
    }
    if (row == col + 1) {
        return gain[col];
    }
    return 0.0;
}

Eigen::MatrixXd StatMatrix::dense() const {
    const auto dim = Eigen::Index(dimension());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index m = 0; m < dim; ++m) {
        const auto c = std::size_t(m);
        out(m, m) = stay[c];
        if (m > 0) {
            out(m - 1, m) = loss[c];
        }
        if (m + 1 < dim) {
            out(m + 1, m) = gain[c];
        }
    }
    return out;
}

std::vector<double> StatMatrix::apply(std::span<const double> phi) const {
    if (phi.size() != dimension()) {
        throw InvalidArgument("distribution length does not match S");
    }
    std::vector<double> out(phi.size(), 0.0);
    for (std::size_t m = 0; m <= intervals; ++m) {
        const double mass = phi[m];
        if (mass == 0.0) {
            continue;
        }
        if (m > 0) {
            out[m - 1] += loss[m] * mass;
        }
        out[m] += stay[m] * mass;
        if (m < intervals) {
            out[m + 1] += gain[m] * mass;
        }
    }
    return out;
}

void StatMatrix::validate() const {
    const std::size_t dim = dimension();
    if (intervals < 2 || loss.size() != dim || stay.size() != dim ||
        gain.size() != dim) {
        throw InvalidArgument("statistical matrix has inconsistent shape");
    }
    if (loss[0] != 0.0 || gain[intervals] != 0.0) {
        throw InvalidArgument("statistical matrix has entries outside the grid");
    }
    for (std::size_t m = 0; m < dim; ++m) {
        for (double v : {loss[m], stay[m], gain[m]}) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw InvalidArgument("entry of column " + std::to_string(m) +
                                      " lies outside [0, 1]");
            }
        }
        if (std::abs(loss[m] + stay[m] + gain[m] - 1.0) > kColumnTolerance) {
            throw InvalidArgument("column " + std::to_string(m) +
                                  " does not sum to 1");
        }
    }
    if (stay[0] != 1.0 || stay[intervals] != 1.0) {
        throw InvalidArgument("end columns must be absorbing");
    }
}

StatMatrix build_stat_matrix(double eps) {
    return build_stat_matrix(TransitionScheme::combined(eps));
}

StatMatrix build_stat_matrix(const TransitionScheme &scheme) {
    const WalkGrid grid = WalkGrid::from_epsilon(scheme.eps);
    const std::size_t M = grid.intervals();
    StatMatrix S;
    S.intervals = M;
    S.loss.assign(M + 1, 0.0);
    S.stay.assign(M + 1, 1.0);
    S.gain.assign(M + 1, 0.0);
    for (std::size_t m = 1; m < M; ++m) {
        const auto t = transition_probs(grid.point(m), scheme);
        S.loss[m] = t.p;
        S.gain[m] = t.r;
        S.stay[m] = 1.0 - t.p - t.r;
    }
    S.validate();
    return S;
}

RelaxationTimes relaxation_times(std::span<const double> eigenvalues,
                                 double tau) {
    if (!(tau > 0.0)) {
        throw InvalidArgument("tau must be positive");
    }
    RelaxationTimes out;
    out.times.reserve(eigenvalues.size());
    for (double lambda : eigenvalues) {
        double t;
        if (std::abs(lambda - 1.0) <= kUnitEigenvalueTolerance) {
            t = std::numeric_limits<double>::infinity();
        } else if (lambda <= 0.0) {
            t = 0.0;
        } else {
            t = -tau / std::log(lambda);
            out.selection_time = std::max(out.selection_time, t);
        }
        out.times.push_back(t);
    }
    return out;
}

RelaxationTimes relaxation_times(const SpectralResult &result, double tau) {
    return relaxation_times(result.eigenvalues, tau);
}

SpectralResult eigen_spectrum(const StatMatrix &S,
                              const SpectralOptions &options) {
    S.validate();
    SpectralResult result;
    EigenPairs pairs;
    if (symmetrizable(S)) {
        pairs = symmetric_path(S, options.eigenvectors);
    } else {
        pairs = dense_path(S, options.eigenvectors);
        result.used_dense_fallback = true;
    }
    result.eigenvalues = std::move(pairs.values);
    result.right = std::move(pairs.right);
    result.left = std::move(pairs.left);
    auto times = relaxation_times(result.eigenvalues, options.tau);
    result.relaxation_times = std::move(times.times);
    result.selection_time = times.selection_time;
    return result;
}

std::vector<double> evolve_distribution(const StatMatrix &S,
                                        std::span<const double> phi0,
                                        std::size_t steps) {
    S.validate();
    if (phi0.size() != S.dimension()) {
        throw InvalidArgument("distribution has " +
                              std::to_string(phi0.size()) +
                              " entries, S has dimension " +
                              std::to_string(S.dimension()));
    }
    for (double v : phi0) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw InvalidArgument("distribution entries must be non-negative");
        }
    }
    if (std::abs(compensated_sum(phi0) - 1.0) > kInputNormTolerance) {
        throw InvalidArgument("distribution does not sum to 1");
    }
    std::vector<double> phi(phi0.begin(), phi0.end());
    for (std::size_t k = 0; k < steps; ++k) {
        phi = S.apply(phi);
    }
    return phi;
}

std::vector<double> point_distribution(const StatMatrix &S, double x0) {
    const auto grid = WalkGrid::from_epsilon(1.0 / double(S.intervals));
    std::vector<double> phi(S.dimension(), 0.0);
    phi[grid.index_of(x0)] = 1.0;
    return phi;
}

} // namespace collapse
