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
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "collapse/walk.hpp"

namespace collapse {

/// Raised when an eigensolver fails to converge.
class SpectralError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Column-stochastic tridiagonal transition matrix over the weight grid.
///
/// Column m holds the transitions out of weight m/M: loss[m] = S(m-1, m),
/// stay[m] = S(m, m), gain[m] = S(m+1, m).
struct StatMatrix {
    std::size_t intervals = 0; // M
    std::vector<double> loss;
    std::vector<double> stay;
    std::vector<double> gain;

    [[nodiscard]] std::size_t dimension() const noexcept {
        return intervals + 1;
    }
    [[nodiscard]] double at(std::size_t row, std::size_t col) const;
    [[nodiscard]] Eigen::MatrixXd dense() const;
    /// One step S * phi.
    [[nodiscard]] std::vector<double> apply(std::span<const double> phi) const;
    /// Throws InvalidArgument unless entries lie in [0, 1], every column
    /// sums to 1 within 1e-12 and the end columns are unit vectors.
    void validate() const;
};

/// S for the combined (additivity-derived) scheme with step eps = 1/M.
StatMatrix build_stat_matrix(double eps);
/// S for any transition scheme whose eps divides 1.
StatMatrix build_stat_matrix(const TransitionScheme &scheme);

struct SpectralOptions {
    bool eigenvectors = true;
    double tau = 1.0;
};

struct SpectralResult {
    /// Sorted descending; the first two are the absorbing unit eigenvalues.
    std::vector<double> eigenvalues;
    /// Columns are right eigenvectors (unit norm), rows of left^T the
    /// matching left eigenvectors with <L_k|R_k'> = delta_kk'. Empty when
    /// eigenvectors were not requested.
    Eigen::MatrixXd right;
    Eigen::MatrixXd left;
    /// T_k = -tau / ln(lambda_k); +inf for unit eigenvalues, 0 for
    /// lambda_k <= 0.
    std::vector<double> relaxation_times;
    /// Largest finite relaxation time (T_2).
    double selection_time = 0.0;
    /// True when the symmetrized tridiagonal path could not be used.
    bool used_dense_fallback = false;
};

SpectralResult eigen_spectrum(const StatMatrix &S,
                              const SpectralOptions &options = {});

struct RelaxationTimes {
    std::vector<double> times;
    double selection_time = 0.0;
};

/// Eigenvalues within this distance of 1 are treated as absorbing.
inline constexpr double kUnitEigenvalueTolerance = 1e-10;

RelaxationTimes relaxation_times(std::span<const double> eigenvalues,
                                 double tau);
RelaxationTimes relaxation_times(const SpectralResult &result, double tau);

/// S^steps * phi0 by repeated matrix-vector products. phi0 must be a
/// probability vector of length M + 1.
std::vector<double> evolve_distribution(const StatMatrix &S,
                                        std::span<const double> phi0,
                                        std::size_t steps);

/// Point mass at grid weight x0.
std::vector<double> point_distribution(const StatMatrix &S, double x0);

} // namespace collapse
