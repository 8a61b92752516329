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

#include "collapse/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "collapse/numeric.hpp"

namespace collapse {

namespace {

/// Trajectories per reduction block. Blocks are merged in index order, so
/// floating-point sums do not depend on the worker count.
constexpr std::uint64_t kBlockSize = 256;

/// Partial sums over a contiguous run of trajectories.
struct Partial {
    std::size_t packets = 0;
    std::uint64_t trajectories = 0;
    std::vector<std::uint64_t> survival;
    std::uint64_t unresolved = 0;
    std::map<std::uint64_t, std::uint64_t> collapse_times;
    std::vector<std::uint64_t> cascades;

    // Flattened [sample * packets + i] sums over trajectories still running
    // at that sample, and final states entering at their first idle sample.
    std::vector<double> weight, re, im;
    std::vector<double> tail_weight, tail_re, tail_im;
    std::size_t samples = 0;

    explicit Partial(std::size_t n) : packets(n), survival(n, 0) {}

    void grow(std::vector<double> &v, std::size_t sample) const {
        if (v.size() < (sample + 1) * packets) {
            v.resize((sample + 1) * packets, 0.0);
        }
    }

    void add_state(std::size_t sample, const WaveState &state, bool tail) {
        auto &w = tail ? tail_weight : weight;
        auto &r = tail ? tail_re : re;
        auto &m = tail ? tail_im : im;
        grow(w, sample);
        grow(r, sample);
        grow(m, sample);
        for (std::size_t i = 0; i < packets; ++i) {
            const auto a = state.amplitude(i);
            w[sample * packets + i] += state.weight(i);
            r[sample * packets + i] += a.real();
            m[sample * packets + i] += a.imag();
        }
    }

    void merge(const Partial &other) {
        trajectories += other.trajectories;
        unresolved += other.unresolved;
        for (std::size_t i = 0; i < packets; ++i) {
            survival[i] += other.survival[i];
        }
        for (const auto &[steps, count] : other.collapse_times) {
            collapse_times[steps] += count;
        }
        if (cascades.size() < other.cascades.size()) {
            cascades.resize(other.cascades.size(), 0);
        }
        for (std::size_t k = 0; k < other.cascades.size(); ++k) {
            cascades[k] += other.cascades[k];
        }
        auto add = [](std::vector<double> &into, const std::vector<double> &from) {
            if (into.size() < from.size()) {
                into.resize(from.size(), 0.0);
            }
            for (std::size_t k = 0; k < from.size(); ++k) {
                into[k] += from[k];
            }
        };
        add(weight, other.weight);
        add(re, other.re);
        add(im, other.im);
        add(tail_weight, other.tail_weight);
        add(tail_re, other.tail_re);
        add(tail_im, other.tail_im);
        samples = std::max(samples, other.samples);
    }
};

TrajectoryResult simulate(const RunConfig &config, const WaveState &initial,
                          std::uint64_t index, Partial *series) {
    RandomStream rng = trajectory_stream(config.params.seed, index);
    const std::uint64_t stride = config.record_every;
    TrajectoryResult result;
    WaveState state = initial;
    std::uint64_t step = 0;

    if (series && stride > 0) {
        series->add_state(0, state, false);
    }
    while (!state.is_collapsed() && step < config.max_steps) {
        FluctuationOutcome out = fluctuate(state, config.params, rng);
        const std::size_t len = out.cascade.length();
        if (result.cascade_lengths.size() <= len) {
            result.cascade_lengths.resize(len + 1, 0);
        }
        ++result.cascade_lengths[len];
        state = std::move(out.state);
        ++step;
        if (series && stride > 0 && step % stride == 0) {
            series->add_state(step / stride, state, false);
        }
    }
    result.steps_to_collapse = step;
    if (state.is_collapsed()) {
        result.surviving_packet = state.survivor();
    }
    if (series && stride > 0) {
        const std::size_t last = step / stride;
        series->samples = std::max(series->samples, last + 1);
        series->add_state(last + 1, state, true);
    }
    return result;
}

Partial run_block(const RunConfig &config, const WaveState &initial,
                  std::uint64_t first, std::uint64_t last) {
    Partial part(initial.size());
    for (std::uint64_t index = first; index < last; ++index) {
        const TrajectoryResult r = simulate(config, initial, index, &part);
        ++part.trajectories;
        if (r.surviving_packet) {
            ++part.survival[*r.surviving_packet];
            ++part.collapse_times[r.steps_to_collapse];
        } else {
            ++part.unresolved;
        }
        if (part.cascades.size() < r.cascade_lengths.size()) {
            part.cascades.resize(r.cascade_lengths.size(), 0);
        }
        for (std::size_t k = 0; k < r.cascade_lengths.size(); ++k) {
            part.cascades[k] += r.cascade_lengths[k];
        }
    }
    return part;
}

EnsembleStats finalize(const RunConfig &config, const WaveState &initial,
                       Partial total) {
    EnsembleStats stats;
    const std::size_t n = initial.size();
    stats.total_trajectories = total.trajectories;
    stats.survival_counts = std::move(total.survival);
    stats.unresolved = total.unresolved;
    stats.collapse_time_histogram = std::move(total.collapse_times);
    stats.cascade_length_histogram = std::move(total.cascades);
    stats.record_every = config.record_every;
    if (config.record_every == 0) {
        return stats;
    }

    const std::size_t samples = total.samples;
    const double inv = 1.0 / double(total.trajectories);
    std::vector<double> tail_w(n, 0.0), tail_r(n, 0.0), tail_i(n, 0.0);
    auto at = [n](const std::vector<double> &v, std::size_t s, std::size_t i) {
        const std::size_t k = s * n + i;
        return k < v.size() ? v[k] : 0.0;
    };
    for (std::size_t s = 0; s < samples; ++s) {
        std::vector<double> w(n);
        std::vector<std::complex<double>> a(n);
        for (std::size_t i = 0; i < n; ++i) {
            tail_w[i] += at(total.tail_weight, s, i);
            tail_r[i] += at(total.tail_re, s, i);
            tail_i[i] += at(total.tail_im, s, i);
            w[i] = (at(total.weight, s, i) + tail_w[i]) * inv;
            a[i] = {(at(total.re, s, i) + tail_r[i]) * inv,
                    (at(total.im, s, i) + tail_i[i]) * inv};
        }
        stats.sample_steps.push_back(s * config.record_every);
        stats.mean_weights.push_back(std::move(w));
        stats.mean_amplitudes.push_back(std::move(a));
    }
    // every trajectory starts from the same state
    for (std::size_t i = 0; i < n; ++i) {
        stats.mean_weights[0][i] = initial.weight(i);
        stats.mean_amplitudes[0][i] = initial.amplitude(i);
    }
    return stats;
}

} // namespace

std::vector<std::string> RunConfig::validate() const {
    auto warnings = params.validate();
    if (n_trajectories < 1) {
        throw InvalidArgument("n_trajectories must be at least 1");
    }
    if (max_steps < 1) {
        throw InvalidArgument("max_steps must be at least 1");
    }
    (void)initial_state();
    return warnings;
}

WaveState RunConfig::initial_state() const {
    return WaveState::create(weights, phases);
}

std::uint64_t default_max_steps(double eps, double factor,
                                std::uint64_t floor) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw InvalidArgument("epsilon must lie in (0, 1)");
    }
    const double steps = std::ceil(factor / (2.0 * eps * eps));
    return std::max<std::uint64_t>(floor, static_cast<std::uint64_t>(steps));
}

RandomStream trajectory_stream(std::uint64_t seed, std::uint64_t index) {
    return RandomStream(seed, substream_id(kTrajectoryStreamTag, index));
}

TrajectoryResult run_trajectory(const RunConfig &config,
                                std::uint64_t trajectory_index) {
    config.validate();
    return simulate(config, config.initial_state(), trajectory_index, nullptr);
}

unsigned resolve_worker_count(unsigned requested) {
    if (requested > 0) {
        return requested;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

EnsembleStats run_ensemble(const RunConfig &config) {
    config.validate();
    const WaveState initial = config.initial_state();
    const std::uint64_t blocks =
        (config.n_trajectories + kBlockSize - 1) / kBlockSize;
    const unsigned workers = static_cast<unsigned>(
        std::min<std::uint64_t>(resolve_worker_count(config.worker_count),
                                blocks));

    Partial total(initial.size());
    std::map<std::uint64_t, Partial> pending;
    std::uint64_t next_merge = 0;
    std::mutex merge_mutex;
    std::atomic<std::uint64_t> next_block{0};
    std::exception_ptr failure;

    auto work = [&] {
        for (;;) {
            const std::uint64_t b = next_block.fetch_add(1);
            if (b >= blocks) {
                return;
            }
            const std::uint64_t first = b * kBlockSize;
            const std::uint64_t last =
                std::min(config.n_trajectories, first + kBlockSize);
            try {
                Partial part = run_block(config, initial, first, last);
                std::lock_guard lock(merge_mutex);
                pending.emplace(b, std::move(part));
                while (!pending.empty() &&
                       pending.begin()->first == next_merge) {
                    total.merge(pending.begin()->second);
                    pending.erase(pending.begin());
                    ++next_merge;
                }
            } catch (...) {
                std::lock_guard lock(merge_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next_block.store(blocks);
                return;
            }
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return finalize(config, initial, std::move(total));
}

double EnsembleStats::survival_frequency(std::size_t packet) const {
    const std::uint64_t r = resolved();
    if (r == 0) {
        return 0.0;
    }
    return double(survival_counts.at(packet)) / double(r);
}

double EnsembleStats::mean_collapse_steps() const {
    NeumaierSum sum;
    std::uint64_t count = 0;
    for (const auto &[steps, n] : collapse_time_histogram) {
        sum += double(steps) * double(n);
        count += n;
    }
    return count == 0 ? 0.0 : sum.value() / double(count);
}

std::vector<std::complex<double>>
mean_amplitude_series(const EnsembleStats &stats, std::size_t packet) {
    if (stats.mean_amplitudes.empty()) {
        throw InvalidArgument("no time series recorded (record_every = 0)");
    }
    if (packet >= stats.packet_count()) {
        throw InvalidArgument("packet index out of range");
    }
    std::vector<std::complex<double>> out;
    out.reserve(stats.mean_amplitudes.size());
    for (const auto &row : stats.mean_amplitudes) {
        out.push_back(row[packet]);
    }
    return out;
}

std::vector<double> mean_weight_series(const EnsembleStats &stats,
                                       std::size_t packet) {
    if (stats.mean_weights.empty()) {
        throw InvalidArgument("no time series recorded (record_every = 0)");
    }
    if (packet >= stats.packet_count()) {
        throw InvalidArgument("packet index out of range");
    }
    std::vector<double> out;
    out.reserve(stats.mean_weights.size());
    for (const auto &row : stats.mean_weights) {
        out.push_back(row[packet]);
    }
    return out;
}

} // namespace collapse
