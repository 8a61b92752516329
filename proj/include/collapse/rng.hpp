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

#include <array>
#include <cstdint>
#include <limits>

namespace collapse {

/// Philox4x32-10 counter-based block function.
///
/// Pure function of (counter, key). Used as the core of RandomStream so that
/// any (seed, stream id) pair maps to a fixed sequence with no shared state.
class Philox4x32 {
  public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter block(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            ctr = single_round(ctr, key);
        }
        return ctr;
    }

  private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr Counter single_round(const Counter &ctr,
                                          const Key &key) noexcept {
        const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
};

/// Counter-based random stream identified by (seed, stream id).
///
/// The seed is the Philox key; the stream id occupies the upper half of the
/// counter and the draw position the lower half, so streams with distinct
/// ids never overlap. Copying a stream copies its position.
///
/// Satisfies UniformRandomBitGenerator, but library code draws through
/// uniform() only, which is defined bit-exactly here rather than by the
/// standard library's distributions.
class RandomStream {
  public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : key_{static_cast<std::uint32_t>(seed),
               static_cast<std::uint32_t>(seed >> 32)},
          stream_id_(stream_id) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept {
        if (lane_ == 2) {
            refill();
        }
        const result_type out =
            (std::uint64_t{buffer_[2 * lane_ + 1]} << 32) | buffer_[2 * lane_];
        ++lane_;
        return out;
    }

    /// Uniform double in [0, 1) with 53 random bits; consumes one 64-bit draw.
    double uniform() noexcept {
        return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
    }

    /// Number of 64-bit values drawn so far.
    [[nodiscard]] std::uint64_t position() const noexcept {
        return 2 * block_ - (2 - lane_);
    }

    [[nodiscard]] std::uint64_t stream_id() const noexcept {
        return stream_id_;
    }

  private:
    void refill() noexcept {
        const Philox4x32::Counter ctr{
            static_cast<std::uint32_t>(block_),
            static_cast<std::uint32_t>(block_ >> 32),
            static_cast<std::uint32_t>(stream_id_),
            static_cast<std::uint32_t>(stream_id_ >> 32)};
        buffer_ = Philox4x32::block(ctr, key_);
        ++block_;
        lane_ = 0;
    }

    Philox4x32::Key key_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    unsigned lane_ = 2;
    Philox4x32::Counter buffer_{};
};

/// Mixes a check or experiment tag into a stream id so independent
/// consumers of one master seed get disjoint streams.
constexpr std::uint64_t substream_id(std::uint64_t tag,
                                     std::uint64_t index) noexcept {
    return (tag << 48) ^ index;
}

} // namespace collapse
