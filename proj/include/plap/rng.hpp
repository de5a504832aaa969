#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "plap/vec.hpp"

namespace plap {

/// Philox4x32-10 block cipher used as a counter-based generator.
/// The same (key, counter) always yields the same block, so any stream can be
/// addressed directly without shared state.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) {
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

    static Counter single_round(const Counter& c, const Key& k) {
        const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/// What a stream of random numbers is used for. Part of the stream key so
/// that, e.g., coin tosses never share bits with noise directions.
enum class Purpose : std::uint32_t { Coin = 1, Noise = 2, StrategyI = 3, StrategyII = 4, Terminal = 5, Sampling = 6 };

/// Random stream addressed by (seed, trajectory, step, purpose). Successive
/// draws advance an internal block counter.
class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t trajectory, std::uint64_t step, Purpose purpose)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          trajectory_(trajectory),
          step_(step),
          purpose_(static_cast<std::uint32_t>(purpose)) {
        // Fold the upper seed bits into the trajectory word so 64-bit seeds are fully used.
        trajectory_ ^= (seed >> 48) * 0x9E3779B97F4A7C15ull;
    }

    std::uint64_t next_u64() {
        if (used_ >= 2) refill();
        return buffer_[used_++];
    }

    /// Uniform on (0, 1), never exactly 0 or 1.
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double theta = 2.0 * std::numbers::pi * uniform();
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    bool bernoulli(double prob) { return uniform() < prob; }

    /// Uniform direction on the unit sphere S^{dim-1}.
    Vec direction(int dim) {
        Vec v(dim);
        double norm = 0.0;
        do {
            for (int i = 0; i < dim; ++i) v[i] = normal();
            norm = v.norm();
        } while (norm < 1e-300);
        return v / norm;
    }

private:
    void refill() {
        const Philox4x32::Counter ctr{static_cast<std::uint32_t>(trajectory_), static_cast<std::uint32_t>(trajectory_ >> 32),
                                      static_cast<std::uint32_t>(step_) ^ (purpose_ << 24),
                                      static_cast<std::uint32_t>(step_ >> 32) ^ (block_ << 8)};
        const auto out = Philox4x32::block(ctr, key_);
        buffer_[0] = (std::uint64_t{out[0]} << 32) | out[1];
        buffer_[1] = (std::uint64_t{out[2]} << 32) | out[3];
        used_ = 0;
        ++block_;
    }

    Philox4x32::Key key_;
    std::uint64_t trajectory_;
    std::uint64_t step_;
    std::uint32_t purpose_;
    std::uint32_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int used_ = 2;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace plap
