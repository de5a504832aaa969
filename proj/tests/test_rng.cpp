#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "plap/rng.hpp"

using plap::Philox4x32;
using plap::Purpose;
using plap::Stream;

// Known-answer vectors from the Random123 distribution (kat_vectors, philox4x32 10 rounds).
TEST(Philox, KnownAnswerZero) {
    const auto out = Philox4x32::block({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out, (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerAllOnes) {
    const std::uint32_t f = 0xffffffffu;
    const auto out = Philox4x32::block({f, f, f, f}, {f, f});
    EXPECT_EQ(out, (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPiDigits) {
    const auto out = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(out, (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Stream, SameAddressSameDraws) {
    Stream a(42, 7, 3, Purpose::Coin), b(42, 7, 3, Purpose::Coin);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Stream, AddressComponentsSeparateStreams) {
    std::set<std::uint64_t> first;
    first.insert(Stream(42, 7, 3, Purpose::Coin).next_u64());
    first.insert(Stream(43, 7, 3, Purpose::Coin).next_u64());
    first.insert(Stream(42, 8, 3, Purpose::Coin).next_u64());
    first.insert(Stream(42, 7, 4, Purpose::Coin).next_u64());
    first.insert(Stream(42, 7, 3, Purpose::Noise).next_u64());
    first.insert(Stream(42ull | (1ull << 50), 7, 3, Purpose::Coin).next_u64());
    EXPECT_EQ(first.size(), 6u);
}

TEST(Stream, UniformMomentsAndRange) {
    Stream s(1, 0, 0, Purpose::Sampling);
    const int n = 200000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
        sq += u * u;
    }
    EXPECT_NEAR(sum / n, 0.5, 5 * std::sqrt(1.0 / 12 / n));
    EXPECT_NEAR(sq / n - (sum / n) * (sum / n), 1.0 / 12, 2e-3);
}

TEST(Stream, NormalMoments) {
    Stream s(2, 0, 0, Purpose::Sampling);
    const int n = 200000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
        const double z = s.normal();
        sum += z;
        sq += z * z;
    }
    EXPECT_NEAR(sum / n, 0.0, 5 / std::sqrt(n));
    EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(Stream, DirectionsAreUnitAndCentred) {
    Stream s(3, 0, 0, Purpose::Noise);
    plap::Vec mean = plap::Vec::Zero(3);
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        const plap::Vec v = s.direction(3);
        ASSERT_NEAR(v.norm(), 1.0, 1e-14);
        mean += v;
    }
    EXPECT_LT((mean / n).norm(), 0.02);
}
