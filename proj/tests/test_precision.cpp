#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <random>

#include <zeta/precision.hpp>

using namespace zeta;

TEST(RequiredPhaseBits, CoversMagnitudeAccuracyAndGuard)
{
    const auto b6 = required_phase_bits(HPReal(1e6, 128), 1e-10);
    EXPECT_GE(b6, 20 + 34 + 20);
    const auto b24 = required_phase_bits(HPReal::parse("1e24", 128), 1e-10);
    EXPECT_GE(b24, 80 + 34 + 20);
    EXPECT_EQ(required_phase_bits(HPReal(1.0, 64), 0.5), min_prec_bits);
}

TEST(RequiredPhaseBits, RejectsBadArguments)
{
    EXPECT_THROW(required_phase_bits(HPReal(10.0, 64), 0.0), std::invalid_argument);
    EXPECT_THROW(required_phase_bits(HPReal(10.0, 64), -1e-3), std::invalid_argument);
    EXPECT_THROW(required_phase_bits(HPReal(-1.0, 64), 1e-3), std::invalid_argument);
}

TEST(RequiredPhaseBits, PhaseErrorBelowEpsOver64)
{
    // t log n at the policy precision against a 4x oracle
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        const double eps = 1e-10;
        HPReal t(std::ldexp(1.0, 20 + static_cast<int>(rng() % 20)) + static_cast<double>(rng() % 1000) / 7.0, 200);
        const auto bits = required_phase_bits(t, eps);
        const std::uint64_t n = 2 + rng() % 1000000;
        HPReal lo = t.with_prec(bits) * hp_log_integer(n, bits);
        HPReal hi = t.with_prec(4 * bits) * hp_log_integer(n, 4 * bits);
        const double d = std::abs((reduce_mod_one(lo).with_prec(4 * bits) - reduce_mod_one(hi)).to_double());
        EXPECT_LT(std::min(d, 1.0 - d) * 2 * M_PI, eps / 64) << "n=" << n;
    }
}

TEST(GuardBits, EnvironmentOverride)
{
    ::setenv("ZETA_PREC_GUARD", "100", 1);
    EXPECT_EQ(guard_bits_default(), 100);
    const auto wide = required_phase_bits(HPReal(1e6, 128), 1e-10);
    ::setenv("ZETA_PREC_GUARD", "3", 1);  // below the floor of 20: ignored
    EXPECT_EQ(guard_bits_default(), 32);
    ::unsetenv("ZETA_PREC_GUARD");
    EXPECT_EQ(required_phase_bits(HPReal(1e6, 128), 1e-10) + 68, wide);
}

TEST(ReduceModOne, Examples)
{
    EXPECT_EQ(reduce_mod_one(HPReal(1.75, 64)).to_double(), 0.75);
    EXPECT_EQ(reduce_mod_one(HPReal(-0.25, 64)).to_double(), 0.75);
    HPReal big = HPReal::parse("1e24", 120) + HPReal::parse("0.3", 120);
    EXPECT_NEAR(reduce_mod_one(big).to_double(), 0.3, 1e-12);
}

TEST(ReduceModOne, IntegerShiftInvariance)
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int i = 0; i < 200; ++i) {
        HPReal x(u(rng), 128);
        const long k = static_cast<long>(rng() % 2000001) - 1000000;
        EXPECT_TRUE(reduce_mod_one(x + HPReal(k, 128)) == reduce_mod_one(x));
    }
}

TEST(HpLogInteger, Values)
{
    EXPECT_TRUE(hp_log_integer(1, 80).is_zero());
    // log 2 from an independent constant table
    HPReal ln2 = HPReal::parse("0.693147180559945309417232121458176568075500134360255", 200);
    EXPECT_LT(std::abs((hp_log_integer(2, 100) - ln2).to_double()), std::ldexp(1.0, -99));
    HPReal six_ln10 = hp_log_integer(10, 200) * 6.0;
    EXPECT_LT(std::abs((hp_log_integer(1000000, 100) - six_ln10).to_double()), std::ldexp(1.0, -95));
    EXPECT_THROW(hp_log_integer(0, 64), std::invalid_argument);
}

TEST(HpLogInteger, MorePrecisionNeverWorse)
{
    for (std::uint64_t n : {3ull, 97ull, 123457ull, 999983ull}) {
        HPReal oracle = hp_log_integer(n, 1024);
        double prev = 1.0;
        for (mpfr_prec_t b : {64, 96, 128, 192, 256}) {
            const double err = std::abs((hp_log_integer(n, b).with_prec(1024) - oracle).to_double());
            EXPECT_LE(err, prev);
            prev = err;
        }
    }
}

TEST(HPReal, ParseRejectsGarbage)
{
    EXPECT_THROW(HPReal::parse("", 64), std::invalid_argument);
    EXPECT_THROW(HPReal::parse("12x", 64), std::invalid_argument);
    EXPECT_THROW(HPReal::parse("1 2", 64), std::invalid_argument);
    EXPECT_THROW(HPReal::parse("nan", 64), std::invalid_argument);
    EXPECT_EQ(HPReal::parse("1e3", 64).to_double(), 1000.0);
}

TEST(HPReal, HexRoundTripIsExact)
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        HPReal x = HPReal(static_cast<double>(rng()), 128) / HPReal(static_cast<double>(rng() | 1), 128);
        EXPECT_TRUE(HPReal::parse_hex(x.to_hex(), 128) == x);
    }
    EXPECT_THROW(HPReal::parse_hex("0x1p3junk", 64), std::invalid_argument);
}

TEST(HPReal, PrecisionFollowsWidestOperand)
{
    HPReal a(1.0, 64), b(3.0, 256);
    EXPECT_EQ((a / b).prec(), 256);
    EXPECT_EQ(HPComplex(HPReal(1.0, 64), HPReal(2.0, 200)).re.prec(), 200);
}

TEST(Turns, MatchesHighPrecisionPhase)
{
    std::mt19937_64 rng(9);
    for (int i = 0; i < 100; ++i) {
        HPReal t(1e12 * static_cast<double>(rng() % 1000) / 1000.0 + 1.0, 200);
        const std::uint64_t n = 1 + rng() % 1000000;
        HPReal ph = t * hp_log_integer(n, 200) / (hp_pi(200) * 2.0);
        auto z = expi_turns(ph);
        auto w = hp_expi(ph * hp_pi(200) * 2.0).to_complex();
        EXPECT_LT(std::abs(z - w), 1e-15);
    }
}

TEST(Turns, IntegerMultipleWrapsExactly)
{
    HPReal x = HPReal::parse("0.1234567890123456789012345", 200);
    Turns t = to_turns(x);
    Turns t7 = t * std::uint64_t{7};
    Turns ref = to_turns(x * 7.0);
    EXPECT_NEAR(t7.centered(), ref.centered(), 1e-30);
}
