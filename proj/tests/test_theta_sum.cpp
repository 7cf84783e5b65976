#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include <zeta/theta_integrals.hpp>
#include <zeta/theta_sum.hpp>

using namespace zeta;
using namespace zeta::theta;
using cplx = std::complex<double>;

namespace {

ThetaSumProblem problem(std::int64_t K, std::vector<cplx> v, double a, double b, double eps = 1e-10)
{
    ThetaSumProblem p;
    p.K = K;
    p.v = std::move(v);
    p.a = HPReal(a, 128);
    p.b = HPReal(b, 128);
    p.eps = eps;
    return p;
}

std::vector<cplx> random_v(std::mt19937_64& rng, int J)
{
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<cplx> v(J + 1);
    for (auto& c : v) c = {u(rng), u(rng)};
    return v;
}

}  // namespace

TEST(DirectThetaSum, TrivialCases)
{
    EXPECT_NEAR(std::abs(direct_theta_sum(problem(1, {1.0}, 0.37, 0.11)) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(direct_theta_sum(problem(4, {1.0}, 0.0, 0.0)) - 4.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(direct_theta_sum(problem(3, {1.0}, 0.5, 0.0)) - 1.0), 0.0, 1e-14);
}

TEST(DirectThetaSum, MatchesOracle)
{
    auto p = problem(40, {1.0, 0.5, -0.25}, 0.0, 0.0);
    p.a = HPReal::parse("0.123", 128);
    p.b = HPReal::parse("0.0371", 128);
    const cplx ref(0.1445349265929461931517598, 5.144634797897934981215632);
    EXPECT_LT(std::abs(direct_theta_sum(p) - ref), 1e-13);
}

TEST(NormalizeArguments, PeriodicityInA)
{
    auto n = normalize_arguments(HPReal(1.7, 128), HPReal(0.1, 128));
    EXPECT_NEAR(n.a.to_double(), 0.7, 1e-15);
    EXPECT_NEAR(n.b.to_double(), 0.1, 1e-15);
    EXPECT_FALSE(n.record.conjugated);
}

TEST(NormalizeArguments, HalfStepInB)
{
    auto n = normalize_arguments(HPReal(0.2, 128), HPReal(0.7, 128));
    EXPECT_NEAR(n.b.to_double(), 0.2, 1e-15);
    EXPECT_NEAR(n.a.to_double(), 0.7, 1e-15);
}

TEST(NormalizeArguments, ValuePreservedIncludingConjugation)
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 60; ++i) {
        auto p = problem(1 + rng() % 200, random_v(rng, static_cast<int>(rng() % 4)), u(rng), u(rng));
        if (i == 0) {
            p.a = HPReal(0.3, 128);
            p.b = HPReal(0.3, 128);
        }
        NormalizeRecord rec;
        auto np = normalized_problem(p, &rec);
        EXPECT_GE(np.a.to_double(), 0.0);
        EXPECT_LT(np.a.to_double(), 1.0);
        EXPECT_GE(np.b.to_double(), 0.0);
        EXPECT_LE(np.b.to_double(), 0.25);
        if (i == 0) EXPECT_TRUE(rec.conjugated);
        EXPECT_LT(std::abs(restore(rec, direct_theta_sum(np)) - direct_theta_sum(p)), 1e-11);
    }
}

TEST(DirectThetaSum, ConjugationSymmetry)
{
    std::mt19937_64 rng(4);
    for (int i = 0; i < 20; ++i) {
        auto v = random_v(rng, 3);
        auto p = problem(150, v, 0.1 + 0.01 * i, 0.013 * i);
        auto q = p;
        q.a = -p.a;
        q.b = -p.b;
        for (auto& c : q.v) c = std::conj(c);
        EXPECT_LT(std::abs(direct_theta_sum(q) - std::conj(direct_theta_sum(p))), 1e-12);
    }
}

TEST(EulerMaclaurinThetaSum, GeometricSeries)
{
    auto p = problem(100, {1.0}, 0.25, 0.0);
    const cplx w = std::polar(1.0, 2 * M_PI * 0.25);
    const cplx ref = (1.0 - std::pow(w, 100)) / (1.0 - w);
    EXPECT_LT(std::abs(euler_maclaurin_theta_sum(p) - ref), 1e-10);
}

TEST(EulerMaclaurinThetaSum, SingleTerm)
{
    auto p = problem(1, {cplx(0.3, -0.7), 2.0}, 0.4, 0.0);
    EXPECT_LT(std::abs(euler_maclaurin_theta_sum(p) - cplx(0.3, -0.7)), 1e-12);
}

TEST(EulerMaclaurinThetaSum, SmallQuadraticTerm)
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 5; ++i) {
        auto p = problem(10000, random_v(rng, 3), u(rng), 1e-9, 1e-10);
        EXPECT_LT(std::abs(euler_maclaurin_theta_sum(p) - direct_theta_sum(p)), 1e-10) << "a=" << p.a.to_double();
    }
}

TEST(EulerMaclaurinThetaSum, RejectsLargeB)
{
    EXPECT_THROW(euler_maclaurin_theta_sum(problem(1000, {1.0}, 0.3, 0.1)), std::invalid_argument);
}

TEST(ThetaTransformStep, NewLength)
{
    auto tr = theta_transform_step(problem(100, {1.0}, 0.3, 0.2));
    EXPECT_EQ(tr.q, 40);
    EXPECT_NEAR(tr.a_prime.to_double(), 0.3 / 0.4, 1e-15);
    EXPECT_NEAR(tr.b_prime.to_double(), -1.0 / 0.8, 1e-15);
}

TEST(ThetaTransformStep, SimpleFormForJZero)
{
    const double a = 0.37, b = 0.11;
    auto tr = theta_transform_step(problem(300, {cplx(0.5, 0.25)}, a, b));
    const cplx I(0, 1);
    const cplx expect = std::exp(I * (M_PI / 4) - I * (M_PI * a * a / (2 * b))) * cplx(0.5, 0.25) / std::sqrt(2 * b);
    ASSERT_EQ(tr.v_prime.size(), 1u);
    EXPECT_LT(std::abs(tr.v_prime[0] - expect), 1e-13);
}

TEST(ThetaTransformStep, IdentityAgainstBruteForce)
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> ua(0, 1), ub(0.002, 0.25);
    for (int i = 0; i < 20; ++i) {
        auto p = problem(500, {1.0, 1.0, 1.0, 1.0}, ua(rng), ub(rng), 1e-10);
        auto tr = theta_transform_step(p);
        ThetaSumProblem q;
        q.K = tr.q;
        q.v = tr.v_prime;
        q.a = tr.a_prime;
        q.b = tr.b_prime;
        EXPECT_LT(std::abs(direct_theta_sum(p) - (direct_theta_sum(q) + tr.remainder)), 1e-9)
            << "a=" << p.a.to_double() << " b=" << p.b.to_double();
    }
}

TEST(ThetaTransformStep, LengthContraction)
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ua(0, 1), ub(1e-4, 0.25);
    for (int i = 0; i < 200; ++i) {
        const std::int64_t K = 10 + rng() % 100000;
        const double a = ua(rng), b = ub(rng);
        if (2 * b * K < 1) continue;
        auto tr = theta_transform_step(problem(K, {1.0}, a, b));
        EXPECT_LE(tr.q, K / 2 + 1);
    }
}

TEST(ThetaTransformStep, RejectsUnnormalized)
{
    EXPECT_THROW(theta_transform_step(problem(100, {1.0}, 0.3, 0.3)), std::invalid_argument);
    EXPECT_THROW(theta_transform_step(problem(100, {1.0}, 1.3, 0.1)), std::invalid_argument);
    EXPECT_THROW(theta_transform_step(problem(100, {1.0}, 0.3, 0.0)), std::invalid_argument);
}

TEST(ComputeThetaSum, ShortSumsAreDirect)
{
    std::mt19937_64 rng(6);
    ThetaConfig cfg;
    auto p = problem(cfg.direct_threshold, random_v(rng, 5), 0.3, 0.17);
    EXPECT_EQ(compute_theta_sum(p, cfg), direct_theta_sum(p));
}

TEST(ComputeThetaSum, LongSumAgainstDirect)
{
    auto p = problem(10000, {1.0}, 0.0, 0.2, 1e-10);
    p.a = HPReal::parse("0.123456789", 128);
    EXPECT_LT(std::abs(compute_theta_sum(p) - direct_theta_sum(p)), 1e-10);
}

TEST(ComputeThetaSum, RandomProblemsWithinEps)
{
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> ua(0, 1), ub(0, 0.25);
    for (int i = 0; i < 40; ++i) {
        const std::int64_t K = 900 + rng() % 20000;
        const int J = static_cast<int>(rng() % 19);
        auto p = problem(K, std::vector<cplx>(J + 1, 1.0), ua(rng), ub(rng), 1e-6);
        EXPECT_LT(std::abs(compute_theta_sum(p) - direct_theta_sum(p)), 1e-6) << "K=" << K << " J=" << J;
    }
}

TEST(ComputeThetaSum, TraceHasOneLinePerStep)
{
    std::ostringstream os;
    ThetaConfig cfg;
    cfg.trace = &os;
    cfg.direct_threshold = 50;
    auto p = problem(20000, {1.0, 1.0}, 0.31, 0.173, 1e-8);
    compute_theta_sum(p, cfg);
    const std::string s = os.str();
    EXPECT_NE(s.find("branch=transform"), std::string::npos);
    EXPECT_NE(s.find("K=20000"), std::string::npos);
    EXPECT_NE(s.find("|R|="), std::string::npos);
}

TEST(ComputeThetaSum, FailureIsNaNNotGarbage)
{
    ThetaConfig cfg;
    cfg.max_levels = 0;
    cfg.direct_threshold = 10;
    auto p = problem(5000, {1.0}, 0.3, 0.2);
    cplx r = compute_theta_sum(p, cfg);
    EXPECT_TRUE(std::isnan(r.real()));
}

// ---------------------------------------------------------------------------
// Remainder integrals

TEST(Integrals, J1)
{
    EXPECT_EQ(integral_J1(0.5, 0.1, 0, 0, 1.0, 1e-12), cplx(0.0));
    EXPECT_LT(std::abs(integral_J1(0.5, 0.1, 0, 5, 1.0, 1e-12) - cplx(0.2794675913702976516966718, -0.002018978718643668180942535)),
              1e-11);
    EXPECT_LT(std::abs(integral_J1(0.3, 0.2, 3, 40, 6.0, 1e-13) -
                       cplx(0.000006354333165111342126428438, -0.000002106872378978348388122068)),
              1e-12);
    // small-t part grows like log(M)/(2 pi)
    const cplx d = integral_J1(0.5, 0.1, 0, 1000000, 1.0, 1e-12) - integral_J1(0.5, 0.1, 0, 1000, 1.0, 1e-12);
    EXPECT_NEAR(d.real(), std::log(1000.0) / (2 * M_PI), 1e-3);
    EXPECT_NEAR(d.imag(), 0.0, 1e-3);
}

TEST(Integrals, J2)
{
    EXPECT_EQ(integral_J2(0.4, 0.4, 0.1, 2, 3.0, 1e-12), cplx(0.0));
    EXPECT_NEAR(integral_J2(0.2, 0.8, 0.05, 1, 2.0, 1e-13).real(), 0.02500247367891379573939915, 1e-12);
    EXPECT_NEAR(integral_J2(1.0, 1.0, 0.25, 1, 1.0, 1e-13).real(), 0.03175110724790800224954559, 1e-12);
}

TEST(Integrals, IFamilies)
{
    IntegralRequest r;
    r.kind = IntegralKind::I_C9H;
    r.alpha = 1.0;
    EXPECT_NEAR(integral_I(r).value.real(), 1 / (2 * M_PI), 1e-15);

    r = {};
    r.kind = IntegralKind::I_C7;
    r.alpha = 0.3;
    r.beta = 0.1;
    r.K = 10;
    EXPECT_LT(std::abs(integral_I(r).value - cplx(0.1079987961488552953366788, -0.4586768640923269804396059)), 1e-11);

    r = {};
    r.kind = IntegralKind::I_C9H;
    r.alpha = 0.5;
    r.beta = 0.1;
    r.j = 2;
    r.K = 3;
    EXPECT_LT(std::abs(integral_I(r).value - cplx(0.00472096620921749746263276, -0.003097538655833959904311031)), 1e-11);

    r = {};
    r.kind = IntegralKind::I_C9E;
    r.alpha = 0.3;
    r.beta = 0.1;
    r.j = 1;
    r.K = 4;
    EXPECT_LT(std::abs(integral_I(r).value - cplx(0.002854751343387174610835779, -0.002775414495918030938989114)), 1e-11);

    r = {};
    r.kind = IntegralKind::I_Ctilde1;
    r.alpha = 0.4;
    r.beta = 0.2;
    r.j = 2;
    r.K = 5;
    EXPECT_LT(std::abs(integral_I(r).value - cplx(1.984773390855420181164393e-9, -2.493542114434580766159752e-9)), 1e-18);
}

TEST(Integrals, SkipOnlyWhenProvablySmall)
{
    IntegralRequest r;
    r.kind = IntegralKind::I_C9E;
    r.alpha = 0.3;
    r.beta = 0.1;
    r.K = 4;
    r.eps = 1e-10;
    r.skip_bound = 1e-13;
    EXPECT_TRUE(integral_I(r).skipped);
    r.skip_bound = 1e-3;
    EXPECT_FALSE(integral_I(r).skipped);
    r.kind = IntegralKind::I_C7;
    r.skip_bound = 0.0;
    EXPECT_FALSE(integral_I(r).skipped);
}

TEST(Integrals, OverflowSignalled)
{
    IntegralRequest r;
    r.kind = IntegralKind::I_Ctilde1;
    r.alpha = -1.0;
    r.beta = 0.2;
    r.K = 500;
    EXPECT_THROW(integral_I(r), std::overflow_error);
}

TEST(Integrals, BoundaryTermTest)
{
    std::vector<cplx> z{1.0, 2.0}, zp{0.5};
    EXPECT_TRUE(boundary_terms_negligible(0.5, 20.0, z, zp, 1e-10));
    EXPECT_FALSE(boundary_terms_negligible(0.001, 20.0, z, zp, 1e-10));
}
