#pragma once

// Riemann-Siegel assembly: Z(t) = 2 Re e^{-i theta(t)} M(t) + C_m(t) + R_m(t),
// with M(t) = sum_{n<=N} n^{-1/2+it}, N = floor(sqrt(t/2pi)).

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "precision.hpp"

namespace zeta::rs {

using cplx = std::complex<double>;

inline constexpr int max_correction_order = 4;

struct RSContext {
    HPReal t;
    HPReal a_rs;    // sqrt(t / 2pi)
    long N = 0;     // floor(a_rs)
    HPReal z_frac;  // a_rs - N
    int m = 4;
};

struct ThetaValue {
    HPReal theta;
    double err = 0.0;
};

struct ZValue {
    HPReal t;
    double Z = 0.0;
    cplx zeta;
    HPReal theta;
    double err_bound = 0.0;
};

namespace detail {

inline double real_like(double x, const double&) { return x; }
inline HPReal real_like(double x, const HPReal& like) { return HPReal(x, like.prec()); }
inline double pi_like(const double&) { return M_PI; }
inline HPReal pi_like(const HPReal& like) { return hp_pi(like.prec()); }
inline double as_double(double x) { return x; }
inline double as_double(const HPReal& x) { return x.to_double(); }

// |B_2k| as num/den for k = 1..12
struct BernoulliRatio {
    double num, den;
};
inline constexpr BernoulliRatio bernoulli_abs[] = {
    {1, 6},          {1, 30},         {1, 42},      {1, 30},       {5, 66},         {691, 2730},
    {7, 6},          {3617, 510},     {43867, 798}, {174611, 330}, {854513, 138},   {236364091, 2730},
};

// Taylor coefficients f_n of F about c, for F(u) = cos(2pi(u^2-u-1/16))/cos(2pi u).
// The centre is the nearest of k/2 (where cos(2pi u) = +-1) and 1/4 + k/2
// (where the quotient has a removable singularity).
template <class R>
std::vector<R> gabcke_F_series(const R& u, int degree, R& centre)
{
    using std::cos;
    using std::sin;
    const double ud = as_double(u);
    const long ks = std::lround(2.0 * ud - 0.5);
    const long kc = std::lround(2.0 * ud);
    const double us = 0.25 + 0.5 * static_cast<double>(ks);
    const double uc = 0.5 * static_cast<double>(kc);
    const R pi = pi_like(u);
    const R tp = pi * 2.0;
    const bool removable = std::abs(ud - us) <= std::abs(ud - uc);
    const double c = removable ? us : uc;
    centre = real_like(c, u);

    // cos/sin of phi0 + phi1 h + phi2 h^2 as series in h
    auto cos_sin = [&](const R& c0, const R& s0, const R& phi1, int deg, std::vector<R>& cs, std::vector<R>& sn) {
        cs.assign(deg + 1, real_like(0.0, u));
        sn.assign(deg + 1, real_like(0.0, u));
        cs[0] = c0;
        sn[0] = s0;
        for (int n = 1; n <= deg; ++n) {
            R cc = -(phi1 * sn[n - 1]);
            R ss = phi1 * cs[n - 1];
            if (n >= 2) {
                cc -= tp * 2.0 * sn[n - 2];
                ss += tp * 2.0 * cs[n - 2];
            }
            cs[n] = cc / static_cast<double>(n);
            sn[n] = ss / static_cast<double>(n);
        }
    };

    std::vector<R> num, den(degree + 2, real_like(0.0, u));
    const R phi1 = tp * (2.0 * c - 1.0);
    R pw = real_like(1.0, u);  // (2pi)^n / n!
    if (removable) {
        std::vector<R> cs, sn;
        cos_sin(real_like(1.0, u), real_like(0.0, u), phi1, degree + 1, cs, sn);
        // numerator at the centre: cos(odd * pi/2 + psi) = -sin(odd * pi/2) sin(psi)
        const double k = static_cast<double>(ks);
        const double sgn_num = -std::round(std::sin(M_PI * (k * k - k - 1) / 2.0));
        // denominator: -(-1)^k sin(2 pi h)
        const double sgn_den = (ks % 2 == 0) ? -1.0 : 1.0;
        for (int n = 0; n <= degree + 1; ++n) {
            if (n % 2 == 1) den[n] = pw * (sgn_den * (((n - 1) / 2) % 2 ? -1.0 : 1.0));
            pw = pw * tp / static_cast<double>(n + 1);
        }
        num.assign(degree + 1, real_like(0.0, u));
        std::vector<R> d1(degree + 1, real_like(0.0, u));
        for (int n = 0; n <= degree; ++n) {
            num[n] = sn[n + 1] * sgn_num;
            d1[n] = den[n + 1];
        }
        den = std::move(d1);
    } else {
        // P(c) = c^2 - c - 1/16, exact in double for c = k/2
        const R p0 = real_like(c * c - c - 1.0 / 16.0, u);
        const R ph0 = tp * p0;
        cos_sin(cos(ph0), sin(ph0), phi1, degree, num, den);
        const double sk = (kc % 2 == 0) ? 1.0 : -1.0;
        for (int n = 0; n <= degree; ++n) {
            static constexpr double quarter[4] = {1.0, 0.0, -1.0, 0.0};
            den[n] = pw * (sk * quarter[n % 4]);
            pw = pw * tp / static_cast<double>(n + 1);
        }
        den.resize(degree + 1);
    }
    std::vector<R> f(degree + 1, real_like(0.0, u));
    for (int n = 0; n <= degree; ++n) {
        R acc = num[n];
        for (int k = 1; k <= n; ++k) acc -= den[k] * f[n - k];
        f[n] = acc / den[0];
    }
    return f;
}

}  // namespace detail

// F^{(d)}(u) for d = 0..dmax.
template <class R>
std::vector<R> gabcke_F_derivatives(const R& u, int dmax)
{
    if (dmax < 0 || dmax > 3 * 10) throw std::invalid_argument("gabcke_F: derivative order out of range");
    const int degree = 48;
    R c = detail::real_like(0.0, u);
    auto f = detail::gabcke_F_series(u, degree, c);
    const R h = u - c;
    std::vector<R> out;
    out.reserve(dmax + 1);
    for (int d = 0; d <= dmax; ++d) {
        // d! sum_{n>=d} C(n,d) f_n h^{n-d}, Horner in h
        R acc = detail::real_like(0.0, u);
        for (int n = degree; n >= d; --n) {
            double fall = 1.0;  // n!/(n-d)!
            for (int i = 0; i < d; ++i) fall *= static_cast<double>(n - i);
            acc = acc * h + f[n] * fall;
        }
        out.push_back(std::move(acc));
    }
    return out;
}

template <class R>
R gabcke_F(const R& u, int deriv_order)
{
    return gabcke_F_derivatives(u, deriv_order)[deriv_order];
}

// (-1)^{N+1} a^{-1/2} sum_{r<=m} C_r(z) / a^r
template <class R>
R rs_correction(const R& a, long N, const R& z, int m)
{
    using std::sqrt;
    if (m < 0 || m > max_correction_order) throw std::invalid_argument("rs_correction: order must be 0..4");
    auto F = gabcke_F_derivatives(z, 3 * m);
    const R pi = detail::pi_like(a);
    const R p2 = pi * pi, p4 = p2 * p2, p6 = p4 * p2, p8 = p4 * p4;
    std::vector<R> C;
    C.push_back(F[0]);
    if (m >= 1) C.push_back(-(F[3] / (p2 * 96.0)));
    if (m >= 2) C.push_back(F[2] / (p2 * 64.0) + F[6] / (p4 * 18432.0));
    if (m >= 3) C.push_back(-(F[1] / (p2 * 64.0)) - F[5] / (p4 * 3840.0) - F[9] / (p6 * 5308416.0));
    if (m >= 4)
        C.push_back(F[0] / (p2 * 128.0) + F[4] * 19.0 / (p4 * 24576.0) + F[8] * 11.0 / (p6 * 5898240.0) +
                    F[12] / (p8 * 2038431744.0));
    R acc = C[m];
    for (int r = m - 1; r >= 0; --r) acc = acc / a + C[r];
    acc = acc / sqrt(a);
    return (N % 2 == 1) ? acc : R(-acc);
}

inline RSContext make_rs_context(const HPReal& t, int m = 4)
{
    if (!(t > 2 * M_PI)) throw std::invalid_argument("Riemann-Siegel context needs t > 2 pi");
    if (m < 0 || m > 10) throw std::invalid_argument("correction order must be 0..10");
    RSContext c;
    c.t = t;
    c.a_rs = sqrt(t / (hp_pi(t.prec()) * 2.0));
    c.N = to_int64(floor(c.a_rs));
    c.z_frac = c.a_rs - HPReal(c.N, t.prec());
    c.m = m;
    return c;
}

inline double rs_correction(const RSContext& ctx)
{
    return rs_correction(ctx.a_rs.to_double(), ctx.N, ctx.z_frac.to_double(), ctx.m);
}

inline HPReal rs_correction_hp(const RSContext& ctx)
{
    return rs_correction(ctx.a_rs, ctx.N, ctx.z_frac, ctx.m);
}

// theta(t) = (t/2) log(t/2pi) - t/2 - pi/8 + sum_k c_k t^{1-2k},
// c_k = (1 - 2^{1-2k}) |B_2k| / (4k(2k-1)), truncated where terms stop helping.
inline ThetaValue theta_phase(const HPReal& t)
{
    if (!(t > 1.0)) throw std::invalid_argument("theta_phase needs t > 1");
    const auto prec = t.prec();
    const HPReal pi = hp_pi(prec);
    HPReal th = t * 0.5 * log(t / (pi * 2.0)) - t * 0.5 - pi / 8.0;
    const double floor_rel = std::ldexp(1.0, -static_cast<int>(prec) + 2);
    const double thd = std::abs(th.to_double());
    const HPReal inv = 1.0 / t;
    const HPReal inv2 = inv * inv;
    HPReal pw = inv;
    double err = 0.0;
    double prev = 1e300;
    bool done = false;
    for (int k = 1; k <= 12; ++k) {
        const auto& b = detail::bernoulli_abs[k - 1];
        HPReal ck = HPReal(b.num, prec) / b.den * (1.0 - std::ldexp(1.0, 1 - 2 * k)) / (4.0 * k * (2 * k - 1));
        HPReal term = ck * pw;
        double td = term.to_double();
        if (td >= prev) {  // asymptotic series started to diverge
            err = 2.0 * prev;
            done = true;
            break;
        }
        if (td < floor_rel * std::max(1.0, thd)) {
            err = td;
            done = true;
            break;
        }
        th += term;
        prev = td;
        pw *= inv2;
    }
    if (!done) err = 2.0 * prev;
    err += floor_rel * std::max(1.0, thd);
    return {std::move(th), err};
}

// (t/2) log(t/(2 pi e)) - pi/8 + 1/(48t), |error| <= 0.129/t^3
inline ThetaValue theta_lemma(const HPReal& t)
{
    if (!(t > 1.0)) throw std::invalid_argument("theta_lemma needs t > 1");
    const HPReal pi = hp_pi(t.prec());
    HPReal th = t * 0.5 * log(t / (pi * 2.0)) - t * 0.5 - pi / 8.0 + 1.0 / (t * 48.0);
    const double td = t.to_double();
    return {std::move(th), 0.129 / (td * td * td)};
}

// Bounds on |R_m(t)| for t >= 200; orders between the tabulated ones use the
// next lower tabulated order, which is the weaker bound.
inline double gabcke_remainder_bound(double t, int m)
{
    if (!(t >= 200.0)) throw std::invalid_argument("remainder bounds hold only for t >= 200");
    if (m < 1 || m > 10) throw std::invalid_argument("remainder bound order must be 1..10");
    if (m < 4) return 0.053 * std::pow(t, -1.25);
    if (m < 10) return 0.017 * std::pow(t, -2.75);
    return 25966.0 * std::pow(t, -23.0 / 4.0);
}

// Remainder estimate used in error budgets; below t = 200 the bound of the
// same shape is reported without the guarantee.
inline double remainder_budget(double t, int m)
{
    if (m == 0) return 0.127 * std::pow(std::max(t, 1.0), -0.75);
    return gabcke_remainder_bound(std::max(t, 200.0), m) * (t < 200 ? std::pow(200.0 / t, 5.75) : 1.0);
}

inline ZValue assemble_Z(const RSContext& ctx, cplx main_sum, double main_err)
{
    auto th = theta_phase(ctx.t);
    const cplx rot = hp_expi(-th.theta).to_complex();
    const double corr = ctx.m > max_correction_order ? rs_correction(RSContext{ctx.t, ctx.a_rs, ctx.N, ctx.z_frac, 4})
                                                     : rs_correction(ctx);
    ZValue z;
    z.t = ctx.t;
    z.theta = th.theta;
    z.Z = 2.0 * (rot * main_sum).real() + corr;
    z.zeta = rot * z.Z;
    const double td = ctx.t.to_double();
    z.err_bound = 2.0 * main_err + remainder_budget(td, std::min(ctx.m, max_correction_order)) +
                  2.0 * std::abs(main_sum) * th.err + 1e-15 * (2.0 * std::abs(main_sum) + 1.0);
    return z;
}

inline HPReal assemble_Z_hp(const RSContext& ctx, const HPComplex& main_sum)
{
    auto th = theta_phase(ctx.t);
    HPComplex rot = hp_expi(-th.theta);
    HPComplex prod = rot * main_sum;
    const int m = std::min(ctx.m, max_correction_order);
    RSContext c4{ctx.t, ctx.a_rs, ctx.N, ctx.z_frac, m};
    return prod.re * 2.0 + rs_correction_hp(c4);
}


// ---------------------------------------------------------------------------
// Small t, where the Riemann-Siegel expansion is too coarse.

// theta(t) = Im log Gamma(1/4 + it/2) - (t/2) log pi, from Stirling's series
// after shifting the argument by 12.
inline double theta_loggamma(double t)
{
    const cplx z(0.25, 0.5 * t);
    cplx shift = 0.0;
    cplx w = z;
    for (int k = 0; k < 12; ++k, w += 1.0) shift += std::log(w);
    cplx lg = (w - 0.5) * std::log(w) - w + 0.5 * std::log(2 * M_PI);
    cplx wp = 1.0 / w;
    const cplx w2 = wp * wp;
    for (int k = 1; k <= 12; ++k) {
        const auto& b = detail::bernoulli_abs[k - 1];
        const double sign = k % 2 ? 1.0 : -1.0;
        lg += sign * b.num / b.den / (2.0 * k * (2 * k - 1)) * wp;
        wp *= w2;
    }
    lg -= shift;
    return lg.imag() - 0.5 * t * std::log(M_PI);
}

// zeta(1/2 + it) by Euler-Maclaurin summation in double precision.
inline cplx zeta_critical_em(double t)
{
    const cplx s(0.5, t);
    const auto N = static_cast<long>(std::ceil(std::max(20.0, std::abs(s))));
    cplx sum = 0.0;
    for (long n = 1; n < N; ++n) sum += std::exp(-s * std::log(static_cast<double>(n)));
    const double lN = std::log(static_cast<double>(N));
    const cplx Ns = std::exp(-s * lN);
    sum += Ns * static_cast<double>(N) / (s - 1.0) + 0.5 * Ns;
    // B_2k/(2k)! s(s+1)...(s+2k-2) N^{-s-2k+1}
    cplx rising = s;
    cplx pw = Ns / static_cast<double>(N);
    double fact = 2.0;
    for (int k = 1; k <= 12; ++k) {
        const auto& b = detail::bernoulli_abs[k - 1];
        const double sign = k % 2 ? 1.0 : -1.0;
        sum += sign * b.num / b.den / fact * rising * pw;
        rising *= (s + static_cast<double>(2 * k - 1)) * (s + static_cast<double>(2 * k));
        pw /= static_cast<double>(N) * static_cast<double>(N);
        fact *= (2.0 * k + 1) * (2.0 * k + 2);
    }
    return sum;
}

inline ZValue z_euler_maclaurin(const HPReal& t)
{
    const double td = t.to_double();
    if (!(std::abs(td) < 1e5)) throw std::invalid_argument("z_euler_maclaurin: |t| must be below 1e5");
    ZValue z;
    z.t = t;
    z.theta = HPReal(theta_loggamma(td), t.prec());
    z.zeta = zeta_critical_em(td);
    z.Z = (std::polar(1.0, theta_loggamma(td)) * z.zeta).real();
    // roundoff of the direct part: about N terms with phase error |t| log N eps
    z.err_bound = 1e-15 * std::max(20.0, std::abs(td)) * (1.0 + std::abs(td) * std::log(std::max(20.0, std::abs(td)))) *
                  std::max(1.0, std::abs(z.zeta)) / std::sqrt(std::max(20.0, std::abs(td)));
    return z;
}

}  // namespace zeta::rs
