#pragma once

// Quadratic exponential sums
//
//   F(K, v; a, b) = sum_j v_j sum_{0<=k<K} (k/K)^j e(a k + b k^2),   e(x) = exp(2 pi i x)
//
// All paths work on the moment vector m_j = sum_k (k/K)^j e(ak + bk^2), so the
// same computation serves any coefficient vector v.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "precision.hpp"
#include "quadrature.hpp"

namespace zeta::theta {

using cplx = std::complex<double>;

inline constexpr int max_degree = 32;

struct ThetaSumProblem {
    std::int64_t K = 1;
    std::vector<cplx> v{1.0};
    HPReal a{0.0, 128};
    HPReal b{0.0, 128};
    double eps = 1e-10;

    int J() const { return static_cast<int>(v.size()) - 1; }
};

struct ThetaConfig {
    std::int64_t direct_threshold = 800;
    std::int64_t direct_fallback_limit = 1 << 16;
    int max_levels = 200;
    std::ostream* trace = nullptr;
};

struct TransformResult {
    std::int64_t q = 0;
    std::vector<cplx> v_prime;
    HPReal a_prime;
    HPReal b_prime;
    cplx remainder;
    double omega = 0.0;
};

struct NormalizeRecord {
    HPReal a_shift;  // integer removed from a (before any half step)
    HPReal b_shift;  // integer removed from b
    int half_steps = 0;
    bool conjugated = false;
};

struct NormalizedArgs {
    HPReal a;  // in [0,1)
    HPReal b;  // in [0,1/4]
    NormalizeRecord record;
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------

namespace detail {

struct Tables {
    static constexpr int N = max_degree + 1;
    std::array<std::array<cplx, N>, N> A{};  // A[j][l], l >= j
    std::array<std::array<cplx, N>, N> B{};  // B[d][k], k = d mod 2
    std::array<std::array<double, N>, N> binom{};
    std::array<double, 171> fact{};
    std::array<double, 61> em_beta{};  // B_{2p} / (2p)
};

inline const Tables& tables()
{
    static const Tables t = [] {
        Tables t;
        t.fact[0] = 1.0;
        for (int n = 1; n < 171; ++n) t.fact[n] = t.fact[n - 1] * n;
        for (int n = 0; n < Tables::N; ++n) {
            t.binom[n][0] = 1.0;
            for (int k = 1; k <= n; ++k) t.binom[n][k] = t.binom[n - 1][k - 1] + (k <= n - 1 ? t.binom[n - 1][k] : 0.0);
        }
        const cplx I(0, 1);
        for (int j = 0; j < Tables::N; ++j)
            for (int l = j; l < Tables::N; ++l)
                t.A[j][l] = t.fact[l] / t.fact[j] * std::pow(M_PI, (j - l) / 2.0) * std::pow(2.0, (j - 3.0 * l - 1) / 2.0) *
                            std::exp(I * (M_PI / 4.0 * (1 + 3 * (l - j))));
        for (int d = 0; d < Tables::N; ++d)
            for (int k = d % 2; k <= d; k += 2) {
                double sgn = ((k + d) / 2) % 2 ? -1.0 : 1.0;
                t.B[d][k] = sgn / (t.fact[(d - k) / 2] * t.fact[k]) * std::pow(2 * M_PI, k / 2.0) *
                            std::exp(I * (-3.0 * M_PI * k / 4.0));
            }
        // B_{2p}/(2p) = (-1)^{p+1} 2 zeta(2p) (2p-1)! / (2 pi)^{2p}
        for (int p = 1; p <= 60; ++p) {
            double z;
            if (p == 1) {
                z = M_PI * M_PI / 6.0;
            } else {
                z = 0.0;
                for (int n = 200; n >= 1; --n) z += std::pow(static_cast<double>(n), -2.0 * p);
                z += std::pow(200.0, 1.0 - 2 * p) / (2 * p - 1) - 0.5 * std::pow(200.0, -2.0 * p);
            }
            double mag = 2.0 * z * t.fact[2 * p - 1] / std::pow(2 * M_PI, 2 * p);
            t.em_beta[p] = (p % 2 ? 1.0 : -1.0) * mag;
        }
        return t;
    }();
    return t;
}

inline void check_degree(int J)
{
    if (J < 0 || J > max_degree) throw std::invalid_argument("theta sum degree out of range 0.." + std::to_string(max_degree));
}

inline Turns phase_at(Turns ta, Turns tb, std::int64_t x)
{
    u128 X = static_cast<u128>(x);
    return ta * X + tb * (X * X);
}

inline cplx dot(const std::vector<cplx>& v, const std::vector<cplx>& m)
{
    cplx s = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) s += v[j] * m[j];
    return s;
}

// m_n = int_0^1 u^n e^{z u} du for n = 0..nmax, z purely imaginary, ez = e^z.
inline void exp_moments(double theta, cplx ez, int nmax, std::vector<cplx>& out)
{
    out.assign(nmax + 1, 0.0);
    const cplx z(0.0, theta);
    if (std::abs(theta) > nmax + 4.0) {
        out[0] = (ez - 1.0) / z;
        for (int n = 1; n <= nmax; ++n) out[n] = (ez - static_cast<double>(n) * out[n - 1]) / z;
        return;
    }
    int nodes = std::clamp(static_cast<int>(std::ceil(0.5 * (nmax + std::abs(theta)))) + 14, 16, quad::max_rule);
    const auto& r = quad::gauss_legendre(nodes);
    for (int i = 0; i < nodes; ++i) {
        double u = 0.5 * (r.x[i] + 1.0);
        cplx e = std::polar(0.5 * r.w[i], theta * u);
        for (int n = 0; n <= nmax; ++n) {
            out[n] += e;
            e *= u;
        }
    }
}

// I_i = int_0^L (h/L)^i e(nu h + b h^2) dh, i = 0..J, with exact end phase
// eL = e(nu L + b L^2) and eNu = e(nu L).
inline void piece_moments(double nu, double b, double L, cplx eNu, cplx eL, int J, std::vector<cplx>& out)
{
    const auto& T = tables();
    out.assign(J + 1, 0.0);
    const double gam = 2 * M_PI * b * L * L;
    if (gam <= M_PI / 2) {
        int R = 0;
        double term = 1.0;
        while (term > 1e-19 && R < 60) {
            ++R;
            term *= gam / R;
        }
        std::vector<cplx> m;
        exp_moments(2 * M_PI * nu * L, eNu, J + 2 * R, m);
        cplx c = L;
        for (int r = 0; r <= R; ++r) {
            for (int i = 0; i <= J; ++i) out[i] += c * m[i + 2 * r];
            c *= cplx(0.0, gam) / static_cast<double>(r + 1);
        }
        return;
    }
    // Contour: rays at 45 degrees from the endpoints, through the saddle if the
    // frequency nu + 2 b h changes sign inside the piece.
    const cplx rho(M_SQRT1_2, M_SQRT1_2);
    const cplx c = 2 * M_PI * cplx(0, 1) * rho;
    auto ray = [&](double x0, double f0, cplx e0, double sign) {
        double up = f0 >= 0 ? 1.0 : -1.0;
        auto panels = quad::ray_panels(M_SQRT2 * M_PI * std::abs(f0), M_SQRT2 * M_PI * std::abs(f0), 2 * M_PI * b, 0.0, 42.0, J,
                                       std::max(L, 1.0));
        std::vector<cplx> acc(J + 1, 0.0);
        for (const auto& p : panels) {
            const auto& r = quad::gauss_legendre(p.nodes);
            double mid = 0.5 * (p.lo + p.hi), hw = 0.5 * (p.hi - p.lo);
            for (int i = 0; i < p.nodes; ++i) {
                double s = mid + hw * r.x[i];
                cplx val = std::exp(up * c * f0 * s) * (std::exp(-2 * M_PI * b * s * s) * r.w[i] * hw);
                cplx pw = (x0 + up * rho * s) / L;
                for (int k = 0; k <= J; ++k) {
                    acc[k] += val;
                    val *= pw;
                }
            }
        }
        cplx pref = up * rho * e0 * sign;
        for (int k = 0; k <= J; ++k) out[k] += pref * acc[k];
    };
    double f0 = nu, fL = nu + 2 * b * L;
    ray(0.0, f0, 1.0, 1.0);
    ray(L, fL, eL, -1.0);
    if (f0 < 0 && fL >= 0) {
        double hs = -nu / (2 * b);
        cplx es = std::polar(1.0, -2 * M_PI * nu * nu / (4 * b)) * rho;
        for (int i = 0; i <= J; ++i) {
            cplx s = 0.0;
            for (int k = 0; k <= i; k += 2)
                s += T.binom[i][k] * std::pow(hs / L, i - k) * std::pow(rho / L, k) * std::tgamma((k + 1) / 2.0) /
                     std::pow(2 * M_PI * b, (k + 1) / 2.0);
            out[i] += es * s;
        }
    }
}

// D_j(al1, al2) = K^-j int_0^inf (y)^j kappa(y) e^{-2 pi i beta y^2}
//                 [e^{-2 pi al1 y} + (-1)^{j+1} e^{-2 pi al2 y}] dy
// along y = s e^{-i pi/4}, kappa(y) = 1/(1 - e^{-2 pi y}).
inline std::vector<cplx> ray_remainder(double al1, double al2, double beta, std::int64_t K, int J)
{
    const cplx w(M_SQRT1_2, -M_SQRT1_2);
    std::vector<cplx> out(J + 1, 0.0);
    double lo = std::min(al1, al2), hi = std::max(al1, al2);
    auto panels =
        quad::ray_panels(M_SQRT2 * M_PI * lo, M_SQRT2 * M_PI * hi, 2 * M_PI * beta, 8.0, 45.0, J, static_cast<double>(K));
    auto expm1c = [](cplx z) {
        double x = z.real(), y = z.imag();
        double sh = std::sin(0.5 * y);
        return cplx(std::expm1(x) * std::cos(y) - 2 * sh * sh, std::exp(x) * std::sin(y));
    };
    const double invK = 1.0 / static_cast<double>(K);
    for (const auto& p : panels) {
        const auto& r = quad::gauss_legendre(p.nodes);
        double mid = 0.5 * (p.lo + p.hi), hw = 0.5 * (p.hi - p.lo);
        for (int i = 0; i < p.nodes; ++i) {
            double s = mid + hw * r.x[i];
            cplx y = s * w;
            cplx kap = -1.0 / expm1c(-2 * M_PI * y);
            cplx e1 = std::exp(-2 * M_PI * al1 * y), e2 = std::exp(-2 * M_PI * al2 * y);
            cplx even = al1 <= al2 ? -e1 * expm1c(-2 * M_PI * (al2 - al1) * y) : e2 * expm1c(-2 * M_PI * (al1 - al2) * y);
            cplx odd = e1 + e2;
            cplx base = kap * w * (std::exp(-2 * M_PI * beta * s * s) * r.w[i] * hw);
            cplx pw = 1.0, step = y * invK;
            for (int j = 0; j <= J; ++j) {
                out[j] += base * pw * (j % 2 ? odd : even);
                pw *= step;
            }
        }
    }
    return out;
}

// One step of the transformation on moments: m = T^T m' + r, where m' are
// the moments of length q at (a', b').
struct MomentStep {
    std::int64_t q = 0;
    std::vector<cplx> T;  // row-major (J+1)x(J+1), T[j*(J+1)+l]
    std::vector<cplx> r;
    HPReal a_next, b_next;
    double omega = 0.0;
};

inline MomentStep transform_moments(std::int64_t K, int J, const HPReal& a, const HPReal& b)
{
    const auto& TB = tables();
    const int n = J + 1;
    MomentStep st;
    HPReal end = a + b * 2.0 * static_cast<double>(K);
    HPReal qf = floor(end);
    st.q = to_int64(qf);
    st.omega = (end - qf).to_double();
    st.a_next = a / (b * 2.0);
    st.b_next = -0.25 / b;

    const double bd = b.to_double(), ad = a.to_double(), Kd = static_cast<double>(K);
    const double sb = std::sqrt(bd);
    const double x1 = static_cast<double>(st.q) / (bd * Kd), x2 = ad / (bd * Kd), x3 = 1.0 / (Kd * sb);
    const cplx e0 = to_turns(-(a * a) / (b * 4.0)).unit() / sb;

    st.T.assign(n * n, 0.0);
    double pj = 1.0;
    for (int j = 0; j <= J; ++j, pj *= x1) {
        for (int l = j; l <= J; ++l) {
            int d = l - j;
            cplx inner = 0.0;
            for (int k = d % 2; k <= d; k += 2) inner += TB.B[d][k] * std::pow(x2, k) * std::pow(x3, d - k);
            st.T[j * n + l] = e0 * pj * TB.A[j][l] * inner;
        }
    }

    const cplx E = phase_at(to_turns(a), to_turns(b), K).unit();
    const HPReal qh(static_cast<long>(st.q), a.prec());
    const cplx Eq = to_turns(st.a_next * qh + st.b_next * qh * qh).unit();
    auto D1 = ray_remainder(ad, 1.0 - ad, bd, K, J);
    auto D2 = ray_remainder(st.omega, 1.0 - st.omega, bd, K, J);
    const cplx I(0, 1);
    st.r.assign(n, 0.0);
    cplx il = 1.0;
    for (int l = 0; l <= J; ++l, il *= I) {
        cplx colsum = 0.0;
        for (int j = 0; j <= l; ++j) colsum += st.T[j * n + l];
        cplx right = 0.0, ij = 1.0;
        for (int j = 0; j <= l; ++j, ij *= I) right += ij * TB.binom[l][j] * D2[j];
        st.r[l] = (l == 0 ? 0.5 : 0.0) - 0.5 * E - st.T[l] + Eq * colsum + I * il * D1[l] - I * E * right;
    }
    return st;
}

inline std::vector<cplx> direct_moments(std::int64_t K, int J, Turns ta, Turns tb)
{
    std::vector<cplx> m(J + 1, 0.0), part(J + 1, 0.0);
    const double invK = 1.0 / static_cast<double>(K);
    for (std::int64_t k = 0; k < K; ++k) {
        double th = phase_at(ta, tb, k).radians();
        cplx e(std::cos(th), std::sin(th));
        double x = static_cast<double>(k) * invK;
        for (int j = 0; j <= J; ++j) {
            part[j] += e;
            e *= x;
        }
        if ((k & 1023) == 1023)
            for (int j = 0; j <= J; ++j) {
                m[j] += part[j];
                part[j] = 0.0;
            }
    }
    for (int j = 0; j <= J; ++j) m[j] += part[j];
    return m;
}

// Euler-Maclaurin on bands where the local frequency a + 2bx - n stays
// within [-1/2, 1/2 + 2b].  Requires a in [0,1), b in [0, 1/(2K)].
inline std::vector<cplx> em_moments(std::int64_t K, int J, const HPReal& a, const HPReal& b, double tol)
{
    const auto& TB = tables();
    const Turns ta = to_turns(a), tb = to_turns(b);
    const double bd = b.to_double(), Kd = static_cast<double>(K);
    std::vector<cplx> m(J + 1, 0.0);

    struct Band {
        std::int64_t k0, k1;
        int n;
    };
    std::vector<Band> bands;
    {
        int n = (a >= 0.5) ? 1 : 0;
        std::int64_t start = 0;
        while (start < K) {
            std::int64_t stop = K;
            if (!b.is_zero()) {
                HPReal x = ((n + 0.5) - a) / (b * 2.0);
                if (x < Kd) stop = std::max<std::int64_t>(start, to_int64(ceil(x)));
            }
            if (stop > start) bands.push_back({start, stop, n});
            start = stop;
            ++n;
            if (n > 3) throw ConvergenceError("euler-maclaurin: frequency range exceeds one turn");
        }
    }

    auto freq = [&](std::int64_t x, int n) { return ((a + b * (2.0 * static_cast<double>(x))) - static_cast<double>(n)).to_double(); };

    std::vector<cplx> G, tau, I;
    for (const auto& bd_ : bands) {
        const double L_band = static_cast<double>(bd_.k1 - bd_.k0);
        const double f_lo = freq(bd_.k0, bd_.n), f_hi = freq(bd_.k1, bd_.n);
        const double f_eff = std::max(std::abs(f_lo), std::abs(f_hi)) + J / (2 * M_PI * Kd);
        if (f_eff >= 0.95) throw ConvergenceError("euler-maclaurin: band frequency too large for the correction series");
        const int P = std::max(1, static_cast<int>(std::ceil(std::log(2.02 * (L_band + 1) / tol) / (-2.0 * std::log(f_eff)))));
        if (P > 60) throw ConvergenceError("euler-maclaurin: correction series needs more than 60 terms");
        // the correction series is only asymptotic in b; its smallest term is
        // about exp(-pi (1 - |f|)^2 / 2b)
        if (bd > 0 && (L_band + 1) * std::exp(-M_PI * (1 - f_eff) * (1 - f_eff) / (2 * bd)) > tol)
            throw ConvergenceError("euler-maclaurin: quadratic coefficient too large for the requested tolerance");

        // endpoint values and Bernoulli corrections
        for (int side = 0; side < 2; ++side) {
            const std::int64_t x0 = side ? bd_.k1 : bd_.k0;
            const double f0 = side ? f_hi : f_lo;
            const cplx E0 = phase_at(ta, tb, x0).unit();
            const double xr = static_cast<double>(x0) / Kd;
            const int deg = 2 * P;
            G.assign(deg + 1, 0.0);
            G[0] = 1.0;
            const cplx ti(0, 2 * M_PI);
            for (int k = 0; k < deg; ++k) G[k + 1] = ti * (f0 * G[k] + (k > 0 ? 2 * bd * G[k - 1] : 0.0)) / static_cast<double>(k + 1);
            const double sgn = side ? 1.0 : -1.0;
            double xp = 1.0;
            for (int j = 0; j <= J; ++j, xp *= xr) {
                cplx corr = 0.0;
                for (int p = 1; p <= P; ++p) {
                    int mm = 2 * p - 1;
                    cplx t = 0.0;
                    double kr = 1.0;
                    for (int r = 0; r <= std::min(j, mm); ++r, kr /= Kd)
                        t += TB.binom[j][r] * std::pow(xr, j - r) * kr * G[mm - r];
                    corr += TB.em_beta[p] * t;
                }
                m[j] += E0 * (sgn * corr - sgn * 0.5 * xp);
            }
        }

        // integral over the band in pieces with b L^2 <= 4
        std::int64_t step = bd > 0 ? std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(2.0 / std::sqrt(bd)))) : bd_.k1 - bd_.k0;
        for (std::int64_t xs = bd_.k0; xs < bd_.k1; xs += step) {
            const std::int64_t Li = std::min(step, bd_.k1 - xs);
            const double L = static_cast<double>(Li);
            const double nu = freq(xs, bd_.n);
            const u128 X = static_cast<u128>(xs), LL = static_cast<u128>(Li);
            const cplx eNu = (ta * LL + tb * (2 * X * LL)).unit();
            const cplx eL = (ta * LL + tb * (2 * X * LL + LL * LL)).unit();
            piece_moments(nu, bd, L, eNu, eL, J, I);
            const cplx Es = phase_at(ta, tb, xs).unit();
            const double xr = static_cast<double>(xs) / Kd, lr = L / Kd;
            for (int j = 0; j <= J; ++j) {
                cplx s = 0.0;
                double lp = 1.0;
                for (int i = 0; i <= j; ++i, lp *= lr) s += TB.binom[j][i] * std::pow(xr, j - i) * lp * I[i];
                m[j] += Es * s;
            }
        }
    }
    return m;
}

inline void trace_line(std::ostream* os, std::int64_t K, std::int64_t q, const HPReal& a, const HPReal& b, double absR,
                       const char* branch)
{
    if (!os) return;
    *os << "theta K=" << K << " q=" << q << " a=" << a.to_string(17) << " b=" << b.to_string(17) << " |R|=" << absR
        << " branch=" << branch << '\n';
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline NormalizedArgs normalize_arguments(const HPReal& a, const HPReal& b)
{
    const auto prec = std::max(a.prec(), b.prec());
    NormalizedArgs out;
    HPReal an = a.with_prec(prec), bn = b.with_prec(prec);
    out.record.b_shift = floor(bn);
    bn -= out.record.b_shift;
    out.record.a_shift = floor(an);
    an -= out.record.a_shift;
    if (bn >= 0.5) {
        bn -= 0.5;
        an += 0.5;
        ++out.record.half_steps;
    }
    if (bn > 0.25) {
        out.record.conjugated = true;
        an = -an;
        bn = 0.5 - bn;
        an += 0.5;
        ++out.record.half_steps;
    }
    out.a = reduce_mod_one(an);
    out.b = std::move(bn);
    return out;
}

// F(K, v; a, b) from the value computed on the normalized arguments with
// conj(v) substituted when the record says so.
inline cplx restore(const NormalizeRecord& rec, cplx normalized_value)
{
    return rec.conjugated ? std::conj(normalized_value) : normalized_value;
}

inline ThetaSumProblem normalized_problem(const ThetaSumProblem& p, NormalizeRecord* rec = nullptr)
{
    auto n = normalize_arguments(p.a, p.b);
    ThetaSumProblem out = p;
    out.a = n.a;
    out.b = n.b;
    if (n.record.conjugated)
        for (auto& c : out.v) c = std::conj(c);
    if (rec) *rec = n.record;
    return out;
}

inline std::vector<cplx> direct_moments(std::int64_t K, int J, const HPReal& a, const HPReal& b)
{
    detail::check_degree(J);
    if (K < 1) throw std::invalid_argument("theta sum length must be positive");
    return detail::direct_moments(K, J, to_turns(a), to_turns(b));
}

inline cplx direct_theta_sum(const ThetaSumProblem& p)
{
    return detail::dot(p.v, direct_moments(p.K, p.J(), p.a, p.b));
}

// Moments by the transformation, recursing until the sum is short or b is
// small; NaN-filled on failure.
inline std::vector<cplx> theta_moments(std::int64_t K, int J, const HPReal& a, const HPReal& b, double eps,
                                       const ThetaConfig& cfg = {}, const std::vector<cplx>* trace_v = nullptr)
{
    detail::check_degree(J);
    if (K < 1) throw std::invalid_argument("theta sum length must be positive");
    const int n = J + 1;
    struct Level {
        bool conj;
        detail::MomentStep step;
        bool transformed;
    };
    std::vector<Level> levels;
    std::vector<cplx> tv;
    if (cfg.trace) tv = trace_v ? *trace_v : std::vector<cplx>(n, 1.0);
    const double K_top = static_cast<double>(K);
    HPReal ca = a, cb = b;
    std::int64_t cK = K;
    std::vector<cplx> m;
    try {
        for (;;) {
            if (static_cast<int>(levels.size()) > cfg.max_levels)
                throw ConvergenceError("theta sum recursion exceeded the level limit");
            auto nz = normalize_arguments(ca, cb);
            if (cfg.trace && nz.record.conjugated)
                for (auto& c : tv) c = std::conj(c);
            double tol = eps * 1e-2 * std::sqrt(static_cast<double>(cK) / K_top);
            if (cK <= cfg.direct_threshold) {
                detail::trace_line(cfg.trace, cK, 0, nz.a, nz.b, 0.0, "direct");
                m = detail::direct_moments(cK, J, to_turns(nz.a), to_turns(nz.b));
                levels.push_back(Level{nz.record.conjugated, detail::MomentStep(), false});
                break;
            }
            if ((nz.b * (2.0 * static_cast<double>(cK))) <= 1.0) {
                try {
                    m = detail::em_moments(cK, J, nz.a, nz.b, tol);
                    detail::trace_line(cfg.trace, cK, 0, nz.a, nz.b, 0.0, "euler-maclaurin");
                } catch (const ConvergenceError&) {
                    // short sums whose band frequencies are too close to 1/2
                    if (cK > cfg.direct_fallback_limit) throw;
                    detail::trace_line(cfg.trace, cK, 0, nz.a, nz.b, 0.0, "direct");
                    m = detail::direct_moments(cK, J, to_turns(nz.a), to_turns(nz.b));
                }
                levels.push_back(Level{nz.record.conjugated, detail::MomentStep(), false});
                break;
            }
            auto st = detail::transform_moments(cK, J, nz.a, nz.b);
            if (cfg.trace) {
                double absR = std::abs(detail::dot(tv, st.r));
                detail::trace_line(cfg.trace, cK, st.q, nz.a, nz.b, absR, "transform");
                std::vector<cplx> nv(n, 0.0);
                for (int j = 0; j < n; ++j)
                    for (int l = j; l < n; ++l) nv[j] += st.T[j * n + l] * tv[l];
                tv = std::move(nv);
            }
            cK = st.q;
            ca = st.a_next;
            cb = st.b_next;
            levels.push_back({nz.record.conjugated, std::move(st), true});
        }
    } catch (const std::exception&) {
        return std::vector<cplx>(n, cplx(std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()));
    }
    for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
        if (it->transformed) {
            std::vector<cplx> up(it->step.r);
            for (int l = 0; l < n; ++l)
                for (int j = 0; j <= l; ++j) up[l] += it->step.T[j * n + l] * m[j];
            m = std::move(up);
        }
        if (it->conj)
            for (auto& c : m) c = std::conj(c);
    }
    for (const auto& c : m)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            return std::vector<cplx>(n, cplx(std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()));
    return m;
}

inline cplx compute_theta_sum(const ThetaSumProblem& p, const ThetaConfig& cfg = {})
{
    if (!(p.eps > 0)) throw std::invalid_argument("theta sum eps must be positive");
    if (p.K <= cfg.direct_threshold) return direct_theta_sum(p);
    return detail::dot(p.v, theta_moments(p.K, p.J(), p.a, p.b, p.eps, cfg, &p.v));
}

// Euler-Maclaurin path alone; the normalized b must satisfy 2bK <= 1.
inline cplx euler_maclaurin_theta_sum(const ThetaSumProblem& p)
{
    detail::check_degree(p.J());
    if (p.K < 1) throw std::invalid_argument("theta sum length must be positive");
    NormalizeRecord rec;
    auto np = normalized_problem(p, &rec);
    if (np.b * (2.0 * static_cast<double>(np.K)) > 1.0)
        throw std::invalid_argument("euler_maclaurin_theta_sum: needs 2bK <= 1 after normalization");
    auto m = detail::em_moments(np.K, np.J(), np.a, np.b, p.eps * 1e-2);
    return restore(rec, detail::dot(np.v, m));
}

// One transformation step on normalized arguments (a in [0,1), 0 < b <= 1/4).
inline TransformResult theta_transform_step(const ThetaSumProblem& p)
{
    detail::check_degree(p.J());
    if (p.b.sign() <= 0 || p.b > 0.25 || p.a.sign() < 0 || p.a >= 1.0)
        throw std::invalid_argument("theta_transform_step: arguments must be normalized with b > 0");
    auto st = detail::transform_moments(p.K, p.J(), p.a, p.b);
    if (st.q < 1) throw std::invalid_argument("theta_transform_step: transformed length would be zero");
    const int n = p.J() + 1;
    TransformResult tr;
    tr.q = st.q;
    tr.v_prime.assign(n, 0.0);
    for (int j = 0; j < n; ++j)
        for (int l = j; l < n; ++l) tr.v_prime[j] += st.T[j * n + l] * p.v[l];
    tr.remainder = detail::dot(p.v, st.r);
    tr.a_prime = st.a_next;
    tr.b_prime = st.b_next;
    tr.omega = st.omega;
    return tr;
}

}  // namespace zeta::theta
