#pragma once

// The integral families appearing in the remainder of the quadratic-sum
// transformation, each evaluated on its own to an absolute tolerance.  The
// engine in theta_sum.hpp uses the combined ray form instead; these are the
// individual pieces for inspection and testing.

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "quadrature.hpp"
#include "theta_sum.hpp"

namespace zeta::theta {

enum class IntegralKind { J1, J2, I_C7, I_C9H, I_C9E, I_Ctilde1 };

struct IntegralRequest {
    IntegralKind kind = IntegralKind::I_C9H;
    double alpha = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double beta = 0.0;
    int j = 0;
    std::int64_t M = 0;
    double K = 1.0;
    double eps = 1e-12;
    // Caller's bound on the size of this term's contribution; negative means
    // unknown.  Only I_C9E and I_Ctilde1 may be skipped.
    double skip_bound = -1.0;
};

struct IntegralResult {
    cplx value;
    bool skipped = false;
};

namespace detail {

inline double expo_guard(double x)
{
    if (x > 700.0) throw std::overflow_error("integral prefactor overflows double range");
    return x;
}

// Integral of f over [lo, hi] split at geometric points starting from `first`.
template <class F>
cplx graded(F&& f, double lo, double hi, double first, double tol)
{
    std::vector<double> cuts{lo};
    for (double c = lo + first; c < hi; c = lo + 2.0 * (c - lo)) cuts.push_back(c);
    cuts.push_back(hi);
    cplx acc = 0.0;
    const double piece_tol = tol / static_cast<double>(cuts.size());
    try {
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) acc += quad::adaptive(f, cuts[i], cuts[i + 1], piece_tol);
    } catch (const std::runtime_error& e) {
        throw ConvergenceError(e.what());
    }
    return acc;
}

// Where a decay of exp(-rate t - gauss t^2) drops below tol, capped at hi.
inline double cutoff(double rate, double gauss, double tol, double hi)
{
    double need = std::log(10.0 / tol);
    double t;
    if (gauss > 0)
        t = (-rate + std::sqrt(rate * rate + 4 * gauss * need)) / (2 * gauss);
    else if (rate > 0)
        t = need / rate;
    else
        return hi;
    return std::min(hi, t + 1.0);
}

}  // namespace detail

// K^-j int_0^K t^j e^{-2 pi alpha t - 2 pi i beta t^2} (1 - e^{-2 pi M t}) / (e^{2 pi t} - 1) dt
inline cplx integral_J1(double alpha, double beta, int j, std::int64_t M, double K, double eps)
{
    if (j < 0 || M < 0 || K <= 0) throw std::invalid_argument("integral_J1: bad arguments");
    if (M == 0) return 0.0;
    const double hi = detail::cutoff(2 * M_PI * (1 + alpha), 0.0, eps, K);
    auto f = [&](double t) {
        double num = -std::expm1(-2 * M_PI * static_cast<double>(M) * t);
        double mag = std::pow(t / K, j) * num / std::expm1(2 * M_PI * t) * std::exp(-2 * M_PI * alpha * t);
        return std::polar(mag, -2 * M_PI * beta * t * t);
    };
    return detail::graded(f, 0.0, hi, std::min(0.5, 1.0 / static_cast<double>(M)), eps);
}

// K^-j int_0^K t^j e^{-2 pi beta t^2} (e^{-2 pi a1 t} + (-1)^{j+1} e^{-2 pi a2 t}) / (e^{2 pi t} - 1) dt
inline cplx integral_J2(double alpha1, double alpha2, double beta, int j, double K, double eps)
{
    if (j < 0 || K <= 0 || alpha1 < 0 || alpha2 < 0) throw std::invalid_argument("integral_J2: bad arguments");
    const double hi = detail::cutoff(2 * M_PI * (1 + std::min(alpha1, alpha2)), 2 * M_PI * beta, eps, K);
    auto f = [&](double t) -> cplx {
        double num;
        if (j % 2) {
            num = std::exp(-2 * M_PI * alpha1 * t) + std::exp(-2 * M_PI * alpha2 * t);
        } else if (alpha1 <= alpha2) {
            num = -std::exp(-2 * M_PI * alpha1 * t) * std::expm1(-2 * M_PI * (alpha2 - alpha1) * t);
        } else {
            num = std::exp(-2 * M_PI * alpha2 * t) * std::expm1(-2 * M_PI * (alpha1 - alpha2) * t);
        }
        return std::pow(t / K, j) * std::exp(-2 * M_PI * beta * t * t) * num / std::expm1(2 * M_PI * t);
    };
    return detail::graded(f, 0.0, hi, 0.5, eps);
}

inline IntegralResult integral_I(const IntegralRequest& r)
{
    const int j = r.j;
    const double K = r.K, al = r.alpha, be = r.beta, eps = r.eps;
    if (j < 0 || K <= 0) throw std::invalid_argument("integral_I: bad arguments");
    const cplx I(0, 1);
    switch (r.kind) {
    case IntegralKind::I_C7: {
        const double hi = detail::cutoff(M_PI * M_SQRT2 * al, 2 * M_PI * be, eps, K * M_SQRT2);
        auto f = [&](double t) {
            return std::pow(t / K, j) * std::exp(-(1.0 + I) * (M_PI * M_SQRT2 * al * t) - 2 * M_PI * be * t * t);
        };
        return {std::exp(-I * (M_PI * (j + 1) / 4.0)) * detail::graded(f, 0.0, hi, 1.0, eps), false};
    }
    case IntegralKind::I_C9H: {
        if (be == 0.0) {
            if (!(al > 0)) throw std::invalid_argument("integral_I: C9H diverges for alpha = beta = 0");
            return {std::tgamma(j + 1.0) / std::pow(2 * M_PI * al, j + 1) / std::pow(K, j), false};
        }
        // rotate t = s e^{-i pi/4}; the Gaussian then decays along the ray
        const cplx w = std::exp(-I * (M_PI / 4));
        const double hi = detail::cutoff(M_SQRT2 * M_PI * al, 2 * M_PI * be, eps, 1e300);
        auto f = [&](double s) { return std::pow(s / K, j) * std::exp(-2 * M_PI * al * w * s - 2 * M_PI * be * s * s); };
        return {std::pow(w, j + 1) * detail::graded(f, 0.0, hi, 1.0, eps), false};
    }
    case IntegralKind::I_C9E: {
        if (r.skip_bound >= 0 && r.skip_bound < eps / 8) return {0.0, true};
        const cplx lin = 2 * M_PI * ((al + 2 * be * K) + I * (2 * be * K - al));
        const double hi = detail::cutoff(lin.real(), 4 * M_PI * be, eps, 1e300);
        auto f = [&](double t) { return std::pow(t / K, j) * std::exp(-lin * t - 4 * M_PI * be * t * t); };
        return {detail::graded(f, 0.0, hi, 1.0, eps), false};
    }
    case IntegralKind::I_Ctilde1: {
        if (r.skip_bound >= 0 && r.skip_bound < eps / 8) return {0.0, true};
        double ph = std::fmod(be * K * K, 1.0);
        double logpre = detail::expo_guard(-2 * M_PI * al * K);
        cplx pre = -I * std::polar(std::exp(logpre), -2 * M_PI * ph);
        const double pm = std::exp(logpre);
        const double tol = pm > 0 ? eps / pm : 1e300;
        auto f = [&](double t) {
            return std::pow(t, j) * std::exp(2 * M_PI * I * al * t - 4 * M_PI * be * K * t + 2 * M_PI * I * be * t * t);
        };
        return {pre * detail::graded(f, 0.0, K, 1.0, tol), false};
    }
    case IntegralKind::J1:
        return {integral_J1(al, be, j, r.M, K, eps), false};
    case IntegralKind::J2:
        return {integral_J2(r.alpha1, r.alpha2, be, j, K, eps), false};
    }
    throw std::invalid_argument("integral_I: unknown kind");
}

// e^{-2 pi omega K} (sum |z'_j| + sum |z_j|) < eps/8
inline bool boundary_terms_negligible(double omega, double K, const std::vector<cplx>& z, const std::vector<cplx>& z_prime,
                                      double eps)
{
    double s = 0.0;
    for (auto c : z) s += std::abs(c);
    for (auto c : z_prime) s += std::abs(c);
    return std::exp(-2 * M_PI * omega * K) * s < eps / 8;
}

}  // namespace zeta::theta
