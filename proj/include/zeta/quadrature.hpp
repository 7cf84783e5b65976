#pragma once

// Gauss-Legendre rules and a panel layout for decaying rays [0, inf).

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace zeta::quad {

struct Rule {
    std::vector<double> x; // nodes on [-1, 1]
    std::vector<double> w;
};

inline constexpr int max_rule = 128;

namespace detail {
inline Rule build_rule(int n)
{
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        if (n == 1) p0 = 1.0;
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        r.x[i] = -z;
        r.x[n - 1 - i] = z;
        r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    if (n % 2 == 1) r.x[n / 2] = 0.0;
    return r;
}
} // namespace detail

// Built once on first use; immutable afterwards.
inline const Rule& gauss_legendre(int n)
{
    static const std::array<Rule, max_rule + 1> rules = [] {
        std::array<Rule, max_rule + 1> a;
        for (int k = 1; k <= max_rule; ++k) a[k] = detail::build_rule(k);
        return a;
    }();
    return rules[std::clamp(n, 1, max_rule)];
}

struct Panel {
    double lo, hi;
    int nodes;
};

// Panels covering [0, s_max) for integrands that look like
//   poly(s) * exp(-decay*s - gauss*s^2) * exp(i*osc*s)
// with possible near-singular structure within distance ~1 of [0, near_end].
inline std::vector<Panel> ray_panels(double decay, double osc, double gauss, double near_end, double tail_log,
                                     double poly_degree = 0.0, double poly_scale = 1.0)
{
    // s_max: decay*s + gauss*s^2 - degree*log(s/scale) exceeds tail_log
    auto excess = [&](double s) {
        return decay * s + gauss * s * s - poly_degree * std::log(std::max(s / poly_scale, 1.0));
    };
    double s_max = 1.0;
    while (excess(s_max) < tail_log && s_max < 1e18) s_max *= 1.25;
    double cap = gauss > 0 ? 1.5 / std::sqrt(gauss) : s_max;
    if (decay > 0) cap = std::min(cap, std::max(6.0 / decay, 1.0) * 4.0);
    std::vector<Panel> out;
    double s = 0.0;
    auto nodes_for = [&](double a, double b) {
        double h = b - a;
        double ph = std::abs(osc) * h + decay * h + 2.0 * gauss * b * h;
        int n = static_cast<int>(std::ceil(0.6 * ph)) + 16;
        return std::clamp(n, 16, max_rule);
    };
    while (s < near_end && s < s_max) {
        double e = std::min({s + 1.0, near_end, s_max});
        out.push_back({s, e, nodes_for(s, e)});
        s = e;
    }
    while (s < s_max) {
        double h = std::min(std::max(0.5 * s, 1.0), cap);
        double e = std::min(s + h, s_max);
        out.push_back({s, e, nodes_for(s, e)});
        s = e;
    }
    return out;
}

// Composite rule on [lo, hi] split into `pieces` equal panels of `n` nodes.
template <class F>
auto integrate(F&& f, double lo, double hi, int n, int pieces = 1)
{
    const Rule& r = gauss_legendre(n);
    double h = (hi - lo) / pieces;
    decltype(f(lo)) acc{};
    for (int p = 0; p < pieces; ++p) {
        double c = lo + (p + 0.5) * h, hw = 0.5 * h;
        for (int i = 0; i < n; ++i) acc += f(c + hw * r.x[i]) * (r.w[i] * hw);
    }
    return acc;
}

// Adaptive bisection comparing 20- and 40-point rules on each piece.
template <class F>
auto adaptive(F&& f, double lo, double hi, double tol, int depth = 0) -> decltype(f(lo))
{
    auto lo_order = integrate(f, lo, hi, 20);
    auto hi_order = integrate(f, lo, hi, 40);
    if (std::abs(hi_order - lo_order) <= std::max(tol, 1e-15 * std::abs(hi_order))) return hi_order;
    if (depth >= 48) throw std::runtime_error("adaptive quadrature did not converge");
    double mid = 0.5 * (lo + hi);
    return adaptive(f, lo, mid, 0.5 * tol, depth + 1) + adaptive(f, mid, hi, 0.5 * tol, depth + 1);
}

} // namespace zeta::quad
