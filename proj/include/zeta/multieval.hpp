#pragma once

// M(t0 + delta j) for a window of offsets, reusing the block moments computed
// at t0, and band-limited interpolation between the grid points.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "main_sum.hpp"
#include "precision.hpp"
#include "rs_zeta.hpp"
#include "theta_sum.hpp"

namespace zeta::me {

using cplx = std::complex<double>;

struct WindowPlan {
    HPReal t0;
    double delta = 0.04;
    int count = 1;
    double tau = 0.0;   // log N, the highest frequency of M
    double beta = 0.0;  // sampling frequency, > tau
    double rho = 1.1;

    HPReal point(int j) const { return t0 + HPReal(delta, t0.prec()) * static_cast<double>(j); }
};

enum class WindowMode {
    shifted,  // moments frozen at t0, coefficients recomputed for each offset
    frozen,   // whole inner block sums frozen at t0
};

struct ZWindow {
    WindowPlan plan;
    std::vector<cplx> grid_values;
    std::vector<double> z_values;
    std::vector<double> point_err;  // per grid point, Z scale
    double err_budget = 0.0;        // max of point_err
};

inline std::int64_t rs_length(const HPReal& t)
{
    return to_int64(floor(sqrt(t / (hp_pi(t.prec()) * 2.0))));
}

inline WindowPlan make_window_plan(const HPReal& t0, double delta, int count, double rho = 1.1)
{
    if (!(delta > 0) || count < 1) throw std::invalid_argument("window plan: delta > 0 and count >= 1 required");
    WindowPlan p;
    p.t0 = t0;
    p.delta = delta;
    p.count = count;
    p.tau = std::log(static_cast<double>(std::max<std::int64_t>(rs_length(t0), 2)));
    p.beta = 2.0 * p.tau;
    p.rho = rho;
    if (delta > M_PI / p.beta) throw std::invalid_argument("window plan: delta must not exceed pi/beta");
    return p;
}

// Points 2 pi n^2 strictly inside the window; N(t) jumps there.
inline std::vector<HPReal> window_split_points(const WindowPlan& p)
{
    std::vector<HPReal> out;
    const HPReal t1 = p.point(p.count - 1);
    const auto n0 = rs_length(p.t0), n1 = rs_length(t1);
    const HPReal two_pi = hp_pi(p.t0.prec()) * 2.0;
    for (std::int64_t n = n0 + 1; n <= n1; ++n) {
        HPReal nn(static_cast<long>(n), p.t0.prec());
        out.push_back(two_pi * nn * nn);
    }
    return out;
}

inline void check_window(const WindowPlan& p)
{
    auto sp = window_split_points(p);
    if (!sp.empty()) {
        std::string msg = "window crosses 2 pi n^2; split at";
        for (const auto& x : sp) msg += " " + x.to_string(20);
        throw std::invalid_argument(msg);
    }
}

// An admissible rho for the decomposition: u0 max_r log(1 + (K_r - 1)/v_r).
inline double admissible_rho(const ms::BlockDecomposition& d)
{
    double r = 0.0;
    for (const auto& s : d.blocks)
        r = std::max(r, d.u0 * std::log1p(static_cast<double>(s.K - 1) / static_cast<double>(s.v)));
    return r;
}

struct MultievalBound {
    double rigorous = 0.0;
    double practical = 0.0;  // heuristic
};

// Error of freezing the inner sums at offset j.
inline MultievalBound multieval_error_bound(const WindowPlan& p, int j, double alpha = 1.0 / 0.9)
{
    if (j < 0 || j >= p.count) throw std::out_of_range("multieval_error_bound: j outside the window");
    const double t0 = p.t0.to_double();
    const double dj = p.delta * j;
    MultievalBound b;
    b.rigorous = p.rho * dj * std::log(t0) / (alpha * std::pow(t0, 1.0 / 6.0));
    const double N = static_cast<double>(rs_length(p.t0));
    const double v0 = std::ceil(2000.0 * std::cbrt(t0));
    b.practical = dj * std::sqrt(std::log(std::max(N / v0, std::exp(1.0)))) / std::cbrt(t0);
    return b;
}

struct WindowConfig {
    double eps = 1e-10;
    int threads = 1;
    WindowMode mode = WindowMode::shifted;
    int rs_order = 4;
    std::ostream* trace = nullptr;  // theta recursion trace, forces one thread
};

struct WindowSums {
    std::vector<cplx> values;
    std::vector<double> err;  // main-sum error per grid point
};

inline WindowSums window_main_sums(const ms::BlockDecomposition& d, const WindowPlan& plan, const WindowConfig& cfg = {})
{
    check_window(plan);
    if (rs_length(plan.t0) != d.N) throw std::invalid_argument("window_main_sums: decomposition is for a different N");
    const std::size_t R = d.blocks.size();
    const int J = d.params.J;
    const double t0d = plan.t0.to_double();

    double isq = 0.0;
    for (const auto& s : d.blocks) isq += 1.0 / std::sqrt(static_cast<double>(s.v));
    const double eps_block = ms::per_block_eps(d, cfg.eps);
    const mpfr_prec_t prec = ms::phase_prec(plan.t0, eps_block);

    // per block: moments at t0, phase t0 log v / 2pi, log v / 2pi
    std::vector<std::vector<cplx>> moments(R);
    std::vector<Turns> phase0(R);
    std::vector<double> logv_turns(R);
    std::vector<cplx> frozen(R);
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r) {
            ms::Block b = ms::make_block(plan.t0, d.blocks[r], J, prec);
            moments[r] = theta::theta_moments(b.K, J, b.a, b.b, eps_block, ms::block_theta_config(d.params, cfg.trace));
            HPReal lv = hp_log_integer(static_cast<std::uint64_t>(b.v), prec) / (hp_pi(prec) * 2.0);
            phase0[r] = to_turns(plan.t0.with_prec(prec) * lv);
            logv_turns[r] = lv.to_double();
            cplx F = 0.0;
            for (int i = 0; i <= J; ++i) F += b.c[i] * moments[r][i];
            frozen[r] = F;
        }
    };
    const int nt = cfg.trace ? 1 : std::max(1, std::min<int>(cfg.threads, static_cast<int>(std::max<std::size_t>(R, 1))));
    if (nt == 1) {
        work(0, R);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (R + nt - 1) / nt;
        for (int w = 0; w < nt; ++w) {
            std::size_t lo = w * chunk, hi = std::min(R, lo + chunk);
            if (lo < hi) pool.emplace_back(work, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    for (std::size_t r = 0; r < R; ++r)
        for (const auto& m : moments[r])
            if (!std::isfinite(m.real()) || !std::isfinite(m.imag()))
                throw std::runtime_error("theta sum failed in block " + std::to_string(r));

    const std::vector<double> fmax = R ? ms::block_fmax_table(d, prec) : std::vector<double>{};
    const double rho = std::max(plan.rho, admissible_rho(d));
    WindowPlan bound_plan = plan;
    bound_plan.rho = rho;

    WindowSums out;
    out.values.resize(plan.count);
    out.err.resize(plan.count);
    for (int j = 0; j < plan.count; ++j) {
        const HPReal tj = plan.point(j);
        const double tau = (tj - plan.t0).to_double();
        HPComplex acc(128);
        acc += ms::stage1_sum(tj, 1, d.n1 - 1);
        acc += ms::stage2_sum(tj, d.n1, d.n2 - 1, 0.25 * cfg.eps);
        for (std::size_t r = 0; r < R; ++r) {
            const auto& s = d.blocks[r];
            cplx F;
            if (cfg.mode == WindowMode::frozen || j == 0) {
                F = frozen[r];
            } else {
                auto c = ms::block_coefficients(t0d, static_cast<double>(s.v), static_cast<double>(s.K), J, tau);
                F = 0.0;
                for (int i = 0; i <= J; ++i) F += c[i] * moments[r][i];
            }
            const Turns ph = phase0[r] + Turns::from_double(tau * logv_turns[r]);
            acc += ph.unit() * F / std::sqrt(static_cast<double>(s.v));
        }
        out.values[j] = acc.to_complex();

        double trunc = 0.0;
        if (R) {
            trunc = ms::recomputed_truncation_budget(d, fmax, cfg.mode == WindowMode::frozen ? 0.0 : tau);
            if (cfg.mode == WindowMode::frozen && j > 0) trunc += multieval_error_bound(bound_plan, j).rigorous;
        }
        out.err[j] = trunc + 0.25 * cfg.eps + eps_block * isq + std::ldexp(1.0, -48) * std::sqrt(static_cast<double>(d.N));
    }
    return out;
}

inline ZWindow compute_window(const WindowPlan& plan, const ms::BlockParams& params, const WindowConfig& cfg = {})
{
    auto d = ms::partition_main_sum(plan.t0, params);
    auto sums = window_main_sums(d, plan, cfg);
    ZWindow w;
    w.plan = plan;
    w.grid_values = std::move(sums.values);
    w.z_values.resize(plan.count);
    w.point_err.resize(plan.count);
    for (int j = 0; j < plan.count; ++j) {
        auto ctx = rs::make_rs_context(plan.point(j), cfg.rs_order);
        auto z = rs::assemble_Z(ctx, w.grid_values[j], sums.err[j]);
        w.z_values[j] = z.Z;
        w.point_err[j] = z.err_bound;
        w.err_budget = std::max(w.err_budget, z.err_bound);
    }
    return w;
}

// ---------------------------------------------------------------------------
// Interpolation

inline constexpr int kernel_half_width = 20;

struct Interpolated {
    cplx value;
    double err = 0.0;   // kernel truncation bound
    double gain = 1.0;  // sum of |kernel weights|, the amplification of sample errors
};

// Samples g(x0 + delta n), n = 0..size-1, of a function whose spectrum lies in
// [center - omega, center + omega]; Gaussian-damped sinc with `half` taps per side.
inline Interpolated interpolate_samples(const std::vector<cplx>& samples, double x0, double delta, double x, double center,
                                        double omega, int half = kernel_half_width)
{
    const double margin = M_PI - omega * delta;
    if (!(margin > 0)) throw std::invalid_argument("interpolate: band exceeds the sampling rate");
    const double u = (x - x0) / delta;
    const auto n_near = static_cast<std::int64_t>(std::llround(u));
    const auto last = static_cast<std::int64_t>(samples.size()) - 1;
    if (u < half || u > static_cast<double>(last - half))
        throw std::out_of_range("interpolate: point within the guard margin of the window edge");
    Interpolated out;
    double gmax = 0.0;
    for (const auto& s : samples) gmax = std::max(gmax, std::abs(s));
    if (std::abs(u - static_cast<double>(n_near)) < 1e-13) {
        out.value = samples[n_near];
        return out;
    }
    // sigma^2 in grid units balances the Gaussian tail against the band margin
    const double s2 = half / margin;
    const auto n_lo = static_cast<std::int64_t>(std::floor(u)) - half + 1;
    cplx acc = 0.0;
    out.gain = 0.0;
    for (std::int64_t n = n_lo; n < n_lo + 2 * half; ++n) {
        const double d = u - static_cast<double>(n);
        const double k = std::sin(M_PI * d) / (M_PI * d) * std::exp(-d * d / (2 * s2));
        out.gain += std::abs(k);
        // demodulate: the kernel acts on g(x) e^{-i center x}
        const double xn = x0 + delta * static_cast<double>(n);
        acc += samples[n] * std::polar(k, center * (x - xn));
    }
    out.value = acc;
    const double e = std::exp(-half * margin / 2.0);
    out.err = gmax * e * (2.0 + 2.0 / std::sqrt(M_PI * half * margin));
    return out;
}

struct InterpolatedZ {
    HPReal t;
    double Z = 0.0;
    double err = 0.0;
};

// Z(t) from the window: M is interpolated, then assembled at t.
inline InterpolatedZ bandlimited_interpolate(const ZWindow& w, const HPReal& t, int rs_order = 4)
{
    const auto& p = w.plan;
    if (static_cast<int>(w.grid_values.size()) != p.count) throw std::invalid_argument("bandlimited_interpolate: window is empty");
    const double x = (t - p.t0).to_double();
    const double u = x / p.delta;
    const auto n_near = std::llround(u);
    // M has frequencies log n in [0, tau]; center the band at tau/2
    auto ip = interpolate_samples(w.grid_values, 0.0, p.delta, x, 0.5 * p.tau, 0.5 * p.tau);
    InterpolatedZ out;
    out.t = t;
    if (std::abs(u - static_cast<double>(n_near)) < 1e-13) {
        out.Z = w.z_values[n_near];
        out.err = w.point_err[n_near];
        return out;
    }
    auto ctx = rs::make_rs_context(t, rs_order);
    double grid_err = 0.0;
    for (double e : w.point_err) grid_err = std::max(grid_err, e);
    auto z = rs::assemble_Z(ctx, ip.value, 0.0);
    out.Z = z.Z;
    out.err = z.err_bound + 2.0 * ip.err + ip.gain * grid_err;
    return out;
}

}  // namespace zeta::me
