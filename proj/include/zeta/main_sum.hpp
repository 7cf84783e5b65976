#pragma once

// The Riemann-Siegel main sum M(t) = sum_{n<=N} n^{-1/2+it} in three stages:
//   [1, n1)    term by term with a high-precision logarithm per n
//   [n1, n2)   short runs v+k with a Taylor series for t log(1+k/v)
//   [n2, N]    blocks v_r + k, k < K_r, each a quadratic exponential sum

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "precision.hpp"
#include "theta_sum.hpp"

namespace zeta::ms {

using cplx = std::complex<double>;

struct BlockParams {
    std::int64_t K_min = 2000;
    double alpha = 1.0 / 0.9;
    int J = 18;
};

struct BlockSpan {
    std::int64_t v = 0;
    std::int64_t K = 0;
};

struct Block {
    std::int64_t v = 0;
    std::int64_t K = 0;
    HPReal a;  // t / (2 pi v)
    HPReal b;  // -t / (4 pi v^2)
    std::vector<cplx> c;
};

struct BlockDecomposition {
    HPReal t;
    std::int64_t N = 0;
    std::int64_t n1 = 1;
    std::int64_t n2 = 1;
    std::int64_t v0 = 0;
    double u0 = 1.0;
    BlockParams params;
    std::vector<BlockSpan> blocks;
    bool bound_hypothesis = false;  // v0 <= (1/3) sqrt(t / 2pi)
    double eps_J = 0.0;             // closed-form value, +inf when v0 > sqrt(t/2pi)
};

struct SumStats {
    std::int64_t hp_logs = 0;
    std::int64_t runs = 0;
    std::int64_t fallback_terms = 0;
};

struct ErrorBudget {
    double truncation = 0.0;        // tail of the block Taylor expansions
    bool truncation_rigorous = true;
    double closed_form_truncation = 0.0;
    double practical_truncation = 0.0;  // heuristic, not a bound
    double stage12 = 0.0;
    double theta_worst = 0.0;        // sum of per-block theta errors
    double theta_statistical = 0.0;  // eps * sqrt(sum 1/v_r)
    double roundoff = 0.0;

    double rigorous_total() const { return truncation + stage12 + theta_worst + roundoff; }
    // never above the rigorous figure
    double practical_total() const { return std::min(practical_truncation, truncation) + stage12 + theta_statistical + roundoff; }
};

struct MainSumConfig {
    BlockParams params;
    double eps = 1e-10;
    int threads = 1;
    bool reproducible = true;
    std::ostream* theta_trace = nullptr;
};

struct MainSumResult {
    cplx value;
    HPComplex value_hp;
    cplx stage1, stage2, stage3;
    BlockDecomposition decomp;
    ErrorBudget budget;
    SumStats stats;
};

// ---------------------------------------------------------------------------
// Bounds

inline double abs_s(double t) { return std::hypot(0.5, t); }

namespace detail {

// sum_{h > hmax} x^h / h!
inline double exp_tail(double x, double hmax)
{
    int h0 = hmax < 0 ? 0 : static_cast<int>(std::floor(hmax)) + 1;
    double term = 1.0;
    for (int h = 1; h <= h0; ++h) term *= x / h;
    double s = 0.0;
    for (int h = h0; h < h0 + 200; ++h) {
        s += term;
        term *= x / (h + 1);
        if (term < 1e-30 * s) break;
    }
    return s;
}

}  // namespace detail

// Uniform bound on sum_{j>J} ((K_r-1)/K_r)^j |c_r(j)| over blocks.
inline double truncation_bound_cmax(int J, double t, double u0)
{
    if (J < 1) throw std::invalid_argument("truncation_bound_cmax: J >= 1");
    const double s = abs_s(t);
    const double alpha = u0 / std::cbrt(s);
    const double x = 1.0 / (3.0 * alpha * alpha * alpha);
    const double s14 = std::pow(s, -0.25);
    const double lam = 0.5 * s14 + 0.25 / std::sqrt(s) + 0.25 / (1.0 - s14);
    const double s13 = std::cbrt(s);
    return detail::exp_tail(x, J / 3.0) + 49.0 / (48.0 * s13 * alpha) * detail::exp_tail(x, (J - 1) / 3.0) +
           std::exp(lam) / (s13 * std::pow(alpha, 4)) * detail::exp_tail(x, (J - 4) / 3.0) +
           std::exp(lam + 1.0 / 3.0) / (std::pow(s, 5.0 / 12.0) * std::pow(alpha, J) * (alpha - 1.0));
}

namespace detail {

// The closed form behind mmax_bound, without its hypothesis check.
inline double mmax_closed_form(double t, double u0, double v0)
{
    const double pi = M_PI;
    return std::sqrt(1.0 / u0 + 1.0 / v0) *
           (std::log(t / (2 * pi * v0 * v0)) / std::log1p(1.0 / u0) +
            std::pow(t, 0.25) * M_SQRT2 / (3.0 * std::pow(pi, 0.25) * std::sqrt(u0)) +
            2.0 * t * M_SQRT2 / (3.0 * pi * std::sqrt(u0 * v0) * v0) + std::sqrt(t) / (std::sqrt(pi) * v0) + 2.0 * u0 +
            2.0 * u0 * std::log(t / (pi * v0 * v0)) + 5.0);
}

}  // namespace detail

// Bound on sum_r F_max(K_r; a_r, b_r) / sqrt(v_r); needs v0 <= (1/3) sqrt(t/2pi).
inline double mmax_bound(double t, double u0, double v0)
{
    if (!(u0 >= 1.0)) throw std::invalid_argument("mmax_bound: u0 must be >= 1");
    if (!(v0 <= std::sqrt(t / (2 * M_PI)) / 3.0)) throw std::invalid_argument("mmax_bound: needs v0 <= (1/3) sqrt(t/2pi)");
    return detail::mmax_closed_form(t, u0, v0);
}

inline std::int64_t v0_for(const HPReal& t, std::int64_t K_min)
{
    return to_int64(ceil(cbrt(t) * static_cast<double>(K_min)));
}

inline double u0_for(double t, double alpha) { return alpha * std::cbrt(abs_s(t)); }

// Closed-form truncation bound with the default block parameters.  Below
// t ~ 3.2e24 the default v0 exceeds (1/3) sqrt(t/2pi) and the value is the
// formula only; partition_main_sum records whether the hypothesis holds.
inline double epsJ_bound(int J, double t)
{
    BlockParams p;
    const double u0 = u0_for(t, p.alpha);
    const double v0 = std::ceil(static_cast<double>(p.K_min) * std::cbrt(t));
    return truncation_bound_cmax(J, t, u0) * detail::mmax_closed_form(t, u0, v0);
}

inline double practical_error_estimate(int J, double t, double N, double v0, double u0)
{
    return truncation_bound_cmax(J, t, u0) * std::sqrt(std::log(std::max(N / v0, 1.0)));
}

// ---------------------------------------------------------------------------
// Partition

// Stage boundaries and bounds without the block list.
inline BlockDecomposition describe_main_sum(const HPReal& t, const BlockParams& params)
{
    if (!(t > 2 * M_PI)) throw std::invalid_argument("partition_main_sum: t must exceed 2 pi");
    if (params.K_min < 1 || !(params.alpha > 1.0) || params.J < 0)
        throw std::invalid_argument("partition_main_sum: K_min >= 1, alpha > 1, J >= 0 required");
    BlockDecomposition d;
    d.t = t;
    d.params = params;
    const double td = t.to_double();
    d.N = to_int64(floor(sqrt(t / (hp_pi(t.prec()) * 2.0))));
    d.v0 = v0_for(t, params.K_min);
    d.u0 = u0_for(td, params.alpha);
    d.n2 = std::min(d.v0, d.N + 1);
    d.n1 = std::clamp<std::int64_t>(static_cast<std::int64_t>(std::ceil(3.0 * std::pow(td, 0.25))), 1, d.n2);
    d.bound_hypothesis = static_cast<double>(d.v0) <= std::sqrt(td / (2 * M_PI)) / 3.0;
    d.eps_J = params.J >= 1 && static_cast<double>(d.v0) <= std::sqrt(td / (2 * M_PI))
                  ? truncation_bound_cmax(params.J, td, d.u0) * detail::mmax_closed_form(td, d.u0, static_cast<double>(d.v0))
                  : HUGE_VAL;
    return d;
}

// The block starting at v (v in [n2, N]).
inline BlockSpan block_at(const BlockDecomposition& d, std::int64_t v)
{
    if (v < d.n2 || v > d.N) throw std::out_of_range("block_at: start outside [n2, N]");
    auto K = static_cast<std::int64_t>(std::ceil(static_cast<double>(v) / d.u0));
    return {v, std::min(std::max<std::int64_t>(K, 1), d.N + 1 - v)};
}

inline BlockDecomposition partition_main_sum(const HPReal& t, const BlockParams& params, std::int64_t max_blocks = 50'000'000)
{
    BlockDecomposition d = describe_main_sum(t, params);
    for (std::int64_t v = d.n2; v <= d.N;) {
        if (static_cast<std::int64_t>(d.blocks.size()) >= max_blocks)
            throw std::length_error("partition_main_sum: more than " + std::to_string(max_blocks) + " blocks");
        d.blocks.push_back(block_at(d, v));
        v += d.blocks.back().K;
    }
    return d;
}

// Phase precision for quantities derived from t at accuracy eps.
inline mpfr_prec_t phase_prec(const HPReal& t, double eps)
{
    return std::max<mpfr_prec_t>(t.prec(), required_phase_bits(t, std::min(eps, 0.5)) + 64);
}

// ---------------------------------------------------------------------------
// Block coefficients: c(j) = (K/v)^j [z^j] f(z),
//   f(z) = e^{(s-1/2)(z - z^2/2)} (1+z)^{-s},  s = 1/2 - it.
// A nonzero tau multiplies f by (1+z)^{i tau}: the block at t + tau written
// over the quadratic phase of t.

inline std::vector<cplx> block_coefficients(double t, double v, double K, int J, double tau = 0.0)
{
    if (J < 0) throw std::invalid_argument("block_coefficients: J >= 0");
    const cplx s(0.5, -t);
    const double rho = K / v;
    // log f = -(z - z^2/2)/2 - s sum_{m>=3} (-1)^{m+1} z^m / m
    std::vector<cplx> g(J + 1, 0.0);
    double rp = rho;
    for (int m = 1; m <= J; ++m, rp *= rho) {
        cplx gm;
        if (m == 1)
            gm = -0.5;
        else if (m == 2)
            gm = 0.25;
        else
            gm = -s * ((m % 2 ? 1.0 : -1.0) / m);
        gm += cplx(0.0, tau) * ((m % 2 ? 1.0 : -1.0) / m);
        g[m] = gm * rp;
    }
    std::vector<cplx> f(J + 1, 0.0);
    f[0] = 1.0;
    for (int n = 1; n <= J; ++n) {
        cplx acc = 0.0;
        for (int k = 1; k <= n; ++k) acc += static_cast<double>(k) * g[k] * f[n - k];
        f[n] = acc / static_cast<double>(n);
    }
    return f;
}

inline Block make_block(const HPReal& t, BlockSpan span, int J, mpfr_prec_t prec)
{
    Block b;
    b.v = span.v;
    b.K = span.K;
    const HPReal tt = t.with_prec(prec);
    const HPReal pi = hp_pi(prec);
    const HPReal v(static_cast<long>(span.v), prec);
    b.a = tt / (pi * 2.0 * v);
    b.b = -(tt / (pi * 4.0 * v * v));
    b.c = block_coefficients(t.to_double(), static_cast<double>(span.v), static_cast<double>(span.K), J);
    return b;
}

// e^{i t log v} / sqrt(v)
inline cplx block_prefactor(const HPReal& t, std::int64_t v, mpfr_prec_t prec)
{
    HPReal ph = t.with_prec(prec) * hp_log_integer(static_cast<std::uint64_t>(v), prec) / (hp_pi(prec) * 2.0);
    return to_turns(ph).unit() / std::sqrt(static_cast<double>(v));
}

// sum_{j>J} ((K-1)/K)^j |c(j)|, from the coefficients themselves.
inline double coefficient_tail(double t, const BlockSpan& s, int J, double tau = 0.0)
{
    const int D = J + 60;
    auto c = block_coefficients(t, static_cast<double>(s.v), static_cast<double>(s.K), D, tau);
    const double w = static_cast<double>(s.K - 1) / static_cast<double>(s.K);
    double tail = 0.0, wp = std::pow(w, J + 1);
    for (int j = J + 1; j <= D; ++j, wp *= w) tail += wp * std::abs(c[j]);
    return tail + 2.0 * std::abs(c[D]);
}

// max over prefix lengths of |sum_{k<L} e(ak + bk^2)|, by one Weyl difference:
// |S|^2 <= K + 2 sum_{h<K} min(K - h, 1/(2 ||2bh||)).
inline double block_fmax(const HPReal& b, std::int64_t K)
{
    const Turns tb2 = to_turns(b * 2.0);
    double s = static_cast<double>(K);
    for (std::int64_t h = 1; h < K; ++h) {
        double d = std::abs((tb2 * static_cast<std::uint64_t>(h)).centered());
        double geo = d > 0 ? 0.5 / d : HUGE_VAL;
        s += 2.0 * std::min(static_cast<double>(K - h), geo);
    }
    return std::min(static_cast<double>(K), std::sqrt(s));
}

// F_max of every block, for truncation budgets.
inline std::vector<double> block_fmax_table(const BlockDecomposition& d, mpfr_prec_t prec)
{
    const HPReal tt = d.t.with_prec(prec);
    const HPReal pi = hp_pi(prec);
    std::vector<double> out;
    out.reserve(d.blocks.size());
    for (const auto& s : d.blocks) {
        HPReal v(static_cast<long>(s.v), prec);
        out.push_back(block_fmax(-(tt / (pi * 4.0 * v * v)), s.K));
    }
    return out;
}

// Truncation budget recomputed block by block:
// sum_r 2 F_max_r tail_r / sqrt(v_r), with the coefficients shifted by tau.
inline double recomputed_truncation_budget(const BlockDecomposition& d, const std::vector<double>& fmax, double tau = 0.0)
{
    const double td = d.t.to_double();
    double total = 0.0;
    for (std::size_t r = 0; r < d.blocks.size(); ++r) {
        const auto& s = d.blocks[r];
        double tail = coefficient_tail(td, s, d.params.J, tau);
        total += 2.0 * fmax.at(r) * tail / std::sqrt(static_cast<double>(s.v));
    }
    return total;
}

inline double recomputed_truncation_budget(const BlockDecomposition& d, mpfr_prec_t prec)
{
    return recomputed_truncation_budget(d, block_fmax_table(d, prec));
}

// ---------------------------------------------------------------------------
// Stage 1

inline cplx stage1_sum(const HPReal& t, std::int64_t n_lo, std::int64_t n_hi, SumStats* stats = nullptr,
                       mpfr_prec_t prec = 0)
{
    if (n_lo < 1) throw std::invalid_argument("stage1_sum: n_lo >= 1");
    if (prec == 0) prec = phase_prec(t, 1e-16);
    const HPReal tt = t.with_prec(prec);
    const HPReal scale = tt / (hp_pi(prec) * 2.0);
    cplx acc = 0.0;
    for (std::int64_t n = n_lo; n <= n_hi; ++n) {
        HPReal ph = scale * hp_log_integer(static_cast<std::uint64_t>(n), prec);
        acc += to_turns(ph).unit() / std::sqrt(static_cast<double>(n));
    }
    if (stats && n_hi >= n_lo) stats->hp_logs += n_hi - n_lo + 1;
    return acc;
}

// Direct sum at high precision, for checks.
inline HPComplex main_sum_direct_hp(const HPReal& t, std::int64_t n_lo, std::int64_t n_hi)
{
    const auto prec = t.prec();
    const HPReal scale = t / (hp_pi(prec) * 2.0);
    const HPReal two_pi = hp_pi(prec) * 2.0;
    HPComplex acc(prec);
    for (std::int64_t n = n_lo; n <= n_hi; ++n) {
        HPReal ph = reduce_mod_one(scale * hp_log_integer(static_cast<std::uint64_t>(n), prec)) * two_pi;
        acc += hp_expi(ph) * (1.0 / sqrt(HPReal(static_cast<long>(n), prec)));
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Stage 2

inline cplx stage2_sum(const HPReal& t, std::int64_t n_lo, std::int64_t n_hi, double eps, SumStats* stats = nullptr)
{
    if (!(eps > 0)) throw std::invalid_argument("stage2_sum: eps must be positive");
    if (n_lo < 1) throw std::invalid_argument("stage2_sum: n_lo >= 1");
    if (n_hi < n_lo) return 0.0;
    const double td = t.to_double();
    const mpfr_prec_t prec = magnitude_bits(t) + 192;
    const HPReal tt = t.with_prec(prec);
    const HPReal scale = tt / (hp_pi(prec) * 2.0);
    // per-term phase tolerance in turns
    const double delta = 0.01 * eps / std::sqrt(static_cast<double>(n_hi));
    SumStats local;
    cplx acc = 0.0;

    std::vector<u128> fixed;
    std::vector<double> small;
    for (std::int64_t v = n_lo; v <= n_hi;) {
        const std::int64_t remaining = n_hi - v + 1;
        std::int64_t L = std::min<std::int64_t>({remaining, std::max<std::int64_t>(v / 2, 1), std::int64_t(1) << 20});
        int m_fp = 0, m_tot = 0;
        const double vd = static_cast<double>(v);
        for (;; L /= 2) {
            if (L <= 1) break;
            const double r = static_cast<double>(L) / vd;
            m_fp = 0;
            m_tot = 0;
            double term = td / (2 * M_PI) * r;  // t/(2 pi m) (L/v)^m at m = 1
            for (int m = 1; m <= 80; ++m) {
                double tm = term / m;
                if (tm >= 0.1) m_fp = m;
                if (tm < delta) {
                    m_tot = m - 1;
                    break;
                }
                term *= r;
            }
            if (m_tot == 0 && m_fp > 0) continue;  // series too long
            if (m_tot > 64) continue;
            if (m_fp * std::log2(static_cast<double>(L)) <= 64.0) break;
        }
        if (L <= 1) {
            acc += stage1_sum(t, v, v, &local, prec);
            ++local.fallback_terms;
            ++v;
            continue;
        }
        // c_m = (-1)^{m+1} t / (2 pi m v^m), in turns
        fixed.assign(m_fp + 1, 0);
        small.assign(m_tot + 1, 0.0);
        HPReal cm = scale / HPReal(static_cast<long>(v), prec);
        for (int m = 1; m <= m_tot; ++m) {
            HPReal val = cm / static_cast<double>(m);
            if (m % 2 == 0) val = -val;
            if (m <= m_fp)
                fixed[m] = to_turns(val).frac;
            else
                small[m] = val.to_double();
            cm /= static_cast<double>(v);
        }
        const Turns base = to_turns(scale * hp_log_integer(static_cast<std::uint64_t>(v), prec));
        ++local.hp_logs;
        ++local.runs;
        cplx run = 0.0;
        for (std::int64_t k = 0; k < L; ++k) {
            u128 ph = 0, kp = 1;
            const u128 kk = static_cast<u128>(k);
            for (int m = 1; m <= m_fp; ++m) {
                kp *= kk;
                ph += fixed[m] * kp;
            }
            double sm = 0.0;
            const double kd = static_cast<double>(k);
            for (int m = m_tot; m > m_fp; --m) sm = (sm + small[m]) * kd;
            if (m_fp > 0) {
                double kpow = std::pow(kd, m_fp);
                sm *= kpow;
            }
            Turns tot{ph};
            double th = 2 * M_PI * (tot.centered() + sm);
            run += cplx(std::cos(th), std::sin(th)) / std::sqrt(vd + kd);
        }
        acc += base.unit() * run;
        v += L;
    }
    if (stats) {
        stats->hp_logs += local.hp_logs;
        stats->runs += local.runs;
        stats->fallback_terms += local.fallback_terms;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Stage 3

struct BlockValue {
    std::size_t index = 0;
    cplx value;
    bool ok = true;
};

inline theta::ThetaConfig block_theta_config(const BlockParams& p, std::ostream* trace = nullptr)
{
    theta::ThetaConfig c;
    c.direct_threshold = p.K_min;
    c.trace = trace;
    return c;
}

// sum_{k<K} (v+k)^{-1/2+it} through the theta sum of the block.
inline cplx block_value(const HPReal& t, BlockSpan span, const BlockParams& params, double eps_block, mpfr_prec_t prec,
                        std::ostream* trace = nullptr)
{
    Block b = make_block(t, span, params.J, prec);
    auto m = theta::theta_moments(b.K, params.J, b.a, b.b, eps_block, block_theta_config(params, trace));
    cplx F = 0.0;
    for (int j = 0; j <= params.J; ++j) F += b.c[j] * m[j];
    return block_prefactor(t, b.v, prec) * F;
}

inline BlockValue evaluate_block(const BlockDecomposition& d, std::size_t r, double eps_block, mpfr_prec_t prec,
                                 std::ostream* trace = nullptr)
{
    BlockValue out{r, block_value(d.t, d.blocks.at(r), d.params, eps_block, prec, trace), true};
    if (!std::isfinite(out.value.real()) || !std::isfinite(out.value.imag())) out.ok = false;
    return out;
}

// Values of blocks [r0, r1), in index order.
// Tracing forces a single thread so that lines do not interleave.
inline std::vector<BlockValue> evaluate_blocks(const BlockDecomposition& d, std::size_t r0, std::size_t r1, double eps_block,
                                               int threads = 1, std::ostream* trace = nullptr)
{
    r1 = std::min(r1, d.blocks.size());
    std::vector<BlockValue> out(r1 > r0 ? r1 - r0 : 0);
    if (out.empty()) return out;
    const mpfr_prec_t prec = phase_prec(d.t, eps_block);
    const int nt = trace ? 1 : std::max(1, std::min<int>(threads, static_cast<int>(out.size())));
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) out[i] = evaluate_block(d, r0 + i, eps_block, prec, trace);
    };
    if (nt == 1) {
        work(0, out.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (out.size() + nt - 1) / nt;
        for (int w = 0; w < nt; ++w) {
            std::size_t lo = w * chunk, hi = std::min(out.size(), lo + chunk);
            if (lo < hi) pool.emplace_back(work, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    for (const auto& bv : out)
        if (!bv.ok) throw std::runtime_error("theta sum failed in block " + std::to_string(bv.index));
    return out;
}

// Block-order accumulation at 128 bits; any grouping of ranges summed the same
// way agrees to far below double precision.
inline HPComplex accumulate(const std::vector<BlockValue>& vals)
{
    HPComplex acc(128);
    for (const auto& b : vals) acc += b.value;
    return acc;
}

struct Stage3Result {
    cplx value;
    HPComplex value_hp{128};
    double theta_worst = 0.0;
    double theta_statistical = 0.0;
};

inline Stage3Result stage3_sum(const BlockDecomposition& d, double eps_per_block, int threads = 1, bool reproducible = true,
                               std::ostream* trace = nullptr)
{
    Stage3Result r;
    if (d.blocks.empty()) return r;
    auto vals = evaluate_blocks(d, 0, d.blocks.size(), eps_per_block, threads, trace);
    if (reproducible) {
        r.value_hp = accumulate(vals);
        r.value = r.value_hp.to_complex();
    } else {
        cplx s = 0.0;
        for (const auto& b : vals) s += b.value;
        r.value = s;
        r.value_hp = HPComplex(HPReal(s.real(), 128), HPReal(s.imag(), 128));
    }
    double inv = 0.0, isq = 0.0;
    for (const auto& s : d.blocks) {
        inv += 1.0 / static_cast<double>(s.v);
        isq += 1.0 / std::sqrt(static_cast<double>(s.v));
    }
    r.theta_worst = eps_per_block * isq;
    r.theta_statistical = eps_per_block * std::sqrt(inv);
    return r;
}

// ---------------------------------------------------------------------------

// Theta-sum tolerance giving the blocks a quarter of eps in total.
inline double per_block_eps(const BlockDecomposition& d, double eps)
{
    double isq = 0.0;
    for (const auto& s : d.blocks) isq += 1.0 / std::sqrt(static_cast<double>(s.v));
    return isq > 0 ? 0.25 * eps / isq : eps;
}

inline MainSumResult compute_main_sum(const HPReal& t, const MainSumConfig& cfg)
{
    if (!(cfg.eps > 0)) throw std::invalid_argument("compute_main_sum: eps must be positive");
    MainSumResult res;
    res.decomp = partition_main_sum(t, cfg.params);
    const auto& d = res.decomp;
    const double td = t.to_double();

    res.stage1 = stage1_sum(t, 1, d.n1 - 1, &res.stats);
    const double eps2 = 0.25 * cfg.eps;
    res.stage2 = stage2_sum(t, d.n1, d.n2 - 1, eps2, &res.stats);

    const double eps_block = per_block_eps(d, cfg.eps);
    auto s3 = stage3_sum(d, eps_block, cfg.threads, cfg.reproducible, cfg.theta_trace);
    res.stage3 = s3.value;

    HPComplex total(128);
    total += res.stage1;
    total += res.stage2;
    total += s3.value_hp;
    res.value_hp = total;
    res.value = total.to_complex();

    auto& B = res.budget;
    const double n_terms = static_cast<double>(d.N);
    B.stage12 = eps2 + std::ldexp(1.0, -50) * 2.0 * std::sqrt(static_cast<double>(std::max<std::int64_t>(d.n2, 1)));
    B.roundoff = std::ldexp(1.0, -50) * 2.0 * std::sqrt(n_terms) + 1e-16 * n_terms / std::max(1.0, std::sqrt(n_terms));
    B.theta_worst = s3.theta_worst;
    B.theta_statistical = s3.theta_statistical;
    if (d.blocks.empty()) {
        B.truncation = 0.0;
        B.closed_form_truncation = 0.0;
        B.practical_truncation = 0.0;
    } else {
        const mpfr_prec_t prec = phase_prec(t, eps_block);
        const double per_block = recomputed_truncation_budget(d, prec);
        B.closed_form_truncation = d.eps_J;
        B.truncation = d.bound_hypothesis ? std::min(per_block, d.eps_J) : per_block;
        B.practical_truncation = d.params.J >= 1
                                     ? practical_error_estimate(d.params.J, td, static_cast<double>(d.N),
                                                                static_cast<double>(d.v0), d.u0)
                                     : B.truncation;
    }
    return res;
}

}  // namespace zeta::ms
