#pragma once

// Gram points, zero isolation by sign changes of Z, Turing's method for
// completeness of a zero list, and S(t).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "evaluate.hpp"
#include "multieval.hpp"
#include "precision.hpp"
#include "quadrature.hpp"
#include "rs_zeta.hpp"

namespace zeta::zeros {

// theta(t) at the precision of t.
inline HPReal theta_of(const HPReal& t)
{
    if (t.to_double() < 1000.0) return HPReal(rs::theta_loggamma(t.to_double()), t.prec());
    return rs::theta_phase(t).theta;
}

// integral of theta, up to a constant; valid for t >= 1000
inline HPReal theta_antiderivative(const HPReal& t)
{
    const auto prec = t.prec();
    const HPReal pi = hp_pi(prec);
    return t * t * 0.25 * log(t / (pi * 2.0)) - t * t * 0.375 - pi * t / 8.0 + log(t) / 48.0 - 7.0 / (t * t * 11520.0);
}

// integral of theta over [a, b]
inline HPReal theta_integral(const HPReal& a, const HPReal& b)
{
    if (a.to_double() >= 1000.0) return theta_antiderivative(b) - theta_antiderivative(a);
    // short range at small t: Gauss-Legendre on theta_loggamma
    const double lo = a.to_double(), hi = b.to_double();
    auto f = [](double x) { return rs::theta_loggamma(x); };
    const int pieces = std::max(1, static_cast<int>(std::ceil(hi - lo)));
    return HPReal(quad::integrate(f, lo, hi, 20, pieces), a.prec());
}

struct GramPoint {
    std::int64_t m = 0;
    HPReal g;
    bool is_good = false;
    double Z = 0.0;
};

inline mpfr_prec_t gram_prec(std::int64_t m)
{
    return 128 + static_cast<mpfr_prec_t>(std::log2(static_cast<double>(std::max<std::int64_t>(std::abs(m), 2))));
}

// Solution of theta(g) = pi m, without the goodness test.
inline HPReal gram_location(std::int64_t m, mpfr_prec_t prec = 0)
{
    if (m < -1) throw std::invalid_argument("gram_point: m must be >= -1");
    if (prec == 0) prec = gram_prec(m);
    // (t/2) log(t / 2 pi e) = pi (m + 1/8)  =>  t = 2 pi e exp(W((m + 1/8)/e))
    const double y = (static_cast<double>(m) + 0.125) / std::exp(1.0);
    double w = y < 1 ? y : std::log(y);
    for (int i = 0; i < 60; ++i) w -= (w * std::exp(w) - y) / (std::exp(w) * (w + 1));
    HPReal g(2 * M_PI * std::exp(1.0 + w), prec);
    const HPReal target = hp_pi(prec) * static_cast<double>(m);
    for (int it = 0; it < 100; ++it) {
        const double gd = g.to_double();
        HPReal f = theta_of(g) - target;
        const double slope = 0.5 * std::log(gd / (2 * M_PI));
        HPReal step = f / slope;
        g -= step;
        if (std::abs(step.to_double()) < 1e-13 * std::max(1.0, gd) * (gd < 1000 ? 100.0 : 1e-10)) break;
        if (it == 99) throw std::runtime_error("gram_point: Newton iteration did not converge");
    }
    return g;
}

inline GramPoint gram_point(std::int64_t m, const ZEvaluator& eval)
{
    GramPoint p;
    p.m = m;
    p.g = gram_location(m);
    if (p.g.to_double() < 7.0) throw std::invalid_argument("gram_point: g_m below 7");
    p.Z = eval(p.g).Z;
    p.is_good = (m % 2 == 0 ? 1.0 : -1.0) * p.Z > 0;
    return p;
}

inline GramPoint gram_point(std::int64_t m) { return gram_point(m, make_evaluator()); }

struct ZeroRecord {
    HPReal gamma;
    HPReal lo, hi;  // bracket with a sign change of Z
    std::int64_t index_offset = 0;
};

namespace detail {

inline int sgn(double z) { return (z > 0) - (z < 0); }

// Refine a sign change of Z in [lo, hi] to width <= tol by the Illinois method.
inline ZeroRecord refine(HPReal lo, HPReal hi, double zlo, double zhi, const ZEvaluator& eval, double tol)
{
    int side = 0;
    for (int it = 0; it < 200; ++it) {
        const double w = (hi - lo).to_double();
        if (w <= tol) break;
        double frac = zlo / (zlo - zhi);
        if (!(frac > 0.01 && frac < 0.99) || it % 8 == 7) frac = 0.5;
        HPReal mid = lo + HPReal(w * frac, lo.prec());
        const double zm = eval(mid).Z;
        if (zm == 0.0) {
            lo = mid;
            hi = mid;
            break;
        }
        if (sgn(zm) == sgn(zlo)) {
            lo = mid;
            zlo = zm;
            if (side == -1) zhi *= 0.5;
            side = -1;
        } else {
            hi = mid;
            zhi = zm;
            if (side == 1) zlo *= 0.5;
            side = 1;
        }
    }
    ZeroRecord r;
    r.gamma = lo + (hi - lo) * 0.5;
    r.lo = std::move(lo);
    r.hi = std::move(hi);
    return r;
}

}  // namespace detail

// Sign changes of sampled Z, refined with the evaluator.
inline std::vector<ZeroRecord> isolate_zeros(const std::vector<HPReal>& ts, const std::vector<double>& zs, const ZEvaluator& eval,
                                             double tol = 1e-7)
{
    if (ts.size() != zs.size()) throw std::invalid_argument("isolate_zeros: sizes differ");
    std::vector<ZeroRecord> out;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        if (zs[i] == 0.0) {
            out.push_back({ts[i], ts[i], ts[i], 0});
            continue;
        }
        if (zs[i + 1] == 0.0 || detail::sgn(zs[i]) == detail::sgn(zs[i + 1])) continue;
        out.push_back(detail::refine(ts[i], ts[i + 1], zs[i], zs[i + 1], eval, tol));
    }
    if (!zs.empty() && zs.back() == 0.0) out.push_back({ts.back(), ts.back(), ts.back(), 0});
    for (std::size_t k = 0; k < out.size(); ++k) out[k].index_offset = static_cast<std::int64_t>(k);
    return out;
}

inline std::vector<ZeroRecord> isolate_zeros(const me::ZWindow& w, const ZEvaluator& eval, double tol = 1e-7)
{
    std::vector<HPReal> ts;
    ts.reserve(w.plan.count);
    for (int j = 0; j < w.plan.count; ++j) ts.push_back(w.plan.point(j));
    return isolate_zeros(ts, w.z_values, eval, tol);
}

// ---------------------------------------------------------------------------
// Turing's method

enum class TuringStatus { verified, refuted, inconclusive };

struct TuringCertificate {
    HPReal t1, t2;
    std::int64_t m1 = 0, m2 = 0;  // Gram indices of the endpoints
    std::int64_t zero_count = 0;
    std::int64_t N_t1 = 0, N_t2 = 0;
    bool verified = false;
    TuringStatus status = TuringStatus::inconclusive;
    bool bound_applies = false;  // both endpoint spans lie above 168 pi
    std::vector<std::pair<HPReal, double>> S_samples;
    std::vector<HPReal> zeros;
    std::string detail;
};

inline double turing_integral_bound(double t) { return 0.128 * std::log(t) + 2.30; }

struct TuringConfig {
    int min_intervals = 4;
    int max_intervals = 400;
    int subdivide = 64;
};

namespace detail {

// Z sampled on Gram points, cached.
class GramSampler {
public:
    explicit GramSampler(const ZEvaluator& eval) : eval_(eval) {}

    const GramPoint& at(std::int64_t m)
    {
        auto it = cache_.find(m);
        if (it == cache_.end()) it = cache_.emplace(m, gram_point(m, eval_)).first;
        return it->second;
    }

    struct Bracket {
        HPReal lo, hi;
        double z_lo, z_hi;
    };

    // Sign-change brackets in [g_m, g_{m+1}]; subdivided when the endpoints
    // show no change, or always if asked.
    std::vector<Bracket> brackets(std::int64_t m, int subdivide, bool always = false)
    {
        const GramPoint& a = at(m);
        const GramPoint& b = at(m + 1);
        std::vector<Bracket> out;
        if (!always && sgn(a.Z) != sgn(b.Z) && a.Z != 0 && b.Z != 0) {
            out.push_back({a.g, b.g, a.Z, b.Z});
            return out;
        }
        const double w = (b.g - a.g).to_double();
        HPReal prev_t = a.g;
        double prev_z = a.Z;
        for (int i = 1; i <= subdivide; ++i) {
            HPReal t = i == subdivide ? b.g : a.g + HPReal(w * i / subdivide, a.g.prec());
            double z = i == subdivide ? b.Z : eval_(t).Z;
            if (z != 0 && prev_z != 0 && sgn(z) != sgn(prev_z)) out.push_back({prev_t, t, prev_z, z});
            prev_t = t;
            prev_z = z;
        }
        return out;
    }

    // Brackets over [g_lo, g_hi].  Between consecutive good Gram points g_p,
    // g_q there should be q - p zeros; a run that shows fewer is resampled
    // more finely, intervals with a sign change included, since one of them
    // may hide a further pair.
    std::vector<Bracket> range_brackets(std::int64_t lo, std::int64_t hi, int subdivide)
    {
        std::vector<Bracket> out;
        for (std::int64_t p = lo; p < hi;) {
            std::int64_t q = p + 1;
            while (q < hi && !at(q).is_good) ++q;
            const auto& run = run_brackets(p, q, subdivide);
            out.insert(out.end(), run.begin(), run.end());
            p = q;
        }
        return out;
    }

    const ZEvaluator& eval() const { return eval_; }

private:
    const std::vector<Bracket>& run_brackets(std::int64_t p, std::int64_t q, int subdivide)
    {
        auto key = std::make_pair(p, q);
        if (auto it = runs_.find(key); it != runs_.end()) return it->second;
        auto scan = [&](int sub, bool always) {
            std::vector<Bracket> r;
            for (std::int64_t m = p; m < q; ++m)
                for (auto& b : brackets(m, sub, always)) r.push_back(std::move(b));
            return r;
        };
        auto run = scan(subdivide, false);
        if (at(p).is_good && at(q).is_good)
            for (int sub = subdivide; static_cast<std::int64_t>(run.size()) < q - p && sub <= 64 * subdivide; sub *= 8)
                run = scan(sub, true);
        return runs_.emplace(key, std::move(run)).first->second;
    }

    ZEvaluator eval_;
    std::map<std::int64_t, GramPoint> cache_;
    std::map<std::pair<std::int64_t, std::int64_t>, std::vector<Bracket>> runs_;
};

// One side of Turing's argument at the good Gram point g_n with N(g_n) = n+1
// assumed.  Returns the excess bound: right side bounds N(g_n) - (n+1) from
// above, left side from below (negated).  Values below 1 settle that side.
inline double turing_side(GramSampler& gs, std::int64_t n, int k, bool right, int subdivide)
{
    const std::int64_t lo_m = right ? n : n - k, hi_m = right ? n + k : n;
    const HPReal a = gs.at(lo_m).g, b = gs.at(hi_m).g;
    // zero positions taken at the bracket end that minimises (right) or
    // maximises (left) the observed S
    std::vector<HPReal> pos;
    for (const auto& br : gs.range_brackets(lo_m, hi_m, subdivide)) pos.push_back(right ? br.hi : br.lo);
    // integral of the step part: right side counts zeros in (g_n, t], left
    // side subtracts zeros in (t, g_n]
    const double width = (b - a).to_double();
    HPReal steps(0.0, a.prec());
    const double base = static_cast<double>(n + 1) - 1.0;  // N - 1 at g_n
    steps += base * width;
    for (const auto& p : pos) {
        const double d = right ? (b - p).to_double() : (p - a).to_double();
        steps += right ? d : -d;
    }
    HPReal integral = steps - theta_integral(a, b) / hp_pi(a.prec());
    const double I = integral.to_double();
    if (right) return (turing_integral_bound(b.to_double()) - I) / width;
    return (turing_integral_bound(b.to_double()) + I) / width;
}

inline std::optional<std::string> turing_endpoint(GramSampler& gs, std::int64_t n, const TuringConfig& cfg)
{
    for (int pass = 0; pass < 2; ++pass) {
        const bool right = pass == 0;
        bool ok = false;
        for (int k = cfg.min_intervals; k <= cfg.max_intervals; k *= 2) {
            if (!right && (n - k < -1 || gs.at(n - k).g.to_double() < 20.0)) break;
            if (turing_side(gs, n, std::min(k, cfg.max_intervals), right, cfg.subdivide) < 1.0) {
                ok = true;
                break;
            }
        }
        if (!ok) return std::string(right ? "upper" : "lower") + " Turing bound at g_" + std::to_string(n) + " not reached";
    }
    return std::nullopt;
}

}  // namespace detail

// Certifies that `zeros` are all the zeros in (g_m1, g_m2).
inline TuringCertificate turing_verify(const std::vector<HPReal>& zeros, const GramPoint& t1, const GramPoint& t2,
                                       const ZEvaluator& eval, const TuringConfig& cfg = {})
{
    if (!(t1.m < t2.m)) throw std::invalid_argument("turing_verify: t1 must precede t2");
    if (!t1.is_good || !t2.is_good) throw std::invalid_argument("turing_verify: endpoints must be good Gram points");
    TuringCertificate c;
    c.t1 = t1.g;
    c.t2 = t2.g;
    c.m1 = t1.m;
    c.m2 = t2.m;
    c.N_t1 = t1.m + 1;
    c.N_t2 = t2.m + 1;
    for (const auto& z : zeros)
        if (z > t1.g && z < t2.g) c.zeros.push_back(z);
    std::sort(c.zeros.begin(), c.zeros.end(), [](const HPReal& a, const HPReal& b) { return a < b; });
    c.zero_count = static_cast<std::int64_t>(c.zeros.size());

    detail::GramSampler gs(eval);
    for (const auto* gp : {&t1, &t2}) {
        if (auto why = detail::turing_endpoint(gs, gp->m, cfg)) {
            c.status = TuringStatus::inconclusive;
            c.detail = *why;
            return c;
        }
    }
    c.bound_applies = gs.at(t1.m - cfg.min_intervals).g.to_double() > 168 * M_PI;
    if (c.zero_count == c.N_t2 - c.N_t1) {
        c.status = TuringStatus::verified;
        c.verified = true;
        c.S_samples.emplace_back(c.t1, 0.0);
        c.S_samples.emplace_back(c.t2, 0.0);
    } else {
        c.status = TuringStatus::refuted;
        c.detail = "list has " + std::to_string(c.zero_count) + " zeros, Turing count is " + std::to_string(c.N_t2 - c.N_t1);
    }
    return c;
}

// First good Gram point at index >= m (step +1) or <= m (step -1).
inline GramPoint find_good_gram(std::int64_t m, int step, const ZEvaluator& eval, int max_tries = 200)
{
    for (int i = 0; i < max_tries; ++i, m += step) {
        auto g = gram_point(m, eval);
        if (g.is_good) return g;
    }
    throw std::runtime_error("no good Gram point found near index " + std::to_string(m));
}

// Zeros between two Gram points, located by sampling each Gram interval and
// subdividing intervals without an observed sign change (or, for a run short
// of zeros, every interval).
inline std::vector<ZeroRecord> zeros_between(std::int64_t m1, std::int64_t m2, const ZEvaluator& eval, double tol = 1e-7,
                                             int subdivide = 64)
{
    detail::GramSampler gs(eval);
    std::vector<ZeroRecord> out;
    for (const auto& br : gs.range_brackets(m1, m2, subdivide)) out.push_back(detail::refine(br.lo, br.hi, br.z_lo, br.z_hi, eval, tol));
    for (std::size_t k = 0; k < out.size(); ++k) out[k].index_offset = static_cast<std::int64_t>(k);
    return out;
}

// Largest m with g_m <= t (t above the first turning point of theta).
inline std::int64_t gram_index_below(const HPReal& t)
{
    if (!(t > 7.0)) throw std::invalid_argument("gram_index_below: t must exceed 7");
    return to_int64(floor(theta_of(t) / hp_pi(t.prec())));
}

struct VerifiedSpan {
    TuringCertificate cert;
    std::vector<ZeroRecord> zeros;
};

// Zeros between good Gram points enclosing [lo, hi], with their certificate.
inline VerifiedSpan verify_span(const HPReal& lo, const HPReal& hi, const ZEvaluator& eval, double tol = 1e-7,
                                const TuringConfig& cfg = {})
{
    if (!(lo < hi)) throw std::invalid_argument("verify_span: empty span");
    const HPReal lo7 = lo > 7.5 ? lo : HPReal(7.5, lo.prec());
    const GramPoint a = find_good_gram(std::max<std::int64_t>(gram_index_below(lo7), -1), -1, eval);
    const GramPoint b = find_good_gram(gram_index_below(hi) + 1, +1, eval);
    VerifiedSpan out;
    out.zeros = zeros_between(a.m, b.m, eval, tol, cfg.subdivide);
    std::vector<HPReal> gammas;
    for (const auto& z : out.zeros) gammas.push_back(z.gamma);
    out.cert = turing_verify(gammas, a, b, eval, cfg);
    return out;
}

// S(t) = N(t) - 1 - theta(t)/pi from a verified list; midpoint value at a zero.
inline double s_of_t(const HPReal& t, const TuringCertificate& c, double zero_tol = 1e-9)
{
    if (!c.verified) throw std::invalid_argument("s_of_t: certificate is not verified");
    if (t < c.t1 || t > c.t2) throw std::out_of_range("s_of_t: t outside the verified span");
    double dN = 0.0;
    for (const auto& z : c.zeros) {
        double d = (t - z).to_double();
        if (std::abs(d) <= zero_tol)
            dN += 0.5;
        else if (d > 0)
            dN += 1.0;
    }
    HPReal s = HPReal(static_cast<long>(c.N_t1), t.prec()) + (dN - 1.0) - theta_of(t) / hp_pi(t.prec());
    return s.to_double();
}

// ---------------------------------------------------------------------------

struct ZExtremum {
    HPReal t;
    double abs_Z = 0.0;
};

struct SExtremum {
    HPReal gamma;  // the zero next to which S attains the value
    double S = 0.0;
};

struct ExtremaReport {
    std::vector<ZExtremum> z_maxima;  // local maxima of |Z| above the threshold
    std::vector<SExtremum> s_extremes;  // |S| above the threshold
    std::optional<SExtremum> s_max, s_min;
};

// Local maxima of |Z| on the grid, refined by a parabola through three points;
// S just after each zero (its local maximum) and just before (local minimum).
inline ExtremaReport find_extrema(const me::ZWindow& w, const TuringCertificate& c, double z_threshold = 0.0,
                                  double s_threshold = 0.0)
{
    if (!c.verified) throw std::invalid_argument("find_extrema: certificate is not verified");
    ExtremaReport rep;
    const auto& z = w.z_values;
    for (std::size_t i = 1; i + 1 < z.size(); ++i) {
        const double a = std::abs(z[i - 1]), b = std::abs(z[i]), d = std::abs(z[i + 1]);
        if (!(b >= a && b > d) || b < z_threshold) continue;
        // the sign of Z is constant around an interior maximum of |Z|
        const double den = a - 2 * b + d;
        double off = den != 0 ? 0.5 * (a - d) / den : 0.0;
        off = std::clamp(off, -0.5, 0.5);
        const double peak = b - 0.25 * (a - d) * off;
        rep.z_maxima.push_back({w.plan.point(static_cast<int>(i)) + HPReal(off * w.plan.delta, w.plan.t0.prec()), peak});
    }
    const HPReal lo = w.plan.t0, hi = w.plan.point(w.plan.count - 1);
    for (std::size_t k = 0; k < c.zeros.size(); ++k) {
        const auto& g = c.zeros[k];
        if (g < lo || g > hi) continue;
        const HPReal N_before(static_cast<long>(c.N_t1 + static_cast<std::int64_t>(k)), g.prec());
        const double s_before = (N_before - 1.0 - theta_of(g) / hp_pi(g.prec())).to_double();
        const double s_after = s_before + 1.0;
        if (!rep.s_max || s_after > rep.s_max->S) rep.s_max = SExtremum{g, s_after};
        if (!rep.s_min || s_before < rep.s_min->S) rep.s_min = SExtremum{g, s_before};
        if (std::abs(s_after) > s_threshold && s_after > 0) rep.s_extremes.push_back({g, s_after});
        if (std::abs(s_before) > s_threshold && s_before < 0) rep.s_extremes.push_back({g, s_before});
    }
    return rep;
}

}  // namespace zeta::zeros
