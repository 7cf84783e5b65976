#pragma once

// Z(t) at a single point: Euler-Maclaurin below em_below, otherwise the
// staged main sum and the Riemann-Siegel assembly.

#include <algorithm>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "main_sum.hpp"
#include "precision.hpp"
#include "rs_zeta.hpp"

namespace zeta {

// t from its decimal string, exact to the digits given and carrying enough
// bits for phases at accuracy eps.
inline HPReal parse_t(std::string_view s, double eps = 1e-10)
{
    HPReal rough = HPReal::parse(s, bits_for_decimal(s));
    if (!(rough > 0.0)) throw std::invalid_argument("t must be positive: '" + std::string(s) + "'");
    const auto need = std::max(bits_for_decimal(s), required_phase_bits(rough, std::min(eps, 0.5)) + 64);
    return HPReal::parse(s, need);
}

struct EvalConfig {
    ms::BlockParams params;
    double eps = 1e-10;
    int rs_order = 4;
    int threads = 1;
    bool reproducible = true;
    bool practical_budget = false;  // report the heuristic budget instead of the rigorous one
    double em_below = 1000.0;
    std::ostream* trace = nullptr;
};

struct PointResult {
    rs::ZValue z;
    double rigorous_err = 0.0;
    double practical_err = 0.0;
    bool used_em = false;
    ms::MainSumResult main;  // empty when used_em
};

inline PointResult evaluate_point(const HPReal& t, const EvalConfig& cfg = {})
{
    PointResult out;
    if (t.to_double() < cfg.em_below) {
        out.z = rs::z_euler_maclaurin(t);
        out.used_em = true;
        out.rigorous_err = out.practical_err = out.z.err_bound;
        return out;
    }
    ms::MainSumConfig mc;
    mc.params = cfg.params;
    mc.eps = cfg.eps;
    mc.threads = cfg.threads;
    mc.reproducible = cfg.reproducible;
    mc.theta_trace = cfg.trace;
    out.main = ms::compute_main_sum(t, mc);
    auto ctx = rs::make_rs_context(t, cfg.rs_order);
    auto zr = rs::assemble_Z(ctx, out.main.value, out.main.budget.rigorous_total());
    auto zp = rs::assemble_Z(ctx, out.main.value, out.main.budget.practical_total());
    out.rigorous_err = zr.err_bound;
    out.practical_err = zp.err_bound;
    out.z = std::move(zr);
    if (cfg.practical_budget) out.z.err_bound = out.practical_err;
    return out;
}

using ZEvaluator = std::function<rs::ZValue(const HPReal&)>;

inline ZEvaluator make_evaluator(EvalConfig cfg = {})
{
    return [cfg](const HPReal& t) { return evaluate_point(t, cfg).z; };
}

}  // namespace zeta
