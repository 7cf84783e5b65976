// zeta: Z(t), windows of Z and S, zero lists, and sharded main sums.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <zeta/evaluate.hpp>
#include <zeta/multieval.hpp>
#include <zeta/shard.hpp>
#include <zeta/zeros.hpp>

namespace {

using namespace zeta;
using json = nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string t;
    double eps = 1e-10;
    int J = 18;
    int m = 4;
    std::int64_t K_min = 2000;
    double alpha = 1.0 / 0.9;
    int threads = 1;
    std::string out;

    double delta = 0.04;
    int count = 1;
    bool verify = false;
    std::string zeros_out;
    double tol = 1e-9;

    double span = 10.0;

    int shards = 1;
    int run = -1;
    bool run_all = false;
    std::size_t stop_after = 0;
    std::string dir;

    bool trace = false;
    bool reproducible = true;
    bool practical = false;
};

ms::BlockParams block_params(const Options& o)
{
    ms::BlockParams p;
    p.K_min = o.K_min;
    p.alpha = o.alpha;
    p.J = o.J;
    return p;
}

EvalConfig eval_config(const Options& o)
{
    EvalConfig c;
    c.params = block_params(o);
    c.eps = o.eps;
    c.rs_order = o.m;
    c.threads = o.threads;
    c.reproducible = o.reproducible;
    c.practical_budget = o.practical;
    c.trace = o.trace ? &std::cerr : nullptr;
    return c;
}

// t >= 0; zero is allowed because small windows may start there.
HPReal read_t(const std::string& s, double eps)
{
    try {
        HPReal rough = HPReal::parse(s, bits_for_decimal(s));
        if (rough.sign() < 0) throw std::invalid_argument("t must not be negative");
        if (rough.sign() == 0) return rough;
        return parse_t(s, eps);
    } catch (const std::invalid_argument& e) {
        throw UsageError("bad --t '" + s + "': " + e.what());
    }
}

std::string fmt17(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_err(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

// Decimal t with trailing zeros of the fraction dropped.
std::string fmt_t(const HPReal& t, int frac = 15)
{
    std::string s = t.to_fixed(frac);
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    return s;
}

std::ostream& open_out(const std::string& path, std::ofstream& f)
{
    if (path.empty() || path == "-") return std::cout;
    f.open(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    return f;
}

int cmd_point(const Options& o)
{
    const HPReal t = read_t(o.t, o.eps);
    if (t.sign() == 0) throw UsageError("point: t must be positive");
    auto r = evaluate_point(t, eval_config(o));
    const auto& z = r.z;
    const int theta_digits = r.used_em ? 16 : 25;  // the small-t theta is a double
    std::cout << "t        " << fmt_t(t) << '\n'
              << "Z        " << fmt17(z.Z) << '\n'
              << "zeta     " << fmt17(z.zeta.real()) << (z.zeta.imag() < 0 ? " - " : " + ") << fmt17(std::abs(z.zeta.imag()))
              << "i\n"
              << "theta    " << z.theta.to_string(theta_digits) << '\n'
              << "err      " << fmt_err(r.rigorous_err) << "  (rigorous)\n"
              << "err      " << fmt_err(r.practical_err) << "  (practical, heuristic)\n"
              << "method   " << (r.used_em ? "euler-maclaurin" : "riemann-siegel") << '\n';
    if (!o.out.empty()) {
        json j = {{"t", fmt_t(t)},
                  {"Z", z.Z},
                  {"zeta_re", z.zeta.real()},
                  {"zeta_im", z.zeta.imag()},
                  {"theta", z.theta.to_string(theta_digits)},
                  {"err_rigorous", r.rigorous_err},
                  {"err_practical", r.practical_err},
                  {"method", r.used_em ? "euler-maclaurin" : "riemann-siegel"}};
        if (!r.used_em) {
            const auto& d = r.main.decomp;
            j["N"] = d.N;
            j["blocks"] = d.blocks.size();
            j["v0"] = d.v0;
        }
        std::ofstream f(o.out);
        if (!f) throw std::runtime_error("cannot write " + o.out);
        f << j.dump(2) << '\n';
    }
    return 0;
}

void write_zero_list(const std::string& path, const zeros::TuringCertificate& c, const std::vector<zeros::ZeroRecord>& zs)
{
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << "# zeros of Z(t) between Gram points g_" << c.m1 << " and g_" << c.m2 << '\n'
      << "# t1 " << fmt_t(c.t1, 12) << "  N(t1) " << c.N_t1 << '\n'
      << "# t2 " << fmt_t(c.t2, 12) << "  N(t2) " << c.N_t2 << '\n'
      << "# status " << (c.verified ? "verified" : c.status == zeros::TuringStatus::refuted ? "refuted" : "inconclusive");
    if (!c.detail.empty()) f << " (" << c.detail << ')';
    f << "\n# count " << zs.size() << '\n';
    for (const auto& z : zs) f << fmt_t(z.gamma, 12) << '\n';
}

int cmd_window(const Options& o)
{
    const HPReal t0 = read_t(o.t, o.eps);
    if (!(o.delta > 0) || o.count < 1) throw UsageError("window: --delta > 0 and --count >= 1 required");
    const EvalConfig ec = eval_config(o);
    std::vector<HPReal> ts;
    std::vector<double> zs, errs;

    const HPReal dl(o.delta, t0.prec());
    const HPReal t_end = t0 + dl * static_cast<double>(o.count - 1);
    if (o.count == 1 || t_end.to_double() < ec.em_below) {
        // single points, and the low range where the main sum is not used
        for (int j = 0; j < o.count; ++j) {
            HPReal t = t0 + dl * static_cast<double>(j);
            const rs::ZValue z = t.sign() > 0 ? evaluate_point(t, ec).z : rs::z_euler_maclaurin(t);
            ts.push_back(t);
            zs.push_back(z.Z);
            errs.push_back(z.err_bound);
        }
    } else {
        me::WindowPlan plan;
        try {
            plan = me::make_window_plan(t0, o.delta, o.count);
            me::check_window(plan);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        me::WindowConfig wc;
        wc.eps = o.eps;
        wc.threads = o.threads;
        wc.rs_order = o.m;
        wc.trace = ec.trace;
        auto w = me::compute_window(plan, ec.params, wc);
        for (int j = 0; j < o.count; ++j) {
            ts.push_back(plan.point(j));
            zs.push_back(w.z_values[j]);
            errs.push_back(w.point_err[j]);
        }
    }

    std::vector<std::string> s_col(ts.size());
    std::string warning;
    if (o.verify) {
        try {
            auto eval = make_evaluator(ec);
            auto vs = zeros::verify_span(ts.front(), ts.back(), eval, o.tol);
            if (vs.cert.verified) {
                for (std::size_t j = 0; j < ts.size(); ++j)
                    if (!(ts[j] < vs.cert.t1) && !(ts[j] > vs.cert.t2)) s_col[j] = fmt17(zeros::s_of_t(ts[j], vs.cert, o.tol));
            } else {
                warning = "zero list not verified: " + vs.cert.detail;
            }
            if (!o.zeros_out.empty()) write_zero_list(o.zeros_out, vs.cert, vs.zeros);
        } catch (const std::exception& e) {
            warning = std::string("zero list not verified: ") + e.what();
        }
    }

    std::ofstream f;
    std::ostream& out = open_out(o.out, f);
    out << "t,Z,S,err_bound\n";
    if (!warning.empty()) out << "# warning: " << warning << '\n';
    for (std::size_t j = 0; j < ts.size(); ++j)
        out << fmt_t(ts[j]) << ',' << fmt17(zs[j]) << ',' << s_col[j] << ',' << fmt_err(errs[j]) << '\n';
    if (!warning.empty()) std::cerr << "warning: " << warning << '\n';
    return 0;
}

int cmd_zeros(const Options& o)
{
    const HPReal lo = read_t(o.t, o.eps);
    if (!(o.span > 0)) throw UsageError("zeros: --span must be positive");
    const HPReal hi = lo + HPReal(o.span, lo.prec());
    auto vs = zeros::verify_span(lo, hi, make_evaluator(eval_config(o)), o.tol);
    if (o.out.empty() || o.out == "-") {
        std::cout << "# zeros between g_" << vs.cert.m1 << " and g_" << vs.cert.m2 << ", "
                  << (vs.cert.verified ? "verified" : "NOT verified: " + vs.cert.detail) << '\n';
        for (const auto& z : vs.zeros) std::cout << fmt_t(z.gamma, 12) << '\n';
    } else {
        write_zero_list(o.out, vs.cert, vs.zeros);
    }
    return vs.cert.verified ? 0 : 1;
}

int cmd_shard(const Options& o)
{
    if (o.dir.empty()) throw UsageError("shard: --out is required");
    const std::filesystem::path dir = o.dir;
    shard::JobSpec spec;
    if (std::filesystem::exists(shard::job_path(dir))) {
        spec = shard::read_job(dir);
        if (!o.t.empty() && spec.id != shard::job_id(o.t, block_params(o), o.eps, o.shards))
            throw UsageError(dir.string() + " holds a different job");
    } else {
        if (o.t.empty()) throw UsageError("shard: --t is required for a new job");
        read_t(o.t, o.eps);
        spec = shard::plan_job(o.t, block_params(o), o.eps, o.shards);
        shard::write_job(dir, spec);
        std::cout << "job " << spec.id << ": " << spec.blocks << " blocks in " << spec.shards << " shards\n";
        for (int i = 0; i < spec.shards; ++i)
            std::cout << "  shard " << i << "  blocks [" << spec.ranges[i].first << ", " << spec.ranges[i].second << ")\n";
    }
    if (o.run < 0 && !o.run_all) return 0;
    if (o.run >= spec.shards) throw UsageError("shard: --run must lie in [0, shards)");
    shard::RunOptions ro;
    ro.threads = o.threads;
    ro.stop_after = o.stop_after;
    ro.trace = o.trace ? &std::cerr : nullptr;
    const int lo = o.run_all ? 0 : o.run, hi = o.run_all ? spec.shards : o.run + 1;
    for (int i = lo; i < hi; ++i) {
        auto r = shard::run_shard(dir, i, ro);
        std::cout << "shard " << i << "  [" << r.r_lo << ", " << r.r_end << ")  " << (r.complete ? "complete" : "partial")
                  << "  " << fmt_err(r.terms_per_second) << " terms/s\n";
    }
    return 0;
}

int cmd_merge(const Options& o)
{
    if (o.dir.empty()) throw UsageError("merge: --dir is required");
    auto m = shard::merge_dir(o.dir, o.m);
    const auto& z = m.z;
    std::cout << "t        " << m.spec.t << '\n'
              << "blocks   " << m.spec.blocks << " in " << m.spec.shards << " shards\n"
              << "stage3   " << m.stage3.re.to_string(30) << ' ' << m.stage3.im.to_string(30) << '\n'
              << "M        " << fmt17(m.main.value.real()) << ' ' << fmt17(m.main.value.imag()) << '\n'
              << "Z        " << fmt17(z.Z) << '\n'
              << "err      " << fmt_err(z.err_bound) << "  (rigorous)\n"
              << "err      " << fmt_err(m.practical_err) << "  (practical, heuristic)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hardy Z-function, zeros and S(t) at large height"};
    app.fallthrough();  // global flags may follow the subcommand
    app.require_subcommand(1);
    Options o;
    app.add_flag("--trace-theta", o.trace, "Print the theta recursion to stderr");
    app.add_flag("--reproducible,!--no-reproducible", o.reproducible, "Fixed-order high-precision accumulation (default on)");
    app.add_flag("--practical-budget", o.practical, "Report the heuristic error budget instead of the rigorous one");

    auto engine = [&](CLI::App* c) {
        c->add_option("--t", o.t, "Height t as a decimal string")->required();
        c->add_option("--eps", o.eps, "Target accuracy")->check(CLI::PositiveNumber);
        c->add_option("--J", o.J, "Taylor order of the block expansion")->check(CLI::Range(0, 60));
        c->add_option("--m", o.m, "Riemann-Siegel correction order")->check(CLI::Range(0, 4));
        c->add_option("--Kmin", o.K_min, "Smallest block length")->check(CLI::PositiveNumber);
        c->add_option("--alpha", o.alpha, "Block growth parameter (> 1)");
        c->add_option("--threads", o.threads, "Worker threads")->check(CLI::Range(1, 1024));
    };

    auto* point = app.add_subcommand("point", "Z(t), zeta(1/2+it) and theta(t) at one point");
    engine(point);
    point->add_option("--out", o.out, "Also write the result as JSON");

    auto* window = app.add_subcommand("window", "Z and S on the grid t + delta j, as CSV");
    engine(window);
    window->add_option("--delta", o.delta, "Grid spacing")->check(CLI::PositiveNumber);
    window->add_option("--count", o.count, "Number of grid points")->check(CLI::PositiveNumber);
    window->add_flag("--verify", o.verify, "Locate and Turing-verify the zeros, fill the S column");
    window->add_option("--zeros", o.zeros_out, "With --verify, write the zero list here");
    window->add_option("--tol", o.tol, "Zero refinement tolerance");
    window->add_option("--out", o.out, "CSV file (default stdout)");

    auto* zeros_cmd = app.add_subcommand("zeros", "Verified zero list for [t, t + span]");
    engine(zeros_cmd);
    zeros_cmd->add_option("--span", o.span, "Length of the interval");
    zeros_cmd->add_option("--tol", o.tol, "Zero refinement tolerance");
    zeros_cmd->add_option("--out", o.out, "Zero list file (default stdout)");

    auto* shard_cmd = app.add_subcommand("shard", "Plan, and optionally run, a block-sharded main sum");
    engine(shard_cmd);
    shard_cmd->get_option("--t")->required(false);
    shard_cmd->add_option("--shards", o.shards, "Number of shards")->check(CLI::PositiveNumber);
    shard_cmd->add_option("--out", o.dir, "Job directory")->required();
    shard_cmd->add_option("--run", o.run, "Run shard i, resuming from its checkpoint");
    shard_cmd->add_flag("--run-all", o.run_all, "Run every shard in turn");
    shard_cmd->add_option("--stop-after", o.stop_after, "Stop after this many blocks");

    auto* merge_cmd = app.add_subcommand("merge", "Merge completed shards and assemble Z");
    merge_cmd->add_option("--dir", o.dir, "Job directory")->required();
    merge_cmd->add_option("--m", o.m, "Riemann-Siegel correction order")->check(CLI::Range(0, 4));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*point) return cmd_point(o);
        if (*window) return cmd_window(o);
        if (*zeros_cmd) return cmd_zeros(o);
        if (*shard_cmd) return cmd_shard(o);
        if (*merge_cmd) return cmd_merge(o);
    } catch (const UsageError& e) {
        std::cerr << "zeta: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "zeta: error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
