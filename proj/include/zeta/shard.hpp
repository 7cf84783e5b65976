#pragma once

// Splitting the block stage of one main sum over independent processes.
//
// A job directory holds job.json (the plan) and one shard_<i>.jsonl per
// shard. Each line of a shard file is the running partial sum over the
// blocks [r_lo, r_end) done so far; the last line is the checkpoint. Sums
// are stored both as decimal strings and as exact hexadecimal floats, and a
// resumed run continues from the hex values, so interrupting and resuming
// changes nothing in the result.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iterator>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "evaluate.hpp"
#include "main_sum.hpp"
#include "precision.hpp"
#include "rs_zeta.hpp"

namespace zeta::shard {

namespace fs = std::filesystem;
using json = nlohmann::json;
using cplx = std::complex<double>;

struct JobSpec {
    std::string t;  // decimal, as given by the user
    ms::BlockParams params;
    double eps = 1e-10;
    int shards = 1;
    std::string id;
    std::size_t blocks = 0;
    std::vector<std::pair<std::size_t, std::size_t>> ranges;  // half-open block ranges
};

struct PartialSumRecord {
    std::string job;
    int shard = 0;
    std::size_t r_lo = 0;
    std::size_t r_end = 0;
    HPComplex sum{128};
    double err_budget = 0.0;
    double wall = 0.0;               // seconds spent on this shard so far
    double terms_per_second = 0.0;   // main-sum terms n covered per second
    double blocks_per_second = 0.0;
    bool complete = false;
};

class ShardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string job_id(const std::string& t, const ms::BlockParams& p, double eps, int shards)
{
    std::ostringstream key;
    key << t << '|' << p.K_min << '|' << std::setprecision(17) << p.alpha << '|' << p.J << '|' << eps << '|' << shards;
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << std::hash<std::string>{}(key.str());
    return out.str();
}

inline ms::BlockDecomposition decomposition(const JobSpec& spec)
{
    return ms::partition_main_sum(parse_t(spec.t, spec.eps), spec.params);
}

// Contiguous ranges with roughly equal numbers of terms.
inline std::vector<std::pair<std::size_t, std::size_t>> split_blocks(const ms::BlockDecomposition& d, int shards)
{
    if (shards < 1) throw std::invalid_argument("shard count must be >= 1");
    std::int64_t total = 0;
    for (const auto& b : d.blocks) total += b.K;
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t r = 0;
    std::int64_t done = 0;
    for (int i = 0; i < shards; ++i) {
        const std::size_t lo = r;
        const auto target = static_cast<std::int64_t>(static_cast<double>(total) * (i + 1) / shards);
        while (r < d.blocks.size() && (done < target || i == shards - 1)) done += d.blocks[r++].K;
        out.emplace_back(lo, r);
    }
    return out;
}

inline JobSpec plan_job(const std::string& t, const ms::BlockParams& params, double eps, int shards)
{
    JobSpec s;
    s.t = t;
    s.params = params;
    s.eps = eps;
    s.shards = shards;
    s.id = job_id(t, params, eps, shards);
    auto d = decomposition(s);
    s.blocks = d.blocks.size();
    s.ranges = split_blocks(d, shards);
    return s;
}

inline json to_json(const JobSpec& s)
{
    json r = json::array();
    for (auto [lo, hi] : s.ranges) r.push_back({lo, hi});
    return {{"id", s.id},         {"t", s.t},           {"K_min", s.params.K_min}, {"alpha", s.params.alpha},
            {"J", s.params.J},    {"eps", s.eps},       {"shards", s.shards},      {"blocks", s.blocks},
            {"ranges", r}};
}

inline JobSpec job_from_json(const json& j)
{
    JobSpec s;
    s.id = j.at("id").get<std::string>();
    s.t = j.at("t").get<std::string>();
    s.params.K_min = j.at("K_min").get<std::int64_t>();
    s.params.alpha = j.at("alpha").get<double>();
    s.params.J = j.at("J").get<int>();
    s.eps = j.at("eps").get<double>();
    s.shards = j.at("shards").get<int>();
    s.blocks = j.at("blocks").get<std::size_t>();
    for (const auto& r : j.at("ranges")) s.ranges.emplace_back(r.at(0).get<std::size_t>(), r.at(1).get<std::size_t>());
    if (static_cast<int>(s.ranges.size()) != s.shards) throw ShardError("job.json: range count differs from shard count");
    return s;
}

inline fs::path job_path(const fs::path& dir) { return dir / "job.json"; }
inline fs::path shard_path(const fs::path& dir, int i) { return dir / ("shard_" + std::to_string(i) + ".jsonl"); }

inline void write_job(const fs::path& dir, const JobSpec& s)
{
    fs::create_directories(dir);
    std::ofstream f(job_path(dir));
    if (!f) throw ShardError("cannot write " + job_path(dir).string());
    f << to_json(s).dump(2) << '\n';
}

inline JobSpec read_job(const fs::path& dir)
{
    std::ifstream f(job_path(dir));
    if (!f) throw ShardError("cannot read " + job_path(dir).string());
    try {
        return job_from_json(json::parse(f));
    } catch (const json::exception& e) {
        throw ShardError("job.json: " + std::string(e.what()));
    }
}

inline json to_json(const PartialSumRecord& r)
{
    return {{"job", r.job},
            {"shard", r.shard},
            {"r_lo", r.r_lo},
            {"r_end", r.r_end},
            {"re", r.sum.re.to_string(30)},
            {"im", r.sum.im.to_string(30)},
            {"re_hex", r.sum.re.to_hex()},
            {"im_hex", r.sum.im.to_hex()},
            {"err_budget", r.err_budget},
            {"wall", r.wall},
            {"terms_per_second", r.terms_per_second},
            {"blocks_per_second", r.blocks_per_second},
            {"complete", r.complete}};
}

inline PartialSumRecord record_from_json(const json& j)
{
    PartialSumRecord r;
    r.job = j.at("job").get<std::string>();
    r.shard = j.at("shard").get<int>();
    r.r_lo = j.at("r_lo").get<std::size_t>();
    r.r_end = j.at("r_end").get<std::size_t>();
    r.sum = HPComplex(HPReal::parse_hex(j.at("re_hex").get<std::string>(), 128),
                      HPReal::parse_hex(j.at("im_hex").get<std::string>(), 128));
    r.err_budget = j.at("err_budget").get<double>();
    r.wall = j.value("wall", 0.0);
    r.terms_per_second = j.value("terms_per_second", 0.0);
    r.blocks_per_second = j.value("blocks_per_second", 0.0);
    r.complete = j.at("complete").get<bool>();
    if (r.r_end < r.r_lo) throw ShardError("record with r_end < r_lo");
    return r;
}

// Last checkpoint in a shard file. A torn final line (a run killed mid-write)
// is skipped; a malformed line anywhere else is an error.
inline std::optional<PartialSumRecord> last_record(const fs::path& file)
{
    std::ifstream f(file);
    if (!f) return std::nullopt;
    std::vector<std::string> lines;
    for (std::string line; std::getline(f, line);)
        if (!line.empty()) lines.push_back(std::move(line));
    std::optional<PartialSumRecord> last;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        try {
            last = record_from_json(json::parse(lines[i]));
        } catch (const std::exception& e) {
            if (i + 1 != lines.size()) throw ShardError(file.string() + ": bad record on line " + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return last;
}

struct RunOptions {
    int threads = 1;
    std::size_t stop_after = 0;  // blocks to do in this call, 0 = all
    std::size_t batch = 0;       // blocks per checkpoint, 0 = about one per thread
    std::ostream* trace = nullptr;
};

// Runs (or resumes) shard `index` of the job in `dir` and returns its last record.
inline PartialSumRecord run_shard(const fs::path& dir, int index, const RunOptions& opt = {})
{
    const JobSpec spec = read_job(dir);
    if (index < 0 || index >= spec.shards) throw ShardError("shard index out of range");
    const auto d = decomposition(spec);
    if (d.blocks.size() != spec.blocks) throw ShardError("job.json does not match the decomposition of t");
    const auto [lo, hi] = spec.ranges[index];

    const double eps_block = ms::per_block_eps(d, spec.eps);
    const auto file = shard_path(dir, index);

    PartialSumRecord rec;
    rec.job = spec.id;
    rec.shard = index;
    rec.r_lo = rec.r_end = lo;
    if (auto prev = last_record(file)) {
        if (prev->job != spec.id || prev->r_lo != lo || prev->r_end > hi)
            throw ShardError(file.string() + " belongs to a different job or range");
        rec = *prev;
    }
    if (rec.r_end == hi) {
        if (!rec.complete) {
            rec.complete = true;
            std::ofstream(file, std::ios::app) << to_json(rec).dump() << '\n';
        }
        return rec;
    }

    // drop a torn line left by a killed run before appending
    if (fs::exists(file)) {
        std::string body;
        {
            std::ifstream in(file, std::ios::binary);
            body.assign(std::istreambuf_iterator<char>(in), {});
        }
        const auto end = body.find_last_of('\n');
        const std::uintmax_t keep = end == std::string::npos ? 0 : end + 1;
        if (keep != body.size()) fs::resize_file(file, keep);
    }
    std::ofstream out(file, std::ios::app);
    if (!out) throw ShardError("cannot append to " + file.string());
    const std::size_t stop = opt.stop_after ? std::min(hi, rec.r_end + opt.stop_after) : hi;
    const std::size_t batch = opt.batch ? opt.batch : static_cast<std::size_t>(std::max(1, opt.threads));
    const auto t_start = std::chrono::steady_clock::now();
    const double wall0 = rec.wall;
    std::int64_t terms = 0;
    std::size_t nblocks = 0;
    for (std::size_t r = lo; r < rec.r_end; ++r) terms += d.blocks[r].K;
    nblocks = rec.r_end - lo;

    while (rec.r_end < stop) {
        const std::size_t r1 = std::min(stop, rec.r_end + batch);
        auto vals = ms::evaluate_blocks(d, rec.r_end, r1, eps_block, opt.threads, opt.trace);
        for (const auto& v : vals) {
            rec.sum += v.value;
            terms += d.blocks[v.index].K;
            rec.err_budget += eps_block / std::sqrt(static_cast<double>(d.blocks[v.index].v));
        }
        nblocks += vals.size();
        rec.r_end = r1;
        rec.complete = rec.r_end == hi;
        rec.wall = wall0 + std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        if (rec.wall > 0) {
            rec.terms_per_second = static_cast<double>(terms) / rec.wall;
            rec.blocks_per_second = static_cast<double>(nblocks) / rec.wall;
        }
        out << to_json(rec).dump() << '\n';
        out.flush();
    }
    return rec;
}

// Sum of the stage-3 partials; every block must be covered exactly once.
inline HPComplex merge_records(std::vector<PartialSumRecord> recs, std::size_t blocks, const std::string& job = {})
{
    std::sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) { return a.r_lo < b.r_lo; });
    HPComplex acc(128);
    std::size_t next = 0;
    for (const auto& r : recs) {
        if (!job.empty() && r.job != job) throw ShardError("record from another job (" + r.job + ")");
        if (!r.complete) throw ShardError("shard " + std::to_string(r.shard) + " is incomplete");
        if (r.r_lo < next) throw ShardError("overlapping ranges at block " + std::to_string(r.r_lo));
        if (r.r_lo > next) throw ShardError("gap in ranges: blocks [" + std::to_string(next) + ", " + std::to_string(r.r_lo) + ")");
        acc += r.sum;
        next = r.r_end;
    }
    if (next != blocks) throw ShardError("gap in ranges: blocks [" + std::to_string(next) + ", " + std::to_string(blocks) + ")");
    return acc;
}

struct MergeResult {
    JobSpec spec;
    HPComplex stage3{128};
    ms::MainSumResult main;  // stages 1 and 2 computed here, stage 3 from the shards
    rs::ZValue z;
    double practical_err = 0.0;
};

inline MergeResult merge_dir(const fs::path& dir, int rs_order = 4)
{
    MergeResult m;
    m.spec = read_job(dir);
    std::vector<PartialSumRecord> recs;
    for (int i = 0; i < m.spec.shards; ++i) {
        auto r = last_record(shard_path(dir, i));
        if (!r) throw ShardError("shard " + std::to_string(i) + " has no records");
        if (r->r_lo != m.spec.ranges[i].first || r->r_end > m.spec.ranges[i].second)
            throw ShardError("shard " + std::to_string(i) + " does not match its planned range");
        recs.push_back(std::move(*r));
    }
    m.stage3 = merge_records(recs, m.spec.blocks, m.spec.id);

    const HPReal t = parse_t(m.spec.t, m.spec.eps);
    auto& res = m.main;
    res.decomp = ms::partition_main_sum(t, m.spec.params);
    const auto& d = res.decomp;
    res.stage1 = ms::stage1_sum(t, 1, d.n1 - 1, &res.stats);
    const double eps2 = 0.25 * m.spec.eps;
    res.stage2 = ms::stage2_sum(t, d.n1, d.n2 - 1, eps2, &res.stats);
    res.stage3 = m.stage3.to_complex();
    HPComplex total(128);
    total += res.stage1;
    total += res.stage2;
    total += m.stage3;
    res.value_hp = total;
    res.value = total.to_complex();

    auto& B = res.budget;
    const double eps_block = ms::per_block_eps(d, m.spec.eps);
    B.stage12 = eps2 + std::ldexp(1.0, -50) * 2.0 * std::sqrt(static_cast<double>(std::max<std::int64_t>(d.n2, 1)));
    B.roundoff = std::ldexp(1.0, -50) * 2.0 * std::sqrt(static_cast<double>(d.N)) + 1e-16 * std::sqrt(static_cast<double>(d.N));
    for (const auto& r : recs) B.theta_worst += r.err_budget;
    double inv = 0.0;
    for (const auto& s : d.blocks) inv += 1.0 / static_cast<double>(s.v);
    B.theta_statistical = eps_block * std::sqrt(inv);
    if (!d.blocks.empty()) {
        const double per_block = ms::recomputed_truncation_budget(d, ms::phase_prec(t, eps_block));
        B.closed_form_truncation = d.eps_J;
        B.truncation = d.bound_hypothesis ? std::min(per_block, d.eps_J) : per_block;
        B.practical_truncation = d.params.J >= 1 ? ms::practical_error_estimate(d.params.J, t.to_double(), static_cast<double>(d.N),
                                                                                static_cast<double>(d.v0), d.u0)
                                                 : B.truncation;
    }
    auto ctx = rs::make_rs_context(t, rs_order);
    m.z = rs::assemble_Z(ctx, res.value, B.rigorous_total());
    m.practical_err = rs::assemble_Z(ctx, res.value, B.practical_total()).err_bound;
    return m;
}

}  // namespace zeta::shard
