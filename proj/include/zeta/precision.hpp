#pragma once

// Extended precision scalars (MPFR backed) and the phase-precision policy.

#include <mpfr.h>

static_assert(sizeof(long) == 8, "64-bit long required");

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace zeta {

using u128 = unsigned __int128;

inline constexpr mpfr_prec_t min_prec_bits = 53;

class HPReal {
public:
    explicit HPReal(mpfr_prec_t bits = 128)
    {
        mpfr_init2(v_, std::max(bits, min_prec_bits));
        mpfr_set_zero(v_, 1);
    }
    HPReal(double x, mpfr_prec_t bits) : HPReal(bits) { mpfr_set_d(v_, x, MPFR_RNDN); }
    HPReal(long x, mpfr_prec_t bits) : HPReal(bits) { mpfr_set_si(v_, x, MPFR_RNDN); }
    HPReal(int x, mpfr_prec_t bits) : HPReal(static_cast<long>(x), bits) {}
    HPReal(std::uint64_t x, mpfr_prec_t bits) : HPReal(bits) { mpfr_set_ui(v_, static_cast<unsigned long>(x), MPFR_RNDN); }

    HPReal(const HPReal& o) : HPReal(o.prec()) { mpfr_set(v_, o.v_, MPFR_RNDN); }
    HPReal(HPReal&& o) noexcept
    {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_swap(v_, o.v_);
    }
    HPReal& operator=(const HPReal& o)
    {
        if (this != &o) {
            mpfr_set_prec(v_, o.prec());
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    HPReal& operator=(HPReal&& o) noexcept
    {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~HPReal() { mpfr_clear(v_); }

    // Decimal (or any mpfr-accepted base-10) string; throws on trailing garbage.
    static HPReal parse(std::string_view s, mpfr_prec_t bits)
    {
        std::string str(s);
        if (str.empty() || str.find_first_of(" \t\n@") != std::string::npos)
            throw std::invalid_argument("malformed number: '" + str + "'");
        HPReal r(bits);
        if (mpfr_set_str(r.v_, str.c_str(), 10, MPFR_RNDN) != 0 || !mpfr_number_p(r.v_))
            throw std::invalid_argument("malformed number: '" + str + "'");
        return r;
    }

    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
    mpfr_ptr raw() { return v_; }
    mpfr_srcptr raw() const { return v_; }

    // Change precision keeping the (rounded) value.
    HPReal with_prec(mpfr_prec_t bits) const
    {
        HPReal r(bits);
        mpfr_set(r.v_, v_, MPFR_RNDN);
        return r;
    }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    long double to_long_double() const { return mpfr_get_ld(v_, MPFR_RNDN); }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    // Shortest round-trippable-ish decimal with `digits` significant digits.
    std::string to_string(int digits = 30) const
    {
        if (mpfr_zero_p(v_)) return "0";
        char* buf = nullptr;
        mpfr_asprintf(&buf, "%.*Rg", digits, v_);
        std::string s(buf);
        mpfr_free_str(buf);
        return s;
    }

    // Fixed-point decimal, `frac_digits` after the point (used for t in files).
    std::string to_fixed(int frac_digits) const
    {
        char* buf = nullptr;
        mpfr_asprintf(&buf, "%.*Rf", frac_digits, v_);
        std::string s(buf);
        mpfr_free_str(buf);
        return s;
    }

    // Exact binary round trip through a hexadecimal string.
    std::string to_hex() const
    {
        char* buf = nullptr;
        mpfr_asprintf(&buf, "%Ra", v_);
        std::string s(buf);
        mpfr_free_str(buf);
        return s;
    }
    static HPReal parse_hex(std::string_view s, mpfr_prec_t bits)
    {
        std::string str(s);
        HPReal r(bits);
        char* end = nullptr;
        mpfr_strtofr(r.v_, str.c_str(), &end, 0, MPFR_RNDN);
        if (str.empty() || *end != '\0' || !mpfr_number_p(r.v_)) throw std::invalid_argument("malformed hex number: '" + str + "'");
        return r;
    }

    HPReal& operator+=(const HPReal& o) { return apply(o, mpfr_add); }
    HPReal& operator-=(const HPReal& o) { return apply(o, mpfr_sub); }
    HPReal& operator*=(const HPReal& o) { return apply(o, mpfr_mul); }
    HPReal& operator/=(const HPReal& o) { return apply(o, mpfr_div); }
    HPReal& operator+=(double d) { mpfr_add_d(v_, v_, d, MPFR_RNDN); return *this; }
    HPReal& operator-=(double d) { mpfr_sub_d(v_, v_, d, MPFR_RNDN); return *this; }
    HPReal& operator*=(double d) { mpfr_mul_d(v_, v_, d, MPFR_RNDN); return *this; }
    HPReal& operator/=(double d) { mpfr_div_d(v_, v_, d, MPFR_RNDN); return *this; }

    friend HPReal operator+(HPReal a, const HPReal& b) { return a += b; }
    friend HPReal operator-(HPReal a, const HPReal& b) { return a -= b; }
    friend HPReal operator*(HPReal a, const HPReal& b) { return a *= b; }
    friend HPReal operator/(HPReal a, const HPReal& b) { return a /= b; }
    friend HPReal operator+(HPReal a, double b) { return a += b; }
    friend HPReal operator-(HPReal a, double b) { return a -= b; }
    friend HPReal operator*(HPReal a, double b) { return a *= b; }
    friend HPReal operator/(HPReal a, double b) { return a /= b; }
    friend HPReal operator+(double b, HPReal a) { return a += b; }
    friend HPReal operator*(double b, HPReal a) { return a *= b; }
    friend HPReal operator-(double b, const HPReal& a)
    {
        HPReal r(a.prec());
        mpfr_d_sub(r.v_, b, a.v_, MPFR_RNDN);
        return r;
    }
    friend HPReal operator/(double b, const HPReal& a)
    {
        HPReal r(a.prec());
        mpfr_d_div(r.v_, b, a.v_, MPFR_RNDN);
        return r;
    }
    friend HPReal operator-(HPReal a)
    {
        mpfr_neg(a.v_, a.v_, MPFR_RNDN);
        return a;
    }

    friend bool operator<(const HPReal& a, const HPReal& b) { return mpfr_less_p(a.v_, b.v_); }
    friend bool operator>(const HPReal& a, const HPReal& b) { return mpfr_greater_p(a.v_, b.v_); }
    friend bool operator<=(const HPReal& a, const HPReal& b) { return mpfr_lessequal_p(a.v_, b.v_); }
    friend bool operator>=(const HPReal& a, const HPReal& b) { return mpfr_greaterequal_p(a.v_, b.v_); }
    friend bool operator==(const HPReal& a, const HPReal& b) { return mpfr_equal_p(a.v_, b.v_); }
    friend bool operator<(const HPReal& a, double b) { return mpfr_cmp_d(a.v_, b) < 0; }
    friend bool operator>(const HPReal& a, double b) { return mpfr_cmp_d(a.v_, b) > 0; }
    friend bool operator<=(const HPReal& a, double b) { return mpfr_cmp_d(a.v_, b) <= 0; }
    friend bool operator>=(const HPReal& a, double b) { return mpfr_cmp_d(a.v_, b) >= 0; }

private:
    using binop = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);
    HPReal& apply(const HPReal& o, binop f)
    {
        if (o.prec() > prec()) mpfr_prec_round(v_, o.prec(), MPFR_RNDN);
        f(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }

    mpfr_t v_;
};

namespace detail {
template <class F>
HPReal unary(const HPReal& x, F f)
{
    HPReal r(x.prec());
    f(r.raw(), x.raw(), MPFR_RNDN);
    return r;
}
} // namespace detail

inline HPReal log(const HPReal& x) { return detail::unary(x, mpfr_log); }
inline HPReal exp(const HPReal& x) { return detail::unary(x, mpfr_exp); }
inline HPReal sqrt(const HPReal& x) { return detail::unary(x, mpfr_sqrt); }
inline HPReal sin(const HPReal& x) { return detail::unary(x, mpfr_sin); }
inline HPReal cos(const HPReal& x) { return detail::unary(x, mpfr_cos); }
inline HPReal abs(const HPReal& x) { return detail::unary(x, mpfr_abs); }
inline HPReal cbrt(const HPReal& x) { return detail::unary(x, mpfr_cbrt); }
inline HPReal floor(const HPReal& x)
{
    HPReal r(x.prec());
    mpfr_floor(r.raw(), x.raw());
    return r;
}
inline HPReal ceil(const HPReal& x)
{
    HPReal r(x.prec());
    mpfr_ceil(r.raw(), x.raw());
    return r;
}
inline HPReal pow(const HPReal& x, double e)
{
    HPReal r(x.prec()), ee(e, x.prec());
    mpfr_pow(r.raw(), x.raw(), ee.raw(), MPFR_RNDN);
    return r;
}
inline HPReal atan2(const HPReal& y, const HPReal& x)
{
    HPReal r(std::max(x.prec(), y.prec()));
    mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN);
    return r;
}

inline HPReal hp_pi(mpfr_prec_t bits)
{
    HPReal r(bits);
    mpfr_const_pi(r.raw(), MPFR_RNDN);
    return r;
}

// Integer part as int64; throws if it does not fit.
inline std::int64_t to_int64(const HPReal& x)
{
    if (!mpfr_fits_slong_p(x.raw(), MPFR_RNDZ)) throw std::overflow_error("value does not fit in int64");
    return static_cast<std::int64_t>(mpfr_get_si(x.raw(), MPFR_RNDZ));
}

// x - floor(x). The subtraction is exact, so the only error is in x itself.
inline HPReal reduce_mod_one(const HPReal& x)
{
    HPReal r(x.prec());
    mpfr_floor(r.raw(), x.raw());
    mpfr_sub(r.raw(), x.raw(), r.raw(), MPFR_RNDN);
    if (r >= 1.0) r -= 1.0;
    return r;
}

inline HPReal hp_log_integer(std::uint64_t n, mpfr_prec_t bits)
{
    if (n == 0) throw std::invalid_argument("hp_log_integer: n must be >= 1");
    HPReal r(bits);
    mpfr_log_ui(r.raw(), n, MPFR_RNDN);
    return r;
}

struct HPComplex {
    HPReal re;
    HPReal im;

    explicit HPComplex(mpfr_prec_t bits = 128) : re(bits), im(bits) {}
    HPComplex(HPReal r, HPReal i) : re(std::move(r)), im(std::move(i))
    {
        auto p = std::max(re.prec(), im.prec());
        if (re.prec() != p) re = re.with_prec(p);
        if (im.prec() != p) im = im.with_prec(p);
    }
    mpfr_prec_t prec() const { return re.prec(); }
    std::complex<double> to_complex() const { return {re.to_double(), im.to_double()}; }

    HPComplex& operator+=(const HPComplex& o)
    {
        re += o.re;
        im += o.im;
        return *this;
    }
    HPComplex& operator+=(std::complex<double> z)
    {
        re += z.real();
        im += z.imag();
        return *this;
    }
    friend HPComplex operator+(HPComplex a, const HPComplex& b) { return a += b; }
    friend HPComplex operator-(HPComplex a, const HPComplex& b)
    {
        a.re -= b.re;
        a.im -= b.im;
        return a;
    }
    friend HPComplex operator*(const HPComplex& a, const HPComplex& b)
    {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend HPComplex operator*(const HPComplex& a, const HPReal& s) { return {a.re * s, a.im * s}; }
};

// e^{i x} at the precision of x.
inline HPComplex hp_expi(const HPReal& x)
{
    HPReal s(x.prec()), c(x.prec());
    mpfr_sin_cos(s.raw(), c.raw(), x.raw(), MPFR_RNDN);
    return {std::move(c), std::move(s)};
}

// ---------------------------------------------------------------------------
// Phases as 128-bit fixed-point fractions of a full turn. Integer multiples
// wrap modulo 2^128, which is exactly reduction modulo one turn.

struct Turns {
    u128 frac = 0;

    friend Turns operator+(Turns a, Turns b) { return {a.frac + b.frac}; }
    friend Turns operator-(Turns a, Turns b) { return {a.frac - b.frac}; }
    friend Turns operator-(Turns a) { return {u128(0) - a.frac}; }
    Turns& operator+=(Turns o)
    {
        frac += o.frac;
        return *this;
    }
    // multiply by an integer (exact modulo 1)
    friend Turns operator*(Turns a, std::uint64_t k) { return {a.frac * k}; }
    friend Turns operator*(Turns a, u128 k) { return {a.frac * k}; }

    // Signed value in [-1/2, 1/2).
    double centered() const
    {
        auto hi = static_cast<std::int64_t>(static_cast<std::uint64_t>(frac >> 64));
        auto lo = static_cast<std::uint64_t>(frac);
        return static_cast<double>(hi) * 0x1p-64 + static_cast<double>(lo >> 11) * 0x1p-117;
    }
    double radians() const { return 2.0 * M_PI * centered(); }
    std::complex<double> unit() const
    {
        double th = radians();
        return {std::cos(th), std::sin(th)};
    }

    // Fraction of a turn from a double in [-1/2, 1/2] or any modest value.
    static Turns from_double(double x)
    {
        double f = x - std::floor(x);
        auto hi = static_cast<std::uint64_t>(std::ldexp(f, 64));
        u128 r = u128(hi) << 64;
        double rest = std::ldexp(f, 64) - static_cast<double>(hi);
        r += static_cast<u128>(static_cast<std::uint64_t>(std::ldexp(std::max(rest, 0.0), 64)));
        return {r};
    }
};

// frac(x) as a fixed-point turn count; x must carry enough bits that its
// fractional part is meaningful.
inline Turns to_turns(const HPReal& x)
{
    HPReal f = reduce_mod_one(x);
    HPReal hi = f.with_prec(f.prec() + 130);
    mpfr_mul_2ui(hi.raw(), hi.raw(), 64, MPFR_RNDN);
    HPReal top = floor(hi);
    auto h = static_cast<std::uint64_t>(mpfr_get_ui(top.raw(), MPFR_RNDZ));
    hi -= top;
    mpfr_mul_2ui(hi.raw(), hi.raw(), 64, MPFR_RNDN);
    auto l = static_cast<std::uint64_t>(mpfr_get_ui(hi.raw(), MPFR_RNDN));
    return {(u128(h) << 64) + u128(l)};
}

// e^{2 pi i x}
inline std::complex<double> expi_turns(const HPReal& x) { return to_turns(x).unit(); }

// ---------------------------------------------------------------------------
// Precision policy

inline int guard_bits_default()
{
    if (const char* g = std::getenv("ZETA_PREC_GUARD")) {
        char* end = nullptr;
        long v = std::strtol(g, &end, 10);
        if (end != g && *end == '\0' && v >= 20 && v <= 4096) return static_cast<int>(v);
    }
    return 32;
}

struct PrecisionPolicy {
    double target_eps = 1e-10;
    int guard_bits = guard_bits_default();
    int t_magnitude_bits = 1;

    mpfr_prec_t phase_bits() const
    {
        int need = t_magnitude_bits + static_cast<int>(std::ceil(std::log2(1.0 / target_eps))) + guard_bits;
        return std::max<mpfr_prec_t>(min_prec_bits, need);
    }
};

inline int magnitude_bits(const HPReal& t)
{
    if (t.sign() <= 0) return 1;
    mpfr_exp_t e = mpfr_get_exp(t.raw()); // t in [2^{e-1}, 2^e)
    return std::max<int>(1, static_cast<int>(e));
}

inline mpfr_prec_t required_phase_bits(const HPReal& t, double eps)
{
    if (!(eps > 0.0) || !(eps < 1.0)) throw std::invalid_argument("required_phase_bits: eps must lie in (0,1)");
    if (t.sign() <= 0) throw std::invalid_argument("required_phase_bits: t must be positive");
    PrecisionPolicy p;
    p.target_eps = eps;
    p.t_magnitude_bits = magnitude_bits(t);
    return p.phase_bits();
}

// Decimal bits needed to hold a parsed decimal string exactly-ish.
inline mpfr_prec_t bits_for_decimal(std::string_view s)
{
    return static_cast<mpfr_prec_t>(std::max<std::size_t>(64, s.size() * 4 + 64));
}

} // namespace zeta
