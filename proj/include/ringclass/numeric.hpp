#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>

namespace ringclass {

// Working precision for a computation: `bits` is the target accuracy the
// caller reasons about, `guard_bits` absorbs rounding noise inside series
// loops and unwinding products. All mpfr temporaries run at total().
struct PrecisionCtx {
    long bits = 256;
    long guard_bits = 48;
    long total() const { return bits + guard_bits; }
};

// Thin RAII wrapper over mpfr_t. Every value carries its own precision;
// binary operators allocate the result at the wider of the two operands, so
// precision never silently shrinks mid-expression.
class Real {
  public:
    explicit Real(long prec) {
        mpfr_init2(v_, prec);
        mpfr_set_zero(v_, 1);
    }
    Real(const Real& o) {
        mpfr_init2(v_, o.prec());
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    Real(Real&& o) noexcept {
        mpfr_init2(v_, o.prec());
        mpfr_swap(v_, o.v_);
    }
    Real& operator=(const Real& o) {
        if (this != &o) {
            mpfr_set_prec(v_, o.prec());
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Real& operator=(Real&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Real() { mpfr_clear(v_); }

    static Real of(long x, long prec) {
        Real r(prec);
        mpfr_set_si(r.v_, x, MPFR_RNDN);
        return r;
    }
    static Real of(const mpz_class& x, long prec) {
        Real r(prec);
        mpfr_set_z(r.v_, x.get_mpz_t(), MPFR_RNDN);
        return r;
    }
    static Real of(const mpq_class& x, long prec) {
        Real r(prec);
        mpfr_set_q(r.v_, x.get_mpq_t(), MPFR_RNDN);
        return r;
    }
    // 2^e, exact at any precision; used for residual thresholds.
    static Real pow2(long e, long prec) {
        Real r(prec);
        mpfr_set_ui_2exp(r.v_, 1, e, MPFR_RNDN);
        return r;
    }
    static Real pi(long prec) {
        Real r(prec);
        mpfr_const_pi(r.v_, MPFR_RNDN);
        return r;
    }

    long prec() const { return mpfr_get_prec(v_); }
    int sgn() const { return mpfr_sgn(v_); }
    bool is_zero() const { return mpfr_zero_p(v_); }

    // Exponent e with |x| in [2^(e-1), 2^e); the zero case maps to a floor
    // value so that "exp_of() <= -k" reads as "|x| < 2^-k" uniformly.
    long exp_of() const {
        if (mpfr_zero_p(v_)) return mpfr_get_emin();
        return static_cast<long>(mpfr_get_exp(v_));
    }

    mpz_class nearest_int() const {
        mpz_class z;
        mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDN);
        return z;
    }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

    std::string to_decimal(int digits) const {
        std::string fmt = "%." + std::to_string(digits) + "Re";
        char* s = nullptr;
        mpfr_asprintf(&s, fmt.c_str(), v_);
        std::string out(s);
        mpfr_free_str(s);
        return out;
    }

    friend Real operator+(const Real& a, const Real& b) {
        Real r(std::max(a.prec(), b.prec()));
        mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend Real operator-(const Real& a, const Real& b) {
        Real r(std::max(a.prec(), b.prec()));
        mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend Real operator*(const Real& a, const Real& b) {
        Real r(std::max(a.prec(), b.prec()));
        mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    friend Real operator/(const Real& a, const Real& b) {
        Real r(std::max(a.prec(), b.prec()));
        mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
        return r;
    }
    Real operator-() const {
        Real r(prec());
        mpfr_neg(r.v_, v_, MPFR_RNDN);
        return r;
    }
    Real& operator+=(const Real& o) {
        mpfr_add(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }
    Real& operator-=(const Real& o) {
        mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }
    Real& operator*=(const Real& o) {
        mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }
    Real& operator/=(const Real& o) {
        mpfr_div(v_, v_, o.v_, MPFR_RNDN);
        return *this;
    }

    friend bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
    friend bool operator>(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
    friend bool operator<=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
    friend bool operator>=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }

    friend Real abs(const Real& a) {
        Real r(a.prec());
        mpfr_abs(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Real sqrt(const Real& a) {
        Real r(a.prec());
        mpfr_sqrt(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Real exp(const Real& a) {
        Real r(a.prec());
        mpfr_exp(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Real log(const Real& a) {
        Real r(a.prec());
        mpfr_log(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Real cos(const Real& a) {
        Real r(a.prec());
        mpfr_cos(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Real sin(const Real& a) {
        Real r(a.prec());
        mpfr_sin(r.v_, a.v_, MPFR_RNDN);
        return r;
    }
    friend Real pow_si(const Real& a, long e) {
        Real r(a.prec());
        mpfr_pow_si(r.v_, a.v_, e, MPFR_RNDN);
        return r;
    }
    friend Real mul_2si(const Real& a, long e) {
        Real r(a.prec());
        mpfr_mul_2si(r.v_, a.v_, e, MPFR_RNDN);
        return r;
    }

  private:
    mpfr_t v_;
};

// Complex numbers over Real. MPC is not available in this toolchain; the
// handful of operations the evaluation pipeline needs fit in one screen.
struct Cpx {
    Real re, im;

    explicit Cpx(long prec) : re(prec), im(prec) {}
    Cpx(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

    static Cpx of(long x, long prec) { return {Real::of(x, prec), Real(prec)}; }

    long prec() const { return std::max(re.prec(), im.prec()); }

    friend Cpx operator+(const Cpx& a, const Cpx& b) { return {a.re + b.re, a.im + b.im}; }
    friend Cpx operator-(const Cpx& a, const Cpx& b) { return {a.re - b.re, a.im - b.im}; }
    friend Cpx operator*(const Cpx& a, const Cpx& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend Cpx operator*(const Real& s, const Cpx& a) { return {s * a.re, s * a.im}; }
    friend Cpx operator/(const Cpx& a, const Cpx& b) {
        Real d = b.re * b.re + b.im * b.im;
        return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
    }
    Cpx operator-() const { return {-re, -im}; }

    friend Real abs(const Cpx& a) { return sqrt(a.re * a.re + a.im * a.im); }
    friend Cpx conj(const Cpx& a) { return {a.re, -a.im}; }

    friend Cpx inv(const Cpx& a) {
        Real d = a.re * a.re + a.im * a.im;
        return {a.re / d, -a.im / d};
    }

    // Principal square root: branch cut on the negative real axis, result in
    // the closed right half-plane, sqrt of a negative real lands on +i.
    friend Cpx sqrt_principal(const Cpx& a) {
        long p = a.prec();
        if (a.re.is_zero() && a.im.is_zero()) return Cpx(p);
        Real r = abs(a);
        Real half = Real::of(mpq_class(1, 2), p);
        Real x = sqrt((r + a.re) * half);
        Real y = sqrt((r - a.re) * half);
        if (a.im.sgn() < 0) y = -y;
        return {x, y};
    }

    // exp(a) with a complex; exact mpfr sin_cos on the imaginary part.
    friend Cpx exp(const Cpx& a) {
        Real m = exp(a.re);
        return {m * cos(a.im), m * sin(a.im)};
    }

    friend Cpx pow_si(const Cpx& a, long e) {
        long p = a.prec();
        bool invert = e < 0;
        unsigned long k = invert ? static_cast<unsigned long>(-(e + 1)) + 1ul
                                 : static_cast<unsigned long>(e);
        Cpx acc = Cpx::of(1, p);
        Cpx base = a;
        while (k) {
            if (k & 1ul) acc = acc * base;
            base = base * base;
            k >>= 1;
        }
        return invert ? inv(acc) : acc;
    }
};

// exp(2*pi*i*x) for exact rational x, at the given precision.
inline Cpx unit_root(const mpq_class& x, long prec) {
    Real t = Real::of(x, prec) * Real::pi(prec);
    t += t;  // 2*pi*x
    return {cos(t), sin(t)};
}

}  // namespace ringclass
