#pragma once

#include "ringclass/quadratic.hpp"

#include <cstdlib>
#include <map>

namespace ringclass {
namespace modular_forms {

using quadratic::SurdPoint;

// Sawtooth ((x)): 0 at integers, else x - floor(x) - 1/2. Exact.
inline mpq_class sawtooth(const mpq_class& x) {
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
    mpq_class frac = x - mpq_class(fl);
    if (frac == 0) return mpq_class(0);
    return frac - mpq_class(1, 2);
}

// s(d, c) = sum_{k=1}^{c-1} ((k/c)) ((kd/c)), exact rational. Direct
// summation; the reciprocity law is exercised as a test oracle instead of
// being used for evaluation.
inline mpq_class dedekind_sum(const mpz_class& d, const mpz_class& c) {
    if (c < 1) throw validation_error("dedekind_sum: c >= 1 required");
    if (gcd(d, c) != 1) throw validation_error("dedekind_sum: gcd(d, c) must be 1");
    mpq_class s(0);
    for (mpz_class k = 1; k < c; ++k) s += sawtooth(mpq_class(k, c)) * sawtooth(mpq_class(k * d, c));
    s.canonicalize();
    return s;
}

// gamma with reduced = gamma(input), |Re reduced| <= 1/2, |reduced| >= 1.
struct FDReduction {
    SurdPoint reduced;
    mpz_class a, b, c, d;
};

// Exact fundamental-domain reduction: integer shifts and inversions on the
// surd representation; all comparisons are rational, so boundary cases
// cannot flip under rounding.
inline FDReduction reduce_to_fd(const SurdPoint& tau) {
    SurdPoint t = tau;
    mpz_class a = 1, b = 0, c = 0, d = 1;
    for (;;) {
        // nearest integer to Re(t): floor(re + 1/2)
        mpq_class re2 = t.re_rat + mpq_class(1, 2);
        mpz_class k;
        mpz_fdiv_q(k.get_mpz_t(), re2.get_num().get_mpz_t(), re2.get_den().get_mpz_t());
        if (k != 0) {
            t = t.shifted(-k);
            a -= k * c;
            b -= k * d;
        }
        if (t.norm2() < 1) {
            t = t.inverted_neg();
            // compose with [[0,-1],[1,0]]: (a,b,c,d) <- (-c,-d,a,b)
            std::swap(a, c);
            std::swap(b, d);
            a = -a;
            b = -b;
        } else {
            break;
        }
    }
    return {t, a, b, c, d};
}

// exp(2 pi i x tau) for exact rational x, principal branch.
inline Cpx q_power(const mpq_class& x, const Cpx& tau, long prec) {
    Real w = Real::of(x, prec) * Real::pi(prec);
    w += w;
    return exp(Cpx{-(w * tau.im), w * tau.re});
}

// Pentagonal-number series q^{1/24} (1 + sum (-1)^n (q^{n(3n-1)/2} + q^{n(3n+1)/2})).
// Expects a point with |q| well below 1; callers reduce first.
inline Cpx eta_series(const Cpx& tau, const PrecisionCtx& ctx) {
    if (!(tau.im.sgn() > 0)) throw validation_error("eta_series: point must lie in the upper half-plane");
    long p = ctx.total();
    Cpx q = q_power(1, tau, p);
    Cpx s = Cpx::of(1, p);
    for (long n = 1;; ++n) {
        long e1 = n * (3 * n - 1) / 2;
        long e2 = n * (3 * n + 1) / 2;
        Cpx t = pow_si(q, e1) + pow_si(q, e2);
        if (n & 1) s = s - t;
        else s = s + t;
        if (abs(t).exp_of() < -(p + 8)) break;
        if (n > 100000) throw std::logic_error("eta_series: series failed to converge");
    }
    return q_power(mpq_class(1, 24), tau, p) * s;
}

namespace detail_mf {

// Unwind eta(tau0) from eta(reduced) where reduced = gamma(tau0):
// eta(gamma tau) = eps(gamma) (c tau + d)^{1/2} eta(tau) with
// eps = exp(pi i ((a+d)/12c - s(d,c) - 1/4)) once c > 0.
inline Cpx eta_unwind(const Cpx& tau0, const Cpx& eta_reduced, mpz_class a, mpz_class b,
                      mpz_class c, mpz_class d, long prec) {
    if (c == 0) {
        // gamma = +-[[1,k],[0,1]]: pure shift by k = b*d, eta shifts by exp(pi i k/12).
        mpz_class k = b * d;
        return eta_reduced * unit_root(mpq_class(-k, 24), prec);
    }
    if (c < 0) {
        a = -a;
        b = -b;
        c = -c;
        d = -d;
    }
    mpq_class theta = mpq_class(a + d, 12 * c) - dedekind_sum(d, c) - mpq_class(1, 4);
    theta.canonicalize();
    Cpx eps = unit_root(theta / 2, prec);
    Cpx root = sqrt_principal(Cpx{Real::of(c, prec) * tau0.re + Real::of(d, prec),
                                  Real::of(c, prec) * tau0.im});
    return eta_reduced * inv(eps) * inv(root);
}

}  // namespace detail_mf

// eta at an exact point: exact reduction, series at the reduced point,
// multiplier unwind against the exact original.
inline Cpx eta(const SurdPoint& tau, const PrecisionCtx& ctx) {
    long p = ctx.total();
    FDReduction red = reduce_to_fd(tau);
    Cpx er = eta_series(red.reduced.to_cpx(p), ctx);
    return detail_mf::eta_unwind(tau.to_cpx(p), er, red.a, red.b, red.c, red.d, p);
}

// eta at a floating point: same pipeline with a numeric reducer. The
// inversion test backs off by 2^{-bits/2} so boundary points terminate.
inline Cpx eta(const Cpx& tau, const PrecisionCtx& ctx) {
    if (!(tau.im.sgn() > 0)) throw validation_error("eta: point must lie in the upper half-plane");
    long p = ctx.total();
    Cpx t = tau;
    mpz_class a = 1, b = 0, c = 0, d = 1;
    Real one = Real::of(1, p);
    Real slack = Real::pow2(-ctx.bits / 2, p);
    for (;;) {
        // floor(re + 1/2): nearest_int ties-to-even corrected down to a floor
        mpz_class k = [&] {
            Real sh = t.re + Real::of(mpq_class(1, 2), p);
            mpz_class z = sh.nearest_int();
            if (Real::of(z, p) > sh) z -= 1;
            return z;
        }();
        if (k != 0) {
            t = Cpx{t.re - Real::of(k, p), t.im};
            a -= k * c;
            b -= k * d;
        }
        Real n2 = t.re * t.re + t.im * t.im;
        if (n2 < one - slack) {
            t = -inv(t);
            mpz_class na = -c, nb = -d, nc = a, nd = b;
            a = na;
            b = nb;
            c = nc;
            d = nd;
        } else {
            break;
        }
    }
    Cpx er = eta_series(t, ctx);
    return detail_mf::eta_unwind(tau, er, a, b, c, d, p);
}

// Delta(tau) = (2 pi)^12 eta(tau)^24.
template <typename Point>
inline Cpx delta(const Point& tau, const PrecisionCtx& ctx) {
    long p = ctx.total();
    Real twopi = Real::pi(p);
    twopi += twopi;
    return pow_si(twopi, 12) * pow_si(eta(tau, ctx), 24);
}

// j(tau) = (2^8 f^16 + f^-8)^3 with f = eta(2 tau)/eta(tau).
inline Cpx j_invariant(const SurdPoint& tau, const PrecisionCtx& ctx) {
    long p = ctx.total();
    Cpx f = eta(tau.scaled(2), ctx) / eta(tau, ctx);
    return pow_si(Real::of(256, p) * pow_si(f, 16) + pow_si(f, -8), 3);
}
inline Cpx j_invariant(const Cpx& tau, const PrecisionCtx& ctx) {
    long p = ctx.total();
    Cpx two_tau = Cpx{tau.re + tau.re, tau.im + tau.im};
    Cpx f = eta(two_tau, ctx) / eta(tau, ctx);
    return pow_si(Real::of(256, p) * pow_si(f, 16) + pow_si(f, -8), 3);
}

// Eta-quotient of level N: prefactor_base^{prefactor_exp_num/common_denom}
// * prod_d eta(d tau)^{m_d}. Exponents stored only when nonzero.
struct EtaQuotientSpec {
    long level = 0;
    std::map<long, long> exponents;
    long prefactor_base = 1;   // nu_N
    long prefactor_exp_num = 12;  // 12 mu_N
    long common_denom = 1;     // gcd(24, P_N)
};

// The level-N construction: over subsets S of the prime support, exponent
// 24 (-1)^{|S|} mu_N / gcd(24, P_N) at divisor N/P_S, with P_S the product
// of the primes in S and P_N the product of (p-1) over distinct p | N.
inline EtaQuotientSpec build_eta_quotient(long N) {
    if (N < 2) throw validation_error("build_eta_quotient: N >= 2 required");
    auto fac = ringclass::detail::factorize(N);
    long m = static_cast<long>(fac.size());
    long P = 1;
    for (auto& [p, e] : fac) P *= (p - 1);
    long g = std::gcd(24L, P);
    long mu = (m == 1 && fac[0].first % 8 == 1) ? 2 : 1;
    long nu = (m == 1) ? fac[0].first : 1;
    if ((24 * mu) % g != 0) throw std::logic_error("build_eta_quotient: non-integer eta exponent");
    long unit = 24 * mu / g;

    EtaQuotientSpec spec;
    spec.level = N;
    spec.prefactor_base = nu;
    spec.prefactor_exp_num = 12 * mu;
    spec.common_denom = g;
    for (long mask = 0; mask < (1L << m); ++mask) {
        long P_S = 1;
        int bits = 0;
        for (long i = 0; i < m; ++i)
            if (mask & (1L << i)) {
                P_S *= fac[i].first;
                ++bits;
            }
        long div = N / P_S;
        spec.exponents[div] += (bits % 2 == 0) ? unit : -unit;
    }
    std::erase_if(spec.exponents, [](const auto& kv) { return kv.second == 0; });
    long sum = 0;
    for (auto& [dd, md] : spec.exponents) sum += md;
    if (sum != 0) throw std::logic_error("build_eta_quotient: exponent sum must vanish");
    return spec;
}

struct OnoReport {
    bool sum_zero = false;       // (i)  sum m_d = 0
    bool weight_front = false;   // (ii) sum d m_d = 0 mod 24
    bool weight_back = false;    // (ii) sum (N/d) m_d = 0 mod 24
    bool product_square = false; // (iii) prod d^{m_d} a rational square
    bool pass() const { return sum_zero && weight_front && weight_back && product_square; }
};

inline OnoReport check_ono_conditions(const EtaQuotientSpec& spec) {
    OnoReport rep;
    long sum = 0;
    mpz_class front = 0, back = 0;
    mpq_class prod(1);
    for (auto& [d, m] : spec.exponents) {
        sum += m;
        front += mpz_class(d) * m;
        back += mpz_class(spec.level / d) * m;
        mpz_class dp;
        mpz_ui_pow_ui(dp.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(std::abs(m)));
        if (m >= 0) prod *= mpq_class(dp);
        else prod /= mpq_class(dp);
    }
    prod.canonicalize();
    rep.sum_zero = (sum == 0);
    rep.weight_front = (front % 24 == 0);
    rep.weight_back = (back % 24 == 0);
    rep.product_square = mpz_perfect_square_p(prod.get_num().get_mpz_t()) &&
                         mpz_perfect_square_p(prod.get_den().get_mpz_t());
    return rep;
}

inline Cpx eval_eta_quotient(const EtaQuotientSpec& spec, const SurdPoint& tau,
                             const PrecisionCtx& ctx) {
    long p = ctx.total();
    Cpx acc = Cpx::of(1, p);
    for (auto& [d, m] : spec.exponents) acc = acc * pow_si(eta(tau.scaled(d), ctx), m);
    if (spec.prefactor_base != 1) {
        if (spec.prefactor_exp_num % spec.common_denom != 0)
            throw std::logic_error("eval_eta_quotient: fractional prefactor exponent with base != 1");
        long e = spec.prefactor_exp_num / spec.common_denom;
        acc = pow_si(Real::of(spec.prefactor_base, p), e) * acc;
    }
    return acc;
}

// Index of a Siegel function; both entries rational with denominator
// dividing the relevant level, not both integral.
struct SiegelIndex {
    mpq_class r1, r2;
};

inline mpq_class siegel_leading_exponent(const SiegelIndex& idx) {
    mpq_class w = (idx.r1 * idx.r1 - idx.r1 + mpq_class(1, 6)) / 2;
    w.canonicalize();
    return w;
}

// g_[r1,r2](tau) = -q^{(1/2)(r1^2-r1+1/6)} e^{pi i r2(r1-1)} (1-u)
//                  prod_{n>=1} (1-q^n u)(1-q^n/u),  u = q^{r1} e^{2 pi i r2}.
inline Cpx siegel(const SiegelIndex& idx, const Cpx& tau, const PrecisionCtx& ctx) {
    mpz_class i1 = idx.r1.get_den(), i2 = idx.r2.get_den();
    if (i1 == 1 && i2 == 1) throw validation_error("siegel: index must not be integral");
    if (!(tau.im.sgn() > 0)) throw validation_error("siegel: point must lie in the upper half-plane");
    long p = ctx.total();
    Cpx q = q_power(1, tau, p);
    Cpx u = q_power(idx.r1, tau, p) * unit_root(idx.r2, p);
    Cpx uinv = inv(u);
    mpq_class phase = idx.r2 * (idx.r1 - 1) / 2;
    phase.canonicalize();
    Cpx acc = -(q_power(siegel_leading_exponent(idx), tau, p) * unit_root(phase, p)) *
              (Cpx::of(1, p) - u);
    Real mu = abs(u);
    if (mu < Real::of(1, p)) mu = abs(uinv);
    Cpx qn = q;
    for (long n = 1;; ++n) {
        acc = acc * (Cpx::of(1, p) - qn * u) * (Cpx::of(1, p) - qn * uinv);
        if ((abs(qn) * mu).exp_of() < -(p + 4)) break;
        qn = qn * q;
        if (n > 200000) throw std::logic_error("siegel: product failed to converge");
    }
    return acc;
}

inline Cpx siegel(const SiegelIndex& idx, const SurdPoint& tau, const PrecisionCtx& ctx) {
    return siegel(idx, tau.to_cpx(ctx.total()), ctx);
}

}  // namespace modular_forms
}  // namespace ringclass
