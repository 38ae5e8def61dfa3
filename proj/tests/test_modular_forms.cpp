#include "ringclass/modular_forms.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace ringclass;
using namespace ringclass::modular_forms;
using quadratic::SurdPoint;

namespace {

// Independent eta oracle: q^{1/24} prod_{n<=M} (1 - q^n) by direct
// multiplication, valid when |q|^M is far below the target precision.
Cpx eta_direct(const Cpx& tau, long prec, long M) {
    Cpx q = q_power(1, tau, prec);
    Cpx acc = Cpx::of(1, prec);
    Cpx qn = q;
    for (long n = 1; n <= M; ++n) {
        acc = acc * (Cpx::of(1, prec) - qn);
        qn = qn * q;
    }
    return q_power(mpq_class(1, 24), tau, prec) * acc;
}

Real agm(Real a, Real b) {
    long p = a.prec();
    for (int i = 0; i < 200; ++i) {
        Real m = (a + b) / Real::of(2, p);
        Real g = sqrt(a * b);
        if (abs(a - b).exp_of() < -(p - 8)) break;
        a = m;
        b = g;
    }
    return a;
}

}  // namespace

TEST_CASE("sawtooth and Dedekind sums", "[modular_forms]") {
    REQUIRE(sawtooth(mpq_class(0)) == 0);
    REQUIRE(sawtooth(mpq_class(5)) == 0);
    REQUIRE(sawtooth(mpq_class(1, 4)) == mpq_class(-1, 4));
    REQUIRE(sawtooth(mpq_class(-1, 4)) == mpq_class(1, 4));

    REQUIRE(dedekind_sum(mpz_class(1), mpz_class(3)) == mpq_class(1, 18));
    REQUIRE(dedekind_sum(mpz_class(0), mpz_class(1)) == 0);
    REQUIRE_THROWS_AS(dedekind_sum(mpz_class(2), mpz_class(4)), validation_error);

    // reciprocity: s(d,c) + s(c,d) = -1/4 + (c/d + d/c + 1/(cd))/12
    std::mt19937 rng(1234);
    int checked = 0;
    while (checked < 30) {
        long c = 1 + static_cast<long>(rng() % 40), d = 1 + static_cast<long>(rng() % 40);
        if (std::gcd(c, d) != 1) continue;
        ++checked;
        mpq_class lhs = dedekind_sum(mpz_class(d), mpz_class(c)) +
                        dedekind_sum(mpz_class(c), mpz_class(d));
        mpq_class rhs = mpq_class(-1, 4) +
                        (mpq_class(c, d) + mpq_class(d, c) + mpq_class(1, c * d)) / 12;
        rhs.canonicalize();
        REQUIRE(lhs == rhs);
    }
}

TEST_CASE("fundamental domain reduction is exact", "[modular_forms]") {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        long den = 1 + static_cast<long>(rng() % 12);
        long num = static_cast<long>(rng() % 41) - 20;
        long imn = 1 + static_cast<long>(rng() % 10);
        long Ds[] = {1, 2, 3, 5, 6, 7, 11, 163};
        SurdPoint tau{mpq_class(num, den), mpq_class(imn, den), mpz_class(Ds[rng() % 8])};
        auto red = reduce_to_fd(tau);
        REQUIRE(red.a * red.d - red.b * red.c == 1);
        // the reduced point is the exact Moebius image
        SurdPoint moved = tau.mobius(red.a, red.b, red.c, red.d);
        REQUIRE(moved == red.reduced);
        // fundamental domain membership
        REQUIRE(abs(red.reduced.re_rat) <= mpq_class(1, 2));
        REQUIRE(red.reduced.norm2() >= 1);
    }
}

TEST_CASE("eta against the direct product", "[modular_forms]") {
    PrecisionCtx ctx{256, 48};
    long p = ctx.total();
    Cpx i_pt{Real(p), Real::of(1, p)};
    Cpx z{Real::of(mpq_class(3, 10), p), Real::of(mpq_class(4, 5), p)};
    REQUIRE(abs(eta(i_pt, ctx) - eta_direct(i_pt, p, 400)).exp_of() <= -250);
    REQUIRE(abs(eta(z, ctx) - eta_direct(z, p, 600)).exp_of() <= -250);
}

TEST_CASE("eta at i equals Gamma(1/4) / (2 pi^{3/4})", "[modular_forms]") {
    PrecisionCtx ctx{320, 48};
    long p = ctx.total();
    // Gamma(1/4) = sqrt((2 pi)^{3/2} / AGM(sqrt 2, 1))
    Real pi = Real::pi(p);
    Real twopi = pi + pi;
    Real m = agm(sqrt(Real::of(2, p)), Real::of(1, p));
    Real gamma_q = sqrt(sqrt(pow_si(twopi, 3)) / m);
    Real rhs = gamma_q / (Real::of(2, p) * exp(log(pi) * Real::of(mpq_class(3, 4), p)));
    SurdPoint i_surd{mpq_class(0), mpq_class(1), mpz_class(1)};
    Cpx lhs = eta(i_surd, ctx);
    REQUIRE(abs(lhs.im).exp_of() <= -250);
    REQUIRE(abs(lhs.re - rhs).exp_of() <= -250);
}

TEST_CASE("eta transformation under 100 random unimodular matrices", "[modular_forms]") {
    PrecisionCtx ctx{256, 48};
    long p = ctx.total();
    std::mt19937 rng(2024);
    int done = 0;
    while (done < 100) {
        // random word in the generators keeps entries modest
        mpz_class a = 1, b = 0, c = 0, d = 1;
        for (int k = 0; k < 8; ++k) {
            if (rng() & 1) {
                long t = static_cast<long>(rng() % 5) - 2;
                b += a * t;
                d += c * t;
            } else {
                mpz_class na = -c, nb = -d;
                c = a;
                d = b;
                a = na;
                b = nb;
            }
        }
        if (c == 0) continue;
        if (c < 0) {
            a = -a;
            b = -b;
            c = -c;
            d = -d;
        }
        ++done;
        Cpx z{Real::of(mpq_class(static_cast<long>(rng() % 81) - 40, 20), p),
              Real::of(mpq_class(5 + static_cast<long>(rng() % 60), 20), p)};
        Cpx den = Cpx{Real::of(c, p), Real(p)} * z + Cpx{Real::of(d, p), Real(p)};
        Cpx num = Cpx{Real::of(a, p), Real(p)} * z + Cpx{Real::of(b, p), Real(p)};
        Cpx gz = num / den;
        mpq_class theta = mpq_class(a + d, 12 * c) - dedekind_sum(d, c) - mpq_class(1, 4);
        theta.canonicalize();
        Cpx eps = unit_root(theta / 2, p);
        Cpx lhs = eta(gz, ctx);
        Cpx rhs = eps * sqrt_principal(den) * eta(z, ctx);
        Real resid = abs(lhs - rhs) / abs(lhs);
        INFO("a=" << a.get_str() << " b=" << b.get_str() << " c=" << c.get_str()
                  << " d=" << d.get_str());
        REQUIRE(resid.exp_of() <= -(ctx.bits - ctx.guard_bits));
    }
}

TEST_CASE("exact and numeric eta agree on surds", "[modular_forms]") {
    PrecisionCtx ctx{256, 48};
    long p = ctx.total();
    std::mt19937 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        long den = 1 + static_cast<long>(rng() % 9);
        SurdPoint tau{mpq_class(static_cast<long>(rng() % 15) - 7, den),
                      mpq_class(1 + static_cast<long>(rng() % 6), den),
                      mpz_class(1 + static_cast<long>(rng() % 10))};
        Cpx via_exact = eta(tau, ctx);
        Cpx via_numeric = eta(tau.to_cpx(p), ctx);
        REQUIRE((abs(via_exact - via_numeric) / abs(via_exact)).exp_of() <=
                -(ctx.bits - ctx.guard_bits));
    }
}

TEST_CASE("classical j values", "[modular_forms]") {
    PrecisionCtx ctx{512, 48};
    SurdPoint i_surd{mpq_class(0), mpq_class(1), mpz_class(1)};
    SurdPoint rho{mpq_class(-1, 2), mpq_class(1, 2), mpz_class(3)};
    SurdPoint sqrt2{mpq_class(0), mpq_class(1), mpz_class(2)};
    SurdPoint w7{mpq_class(-1, 2), mpq_class(1, 2), mpz_class(7)};
    SurdPoint w163{mpq_class(-1, 2), mpq_class(1, 2), mpz_class(163)};
    SurdPoint two_i{mpq_class(0), mpq_class(2), mpz_class(1)};

    auto near = [&](const SurdPoint& t, const mpz_class& expect) {
        Cpx v = j_invariant(t, ctx);
        REQUIRE(v.re.nearest_int() == expect);
        REQUIRE(abs(v.re - Real::of(expect, ctx.total())).exp_of() <= -300);
        REQUIRE(abs(v.im).exp_of() <= -300);
    };
    near(i_surd, mpz_class(1728));
    near(rho, mpz_class(0));
    near(sqrt2, mpz_class(8000));
    near(w7, mpz_class(-3375));
    near(two_i, mpz_class(287496));
    near(w163, mpz_class("-262537412640768000"));
}

TEST_CASE("eta quotient specs at the documented levels", "[modular_forms]") {
    auto s13 = build_eta_quotient(13);
    REQUIRE(s13.exponents == std::map<long, long>{{1, -2}, {13, 2}});
    REQUIRE(s13.prefactor_base == 13);
    REQUIRE(s13.prefactor_exp_num == 12);
    REQUIRE(s13.common_denom == 12);

    auto s7 = build_eta_quotient(7);
    REQUIRE(s7.exponents == std::map<long, long>{{1, -4}, {7, 4}});
    REQUIRE(s7.prefactor_base == 7);
    REQUIRE(s7.prefactor_exp_num == 12);
    REQUIRE(s7.common_denom == 6);  // prefactor is 7^2

    auto s6 = build_eta_quotient(6);
    REQUIRE(s6.exponents == std::map<long, long>{{1, 12}, {2, -12}, {3, -12}, {6, 12}});
    REQUIRE(s6.prefactor_base == 1);

    auto s3 = build_eta_quotient(3);
    REQUIRE(s3.exponents == std::map<long, long>{{1, -12}, {3, 12}});
    REQUIRE(s3.prefactor_base == 3);
    REQUIRE(s3.prefactor_exp_num == 12);
    REQUIRE(s3.common_denom == 2);  // prefactor is 3^6 = 729

    // single prime 1 mod 8 doubles mu
    auto s17 = build_eta_quotient(17);
    REQUIRE(s17.exponents == std::map<long, long>{{1, -6}, {17, 6}});
    REQUIRE(s17.prefactor_exp_num == 24);
    REQUIRE(s17.common_denom == 8);

    REQUIRE_THROWS_AS(build_eta_quotient(1), validation_error);
}

TEST_CASE("modularity conditions", "[modular_forms]") {
    for (long N = 2; N <= 200; ++N) {
        auto rep = check_ono_conditions(build_eta_quotient(N));
        INFO("N = " << N);
        REQUIRE(rep.pass());
    }
    // a deliberately broken quotient: eta(13 tau)/eta(tau) alone
    EtaQuotientSpec bad;
    bad.level = 13;
    bad.exponents = {{13, 1}, {1, -1}};
    auto rep = check_ono_conditions(bad);
    REQUIRE(rep.sum_zero);
    REQUIRE_FALSE(rep.weight_front);
    REQUIRE_FALSE(rep.product_square);
    REQUIRE_FALSE(rep.pass());
}

TEST_CASE("siegel leading exponent and basic values", "[modular_forms]") {
    REQUIRE(siegel_leading_exponent({mpq_class(1, 2), mpq_class(0)}) == mpq_class(-1, 24));
    REQUIRE(siegel_leading_exponent({mpq_class(0), mpq_class(1, 5)}) == mpq_class(1, 12));

    PrecisionCtx ctx{256, 48};
    long p = ctx.total();
    Cpx i_pt{Real(p), Real::of(1, p)};
    Cpx g = siegel({mpq_class(0), mpq_class(1, 5)}, i_pt, ctx);
    REQUIRE(abs(g).to_double() == Catch::Approx(0.6956).margin(2e-4));

    REQUIRE_THROWS_AS(siegel({mpq_class(1), mpq_class(2)}, i_pt, ctx), validation_error);
}

TEST_CASE("siegel 12N-th powers are invariant under index negation", "[modular_forms]") {
    PrecisionCtx ctx{256, 48};
    long p = ctx.total();
    for (auto tau : {Cpx{Real(p), Real::of(1, p)},
                     Cpx{Real::of(mpq_class(3, 10), p), Real::of(mpq_class(11, 10), p)}}) {
        Cpx a = pow_si(siegel({mpq_class(0), mpq_class(1, 5)}, tau, ctx), 60);
        Cpx b = pow_si(siegel({mpq_class(0), mpq_class(-1, 5)}, tau, ctx), 60);
        Cpx c = pow_si(siegel({mpq_class(0), mpq_class(4, 5)}, tau, ctx), 60);
        REQUIRE((abs(a - b) / abs(a)).exp_of() <= -200);
        REQUIRE((abs(a - c) / abs(a)).exp_of() <= -200);
    }
}

TEST_CASE("q_power takes the principal branch", "[modular_forms]") {
    long p = 256;
    Cpx i_pt{Real(p), Real::of(1, p)};
    Cpx half = q_power(mpq_class(1, 2), i_pt, p);
    REQUIRE(abs(half.im).exp_of() <= -200);
    REQUIRE(abs(half.re - exp(Cpx{-Real::pi(p), Real(p)}).re).exp_of() <= -200);

    // at tau = 1 + i the phase follows x * tau, not a reduced variant
    Cpx tau{Real::of(1, p), Real::of(1, p)};
    Cpx third = q_power(mpq_class(1, 3), tau, p);
    Real ang = Real::pi(p) * Real::of(mpq_class(2, 3), p);
    Cpx expect = exp(Cpx{-ang, ang});
    REQUIRE(abs(third - expect).exp_of() <= -200);
}
