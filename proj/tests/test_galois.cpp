#include "ringclass/galois.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace ringclass;
using namespace ringclass::galois;
using quadratic::SurdPoint;

TEST_CASE("w group order matches the multiplicative formula", "[galois]") {
    // |W| mod nothing: product over p^r || N of p^{2(r-1)} (p - 1)(p - chi(p))
    auto formula = [](const quadratic::QuadField& f, long N) {
        mpz_class w(1);
        for (auto& [p, r] : ringclass::detail::factorize(N)) {
            long chi = quadratic::kronecker_symbol(mpz_class(f.d_K), mpz_class(p));
            mpz_class pw(1);
            for (int i = 0; i < 2 * (r - 1); ++i) pw *= p;
            w *= pw * (p - 1) * (p - chi);
        }
        return w;
    };
    REQUIRE(w_group(quadratic::make_field(-4), 13).size() == 144);
    REQUIRE(w_group(quadratic::make_field(-7), 7).size() == 42);

    std::mt19937 rng(5);
    std::vector<long> fields = {-3, -4, -7, -8, -11, -15, -20, -23, -24, -40};
    int done = 0;
    while (done < 20) {
        long d = fields[rng() % fields.size()];
        long N = 2 + static_cast<long>(rng() % 29);
        auto f = quadratic::make_field(d);
        INFO("d=" << d << " N=" << N);
        REQUIRE(mpz_class(w_group(f, N).size()) == formula(f, N));
        ++done;
    }
}

TEST_CASE("torsion subgroup orders mod +-I", "[galois]") {
    REQUIRE(t_group(quadratic::make_field(-4), 13).size() == 2);
    REQUIRE(t_group(quadratic::make_field(-3), 13).size() == 3);
    REQUIRE(t_group(quadratic::make_field(-7), 7).size() == 1);
    REQUIRE(t_group(quadratic::make_field(-24), 5).size() == 1);
}

TEST_CASE("coset representatives partition the group", "[galois]") {
    for (auto [d, N] : std::vector<std::pair<long, long>>{{-4, 13}, {-7, 7}, {-7, 6}, {-24, 3}}) {
        auto f = quadratic::make_field(d);
        auto H = detail_g::t_scalar_group(f, N);
        auto reps = coset_reps(f, N);
        // expected coset counts
        std::set<Mat2ModN> all;
        for (auto& w : w_group(f, N)) all.insert(w.canonical_mod_pm());
        REQUIRE(reps.size() * H.size() == all.size());
        // cosets are disjoint and cover
        std::set<Mat2ModN> covered;
        for (auto& rep : reps)
            for (auto& h : H) {
                auto el = (h * rep.raw).canonical_mod_pm();
                REQUIRE(covered.insert(el).second);
            }
        REQUIRE(covered == all);
    }
    REQUIRE(coset_reps(quadratic::make_field(-4), 13).size() == 6);
    REQUIRE(coset_reps(quadratic::make_field(-7), 7).size() == 7);
    REQUIRE(coset_reps(quadratic::make_field(-7), 6).size() == 4);
    REQUIRE(coset_reps(quadratic::make_field(-24), 3).size() == 3);
}

TEST_CASE("sl2 lift", "[galois]") {
    // the documented example lifts to itself
    auto m = Mat2ModN::of(13, 1, -1, -6, 7);
    Mat2 lift = sl2_lift(m);
    REQUIRE(lift.a == 1);
    REQUIRE(lift.b == -1);
    REQUIRE(lift.c == -6);
    REQUIRE(lift.d == 7);

    std::mt19937 rng(11);
    for (long N : {5L, 6L, 7L, 12L, 13L, 24L}) {
        int done = 0;
        while (done < 25) {
            long c = static_cast<long>(rng() % N), d = static_cast<long>(rng() % N);
            long g = std::gcd(std::gcd(c, d), N);
            if (g != 1) continue;
            // complete (c, d) to det 1 mod N: find a, b with a d - b c = 1 mod N
            bool found = false;
            long a = 0, b = 0;
            for (a = 0; a < N && !found; ++a)
                for (b = 0; b < N; ++b)
                    if (ringclass::detail::mod_pos(a * d - b * c, N) == 1) {
                        found = true;
                        break;
                    }
            if (!found) continue;
            --a;
            auto mm = Mat2ModN::of(N, a, b, c, d);
            Mat2 L = sl2_lift(mm);
            REQUIRE(L.det() == 1);
            REQUIRE(Mat2ModN::of(N, L) == mm);
            ++done;
        }
    }
}

TEST_CASE("reduced forms and class numbers", "[galois]") {
    auto forms23 = reduced_forms(mpz_class(-23));
    REQUIRE(forms23.size() == 3);
    REQUIRE(forms23[0] == BinaryQF{1, 1, 6});
    REQUIRE(forms23[1] == BinaryQF{2, -1, 3});
    REQUIRE(forms23[2] == BinaryQF{2, 1, 3});

    REQUIRE(reduced_forms(mpz_class(-4)) == std::vector<BinaryQF>{{1, 0, 1}});
    REQUIRE(reduced_forms(mpz_class(-3)) == std::vector<BinaryQF>{{1, 1, 1}});
    REQUIRE(reduced_forms(mpz_class(-24)) == std::vector<BinaryQF>{{1, 0, 6}, {2, 0, 3}});

    // classical class numbers
    auto h = [](long D) { return reduced_forms(mpz_class(D)).size(); };
    REQUIRE(h(-7) == 1);
    REQUIRE(h(-8) == 1);
    REQUIRE(h(-11) == 1);
    REQUIRE(h(-15) == 2);
    REQUIRE(h(-20) == 2);
    REQUIRE(h(-47) == 5);
    REQUIRE(h(-71) == 7);
    REQUIRE(h(-163) == 1);

    // h(-216): the conductor-3 order of Q(sqrt(-6))
    auto forms216 = reduced_forms(mpz_class(-216));
    REQUIRE(forms216.size() == 6);
    REQUIRE(forms216[0] == BinaryQF{1, 0, 54});
    REQUIRE(forms216[1] == BinaryQF{2, 0, 27});

    REQUIRE_THROWS_AS(reduced_forms(mpz_class(-5)), validation_error);  // 3 mod 4
    REQUIRE_THROWS_AS(reduced_forms(mpz_class(4)), validation_error);

    REQUIRE(class_number_order(quadratic::make_field(-4), 13) == 6);
    REQUIRE(class_number_order(quadratic::make_field(-7), 7) == 7);
    REQUIRE(class_number_order(quadratic::make_field(-7), 6) == 4);
    REQUIRE(class_number_order(quadratic::make_field(-24), 3) == 6);
}

TEST_CASE("form to evaluation point", "[galois]") {
    auto f = quadratic::make_field(-24);
    for (auto& Q : reduced_forms(mpz_class(-24))) {
        auto Qc = equivalent_form_coprime_to(Q, 3);
        REQUIRE(Qc.disc() == Q.disc());
        REQUIRE(gcd(Qc.a, mpz_class(3)) == 1);
        auto [tauQ, beta] = form_to_datum(Qc, f);
        // beta maps tau_Q to tau_K exactly
        SurdPoint image = tauQ.mobius(beta.a, beta.b, beta.c, beta.d);
        REQUIRE(image == f.tau_K());
        REQUIRE(beta.det() == Qc.a);
    }
    // a form whose leading coefficient shares a factor with N
    BinaryQF q2{2, 0, 27};
    auto r = equivalent_form_coprime_to(q2, 2);
    REQUIRE(r.disc() == q2.disc());
    REQUIRE(gcd(r.a, mpz_class(2)) == 1);
}

TEST_CASE("conjugate data shape", "[galois]") {
    auto f24 = quadratic::make_field(-24);
    auto data = conjugate_data(f24, 3);
    REQUIRE(data.size() == 6);
    // two distinct evaluation points, three cosets each
    std::map<std::pair<long, long>, int> by_point;
    for (auto& g : data) {
        by_point[{g.eval_point.re_rat.get_num().get_si(),
                  g.eval_point.im_coeff.get_den().get_si()}]++;
        REQUIRE(g.sl2.det() == 1);
        // decomposition consistency: diag(1, det) * alpha = m mod N
        long N = g.raw.N;
        auto alpha = Mat2ModN::of(N, g.sl2);
        auto lhs = Mat2ModN::of(N, alpha.a, alpha.b, g.diag_d * alpha.c, g.diag_d * alpha.d);
        REQUIRE(lhs == g.raw);
    }
    REQUIRE(by_point.size() == 2);
    for (auto& [k, v] : by_point) REQUIRE(v == 3);

    auto f4 = quadratic::make_field(-4);
    REQUIRE(conjugate_data(f4, 13).size() == 6);
    auto f7 = quadratic::make_field(-7);
    REQUIRE(conjugate_data(f7, 7).size() == 7);
    REQUIRE(conjugate_data(f7, 6).size() == 4);
}

TEST_CASE("representative choice does not change the multiset of raw cosets", "[galois]") {
    for (auto [d, N] : std::vector<std::pair<long, long>>{{-4, 13}, {-24, 3}, {-7, 6}}) {
        auto f = quadratic::make_field(d);
        auto H = detail_g::t_scalar_group(f, N);
        auto fwd = coset_reps(f, N, false);
        auto rev = coset_reps(f, N, true);
        REQUIRE(fwd.size() == rev.size());
        // each reverse rep must lie in exactly one forward coset
        std::set<Mat2ModN> fwd_cosets;
        for (auto& r : fwd)
            for (auto& h : H) fwd_cosets.insert((h * r.raw).canonical_mod_pm());
        for (auto& r : rev) REQUIRE(fwd_cosets.count(r.raw.canonical_mod_pm()) == 1);
    }
}
