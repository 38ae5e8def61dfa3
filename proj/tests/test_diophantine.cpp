#include "ringclass/diophantine.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace ringclass;
using namespace ringclass::diophantine;

namespace {
const RepresentationProblem& problem(long n) {
    static std::map<long, RepresentationProblem> memo;
    auto it = memo.find(n);
    if (it == memo.end()) it = memo.emplace(n, make_representation_problem(n)).first;
    return it->second;
}
}  // namespace

TEST_CASE("order attached to sqrt(-n)", "[diophantine]") {
    auto o169 = order_for_sqrt_minus_n(169);
    REQUIRE(o169.field.d_K == -4);
    REQUIRE(o169.conductor == 13);
    auto o54 = order_for_sqrt_minus_n(54);
    REQUIRE(o54.field.d_K == -24);
    REQUIRE(o54.conductor == 3);
    auto o63 = order_for_sqrt_minus_n(63);
    REQUIRE(o63.field.d_K == -7);
    REQUIRE(o63.conductor == 6);

    // -20 is already fundamental: conductor 1, outside the construction
    REQUIRE(order_for_sqrt_minus_n(5).conductor == 1);
    REQUIRE_THROWS_AS(make_representation_problem(5), validation_error);
    REQUIRE_THROWS_AS(order_for_sqrt_minus_n(0), validation_error);
}

TEST_CASE("problem polynomials", "[diophantine]") {
    REQUIRE(problem(169).f_n.degree() == 6);
    REQUIRE(problem(54).f_n.degree() == 6);
    REQUIRE(problem(63).f_n.degree() == 4);
    REQUIRE(problem(169).disc == mpz_class("277168739328"));
}

TEST_CASE("square roots mod p", "[diophantine]") {
    for (long p : {13L, 17L, 101L, 1048633L}) {
        mpz_class P(p);
        int with_root = 0;
        for (long a = 1; a < std::min(p, 60L); ++a) {
            auto r = detail_dio::sqrt_mod(mpz_class(a), P);
            mpz_class leg, e = (P - 1) / 2, A(a);
            mpz_powm(leg.get_mpz_t(), A.get_mpz_t(), e.get_mpz_t(), P.get_mpz_t());
            if (r) {
                ++with_root;
                REQUIRE((*r) * (*r) % P == a);
                REQUIRE(leg == 1);
            } else {
                REQUIRE(leg == P - 1);
            }
        }
        REQUIRE(with_root > 0);
        REQUIRE(*detail_dio::sqrt_mod(mpz_class(0), P) == 0);
    }
}

TEST_CASE("roots by scan at documented primes", "[diophantine]") {
    auto& f169 = problem(169).f_n;
    REQUIRE(roots_mod_p(f169, 313) == std::vector<long>{7, 118, 123, 178, 207, 296});
    REQUIRE(roots_mod_p(f169, 5).empty());
}

TEST_CASE("splitting path agrees with the scan", "[diophantine]") {
    auto& f169 = problem(169).f_n;
    auto& f54 = problem(54).f_n;
    for (long p : {313L, 1009L, 4001L, 65537L}) {
        REQUIRE(detail_dio::roots_by_splitting(f169, p) == detail_dio::roots_by_scan(f169, p));
        REQUIRE(detail_dio::roots_by_splitting(f54, p) == detail_dio::roots_by_scan(f54, p));
    }
}

TEST_CASE("large primes route through the splitting path", "[diophantine]") {
    auto& f169 = problem(169).f_n;
    // all three exceed 2^20 = 1048576 and were checked prime beforehand
    for (long p : {1048583L, 1048633L, 1048661L}) {
        mpz_class P(p);
        REQUIRE(mpz_probab_prime_p(P.get_mpz_t(), 40) >= 1);
        REQUIRE(p > (1L << 20));
    }
    // partial split: two roots, and the criterion still answers no
    REQUIRE(roots_mod_p(f169, 1048583) == std::vector<long>{604300, 983964});
    auto r1 = represents(problem(169), 1048583);
    REQUIRE(r1.outcome == RepOutcome::No);
    REQUIRE(r1.root_ok == false);  // kronecker fails first, roots not consulted
    // full split: six roots and a certified witness
    REQUIRE(roots_mod_p(f169, 1048633) ==
            std::vector<long>{62122, 165420, 554546, 741228, 801487, 821086});
    auto r2 = represents(problem(169), 1048633);
    REQUIRE(r2.outcome == RepOutcome::Yes);
    REQUIRE(r2.witness->first == 597);
    REQUIRE(r2.witness->second == 64);
    auto r3 = represents(problem(169), 1048661);
    REQUIRE(r3.outcome == RepOutcome::Yes);
    REQUIRE(r3.witness->first == 1010);
    REQUIRE(r3.witness->second == 13);
    // roots verify by direct evaluation
    for (long r : roots_mod_p(f169, 1048633)) {
        mpz_class P(1048633), acc(0);
        for (long k = f169.degree(); k >= 0; --k) acc = (acc * r + f169.coeffs[k]) % P;
        REQUIRE(acc % P == 0);
    }
}

TEST_CASE("cornacchia at the documented inputs", "[diophantine]") {
    auto w = cornacchia(169, mpz_class(313));
    REQUIRE(w.has_value());
    REQUIRE(w->first == 12);
    REQUIRE(w->second == 1);

    auto w2 = cornacchia(54, mpz_class(79));
    REQUIRE(w2.has_value());
    REQUIRE(w2->first == 5);
    REQUIRE(w2->second == 1);

    REQUIRE_FALSE(cornacchia(169, mpz_class(7)).has_value());
}

TEST_CASE("cornacchia matches exhaustive search on odd primes", "[diophantine]") {
    for (long n : {5L, 6L, 10L, 13L, 21L}) {
        for (long p = 3; p < 3000; p += 2) {
            mpz_class P(p);
            if (!mpz_probab_prime_p(P.get_mpz_t(), 40)) continue;
            if (p % n == 0 || n % p == 0) continue;
            auto fast = cornacchia(n, P);
            auto slow = brute_force_represents(n, P);
            INFO("n=" << n << " p=" << p);
            REQUIRE(fast.has_value() == slow.has_value());
            if (fast) REQUIRE(fast->first * fast->first + n * fast->second * fast->second == P);
        }
    }
}

TEST_CASE("criterion outcomes and witnesses", "[diophantine]") {
    auto r313 = represents(problem(169), 313);
    REQUIRE(r313.outcome == RepOutcome::Yes);
    REQUIRE(r313.witness->first == 12);
    REQUIRE(r313.witness->second == 1);

    auto r13 = represents(problem(169), 13);
    REQUIRE(r13.outcome == RepOutcome::NotApplicable);
    REQUIRE(r13.reason == "p | n");

    // 3 divides disc(f_169) = 2^10 3^6 13^5
    auto r3 = represents(problem(169), 3);
    REQUIRE(r3.outcome == RepOutcome::NotApplicable);
    REQUIRE(r3.reason == "p | disc");

    REQUIRE_THROWS_AS(represents(problem(169), 2), validation_error);
    REQUIRE_THROWS_AS(represents(problem(169), 9), validation_error);
    REQUIRE_THROWS_AS(represents(problem(169), 341), validation_error);  // 11 * 31
}

TEST_CASE("congruences alone do not decide representability", "[diophantine]") {
    // primes whose Kronecker symbol passes but which are NOT represented
    const std::map<long, std::vector<long>> witnesses = {
        {169, {5, 17, 29, 37, 41}}, {54, {5, 7, 11, 29, 31}}, {63, {11, 23, 29, 37, 43}}};
    for (auto& [n, ps] : witnesses) {
        for (long p : ps) {
            auto r = represents(problem(n), p);
            INFO("n=" << n << " p=" << p);
            REQUIRE(r.kronecker_ok);
            REQUIRE_FALSE(r.root_ok);
            REQUIRE(r.outcome == RepOutcome::No);
            REQUIRE_FALSE(brute_force_represents(n, mpz_class(p)).has_value());
        }
    }
}

TEST_CASE("kronecker admissibility is a congruence condition mod 4n", "[diophantine]") {
    // for n = 54 the admissible classes mod 24 are {1, 5, 7, 11}
    for (long p = 5; p < 2000; p += 2) {
        mpz_class P(p);
        if (!mpz_probab_prime_p(P.get_mpz_t(), 40)) continue;
        if (p == 3) continue;
        bool kron = quadratic::kronecker_symbol(mpz_class(-54), P) == 1;
        long m = p % 24;
        bool cong = (m == 1 || m == 5 || m == 7 || m == 11);
        INFO("p=" << p);
        REQUIRE(kron == cong);
    }
}

TEST_CASE("mini sweep agrees with exhaustive search", "[diophantine]") {
    for (long n : {169L, 54L, 63L}) {
        auto& prob = problem(n);
        for (long p = 3; p < 600; p += 2) {
            mpz_class P(p);
            if (!mpz_probab_prime_p(P.get_mpz_t(), 40)) continue;
            auto r = represents(prob, p);
            if (r.outcome == RepOutcome::NotApplicable) continue;
            bool truth = brute_force_represents(n, P).has_value();
            INFO("n=" << n << " p=" << p);
            REQUIRE((r.outcome == RepOutcome::Yes) == truth);
            if (truth) {
                auto& [x, y] = *r.witness;
                REQUIRE(x * x + n * y * y == P);
            }
        }
    }
}
