#pragma once

#include "ringclass/numeric.hpp"

#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace ringclass {

// Rejection of invalid mathematical input (non-fundamental discriminant,
// wrong congruence, ...). The CLI maps this to exit code 2.
struct validation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::pair<long, int>> factorize(long n) {
    if (n < 1) throw validation_error("factorize: positive argument required");
    std::vector<std::pair<long, int>> out;
    for (long p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) n /= p, ++e;
        out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

inline bool is_squarefree(long n) {
    for (auto& [p, e] : factorize(n))
        if (e > 1) return false;
    return true;
}

inline long mod_pos(long a, long m) {
    long r = a % m;
    return r < 0 ? r + m : r;
}

}  // namespace detail

namespace quadratic {

// Upper half-plane point re_rat + im_coeff*sqrt(D)*i with D > 0 a fixed
// integer (here always |d_K|). All Moebius arithmetic on these points is
// exact rational, so fundamental-domain membership tests never suffer
// rounding drift.
struct SurdPoint {
    mpq_class re_rat;
    mpq_class im_coeff;
    mpz_class D;

    SurdPoint(mpq_class re, mpq_class im, mpz_class d)
        : re_rat(std::move(re)), im_coeff(std::move(im)), D(std::move(d)) {
        re_rat.canonicalize();  // mpq_class(n, d) does not reduce by itself
        im_coeff.canonicalize();
        if (im_coeff <= 0) throw validation_error("SurdPoint: point must lie in the upper half-plane");
    }

    // |tau|^2 = re^2 + im^2 * D, exact.
    mpq_class norm2() const { return re_rat * re_rat + im_coeff * im_coeff * D; }

    SurdPoint scaled(const mpz_class& k) const { return {re_rat * k, im_coeff * k, D}; }
    SurdPoint shifted(const mpz_class& k) const { return {re_rat + k, im_coeff, D}; }

    // -1/tau: conjugate over the norm.
    SurdPoint inverted_neg() const {
        mpq_class n2 = norm2();
        return {-re_rat / n2, im_coeff / n2, D};
    }

    // (a*tau + b)/(c*tau + d) for an integer matrix of determinant +1.
    // im transforms by det/|c*tau+d|^2, so the result stays in the upper
    // half-plane.
    SurdPoint mobius(const mpz_class& a, const mpz_class& b, const mpz_class& c,
                     const mpz_class& d) const {
        mpq_class u = c * re_rat + d;                       // Re of denominator
        mpq_class v = c * im_coeff;                         // surd coefficient of denominator
        mpq_class n2 = u * u + v * v * D;
        mpq_class re2 = ((a * re_rat + b) * u + a * im_coeff * v * D) / n2;
        mpq_class im2 = (a * d - b * c) * im_coeff / n2;
        return {re2, im2, D};
    }

    bool operator==(const SurdPoint& o) const {
        return re_rat == o.re_rat && im_coeff == o.im_coeff && D == o.D;
    }

    Cpx to_cpx(long prec) const {
        Real sq = sqrt(Real::of(mpz_class(D), prec));
        return {Real::of(re_rat, prec), Real::of(im_coeff, prec) * sq};
    }
};

// Kronecker symbol (d/n), fully general bottom. GMP carries the standard
// multiplicative extension; only prime bottoms are contractually relied on.
inline int kronecker_symbol(const mpz_class& d, const mpz_class& n) {
    return mpz_kronecker(d.get_mpz_t(), n.get_mpz_t());
}
inline int kronecker_symbol(long d, long n) {
    return kronecker_symbol(mpz_class(d), mpz_class(n));
}

struct QuadField {
    long d_K;            // fundamental discriminant, < 0
    int unit_count;      // |O_K^x|: 4 for -4, 6 for -3, else 2
    long min_poly_b;     // tau_K is a root of X^2 + bX + c
    long min_poly_c;

    SurdPoint tau_K() const {
        mpz_class D(-d_K);
        if (detail::mod_pos(d_K, 4) == 1) return {mpq_class(-1, 2), mpq_class(1, 2), D};
        return {mpq_class(0), mpq_class(1, 2), D};
    }
};

// Validates d as a fundamental discriminant and fills in tau_K data.
inline QuadField make_field(long d) {
    if (d >= 0) throw validation_error("make_field: discriminant must be negative");
    long m4 = detail::mod_pos(d, 4);
    if (m4 == 1) {
        if (!detail::is_squarefree(-d))
            throw validation_error("make_field: " + std::to_string(d) +
                                   " is 1 mod 4 but not squarefree, hence not fundamental");
    } else if (m4 == 0) {
        long q = d / 4;
        long qm = detail::mod_pos(q, 4);
        if (qm != 2 && qm != 3)
            throw validation_error("make_field: " + std::to_string(d) + "/4 = " + std::to_string(q) +
                                   " is " + std::to_string(qm) + " mod 4, so " + std::to_string(d) +
                                   " is not fundamental");
        if (!detail::is_squarefree(-q))
            throw validation_error("make_field: " + std::to_string(d) +
                                   "/4 not squarefree, hence not fundamental");
    } else {
        throw validation_error("make_field: " + std::to_string(d) +
                               " is " + std::to_string(m4) + " mod 4; fundamental discriminants are 0 or 1 mod 4");
    }
    QuadField f;
    f.d_K = d;
    f.unit_count = (d == -4) ? 4 : (d == -3) ? 6 : 2;
    if (m4 == 0) {
        f.min_poly_b = 0;
        f.min_poly_c = -d / 4;
    } else {
        f.min_poly_b = 1;
        f.min_poly_c = (1 - d) / 4;
    }
    return f;
}

struct OrderSpec {
    QuadField field;
    long conductor;
    std::vector<std::pair<long, int>> prime_factorization;
};

inline OrderSpec make_order(const QuadField& field, long conductor) {
    if (conductor < 2) throw validation_error("make_order: conductor must be >= 2");
    return {field, conductor, detail::factorize(conductor)};
}

// |G| = (2 p^{r-1} / |O_K^x|) * (p - (d_K/p)); always an integer because
// p -/+ 1 supplies the needed 2 and 3 factors in the unit_count 4/6 cases.
inline mpz_class group_order_G(const QuadField& field, long p, int r) {
    if (r < 1) throw validation_error("group_order_G: r >= 1 required");
    mpz_class pr_1;
    mpz_ui_pow_ui(pr_1.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(r - 1));
    mpz_class num = 2 * pr_1 * (mpz_class(p) - kronecker_symbol(mpz_class(field.d_K), mpz_class(p)));
    mpz_class q, rem;
    mpz_fdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), mpz_class(field.unit_count).get_mpz_t());
    if (rem != 0) throw std::logic_error("group_order_G: formula produced a non-integer");
    return q;
}

struct HypothesisReport {
    bool holds = true;
    // (p, r, |G|) for every prime power in the conductor.
    std::vector<std::tuple<long, int, mpz_class>> per_prime;
};

// Checks |G| > 2 at every prime power of the conductor; the invariant
// construction is guaranteed to generate the ring class field only then.
inline HypothesisReport hypothesis_holds(const OrderSpec& order) {
    HypothesisReport rep;
    for (auto& [p, r] : order.prime_factorization) {
        mpz_class g = group_order_G(order.field, p, r);
        if (g <= 2) rep.holds = false;
        rep.per_prime.emplace_back(p, r, g);
    }
    return rep;
}

// Prime powers p^r <= bound with |G| <= 2 for this field, ascending by value.
inline std::vector<long> small_order_prime_powers(const QuadField& field, long bound = 50) {
    std::vector<long> out;
    for (long p = 2; p <= bound; ++p) {
        auto f = detail::factorize(p);
        if (f.size() != 1 || f[0].second != 1) continue;  // primes only
        long pr = p;
        for (int r = 1; pr <= bound; ++r, pr *= p)
            if (group_order_G(field, p, r) <= 2) out.push_back(pr);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// One column of the small-order classification table: the two special
// fields, then the four congruence classes of d_K mod 24. `homogeneous`
// records whether every scanned representative produced the same cell;
// `by_discriminant` keeps the per-representative sets for diagnostics.
struct TableColumn {
    std::string label;
    bool homogeneous = true;
    std::set<long> entries;
    std::map<long, std::set<long>> by_discriminant;
};

// Recomputes the |G| <= 2 classification from the group-order formula,
// scanning all fundamental d_K with |d_K| <= disc_bound (excluding -3, -4
// from the congruence columns) and prime powers p^r <= pp_bound.
inline std::vector<TableColumn> reproduce_table1(long disc_bound = 200, long pp_bound = 50) {
    auto cell = [&](const QuadField& f) {
        auto v = small_order_prime_powers(f, pp_bound);
        return std::set<long>(v.begin(), v.end());
    };
    std::vector<TableColumn> cols(6);
    cols[0].label = "Q(sqrt(-1))";
    cols[1].label = "Q(sqrt(-3))";
    cols[2].label = "d_K = 1 mod 24";
    cols[3].label = "d_K = 9,17 mod 24";
    cols[4].label = "d_K = 13 mod 24";
    cols[5].label = "otherwise";
    {
        QuadField f = make_field(-4);
        cols[0].entries = cell(f);
        cols[0].by_discriminant[-4] = cols[0].entries;
    }
    {
        QuadField f = make_field(-3);
        cols[1].entries = cell(f);
        cols[1].by_discriminant[-3] = cols[1].entries;
    }
    for (long d = -7; d >= -disc_bound; --d) {
        QuadField f;
        try {
            f = make_field(d);
        } catch (const validation_error&) {
            continue;
        }
        long m = detail::mod_pos(d, 24);
        int idx = (m == 1) ? 2 : (m == 9 || m == 17) ? 3 : (m == 13) ? 4 : 5;
        auto s = cell(f);
        auto& col = cols[idx];
        if (col.by_discriminant.empty()) col.entries = s;
        else if (s != col.entries) col.homogeneous = false;
        col.by_discriminant[d] = std::move(s);
    }
    return cols;
}

// Brute-force |G|: enumerate (O_K/p^r)^x as pairs x + y*omega with omega a
// root of X^2 + bX + c, invertibility by norm coprimality, then divide out
// the subgroup generated by scalars and the unit group image. Test oracle
// for group_order_G; O(p^{2r}) and intended for small p^r only.
inline long group_order_G_enumerated(const QuadField& field, long p, int r) {
    long q = 1;
    for (int i = 0; i < r; ++i) q *= p;
    long b = field.min_poly_b, c = field.min_poly_c;
    auto norm = [&](long x, long y) { return detail::mod_pos(x * x - b * x * y + c * y * y, q); };
    auto mul = [&](std::pair<long, long> u, std::pair<long, long> v) {
        // (x1 + y1 w)(x2 + y2 w) with w^2 = -b w - c
        auto [x1, y1] = u;
        auto [x2, y2] = v;
        long x = detail::mod_pos(x1 * x2 - c * y1 * y2, q);
        long y = detail::mod_pos(x1 * y2 + y1 * x2 - b * y1 * y2, q);
        return std::make_pair(x, y);
    };
    long invertible = 0;
    for (long x = 0; x < q; ++x)
        for (long y = 0; y < q; ++y)
            if (std::gcd(norm(x, y), q) == 1) ++invertible;

    // Generators of scalars * units: all scalar classes, plus i (= omega)
    // for d_K = -4 and zeta_6 (= 1 + omega) for d_K = -3.
    std::set<std::pair<long, long>> sub;
    std::vector<std::pair<long, long>> gens;
    for (long t = 1; t < q; ++t)
        if (std::gcd(t, q) == 1) gens.push_back({t, 0});
    gens.push_back({detail::mod_pos(-1, q), 0});
    if (field.d_K == -4) gens.push_back({0, 1});
    if (field.d_K == -3) gens.push_back({1, 1});
    sub.insert({1 % q, 0});
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<std::pair<long, long>> cur(sub.begin(), sub.end());
        for (auto& s : cur)
            for (auto& g : gens)
                if (sub.insert(mul(s, g)).second) grew = true;
    }
    if (invertible % static_cast<long>(sub.size()) != 0)
        throw std::logic_error("group_order_G_enumerated: subgroup does not divide group");
    return invertible / static_cast<long>(sub.size());
}

}  // namespace quadratic
}  // namespace ringclass
