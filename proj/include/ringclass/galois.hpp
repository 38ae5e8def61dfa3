#pragma once

#include "ringclass/quadratic.hpp"

#include <optional>

namespace ringclass {
namespace galois {

using quadratic::QuadField;
using quadratic::SurdPoint;

namespace detail_g {

// extended gcd: returns (g, x, y) with a*x + b*y = g >= 0.
inline std::tuple<mpz_class, mpz_class, mpz_class> ext_gcd(const mpz_class& a, const mpz_class& b) {
    mpz_class g, x, y;
    mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return {g, x, y};
}

inline long inv_mod(long a, long N) {
    auto [g, x, y] = ext_gcd(mpz_class(a), mpz_class(N));
    if (g != 1) throw validation_error("inv_mod: argument not invertible");
    return ringclass::detail::mod_pos(static_cast<long>(x.get_si()), N);
}

}  // namespace detail_g

// Integer 2x2 matrix; lifts carry exact mpz entries because repeated
// composition can leave the long range.
struct Mat2 {
    mpz_class a, b, c, d;
    mpz_class det() const { return a * d - b * c; }
    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }
};

// 2x2 matrix over Z/N with entries normalized to [0, N).
struct Mat2ModN {
    long N;
    long a, b, c, d;

    static Mat2ModN of(long N, long a, long b, long c, long d) {
        auto m = [N](long x) { return ringclass::detail::mod_pos(x, N); };
        return {N, m(a), m(b), m(c), m(d)};
    }
    static Mat2ModN of(long N, const Mat2& m) {
        auto r = [N](const mpz_class& x) {
            mpz_class q = x % N;
            if (q < 0) q += N;
            return static_cast<long>(q.get_si());
        };
        return {N, r(m.a), r(m.b), r(m.c), r(m.d)};
    }

    long det() const { return ringclass::detail::mod_pos(a * d - b * c, N); }
    bool det_invertible() const { return std::gcd(det(), N) == 1; }

    friend Mat2ModN operator*(const Mat2ModN& x, const Mat2ModN& y) {
        long N = x.N;
        return Mat2ModN::of(N, x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d);
    }
    friend bool operator==(const Mat2ModN& x, const Mat2ModN& y) {
        return x.N == y.N && x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
    }
    friend bool operator<(const Mat2ModN& x, const Mat2ModN& y) {
        return std::tie(x.a, x.b, x.c, x.d) < std::tie(y.a, y.b, y.c, y.d);
    }

    // representative of {m, -m}: the lexicographically smaller tuple.
    Mat2ModN canonical_mod_pm() const {
        Mat2ModN neg = Mat2ModN::of(N, -a, -b, -c, -d);
        return (*this < neg) ? *this : neg;
    }
};

// W_{K,N} = {[[t - b s, -c s],[s, t]] : det invertible mod N}, the matrix
// model of (O_K/N)^x acting through X^2 + bX + c = min(tau_K, Q).
inline std::vector<Mat2ModN> w_group(const QuadField& field, long N) {
    if (N < 2) throw validation_error("w_group: N >= 2 required");
    std::vector<Mat2ModN> out;
    for (long t = 0; t < N; ++t)
        for (long s = 0; s < N; ++s) {
            Mat2ModN m = Mat2ModN::of(N, t - field.min_poly_b * s, -field.min_poly_c * s, s, t);
            if (m.det_invertible()) out.push_back(m);
        }
    return out;
}

// T_{K,N} mod +-I: the image of the extra units, nontrivial only for the
// two fields with extra roots of unity.
inline std::set<Mat2ModN> t_group(const QuadField& field, long N) {
    if (N < 2) throw validation_error("t_group: N >= 2 required");
    std::vector<Mat2ModN> gens;
    if (field.d_K == -4) gens.push_back(Mat2ModN::of(N, 0, -1, 1, 0));
    else if (field.d_K == -3) gens.push_back(Mat2ModN::of(N, 1, 1, -1, 0));
    std::set<Mat2ModN> cl;
    cl.insert(Mat2ModN::of(N, 1, 0, 0, 1).canonical_mod_pm());
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<Mat2ModN> cur(cl.begin(), cl.end());
        for (auto& x : cur)
            for (auto& g : gens)
                if (cl.insert((x * g).canonical_mod_pm()).second) grew = true;
    }
    return cl;
}

namespace detail_g {

// <T_{K,N}, scalar matrices> mod +-I, the kernel of the coset map.
inline std::set<Mat2ModN> t_scalar_group(const QuadField& field, long N) {
    std::set<Mat2ModN> cl = t_group(field, N);
    std::vector<Mat2ModN> gens;
    for (long t = 1; t < N; ++t)
        if (std::gcd(t, N) == 1) gens.push_back(Mat2ModN::of(N, t, 0, 0, t));
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<Mat2ModN> cur(cl.begin(), cl.end());
        for (auto& x : cur)
            for (auto& g : gens)
                if (cl.insert((x * g).canonical_mod_pm()).second) grew = true;
    }
    return cl;
}

}  // namespace detail_g

// Det-1 integer lift of m (mod N): fix a coprime lift of the bottom row,
// then correct an extended-gcd top row by the right multiple of the bottom
// row. Postconditions asserted: det = 1 and lift = m mod N.
inline Mat2 sl2_lift(const Mat2ModN& m) {
    long N = m.N;
    if (m.det() != 1 % N) throw validation_error("sl2_lift: determinant must be 1 mod N");
    // fast path: some choice of entry - {0, N} often already has det 1
    {
        const long av[2] = {m.a, m.a - N}, bv[2] = {m.b, m.b - N};
        const long cv[2] = {m.c, m.c - N}, dv[2] = {m.d, m.d - N};
        std::optional<Mat2> best;
        long best_norm = 0;
        for (int i = 0; i < 16; ++i) {
            long a = av[i & 1], b = bv[(i >> 1) & 1], c = cv[(i >> 2) & 1], d = dv[(i >> 3) & 1];
            if (a * d - b * c != 1) continue;
            long norm = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
            if (!best || norm < best_norm) {
                best = Mat2{a, b, c, d};
                best_norm = norm;
            }
        }
        if (best) return *best;
    }
    mpz_class ab(m.a), bb(m.b), cb(m.c), db(m.d);
    mpz_class c = cb, d = db;
    if (d == 0) d = N;
    if (c == 0 && gcd(c, d) != 1) c = N;
    long tries = 0;
    while (gcd(c, d) != 1) {
        c += N;
        if (++tries > 4 * N + 64) {
            // extremely defensive: vary d as well
            c = cb;
            d += N;
            tries = 0;
        }
    }
    auto [g, x, y] = detail_g::ext_gcd(c, d);
    if (g != 1) throw std::logic_error("sl2_lift: coprime bottom row not found");
    mpz_class a0 = y, b0 = -x;  // a0*d - b0*c = 1
    mpz_class t = ((ab - a0) * x + (bb - b0) * y) % N;
    Mat2 out{a0 + t * c, b0 + t * d, c, d};
    if (out.det() != 1) throw std::logic_error("sl2_lift: determinant drifted");
    Mat2ModN back = Mat2ModN::of(N, out);
    if (!(back == Mat2ModN{N, m.a, m.b, m.c, m.d}))
        throw std::logic_error("sl2_lift: lift does not reduce to input");
    return out;
}

// One Galois conjugate's worth of data: the matrix acts as
// diag(1, diag_d) * sl2_lift on level-N functions; for quotients with
// rational Fourier coefficients the diag part acts trivially, so evaluation
// is at sl2_lift(eval_point). `raw` keeps the undecomposed product mod N
// for index arithmetic and display.
struct GaloisDatum {
    long diag_d;
    Mat2 sl2;
    SurdPoint eval_point;
    Mat2ModN raw;
};

namespace detail_g {

inline GaloisDatum decompose(const Mat2ModN& m, const SurdPoint& eval_point) {
    long N = m.N;
    long det = m.det();
    long dinv = inv_mod(det, N);
    Mat2ModN alpha = Mat2ModN::of(N, m.a, m.b, dinv * m.c, dinv * m.d);
    return {det, sl2_lift(alpha), eval_point, m};
}

}  // namespace detail_g

// One representative per coset of <T_{K,N}, scalars> in W_{K,N} (mod +-I),
// chosen as the lexicographically first (t, s) in scan order; reverse_scan
// flips the scan for the representative-independence tests.
inline std::vector<GaloisDatum> coset_reps(const QuadField& field, long N, bool reverse_scan = false) {
    if (N < 2) throw validation_error("coset_reps: N >= 2 required");
    std::set<Mat2ModN> H = detail_g::t_scalar_group(field, N);
    std::set<Mat2ModN> covered;
    std::vector<GaloisDatum> out;
    SurdPoint tau = field.tau_K();
    auto consider = [&](long t, long s) {
        Mat2ModN m = Mat2ModN::of(N, t - field.min_poly_b * s, -field.min_poly_c * s, s, t);
        if (!m.det_invertible()) return;
        if (covered.count(m.canonical_mod_pm())) return;
        for (auto& h : H) covered.insert((h * m).canonical_mod_pm());
        out.push_back(detail_g::decompose(m, tau));
    };
    if (!reverse_scan) {
        for (long t = 0; t < N; ++t)
            for (long s = 0; s < N; ++s) consider(t, s);
    } else {
        for (long t = N - 1; t >= 0; --t)
            for (long s = N - 1; s >= 0; --s) consider(t, s);
    }
    return out;
}

// Primitive positive definite binary quadratic form a X^2 + b XY + c Y^2.
struct BinaryQF {
    mpz_class a, b, c;
    mpz_class disc() const { return b * b - 4 * a * c; }
    bool operator==(const BinaryQF& o) const { return a == o.a && b == o.b && c == o.c; }
};

// All reduced primitive forms of discriminant D, sorted by (a, b).
// Reduced: |b| <= a <= c and b >= 0 whenever |b| = a or a = c.
inline std::vector<BinaryQF> reduced_forms(const mpz_class& D) {
    if (D >= 0) throw validation_error("reduced_forms: discriminant must be negative");
    long r = ringclass::detail::mod_pos(static_cast<long>(mpz_class(D % 4).get_si()), 4);
    if (r != 0 && r != 1) throw validation_error("reduced_forms: discriminant must be 0 or 1 mod 4");
    std::vector<BinaryQF> out;
    mpz_class bound;  // a <= sqrt(|D|/3)
    mpz_class absD = -D;
    mpz_sqrt(bound.get_mpz_t(), mpz_class(absD / 3).get_mpz_t());
    for (mpz_class a = 1; a <= bound; ++a) {
        for (mpz_class b = -a + 1; b <= a; ++b) {
            mpz_class num = b * b - D;
            if (num % (4 * a) != 0) continue;
            mpz_class c = num / (4 * a);
            if (c < a) continue;
            if (b < 0 && a == c) continue;
            if (gcd(gcd(a, b), c) != 1) continue;
            out.push_back({a, b, c});
        }
    }
    std::sort(out.begin(), out.end(), [](const BinaryQF& x, const BinaryQF& y) {
        return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    return out;
}

// Class number of the order of conductor N: reduced primitive forms of
// discriminant N^2 d_K.
inline long class_number_order(const QuadField& field, long N) {
    if (N < 1) throw validation_error("class_number_order: N >= 1 required");
    mpz_class D = mpz_class(N) * N * field.d_K;
    return static_cast<long>(reduced_forms(D).size());
}

// tau_Q = (-b + sqrt(d_K))/(2a) and beta_Q = [[a, (b-B)/2],[0,1]] with
// B = d_K mod 2; beta_Q maps tau_Q to tau_K exactly.
inline std::pair<SurdPoint, Mat2> form_to_datum(const BinaryQF& Q, const QuadField& field) {
    if (Q.disc() != field.d_K) throw validation_error("form_to_datum: form discriminant mismatch");
    SurdPoint tau{mpq_class(-Q.b, 2 * Q.a), mpq_class(1, 2 * Q.a), mpz_class(-field.d_K)};
    mpz_class B = ringclass::detail::mod_pos(field.d_K, 2);
    Mat2 beta{Q.a, (Q.b - B) / 2, 0, 1};
    SurdPoint image = tau.mobius(beta.a, beta.b, beta.c, beta.d);
    if (!(image == field.tau_K())) throw std::logic_error("form_to_datum: beta_Q does not map tau_Q to tau_K");
    return {tau, beta};
}

// Replace Q by an equivalent form whose leading coefficient is coprime to
// N (needed so beta_Q is invertible mod N). Searches represented values
// Q(x, y) with gcd(x, y) = 1 and completes (x, y) to a unimodular matrix.
inline BinaryQF equivalent_form_coprime_to(const BinaryQF& Q, long N) {
    // explicit return type: deducing the gmpxx expression template here would
    // dangle its operand references once the lambda frame is gone
    auto val = [&](const mpz_class& x, const mpz_class& y) -> mpz_class {
        return Q.a * x * x + Q.b * x * y + Q.c * y * y;
    };
    if (gcd(Q.a, mpz_class(N)) == 1) return Q;
    for (long box = 1; box <= 4 * N + 4; ++box) {
        for (long x = -box; x <= box; ++x)
            for (long y = -box; y <= box; ++y) {
                if (std::gcd(std::abs(x), std::abs(y)) != 1) continue;
                mpz_class v = val(x, y);
                if (gcd(v, mpz_class(N)) != 1) continue;
                auto [g, s, t] = detail_g::ext_gcd(mpz_class(x), mpz_class(y));
                // U = [[x, -t],[y, s]], det = x s + t y = 1
                mpz_class p = x, q = -t, r = y, w = s;
                mpz_class a2 = Q.a * p * p + Q.b * p * r + Q.c * r * r;
                mpz_class b2 = 2 * Q.a * p * q + Q.b * (p * w + q * r) + 2 * Q.c * r * w;
                mpz_class c2 = Q.a * q * q + Q.b * q * w + Q.c * w * w;
                BinaryQF out{a2, b2, c2};
                if (out.disc() != Q.disc()) throw std::logic_error("equivalent_form_coprime_to: discriminant drifted");
                return out;
            }
    }
    throw std::logic_error("equivalent_form_coprime_to: no representative found");
}

// The full conjugate list: for every form class Q of discriminant d_K and
// every coset representative gamma, decompose gamma * beta_Q mod N and
// attach the evaluation point tau_Q. Length = class_number_order(field, N).
inline std::vector<GaloisDatum> conjugate_data(const QuadField& field, long N,
                                               bool reverse_scan = false) {
    auto reps = coset_reps(field, N, reverse_scan);
    auto forms = reduced_forms(mpz_class(field.d_K));
    std::vector<GaloisDatum> out;
    for (auto& Q0 : forms) {
        BinaryQF Q = equivalent_form_coprime_to(Q0, N);
        auto [tauQ, beta] = form_to_datum(Q, field);
        Mat2ModN betaN = Mat2ModN::of(N, beta);
        for (auto& rep : reps) {
            Mat2ModN m = rep.raw * betaN;
            out.push_back(detail_g::decompose(m, tauQ));
        }
    }
    return out;
}

}  // namespace galois
}  // namespace ringclass
