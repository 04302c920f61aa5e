#pragma once

// Rank-2 simple closed curves: Farey slopes, Christoffel words, the trace tree
// and the Weierstrass parity classes.

#include "group.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <tuple>
#include <vector>

namespace schottky {

/// Slope p/q of a simple closed curve on the torus; infinity is (1, 0).
/// Convention: 0/1 -> a, 1/0 -> b, 1/1 -> ab; negative slopes use b^-1 in place of b.
class Slope {
public:
    Slope(long long p, long long q)
    {
        if (q < 0 || (q == 0 && p < 0)) {
            p = -p;
            q = -q;
        }
        if (std::gcd(p < 0 ? -p : p, q) != 1)
            throw Error(ErrorKind::InvalidSlope, "curves", std::to_string(p) + "/" + std::to_string(q) + " is not reduced");
        p_ = p;
        q_ = q;
    }

    static Slope infinity() { return Slope(1, 0); }

    long long p() const { return p_; }
    long long q() const { return q_; }
    long long level() const { return (p_ < 0 ? -p_ : p_) + q_; }
    bool is_infinity() const { return q_ == 0; }

    std::string to_string() const { return std::to_string(p_) + "/" + std::to_string(q_); }

    friend bool operator==(const Slope&, const Slope&) = default;

    /// Deterministic enumeration order: by |p| + q, then by p.
    friend bool operator<(const Slope& x, const Slope& y)
    {
        return std::make_tuple(x.level(), x.p_, x.q_) < std::make_tuple(y.level(), y.p_, y.q_);
    }

private:
    long long p_ = 1;
    long long q_ = 0;
};

enum class WeierstrassClass { OddOdd, OddEven, EvenOdd };

inline const char* to_string(WeierstrassClass c)
{
    switch (c) {
    case WeierstrassClass::OddOdd: return "oddodd";
    case WeierstrassClass::OddEven: return "oddeven";
    case WeierstrassClass::EvenOdd: return "evenodd";
    }
    return "?";
}

inline WeierstrassClass weierstrass_class(const Slope& s)
{
    const bool p_odd = (s.p() % 2) != 0;
    const bool q_odd = (s.q() % 2) != 0;
    if (p_odd && q_odd)
        return WeierstrassClass::OddOdd;
    if (p_odd)
        return WeierstrassClass::OddEven;
    return WeierstrassClass::EvenOdd;
}

/// Traces (tr a, tr b, tr ab) of a chosen lift.
template <class T>
struct TraceTriple {
    Complex<T> x, y, z;

    /// Triple for the basis (a, b^-1): (x, y, xy - z).
    TraceTriple flipped() const { return {x, y, x * y - z}; }
};

template <class T>
TraceTriple<T> trace_triple(const MarkedSchottkyGroup<T>& g)
{
    if (g.rank() != 2)
        throw Error(ErrorKind::InvalidArgument, "curves", "trace triples need a rank-2 group");
    return {g.generator(0).trace(), g.generator(1).trace(), (g.generator(0) * g.generator(1)).trace()};
}

template <class T>
Complex<T> commutator_trace(const TraceTriple<T>& t)
{
    return fricke_commutator_trace(t.x, t.y, t.z);
}

namespace detail {

    struct SternBrocotNode {
        long long lp, lq, rp, rq;
    };

    // Depth-first walk over mediants of (0/1, 1/0) with p + q <= max_sum; visit(p, q, node) for each.
    template <class Visit>
    void stern_brocot_walk(long long max_sum, Visit&& visit)
    {
        std::vector<SternBrocotNode> stack {{0, 1, 1, 0}};
        while (!stack.empty()) {
            const auto n = stack.back();
            stack.pop_back();
            const long long mp = n.lp + n.rp, mq = n.lq + n.rq;
            if (mp + mq > max_sum)
                continue;
            visit(mp, mq);
            stack.push_back({mp, mq, n.rp, n.rq});
            stack.push_back({n.lp, n.lq, mp, mq});
        }
    }

} // namespace detail

/// Slopes p/q with p, q >= 0 and p + q <= max_sum (infinity included), sorted by (p + q, p).
inline std::vector<Slope> slopes_up_to(long long max_sum)
{
    if (max_sum < 1)
        throw Error(ErrorKind::InvalidArgument, "curves", "max_sum must be >= 1");
    std::vector<Slope> out {Slope(0, 1), Slope(1, 0)};
    detail::stern_brocot_walk(max_sum, [&](long long p, long long q) { out.emplace_back(p, q); });
    std::sort(out.begin(), out.end());
    return out;
}

/// All of Q u {inf} with |p| + q <= max_sum, sorted by (|p| + q, p).
inline std::vector<Slope> signed_slopes_up_to(long long max_sum)
{
    auto out = slopes_up_to(max_sum);
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i)
        if (out[i].p() > 0 && out[i].q() > 0)
            out.emplace_back(-out[i].p(), out[i].q());
    std::sort(out.begin(), out.end());
    return out;
}

/// Lower Christoffel word: q letters a and |p| letters b (or b^-1 for negative p).
inline Word christoffel_word(const Slope& s)
{
    const long long p = s.p() < 0 ? -s.p() : s.p();
    const long long n = p + s.q();
    const int b = s.p() < 0 ? -2 : 2;
    std::vector<int> letters;
    letters.reserve(static_cast<std::size_t>(n));
    for (long long i = 1; i <= n; ++i)
        letters.push_back((i * p) / n > ((i - 1) * p) / n ? b : 1);
    return Word(std::move(letters));
}

/// Trace of the Christoffel word of s, by Stern-Brocot descent with the exchange w -> uv - w.
template <class T>
Complex<T> trace_of_slope(const TraceTriple<T>& t, const Slope& s)
{
    const TraceTriple<T> base = s.p() < 0 ? t.flipped() : t;
    const long long p = s.p() < 0 ? -s.p() : s.p(), q = s.q();
    if (p == 0)
        return base.x;
    if (q == 0)
        return base.y;
    long long lp = 0, lq = 1, rp = 1, rq = 0;
    Complex<T> tl = base.x, tr = base.y, tm = base.z;
    for (;;) {
        const long long mp = lp + rp, mq = lq + rq;
        if (mp == p && mq == q)
            return tm;
        if (p * mq < q * mp) {
            // descend left: (L, M)
            const Complex<T> next = tl * tm - tr;
            rp = mp;
            rq = mq;
            tr = tm;
            tm = next;
        } else {
            const Complex<T> next = tm * tr - tl;
            lp = mp;
            lq = mq;
            tl = tm;
            tm = next;
        }
    }
}

template <class T>
struct SlopeTrace {
    Slope slope;
    Complex<T> trace;
};

/// Traces of every slope in signed_slopes_up_to(max_sum) (or slopes_up_to when signed_slopes
/// is false), one tree walk per half; each trace is computed once from its two Farey parents.
template <class T>
std::vector<SlopeTrace<T>> slope_traces(const TraceTriple<T>& t, long long max_sum, bool signed_slopes = true)
{
    if (max_sum < 1)
        throw Error(ErrorKind::InvalidArgument, "curves", "max_sum must be >= 1");
    std::vector<SlopeTrace<T>> out {{Slope(0, 1), t.x}, {Slope(1, 0), t.y}};

    struct Node {
        long long lp, lq, rp, rq;
        Complex<T> tl, tr, tm;
    };
    auto walk = [&](const TraceTriple<T>& base, long long sign) {
        std::vector<Node> stack {{0, 1, 1, 0, base.x, base.y, base.z}};
        while (!stack.empty()) {
            const Node n = stack.back();
            stack.pop_back();
            const long long mp = n.lp + n.rp, mq = n.lq + n.rq;
            if (mp + mq > max_sum)
                continue;
            out.push_back({Slope(sign * mp, mq), n.tm});
            stack.push_back({mp, mq, n.rp, n.rq, n.tm, n.tr, n.tm * n.tr - n.tl});
            stack.push_back({n.lp, n.lq, mp, mq, n.tl, n.tm, n.tl * n.tm - n.tr});
        }
    };
    walk(t, 1);
    if (signed_slopes)
        walk(t.flipped(), -1);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.slope < b.slope; });
    return out;
}

/// Farey parents (left, right) of a slope with p, q >= 1 (left < s < right).
inline std::pair<Slope, Slope> farey_parents(const Slope& s)
{
    const long long p = s.p() < 0 ? -s.p() : s.p(), q = s.q();
    if (p == 0 || q == 0)
        throw Error(ErrorKind::InvalidArgument, "curves", "0/1 and 1/0 have no Farey parents");
    long long lp = 0, lq = 1, rp = 1, rq = 0;
    for (;;) {
        const long long mp = lp + rp, mq = lq + rq;
        if (mp == p && mq == q)
            break;
        if (p * mq < q * mp) {
            rp = mp;
            rq = mq;
        } else {
            lp = mp;
            lq = mq;
        }
    }
    const long long sg = s.p() < 0 ? -1 : 1;
    return {Slope(sg * lp, lq), Slope(sg * rp, rq)};
}

// ---------------------------------------------------------------------------
// Weierstrass half-turns

template <class T>
struct WeierstrassInvolutions {
    Mat2<T> h1, h2, h3;
};

/// Half-turns with a = -H3 H2 and b = -H1 H3. H3 solves tr H3 = tr(H3 A) = tr(B H3) = 0,
/// det H3 = 1; its (1,2) entry is fixed to have non-negative real part (then imaginary part).
template <class T>
WeierstrassInvolutions<T> weierstrass_involutions(const MarkedSchottkyGroup<T>& g)
{
    if (g.rank() != 2)
        throw Error(ErrorKind::InvalidArgument, "curves", "Weierstrass involutions need rank 2");
    const Mat2<T>& a = g.generator(0);
    const Mat2<T>& b = g.generator(1);
    // H = [[al, be], [ga, -al]]: tr(H M) = al (m11 - m22) + be m21 + ga m12.
    const std::array<Complex<T>, 3> u {a.a() - a.d(), a.c(), a.b()};
    const std::array<Complex<T>, 3> v {b.a() - b.d(), b.c(), b.b()};
    const std::array<Complex<T>, 3> n {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
    auto len = [](const std::array<Complex<T>, 3>& x) {
        return std::sqrt(std::norm(x[0]) + std::norm(x[1]) + std::norm(x[2]));
    };
    if (len(n) <= T(1e-12) * len(u) * len(v))
        throw Error(ErrorKind::DegenerateFactorization, "curves", "trace conditions are rank deficient");
    const Complex<T> det = -n[0] * n[0] - n[1] * n[2];
    if (std::abs(det) <= T(1e-12) * std::norm(len(n)))
        throw Error(ErrorKind::DegenerateFactorization, "curves", "traceless solution is nilpotent");
    const Complex<T> s = std::sqrt(det);
    Complex<T> al = n[0] / s, be = n[1] / s, ga = n[2] / s;
    if (be.real() < 0 || (be.real() == T(0) && be.imag() < 0)) {
        al = -al;
        be = -be;
        ga = -ga;
    }
    const Mat2<T> h3(al, be, ga, -al);
    return {b * h3, h3 * a, h3};
}

} // namespace schottky
