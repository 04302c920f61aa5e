#pragma once

// Marked Schottky groups: generator lifts, circle-pairing certificates,
// normalized parameters, fuchsian markings and the fundamental-domain constant kappa.

#include "moebius.hpp"
#include "word.hpp"

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace schottky {

template <class T>
struct CirclePair {
    Circle<T> inner;  // C_i, mapped by the generator onto C'_i
    Circle<T> outer;  // C'_i
};

/// Circles live in the working plane of `frame`: they certify frame * g_i * frame^-1.
/// Plane distances are Moebius invariant, so kappa does not depend on the frame.
template <class T>
struct CircleSystem {
    std::vector<CirclePair<T>> pairs;
    Mat2<T> frame = Mat2<T>::identity();

    std::vector<Circle<T>> all() const
    {
        std::vector<Circle<T>> out;
        for (const auto& p : pairs) {
            out.push_back(p.inner);
            out.push_back(p.outer);
        }
        return out;
    }
};

template <class T>
class MarkedSchottkyGroup {
public:
    explicit MarkedSchottkyGroup(std::vector<Mat2<T>> generators, std::optional<CircleSystem<T>> circles = std::nullopt)
        : generators_(std::move(generators))
        , circles_(std::move(circles))
    {
        if (generators_.size() < 2)
            throw Error(ErrorKind::InvalidArgument, "schottky", "rank must be at least 2");
        for (const auto& g : generators_)
            require_loxodromic(g.trace(), "schottky");
        if (circles_ && circles_->pairs.size() != generators_.size())
            throw Error(ErrorKind::InvalidArgument, "schottky", "circle system size differs from rank");
    }

    int rank() const { return static_cast<int>(generators_.size()); }
    const std::vector<Mat2<T>>& generators() const { return generators_; }
    const Mat2<T>& generator(int i) const { return generators_.at(static_cast<std::size_t>(i)); }
    const std::optional<CircleSystem<T>>& circles() const { return circles_; }

    MarkedSchottkyGroup with_circles(CircleSystem<T> cs) const { return MarkedSchottkyGroup(generators_, std::move(cs)); }
    MarkedSchottkyGroup without_circles() const { return MarkedSchottkyGroup(generators_); }

private:
    std::vector<Mat2<T>> generators_;
    std::optional<CircleSystem<T>> circles_;
};

/// Normalized coordinates: Fix-(a1) = 0, Fix+(a1) = inf, Fix-(a2) = 1 are implicit;
/// fixed_points holds Fix+(a2), Fix-(a3), Fix+(a3), ..., Fix+(an).
template <class T>
struct SchottkyParameters {
    std::vector<ExtendedPoint<T>> fixed_points;
    std::vector<ComplexLength<T>> lengths;

    int rank() const { return static_cast<int>(lengths.size()); }
};

template <class T>
Mat2<T> word_matrix(const MarkedSchottkyGroup<T>& g, const Word& w)
{
    Mat2<T> m;
    for (int l : w.letters()) {
        const int idx = std::abs(l) - 1;
        if (idx >= g.rank())
            throw Error(ErrorKind::InvalidWord, "schottky", "letter beyond group rank");
        m = m * (l > 0 ? g.generator(idx) : g.generator(idx).inverse());
    }
    return m;
}

template <class T>
MarkedSchottkyGroup<T> change_lift(const MarkedSchottkyGroup<T>& g, const std::vector<bool>& signs)
{
    if (static_cast<int>(signs.size()) != g.rank())
        throw Error(ErrorKind::InvalidArgument, "schottky", "lift sign vector length differs from rank");
    std::vector<Mat2<T>> gens;
    for (int i = 0; i < g.rank(); ++i)
        gens.push_back(signs[static_cast<std::size_t>(i)] ? -g.generator(i) : g.generator(i));
    return MarkedSchottkyGroup<T>(std::move(gens), g.circles());
}

/// Conjugates group and circles by the same map.
template <class T>
MarkedSchottkyGroup<T> conjugate_group(const MarkedSchottkyGroup<T>& g, const Mat2<T>& by)
{
    std::vector<Mat2<T>> gens;
    for (const auto& m : g.generators())
        gens.push_back(conjugate(m, by));
    std::optional<CircleSystem<T>> cs = g.circles();
    if (cs)
        cs->frame = cs->frame * by.inverse();
    return MarkedSchottkyGroup<T>(std::move(gens), std::move(cs));
}

// ---------------------------------------------------------------------------
// Circle-pairing certificates

enum class CertificateClause { None, Count, Mapping, Disjointness, Orientation };

inline const char* to_string(CertificateClause c)
{
    switch (c) {
    case CertificateClause::None: return "none";
    case CertificateClause::Count: return "count";
    case CertificateClause::Mapping: return "mapping";
    case CertificateClause::Disjointness: return "disjointness";
    case CertificateClause::Orientation: return "orientation";
    }
    return "?";
}

struct Certificate {
    bool pass = false;
    CertificateClause failed = CertificateClause::None;
    std::string detail;

    explicit operator bool() const { return pass; }
};

inline constexpr double disjoint_margin = 1e-9;

/// Checks the ping-pong witness: g_i(C_i) = C'_i, all disks disjoint, and the exterior
/// of all circles lands inside the disk of C'_i.
template <class T>
Certificate verify_circle_pairing(const MarkedSchottkyGroup<T>& g, const CircleSystem<T>& cs, T eps)
{
    auto fail = [](CertificateClause c, std::string d) { return Certificate {false, c, std::move(d)}; };
    if (static_cast<int>(cs.pairs.size()) != g.rank())
        return fail(CertificateClause::Count, "expected one circle pair per generator");

    std::vector<Mat2<T>> gens;
    for (const auto& m : g.generators())
        gens.push_back(conjugate(m, cs.frame));

    for (int i = 0; i < g.rank(); ++i) {
        const auto& pr = cs.pairs[static_cast<std::size_t>(i)];
        try {
            const Circle<T> img = map_circle(gens[static_cast<std::size_t>(i)], pr.inner);
            const T scale = std::max<T>(1, pr.outer.radius);
            if (std::abs(img.center - pr.outer.center) > eps * scale || std::abs(img.radius - pr.outer.radius) > eps * scale)
                return fail(CertificateClause::Mapping, "generator " + std::to_string(i) + " does not map C onto C'");
        } catch (const Error&) {
            return fail(CertificateClause::Mapping, "generator " + std::to_string(i) + " maps C to a line");
        }
    }

    const auto circles = cs.all();
    for (std::size_t i = 0; i < circles.size(); ++i)
        for (std::size_t j = i + 1; j < circles.size(); ++j)
            if (!(inversive_distance(circles[i], circles[j]) > 1 + T(disjoint_margin)))
                return fail(CertificateClause::Disjointness,
                    "circles " + std::to_string(i) + " and " + std::to_string(j) + " are not disjoint");

    // Exterior sample points: infinity plus a ring of far points.
    T reach = 0;
    for (const auto& c : circles)
        reach = std::max(reach, std::abs(c.center) + c.radius);
    std::vector<ExtendedPoint<T>> probes {ExtendedPoint<T>::infinity()};
    for (int k = 0; k < 8; ++k)
        probes.emplace_back(std::polar(4 * reach + 1, 2 * pi<T> * T(k) / 8 + T(0.1)));
    for (int i = 0; i < g.rank(); ++i) {
        const auto& outer = cs.pairs[static_cast<std::size_t>(i)].outer;
        for (const auto& z : probes) {
            const auto w = mobius_apply(gens[static_cast<std::size_t>(i)], z);
            if (w.is_infinity() || !outer.contains(w.value()))
                return fail(CertificateClause::Orientation,
                    "generator " + std::to_string(i) + " does not send the exterior into the disk of C'");
        }
    }
    return Certificate {true, CertificateClause::None, {}};
}

template <class T>
T kappa(const CircleSystem<T>& cs)
{
    const auto circles = cs.all();
    T best = std::numeric_limits<T>::infinity();
    for (std::size_t i = 0; i < circles.size(); ++i)
        for (std::size_t j = i + 1; j < circles.size(); ++j)
            best = std::min(best, plane_distance(circles[i], circles[j]));
    return best;
}

namespace detail {

    template <class T>
    std::vector<Complex<T>> certificate_probe_points(const MarkedSchottkyGroup<T>& g)
    {
        // Candidate points to send to infinity: scale from the finite fixed points.
        T reach = 1;
        bool real = true;
        for (const auto& m : g.generators()) {
            const auto fp = fixed_points(m);
            for (const auto& p : {fp.attracting, fp.repelling}) {
                if (p.is_infinity())
                    continue;
                reach = std::max(reach, std::abs(p.value()));
                real = real && std::abs(p.value().imag()) <= T(1e-9) * std::max<T>(1, std::abs(p.value()));
            }
            real = real && m.is_real(T(1e-9) * std::max<T>(1, m.norm()));
        }
        std::vector<Complex<T>> pts;
        const int real_steps = 240;
        for (int k = 0; k <= real_steps; ++k) {
            const T x = -2 * reach + 4 * reach * (T(k) + T(0.37)) / T(real_steps);
            pts.emplace_back(x, 0);
        }
        for (T r : {T(0.5), T(1), T(2), T(4)}) {
            const T rad = r * reach;
            for (int k = 0; k < 48; ++k) {
                const T th = 2 * pi<T> * (T(k) + T(0.5)) / 48;
                if (real && std::abs(std::sin(th)) < T(1e-6))
                    continue;
                pts.push_back(std::polar(rad, th));
            }
        }
        return pts;
    }

} // namespace detail

namespace detail {

    // Candidate pairs for one generator in the working plane: C must enclose the repelling
    // fixed point and the pole (so that g sends the exterior of C into the bounded disk of C').
    template <class T>
    std::vector<CirclePair<T>> pairing_candidates(const Mat2<T>& m)
    {
        std::vector<CirclePair<T>> out;
        if (std::abs(m.c()) <= std::numeric_limits<T>::min())
            return out;
        const auto fp = fixed_points(m);
        if (fp.repelling.is_infinity() || fp.attracting.is_infinity())
            return out;
        const Complex<T> rep = fp.repelling.value();
        const Complex<T> pole = -m.d() / m.c();
        const T iso = 1 / std::abs(m.c());
        static constexpr std::array<double, 7> offsets {1, 0.5, 0.75, 0.25, 0, 1.25, -0.25};
        static constexpr std::array<double, 7> grow {1.05, 1.2, 1.5, 2, 3, 5, 8};
        for (double alpha : offsets) {
            const Complex<T> center = rep + T(alpha) * (pole - rep);
            const T base = std::max(std::abs(center - rep), std::abs(center - pole));
            std::vector<T> radii;
            for (double f : grow)
                radii.push_back(T(f) * std::max(base, iso * T(1e-3)));
            if (alpha == 1)
                for (double s : {1.0, 0.8, 1.25, 0.6, 1.6, 0.4, 2.5})
                    if (T(s) * iso > base)
                        radii.push_back(T(s) * iso);
            for (T r : radii) {
                try {
                    const Circle<T> inner(center, r);
                    const Circle<T> outer = map_circle(m, inner);
                    if (inversive_distance(inner, outer) > 1 + T(disjoint_margin))
                        out.push_back({inner, outer});
                } catch (const Error&) {
                }
            }
        }
        return out;
    }

    template <class T>
    bool pair_fits(const CirclePair<T>& p, const std::vector<Circle<T>>& chosen)
    {
        for (const auto& c : chosen)
            if (!(inversive_distance(p.inner, c) > 1 + T(disjoint_margin))
                || !(inversive_distance(p.outer, c) > 1 + T(disjoint_margin)))
                return false;
        return true;
    }

    // Exhaustive (budgeted) search for the disjoint choice maximizing the minimum
    // inversive distance, i.e. the largest kappa reachable from these candidates.
    template <class T>
    void best_pairs(const std::vector<std::vector<CirclePair<T>>>& cands, std::size_t i, T current,
        std::vector<CirclePair<T>>& picked, std::vector<Circle<T>>& chosen, std::size_t& budget,
        T& best, std::vector<CirclePair<T>>& best_pick)
    {
        if (i == cands.size()) {
            if (current > best) {
                best = current;
                best_pick = picked;
            }
            return;
        }
        for (const auto& p : cands[i]) {
            if (budget == 0)
                return;
            --budget;
            T m = std::min(current, inversive_distance(p.inner, p.outer));
            bool ok = m > best;
            for (std::size_t k = 0; ok && k < chosen.size(); ++k) {
                m = std::min({m, inversive_distance(p.inner, chosen[k]), inversive_distance(p.outer, chosen[k])});
                ok = m > std::max<T>(best, 1 + T(disjoint_margin));
            }
            if (!ok)
                continue;
            picked.push_back(p);
            chosen.push_back(p.inner);
            chosen.push_back(p.outer);
            best_pairs(cands, i + 1, m, picked, chosen, budget, best, best_pick);
            picked.pop_back();
            chosen.pop_back();
            chosen.pop_back();
        }
    }

} // namespace detail

/// Semi-decision: over a set of working frames z -> 1/(w - z), searches circle pairs
/// C_i, g_i(C_i) for a disjoint system passing verify_circle_pairing. An empty result
/// says nothing about classicality.
template <class T>
std::optional<CircleSystem<T>> attempt_classical_certificate(const MarkedSchottkyGroup<T>& g)
{
    const T check_eps = T(1e-8);
    std::optional<CircleSystem<T>> best_cs;
    T best = 1 + T(disjoint_margin);

    auto try_frame = [&](const Mat2<T>& frame) {
        std::vector<std::vector<CirclePair<T>>> cands;
        for (const auto& m : g.generators()) {
            const Mat2<T> w = conjugate(m, frame);
            if (!is_strictly_loxodromic(w))
                return;
            cands.push_back(detail::pairing_candidates(w));
            if (cands.back().empty())
                return;
        }
        std::vector<CirclePair<T>> picked, pick;
        std::vector<Circle<T>> chosen;
        std::size_t budget = 20000;
        T frame_best = best;
        detail::best_pairs(cands, 0, std::numeric_limits<T>::infinity(), picked, chosen, budget, frame_best, pick);
        if (pick.empty())
            return;
        CircleSystem<T> cs {std::move(pick), frame};
        if (verify_circle_pairing(g, cs, check_eps)) {
            best = frame_best;
            best_cs = std::move(cs);
        }
    };

    try_frame(Mat2<T>::identity());
    for (const auto& w : detail::certificate_probe_points(g))
        try_frame(Mat2<T>(0, 1, -1, w)); // z -> 1 / (w - z)
    return best_cs;
}

// ---------------------------------------------------------------------------
// Parameters

template <class T>
void check_distinct(const std::vector<ExtendedPoint<T>>& pts)
{
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (chordal_distance(pts[i], pts[j]) <= T(tol::degenerate))
                throw Error(ErrorKind::DegenerateFixedPoints, "schottky",
                    "fixed points " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
}

/// All 2n fixed points in the order Fix-(a1), Fix+(a1), Fix-(a2), Fix+(a2), ...
template <class T>
std::vector<ExtendedPoint<T>> all_fixed_points(const SchottkyParameters<T>& p)
{
    std::vector<ExtendedPoint<T>> pts {ExtendedPoint<T>(T(0)), ExtendedPoint<T>::infinity(), ExtendedPoint<T>(T(1))};
    pts.insert(pts.end(), p.fixed_points.begin(), p.fixed_points.end());
    return pts;
}

template <class T>
MarkedSchottkyGroup<T> from_parameters(const SchottkyParameters<T>& p)
{
    const int n = p.rank();
    if (n < 2 || static_cast<int>(p.fixed_points.size()) != 2 * n - 3)
        throw Error(ErrorKind::InvalidArgument, "schottky", "parameters need n >= 2 lengths and 2n-3 fixed points");
    const auto pts = all_fixed_points(p);
    check_distinct(pts);
    std::vector<Mat2<T>> gens;
    for (int i = 0; i < n; ++i) {
        const auto& lm = pts[static_cast<std::size_t>(2 * i)];
        const auto& lp = pts[static_cast<std::size_t>(2 * i + 1)];
        gens.push_back(loxodromic_from(lm, lp, p.lengths[static_cast<std::size_t>(i)].value));
    }
    return MarkedSchottkyGroup<T>(std::move(gens));
}

/// Conjugating map that brings g into the normal form Fix-(a1)=0, Fix+(a1)=inf, Fix-(a2)=1.
template <class T>
Mat2<T> normalizing_conjugator(const MarkedSchottkyGroup<T>& g)
{
    const auto f1 = fixed_points(g.generator(0));
    const auto f2 = fixed_points(g.generator(1));
    return normalizing_map(f1.repelling, f1.attracting, f2.repelling);
}

template <class T>
SchottkyParameters<T> to_parameters(const MarkedSchottkyGroup<T>& g)
{
    const Mat2<T> norm = normalizing_conjugator(g);
    SchottkyParameters<T> p;
    std::vector<ExtendedPoint<T>> raw;
    for (int i = 0; i < g.rank(); ++i) {
        const auto f = fixed_points(g.generator(i));
        raw.push_back(f.repelling);
        raw.push_back(f.attracting);
        p.lengths.push_back(complex_length(g.generator(i)));
    }
    check_distinct(raw);
    for (std::size_t k = 3; k < raw.size(); ++k)
        p.fixed_points.push_back(mobius_apply(norm, raw[k]));
    return p;
}

template <class T>
bool approx_equal(const SchottkyParameters<T>& x, const SchottkyParameters<T>& y, T eps)
{
    if (x.rank() != y.rank() || x.fixed_points.size() != y.fixed_points.size())
        return false;
    for (std::size_t i = 0; i < x.fixed_points.size(); ++i)
        if (!approx_equal(x.fixed_points[i], y.fixed_points[i], eps))
            return false;
    for (std::size_t i = 0; i < x.lengths.size(); ++i) {
        const Complex<T> d = x.lengths[i].value - y.lengths[i].value;
        if (std::abs(Complex<T>(d.real(), canonical_angle(d.imag()))) > eps * std::max<T>(1, std::abs(y.lengths[i].value)))
            return false;
    }
    return true;
}

template <class T>
bool is_fuchsian(const MarkedSchottkyGroup<T>& g, T eps = T(1e-9))
{
    const auto p = to_parameters(g);
    for (const auto& z : p.fixed_points)
        if (!z.is_infinity() && std::abs(z.value().imag()) > eps * std::max<T>(1, std::abs(z.value())))
            return false;
    for (const auto& l : p.lengths)
        if (std::abs(l.value.imag()) > eps)
            return false;
    return true;
}

// ---------------------------------------------------------------------------
// Fuchsian markings of the one-holed torus and the pair of pants

/// Fricke polynomial x^2 + y^2 + z^2 - xyz - 2 = tr[a, b].
template <class T>
Complex<T> fricke_commutator_trace(Complex<T> x, Complex<T> y, Complex<T> z)
{
    return x * x + y * y + z * z - x * y * z - T(2);
}

namespace detail {

    // Real lifts with tr A = x (A diagonal), tr B = y, tr AB = z.
    template <class T>
    MarkedSchottkyGroup<T> real_marking_from_triple(T x, T y, T z)
    {
        if (!(std::abs(x) > 2) || !(std::abs(y) > 2))
            throw Error(ErrorKind::NotHyperbolicTriple, "schottky", "|tr a| and |tr b| must exceed 2");
        const T sx = x > 0 ? T(1) : T(-1);
        const T ax = std::abs(x);
        const T lam = sx * (ax + std::sqrt(ax * ax - 4)) / 2;
        const T p = (z - y / lam) / (lam - 1 / lam);
        const T s = y - p;
        const T qr = p * s - 1;
        T q, r;
        if (qr >= 0) {
            q = std::sqrt(qr);
            r = q;
        } else {
            q = std::sqrt(-qr);
            r = -q;
        }
        if (q == T(0))
            throw Error(ErrorKind::NotHyperbolicTriple, "schottky", "B shares a fixed point with A");
        const Mat2<T> a = Mat2<T>::diagonal(Complex<T>(lam));
        const Mat2<T> b {Complex<T>(p), Complex<T>(q), Complex<T>(r), Complex<T>(s)};
        return MarkedSchottkyGroup<T>(std::vector<Mat2<T>> {a, b});
    }

} // namespace detail

/// One-holed torus with trace triple (x, y, z) = (tr a, tr b, tr ab); the boundary has tr[a,b] < -2.
template <class T>
MarkedSchottkyGroup<T> torus_fuchsian_marking(T x, T y, T z)
{
    if (!(x > 2 && y > 2 && z > 2))
        throw Error(ErrorKind::NotHyperbolicTriple, "schottky", "torus triple needs x, y, z > 2");
    const T k = x * x + y * y + z * z - x * y * z - 2;
    if (std::abs(k + 2) <= T(1e-12) * std::max<T>(1, x * y * z))
        throw Error(ErrorKind::CuspDegenerate, "schottky", "tr[a,b] = -2: the boundary is a cusp");
    if (!(k < -2))
        throw Error(ErrorKind::NotHyperbolicTriple, "schottky", "tr[a,b] must be < -2");
    auto g = detail::real_marking_from_triple(x, y, z);
    if (auto cs = attempt_classical_certificate(g))
        return g.with_circles(*cs);
    return g;
}

/// Pair of pants with boundary lengths l0, l1, l2 for [a], [b], [ab]; lift signs (+, +, -).
template <class T>
MarkedSchottkyGroup<T> pants_fuchsian_marking(T l0, T l1, T l2)
{
    if (!(l0 > 0 && l1 > 0 && l2 > 0))
        throw Error(ErrorKind::InvalidArgument, "schottky", "boundary lengths must be positive");
    auto g = detail::real_marking_from_triple<T>(2 * std::cosh(l0 / 2), 2 * std::cosh(l1 / 2), -2 * std::cosh(l2 / 2));
    if (auto cs = attempt_classical_certificate(g))
        return g.with_circles(*cs);
    return g;
}

} // namespace schottky
