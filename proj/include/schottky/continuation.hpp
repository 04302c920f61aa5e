#pragma once

// Deformation paths in normalized parameter space and continuation of half lengths.

#include "group.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace schottky {

/// Piecewise linear path; waypoint k sits at t = k / (waypoints - 1).
template <class T>
class DeformationPath {
public:
    explicit DeformationPath(std::vector<SchottkyParameters<T>> waypoints)
        : waypoints_(std::move(waypoints))
    {
        if (waypoints_.empty())
            throw Error(ErrorKind::InvalidArgument, "continuation", "path needs a waypoint");
        for (const auto& w : waypoints_)
            if (w.rank() != waypoints_.front().rank() || w.fixed_points.size() != waypoints_.front().fixed_points.size())
                throw Error(ErrorKind::InvalidArgument, "continuation", "waypoints of different rank");
        for (std::size_t k = 1; k < waypoints_.size(); ++k) {
            if (approx_equal(waypoints_[k - 1], waypoints_[k], T(1e-14)))
                throw Error(ErrorKind::InvalidArgument, "continuation", "consecutive waypoints coincide");
            for (std::size_t i = 0; i < waypoints_[k].fixed_points.size(); ++i)
                if (waypoints_[k - 1].fixed_points[i].is_infinity() != waypoints_[k].fixed_points[i].is_infinity())
                    throw Error(ErrorKind::InvalidArgument, "continuation", "cannot interpolate to or from infinity");
        }
    }

    const std::vector<SchottkyParameters<T>>& waypoints() const { return waypoints_; }
    std::size_t segments() const { return waypoints_.size() - 1; }

    /// Parameters at t in [0, 1]; lengths interpolate as complex numbers, not mod 2 pi i.
    SchottkyParameters<T> at(T t) const
    {
        if (segments() == 0)
            return waypoints_.front();
        t = std::clamp(t, T(0), T(1));
        const T s = t * T(segments());
        const std::size_t k = std::min(static_cast<std::size_t>(s), segments() - 1);
        const T u = s - T(k);
        const auto& p = waypoints_[k];
        const auto& q = waypoints_[k + 1];
        if (u == T(0))
            return p;
        if (u == T(1))
            return q;
        SchottkyParameters<T> out;
        for (std::size_t i = 0; i < p.fixed_points.size(); ++i) {
            if (p.fixed_points[i].is_infinity())
                out.fixed_points.push_back(ExtendedPoint<T>::infinity());
            else
                out.fixed_points.emplace_back((T(1) - u) * p.fixed_points[i].value() + u * q.fixed_points[i].value());
        }
        for (std::size_t i = 0; i < p.lengths.size(); ++i)
            out.lengths.emplace_back((T(1) - u) * p.lengths[i].value + u * q.lengths[i].value);
        return out;
    }

    MarkedSchottkyGroup<T> group_at(T t) const { return from_parameters(at(t)); }

    DeformationPath reversed() const
    {
        return DeformationPath(std::vector<SchottkyParameters<T>>(waypoints_.rbegin(), waypoints_.rend()));
    }

private:
    std::vector<SchottkyParameters<T>> waypoints_;
};

/// Last continued half length per tracked word.
template <class T>
using BranchState = std::map<Word, HalfLength<T>>;

template <class T>
struct ContinuationResult {
    BranchState<T> state;
    std::size_t steps = 0;
    T max_jump = 0;
    T min_re = std::numeric_limits<T>::infinity();
    Word min_word;
    std::size_t min_sample = 0;
    /// Filled when recording: (t, continued value per tracked word in state order).
    std::vector<std::pair<T, std::vector<Complex<T>>>> samples;
};

namespace detail {

    // Branch of acosh(-tr/2) among {+-v + 2 pi i k} nearest to prev.
    template <class T>
    Complex<T> nearest_branch(Complex<T> v, Complex<T> prev)
    {
        const T two_pi = 2 * pi<T>;
        Complex<T> best;
        T best_d = std::numeric_limits<T>::infinity();
        for (const Complex<T> c : {v, -v}) {
            const T k = std::round((prev.imag() - c.imag()) / two_pi);
            const Complex<T> cand = c + Complex<T>(0, two_pi * k);
            const T d = std::abs(cand - prev);
            if (d < best_d) {
                best_d = d;
                best = cand;
            }
        }
        return best;
    }

    template <class T>
    HalfLength<T> to_half_length(Complex<T> continued)
    {
        const Complex<T> canon = canonical_strip(continued);
        const long k = std::lround((continued.imag() - canon.imag()) / (2 * pi<T>));
        return {canon, k};
    }

    // One pass at a fixed step count; nullopt when some jump exceeds pi/2.
    template <class T>
    std::optional<ContinuationResult<T>> continue_pass(const DeformationPath<T>& path, const std::vector<Word>& words,
        const BranchState<T>* start, std::size_t steps, bool record)
    {
        ContinuationResult<T> res;
        res.steps = steps;
        std::vector<Complex<T>> cur(words.size());
        for (std::size_t k = 0; k <= steps; ++k) {
            const T t = T(k) / T(steps);
            std::optional<MarkedSchottkyGroup<T>> g;
            try {
                g.emplace(path.group_at(t));
            } catch (const Error& e) {
                throw PathError(ErrorKind::PathExitsLoxodromy, e.what(), k);
            }
            for (std::size_t i = 0; i < words.size(); ++i) {
                const Complex<T> tr = word_matrix(*g, words[i]).trace();
                if (!(loxodromy_gap(tr) > T(tol::loxodromy)))
                    throw PathError(ErrorKind::PathExitsLoxodromy, "word " + words[i].to_string() + " is not strictly loxodromic", k);
                const Complex<T> v = acosh_positive(-tr / T(2));
                if (k == 0) {
                    auto it = start ? start->find(words[i]) : decltype(start->end()) {};
                    cur[i] = (start && it != start->end()) ? nearest_branch(v, it->second.continued()) : v;
                } else {
                    const Complex<T> next = nearest_branch(v, cur[i]);
                    const T jump = std::abs(next - cur[i]);
                    res.max_jump = std::max(res.max_jump, jump);
                    if (jump > pi<T> / 2)
                        return std::nullopt;
                    cur[i] = next;
                }
                if (cur[i].real() < res.min_re) {
                    res.min_re = cur[i].real();
                    res.min_word = words[i];
                    res.min_sample = k;
                }
            }
            if (record)
                res.samples.emplace_back(t, cur);
        }
        for (std::size_t i = 0; i < words.size(); ++i)
            res.state[words[i]] = to_half_length(cur[i]);
        return res;
    }

} // namespace detail

/// Tracks every word along the path, doubling the step count until no sample-to-sample jump
/// exceeds pi/2. With a start state, initial values are taken on the branch nearest to it.
template <class T>
ContinuationResult<T> continue_half_lengths(const DeformationPath<T>& path, const std::vector<Word>& words,
    std::size_t steps, const BranchState<T>* start = nullptr, bool record = false)
{
    if (steps < 1)
        throw Error(ErrorKind::InvalidArgument, "continuation", "steps must be >= 1");
    constexpr std::size_t max_steps = std::size_t(1) << 22;
    for (std::size_t n = steps; n <= max_steps; n *= 2)
        if (auto r = detail::continue_pass(path, words, start, n, record))
            return std::move(*r);
    throw Error(ErrorKind::NonConvergence, "continuation", "step refinement did not settle the branch");
}

template <class T>
HalfLength<T> continue_half_length(const DeformationPath<T>& path, const Word& w, std::size_t steps)
{
    return continue_half_lengths(path, std::vector<Word> {w}, steps).state.at(w);
}

template <class T>
struct PositivityReport {
    T min_re = 0;
    Word min_word;
    std::size_t min_sample = 0;
    std::size_t steps = 0;
    std::size_t words = 0;

    bool ok() const { return min_re > 0; }
};

template <class T>
PositivityReport<T> verify_positivity(const DeformationPath<T>& path, const std::vector<Word>& words, std::size_t steps)
{
    const auto r = continue_half_lengths(path, words, steps);
    return {r.min_re, r.min_word, r.min_sample, r.steps, words.size()};
}

/// Cyclically reduced words of length 1..max_length, one per cyclic rotation class.
inline std::vector<Word> tracked_words(int rank, std::size_t max_length)
{
    std::vector<Word> out;
    for (std::size_t len = 1; len <= max_length; ++len) {
        for (auto& w : cyclically_reduced_words(rank, len)) {
            bool least = true;
            for (std::size_t k = 1; k < len && least; ++k)
                least = !(w.rotated(k) < w);
            if (least)
                out.push_back(std::move(w));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Paths between groups

enum class PathStrategy { Direct, Maskit };

namespace detail {

    template <class T>
    T min_chordal_gap(const std::vector<ExtendedPoint<T>>& pts)
    {
        T m = std::numeric_limits<T>::infinity();
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                m = std::min(m, chordal_distance(pts[i], pts[j]));
        return m;
    }

    // Smallest separation of the 2n fixed points along the straight segment p -> q.
    template <class T>
    T segment_clearance(const SchottkyParameters<T>& p, const SchottkyParameters<T>& q)
    {
        if (approx_equal(p, q, T(1e-14)))
            return min_chordal_gap(all_fixed_points(p));
        DeformationPath<T> seg({p, q});
        T m = std::numeric_limits<T>::infinity();
        for (int k = 0; k <= 1000; ++k)
            m = std::min(m, min_chordal_gap(all_fixed_points(seg.at(T(k) / 1000))));
        return m;
    }

    template <class T>
    SchottkyParameters<T> with_lengths(SchottkyParameters<T> p, const std::vector<ComplexLength<T>>& lengths)
    {
        p.lengths = lengths;
        return p;
    }

    template <class T>
    std::vector<ComplexLength<T>> inflated(const std::vector<ComplexLength<T>>& lengths, T floor_re)
    {
        std::vector<ComplexLength<T>> out;
        for (const auto& l : lengths)
            out.emplace_back(Complex<T>(std::max(l.value.real(), floor_re), l.value.imag()));
        return out;
    }

    template <class T>
    void push_distinct(std::vector<SchottkyParameters<T>>& pts, SchottkyParameters<T> p)
    {
        if (pts.empty() || !approx_equal(pts.back(), p, T(1e-14)))
            pts.push_back(std::move(p));
    }

    // Moves fixed points from p to q, lifting them off the straight line when it passes
    // too close to another fixed point.
    template <class T>
    void fixed_point_leg(std::vector<SchottkyParameters<T>>& pts, const SchottkyParameters<T>& p,
        const SchottkyParameters<T>& q)
    {
        const T clearance = T(1e-2);
        if (segment_clearance(p, q) > clearance) {
            push_distinct(pts, q);
            return;
        }
        T scale = 1;
        for (std::size_t i = 0; i < p.fixed_points.size(); ++i)
            if (!p.fixed_points[i].is_infinity())
                scale = std::max({scale, std::abs(p.fixed_points[i].value()), std::abs(q.fixed_points[i].value())});
        for (T h : {T(1), T(-1), T(2), T(-2), T(4), T(-4)}) {
            SchottkyParameters<T> mid = p;
            for (std::size_t i = 0; i < p.fixed_points.size(); ++i) {
                if (p.fixed_points[i].is_infinity())
                    continue;
                const Complex<T> m = (p.fixed_points[i].value() + q.fixed_points[i].value()) / T(2);
                mid.fixed_points[i] = ExtendedPoint<T>(m + Complex<T>(0, h * scale * T(i + 1)));
            }
            if (segment_clearance(p, mid) > clearance && segment_clearance(mid, q) > clearance) {
                push_distinct(pts, mid);
                push_distinct(pts, q);
                return;
            }
        }
        throw Error(ErrorKind::PathValidationFailed, "continuation", "no detour keeps the fixed points apart");
    }

} // namespace detail

/// Checks every generator and every reduced word of length 2 for strict loxodromy at
/// samples + 1 evenly spaced points.
template <class T>
void validate_path(const DeformationPath<T>& path, std::size_t samples)
{
    if (samples < 1)
        throw Error(ErrorKind::InvalidArgument, "continuation", "need at least one sample");
    const int n = path.waypoints().front().rank();
    std::vector<Word> words = reduced_words(n, 1);
    for (auto& w : reduced_words(n, 2))
        words.push_back(std::move(w));
    for (std::size_t k = 0; k <= samples; ++k) {
        std::optional<MarkedSchottkyGroup<T>> g;
        try {
            g.emplace(path.group_at(T(k) / T(samples)));
        } catch (const Error& e) {
            throw PathError(ErrorKind::PathValidationFailed, e.what(), k);
        }
        for (const auto& w : words)
            if (!is_strictly_loxodromic(word_matrix(*g, w)))
                throw PathError(ErrorKind::PathValidationFailed, "word " + w.to_string() + " is not strictly loxodromic", k);
    }
}

/// Direct: straight line between normalized parameters. Maskit: inflate lengths to re >= 8,
/// move fixed points (with a detour if needed), then retarget lengths.
template <class T>
DeformationPath<T> path_between(const MarkedSchottkyGroup<T>& g0, const MarkedSchottkyGroup<T>& g1,
    PathStrategy strategy, std::size_t samples = 200)
{
    if (g0.rank() != g1.rank())
        throw Error(ErrorKind::InvalidArgument, "continuation", "groups of different rank");
    const auto p0 = to_parameters(g0);
    const auto p1 = to_parameters(g1);
    if (approx_equal(p0, p1, T(1e-12)))
        return DeformationPath<T>({p0});
    std::vector<SchottkyParameters<T>> pts {p0};
    if (strategy == PathStrategy::Direct) {
        pts.push_back(p1);
    } else {
        const T big = 8;
        const auto l0 = detail::inflated(p0.lengths, big);
        const auto l1 = detail::inflated(p1.lengths, big);
        detail::push_distinct(pts, detail::with_lengths(p0, l0));
        detail::fixed_point_leg(pts, detail::with_lengths(p0, l0), detail::with_lengths(p1, l0));
        detail::push_distinct(pts, detail::with_lengths(p1, l1));
        detail::push_distinct(pts, p1);
    }
    DeformationPath<T> path(std::move(pts));
    validate_path(path, samples);
    return path;
}

/// kappa of a certificate found at each waypoint, when one is found.
template <class T>
std::vector<std::optional<T>> certify_waypoints(const DeformationPath<T>& path)
{
    std::vector<std::optional<T>> out;
    for (const auto& w : path.waypoints()) {
        const auto cs = attempt_classical_certificate(from_parameters(w));
        out.push_back(cs ? std::optional<T>(kappa(*cs)) : std::nullopt);
    }
    return out;
}

} // namespace schottky
