#pragma once

// Complex 2x2 unimodular matrices, their action on the Riemann sphere,
// round circles, and the length / half-length conventions used everywhere else.

#include "errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>

namespace schottky {

template <class T>
using Complex = std::complex<T>;

template <class T>
inline constexpr T pi = std::numbers::pi_v<T>;

// Default numeric tolerances (absolute, desk scale).
namespace tol {
inline constexpr double det = 1e-12;
inline constexpr double det_renorm = 1e-14;
inline constexpr double loxodromy = 1e-10;
inline constexpr double degenerate = 1e-12;
inline constexpr double circles_meet = 1e-12;
inline constexpr double branch_pole = 1e-14;
inline constexpr double image_line = 1e-12;
} // namespace tol

template <class T>
bool is_finite(Complex<T> z)
{
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Reduces an imaginary part into (-pi, pi].
template <class T>
T canonical_angle(T theta)
{
    const T two_pi = 2 * pi<T>;
    theta = std::remainder(theta, two_pi);
    if (theta <= -pi<T>)
        theta += two_pi;
    return theta;
}

template <class T>
Complex<T> canonical_strip(Complex<T> z)
{
    return {z.real(), canonical_angle(z.imag())};
}

/// Principal log with imaginary part in (-pi, pi]; a signed zero never produces -pi.
template <class T>
Complex<T> log_principal(Complex<T> w)
{
    if (w.imag() == T(0))
        w = Complex<T>(w.real(), T(0));
    return std::log(w);
}

/// tanh^-1 with imaginary part in (-pi/2, pi/2].
template <class T>
Complex<T> atanh_principal(Complex<T> w)
{
    const Complex<T> one(1);
    if (std::abs(w - one) <= T(tol::branch_pole) || std::abs(w + one) <= T(tol::branch_pole))
        throw Error(ErrorKind::BranchPole, "moebius", "atanh argument at +-1");
    if (std::abs(w) < T(1e-3)) {
        // odd series; the log form cancels to nothing for tiny w
        const Complex<T> w2 = w * w;
        Complex<T> s = T(1) / T(13);
        for (int k = 11; k >= 1; k -= 2)
            s = T(1) / T(k) + w2 * s;
        return w * s;
    }
    Complex<T> v = T(0.5) * log_principal((one + w) / (one - w));
    if (v.imag() <= -pi<T> / 2)
        v += Complex<T>(0, pi<T>);
    return v;
}

/// cosh^-1 with real part >= 0 and imaginary part in (-pi, pi].
template <class T>
Complex<T> acosh_positive(Complex<T> w)
{
    if (w.imag() == T(0))
        w = Complex<T>(w.real(), T(0));
    Complex<T> v = std::acosh(w);
    if (v.real() < 0)
        v = -v;
    if (v.real() == T(0) && v.imag() < 0)
        v = -v;
    return canonical_strip(v);
}

/// Complex arctangent, atan(w) = atanh(i w) / i.
template <class T>
Complex<T> atan_principal(Complex<T> w)
{
    const Complex<T> i(0, 1);
    return atanh_principal(i * w) / i;
}

/// A point of the extended complex plane.
template <class T>
class ExtendedPoint {
public:
    ExtendedPoint() = default; // infinity
    ExtendedPoint(Complex<T> z)
        : z_(z)
    {
        if (!is_finite(z))
            throw Error(ErrorKind::InvalidArgument, "moebius", "non-finite coordinate; use ExtendedPoint::infinity()");
    }
    ExtendedPoint(T x)
        : ExtendedPoint(Complex<T>(x, 0))
    {
    }

    static ExtendedPoint infinity() { return ExtendedPoint(); }

    bool is_infinity() const { return !z_.has_value(); }
    Complex<T> value() const { return *z_; }

    friend bool approx_equal(const ExtendedPoint& p, const ExtendedPoint& q, T eps)
    {
        if (p.is_infinity() || q.is_infinity())
            return p.is_infinity() == q.is_infinity();
        return std::abs(p.value() - q.value()) <= eps * std::max<T>(1, std::abs(q.value()));
    }

    friend std::ostream& operator<<(std::ostream& os, const ExtendedPoint& p)
    {
        if (p.is_infinity())
            return os << "inf";
        return os << p.value();
    }

private:
    std::optional<Complex<T>> z_;
};

/// Chordal distance on the Riemann sphere; handles infinity uniformly.
template <class T>
T chordal_distance(const ExtendedPoint<T>& p, const ExtendedPoint<T>& q)
{
    if (p.is_infinity() && q.is_infinity())
        return 0;
    if (p.is_infinity())
        return 2 / std::sqrt(1 + std::norm(q.value()));
    if (q.is_infinity())
        return 2 / std::sqrt(1 + std::norm(p.value()));
    const auto z = p.value(), w = q.value();
    return 2 * std::abs(z - w) / (std::sqrt(1 + std::norm(z)) * std::sqrt(1 + std::norm(w)));
}

/// Lift of a Moebius transformation to SL(2,C), row-major [[a, b], [c, d]].
template <class T>
class Mat2 {
public:
    using value_type = T;

    Mat2()
        : a_(1)
        , b_(0)
        , c_(0)
        , d_(1)
    {
    }

    Mat2(Complex<T> a, Complex<T> b, Complex<T> c, Complex<T> d)
        : a_(a)
        , b_(b)
        , c_(c)
        , d_(d)
    {
        if (!(is_finite(a) && is_finite(b) && is_finite(c) && is_finite(d)))
            throw Error(ErrorKind::InvalidArgument, "moebius", "non-finite matrix entry");
        const Complex<T> dt = raw_det();
        if (std::abs(dt) == T(0))
            throw Error(ErrorKind::InvalidArgument, "moebius", "singular matrix");
        normalize_if_drifted();
    }

    static Mat2 identity() { return Mat2(); }
    static Mat2 diagonal(Complex<T> lambda) { return Mat2(lambda, 0, 0, Complex<T>(1) / lambda); }

    Complex<T> a() const { return a_; }
    Complex<T> b() const { return b_; }
    Complex<T> c() const { return c_; }
    Complex<T> d() const { return d_; }

    Complex<T> det() const { return raw_det(); }
    Complex<T> trace() const { return a_ + d_; }

    Mat2 inverse() const { return Mat2(d_, -b_, -c_, a_, unchecked {}); }
    Mat2 operator-() const { return Mat2(-a_, -b_, -c_, -d_, unchecked {}); }

    friend Mat2 operator*(const Mat2& x, const Mat2& y)
    {
        Mat2 m(x.a_ * y.a_ + x.b_ * y.c_, x.a_ * y.b_ + x.b_ * y.d_,
            x.c_ * y.a_ + x.d_ * y.c_, x.c_ * y.b_ + x.d_ * y.d_, unchecked {});
        m.normalize_if_drifted();
        return m;
    }

    T norm() const { return std::sqrt(std::norm(a_) + std::norm(b_) + std::norm(c_) + std::norm(d_)); }

    friend T distance(const Mat2& x, const Mat2& y)
    {
        return std::sqrt(std::norm(x.a_ - y.a_) + std::norm(x.b_ - y.b_) + std::norm(x.c_ - y.c_)
            + std::norm(x.d_ - y.d_));
    }

    bool is_real(T eps) const
    {
        return std::abs(a_.imag()) <= eps && std::abs(b_.imag()) <= eps && std::abs(c_.imag()) <= eps
            && std::abs(d_.imag()) <= eps;
    }

    friend std::ostream& operator<<(std::ostream& os, const Mat2& m)
    {
        return os << "[[" << m.a_ << ", " << m.b_ << "], [" << m.c_ << ", " << m.d_ << "]]";
    }

private:
    struct unchecked { };
    Mat2(Complex<T> a, Complex<T> b, Complex<T> c, Complex<T> d, unchecked)
        : a_(a)
        , b_(b)
        , c_(c)
        , d_(d)
    {
    }

    Complex<T> raw_det() const { return a_ * d_ - b_ * c_; }

    // Only renormalize when the drift is above the rounding noise of the determinant. Entries of
    // a long product carry inherited error too, so the allowance is generous: rescaling by a
    // noisy det would spread |ad| times that error into every entry.
    void normalize_if_drifted()
    {
        const Complex<T> dt = raw_det();
        const T drift = std::abs(dt - Complex<T>(1));
        const T noise = 1024 * std::numeric_limits<T>::epsilon() * (std::abs(a_ * d_) + std::abs(b_ * c_));
        if (drift > std::max<T>(T(tol::det_renorm), noise)) {
            const Complex<T> s = std::sqrt(dt);
            a_ /= s;
            b_ /= s;
            c_ /= s;
            d_ /= s;
        }
    }

    Complex<T> a_, b_, c_, d_;
};

template <class T>
Mat2<T> conjugate(const Mat2<T>& m, const Mat2<T>& by)
{
    return by * m * by.inverse();
}

/// (az + b) / (cz + d) on the extended plane; a zero denominator maps to infinity.
template <class T>
ExtendedPoint<T> mobius_apply(const Mat2<T>& m, const ExtendedPoint<T>& z)
{
    if (z.is_infinity()) {
        if (m.c() == Complex<T>(0))
            return ExtendedPoint<T>::infinity();
        return ExtendedPoint<T>(m.a() / m.c());
    }
    const Complex<T> den = m.c() * z.value() + m.d();
    if (den == Complex<T>(0))
        return ExtendedPoint<T>::infinity();
    const Complex<T> w = (m.a() * z.value() + m.b()) / den;
    if (!is_finite(w))
        return ExtendedPoint<T>::infinity();
    return ExtendedPoint<T>(w);
}

/// Distance of tr^2 from the real segment [0, 4]; zero means parabolic or elliptic.
template <class T>
T loxodromy_gap(Complex<T> trace)
{
    const Complex<T> t2 = trace * trace;
    const T x = t2.real(), y = t2.imag();
    if (x < 0)
        return std::hypot(x, y);
    if (x > 4)
        return std::hypot(x - 4, y);
    return std::abs(y);
}

template <class T>
bool is_strictly_loxodromic(const Mat2<T>& m, T eps = T(tol::loxodromy))
{
    return loxodromy_gap(m.trace()) > eps;
}

template <class T>
void require_loxodromic(Complex<T> trace, const char* module = "moebius")
{
    if (!(loxodromy_gap(trace) > T(tol::loxodromy)))
        throw Error(ErrorKind::NotLoxodromic, module, "tr^2 lies within 1e-10 of [0,4]");
}

template <class T>
struct FixedPoints {
    ExtendedPoint<T> attracting;
    ExtendedPoint<T> repelling;
};

namespace detail {

    // Fixed point belonging to eigenvalue lambda; picks the better-conditioned of
    // (lambda - d) / c and b / (lambda - a).
    template <class T>
    ExtendedPoint<T> eigen_fixed_point(const Mat2<T>& m, Complex<T> lambda)
    {
        const Complex<T> la = lambda - m.a();
        const Complex<T> ld = lambda - m.d();
        if (std::abs(la) >= std::abs(m.c())) {
            if (std::abs(la) == T(0))
                return ExtendedPoint<T>::infinity();
            return ExtendedPoint<T>(m.b() / la);
        }
        return ExtendedPoint<T>(ld / m.c());
    }

} // namespace detail

template <class T>
FixedPoints<T> fixed_points(const Mat2<T>& m)
{
    require_loxodromic(m.trace());
    if (m.c() == Complex<T>(0)) {
        // z -> (a z + b) / d: infinity plus one finite point.
        const ExtendedPoint<T> finite(m.b() / (m.d() - m.a()));
        if (std::abs(m.a()) > std::abs(m.d()))
            return {ExtendedPoint<T>::infinity(), finite};
        return {finite, ExtendedPoint<T>::infinity()};
    }
    const Complex<T> tr = m.trace();
    Complex<T> disc = std::sqrt(tr * tr - Complex<T>(4));
    Complex<T> big = (tr + disc) / T(2);
    if (std::abs(tr - disc) > std::abs(tr + disc))
        big = (tr - disc) / T(2);
    const Complex<T> small = Complex<T>(1) / big;
    // The eigenvalue of larger modulus belongs to the attracting fixed point.
    return {detail::eigen_fixed_point(m, big), detail::eigen_fixed_point(m, small)};
}

/// Complex translation length: 2 cosh(l/2) = +-tr, re l > 0, im l in (-pi, pi].
template <class T>
struct ComplexLength {
    Complex<T> value;

    ComplexLength() = default;
    explicit ComplexLength(Complex<T> v)
        : value(canonical_strip(v))
    {
        if (!(value.real() > 0))
            throw Error(ErrorKind::InvalidArgument, "moebius", "complex length needs positive real part");
    }
};

/// Half length: cosh(h) = -tr/2 for a chosen lift, re h > 0. branch_offset counts 2 pi i
/// shifts accumulated by continuation away from the canonical strip.
template <class T>
struct HalfLength {
    Complex<T> value;
    long branch_offset = 0;

    Complex<T> continued() const { return value + Complex<T>(0, 2 * pi<T> * T(branch_offset)); }
};

template <class T>
ComplexLength<T> complex_length_from_trace(Complex<T> trace)
{
    require_loxodromic(trace);
    return ComplexLength<T>(T(2) * acosh_positive(trace / T(2)));
}

template <class T>
ComplexLength<T> complex_length(const Mat2<T>& m)
{
    return complex_length_from_trace(m.trace());
}

template <class T>
HalfLength<T> half_length_from_trace(Complex<T> trace)
{
    require_loxodromic(trace);
    return HalfLength<T> {acosh_positive(-trace / T(2)), 0};
}

template <class T>
HalfLength<T> half_length(const Mat2<T>& m)
{
    return half_length_from_trace(m.trace());
}

/// Unimodular map sending 0 -> p0 and infinity -> pinf.
template <class T>
Mat2<T> map_zero_infinity_to(const ExtendedPoint<T>& p0, const ExtendedPoint<T>& pinf)
{
    if (chordal_distance(p0, pinf) <= T(tol::degenerate))
        throw Error(ErrorKind::DegenerateFixedPoints, "moebius", "fixed points coincide");
    if (pinf.is_infinity())
        return Mat2<T>(1, p0.value(), 0, 1);
    if (p0.is_infinity())
        return Mat2<T>(pinf.value(), 1, 1, 0);
    return Mat2<T>(pinf.value(), p0.value(), 1, 1);
}

/// Unimodular map sending (z0, zinf, z1) to (0, infinity, 1).
template <class T>
Mat2<T> normalizing_map(const ExtendedPoint<T>& z0, const ExtendedPoint<T>& zinf, const ExtendedPoint<T>& z1)
{
    if (chordal_distance(z0, zinf) <= T(tol::degenerate) || chordal_distance(z0, z1) <= T(tol::degenerate)
        || chordal_distance(zinf, z1) <= T(tol::degenerate))
        throw Error(ErrorKind::DegenerateFixedPoints, "moebius", "normalizing triple not distinct");
    // Sends 0 -> z0, inf -> zinf; then rescale so that the preimage of z1 goes to 1.
    const Mat2<T> m = map_zero_infinity_to(z0, zinf).inverse();
    const ExtendedPoint<T> w = mobius_apply(m, z1);
    const Complex<T> s = std::sqrt(w.value());
    return Mat2<T>(Complex<T>(1) / s, 0, 0, s) * m;
}

/// Loxodromic lift with repelling point fix_minus, attracting point fix_plus, trace 2cosh(l/2).
template <class T>
Mat2<T> loxodromic_from(const ExtendedPoint<T>& fix_minus, const ExtendedPoint<T>& fix_plus, Complex<T> length)
{
    if (!(length.real() > 0))
        throw Error(ErrorKind::InvalidArgument, "moebius", "length must have positive real part");
    const Mat2<T> conj = map_zero_infinity_to(fix_minus, fix_plus);
    return conjugate(Mat2<T>::diagonal(std::exp(length / T(2))), conj);
}

template <class T>
struct Circle {
    Complex<T> center;
    T radius;

    Circle(Complex<T> c, T r)
        : center(c)
        , radius(r)
    {
        if (!(r > 0) || !std::isfinite(r) || !is_finite(c))
            throw Error(ErrorKind::InvalidArgument, "moebius", "circle needs finite center and positive radius");
    }

    bool contains(Complex<T> z) const { return std::abs(z - center) < radius; }
};

/// Exact Moebius image of a circle. The image of the point symmetric to the pole is the new center.
template <class T>
Circle<T> map_circle(const Mat2<T>& m, const Circle<T>& c)
{
    if (m.c() == Complex<T>(0)) {
        const Complex<T> center = (m.a() * c.center + m.b()) / m.d();
        return Circle<T>(center, c.radius * std::abs(m.a() / m.d()));
    }
    const Complex<T> pole = -m.d() / m.c();
    const Complex<T> rel = pole - c.center;
    if (std::abs(std::abs(rel) - c.radius) <= T(tol::image_line) * std::max<T>(1, c.radius))
        throw Error(ErrorKind::ImageIsLine, "moebius", "circle passes through the pole");
    // Concentric with the pole (isometric circles): the mirror point is infinity.
    const Complex<T> center = std::abs(rel) == T(0)
        ? m.a() / m.c()
        : mobius_apply(m, ExtendedPoint<T>(c.center + c.radius * c.radius / std::conj(rel))).value();
    // Radius from the point of the circle farthest from the pole (best conditioned).
    const Complex<T> far = std::abs(rel) == T(0) ? c.center + c.radius : c.center - c.radius * rel / std::abs(rel);
    const ExtendedPoint<T> on = mobius_apply(m, ExtendedPoint<T>(far));
    return Circle<T>(center, std::abs(on.value() - center));
}

/// Inversive distance (|c1 - c2|^2 - r1^2 - r2^2) / (2 r1 r2).
template <class T>
T inversive_distance(const Circle<T>& c1, const Circle<T>& c2)
{
    return (std::norm(c1.center - c2.center) - c1.radius * c1.radius - c2.radius * c2.radius)
        / (2 * c1.radius * c2.radius);
}

/// Hyperbolic distance between the geodesic planes bounded by two non-meeting circles.
template <class T>
T plane_distance(const Circle<T>& c1, const Circle<T>& c2)
{
    const T delta = inversive_distance(c1, c2);
    if (std::abs(delta) <= 1 + T(tol::circles_meet))
        throw Error(ErrorKind::CirclesMeet, "moebius", "circles meet or are tangent");
    return std::acosh(std::abs(delta));
}

} // namespace schottky
