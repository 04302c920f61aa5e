#include "support.hpp"

using namespace support;

namespace {

const double acosh2 = std::log(2 + std::sqrt(3.0));

ExtendedPoint<double> pt(C z) { return ExtendedPoint<double>(z); }

} // namespace

TEST(MobiusApply, Examples)
{
    EXPECT_EQ(mobius_apply(Mat2<double>::identity(), pt(5)).value(), C(5));
    EXPECT_NEAR(std::abs(mobius_apply(Mat2<double>::diagonal(2), pt(1)).value() - C(4)), 0, 1e-15);
    const Mat2<double> s(0, -1, 1, 0);
    const auto w = mobius_apply(s, ExtendedPoint<double>::infinity());
    ASSERT_FALSE(w.is_infinity());
    EXPECT_EQ(w.value(), C(0));
    EXPECT_TRUE(mobius_apply(s, pt(0)).is_infinity());
}

TEST(MobiusApply, ActionIsAHomomorphism)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = random_sl2(rng), n = random_sl2(rng);
        const auto z = pt(random_complex(rng, 3));
        const auto lhs = mobius_apply(m * n, z);
        const auto rhs = mobius_apply(m, mobius_apply(n, z));
        EXPECT_LT(chordal_distance(lhs, rhs), 1e-10);
        EXPECT_LT(chordal_distance(mobius_apply(m.inverse(), mobius_apply(m, z)), z), 1e-10);
    }
}

TEST(Mat2, RejectsSingularAndNonFinite)
{
    EXPECT_THROW(Mat2<double>(1, 2, 2, 4), Error);
    EXPECT_THROW(Mat2<double>(C(NAN), 0, 0, 1), Error);
    EXPECT_THROW(ExtendedPoint<double>(C(INFINITY)), Error);
}

TEST(Mat2, ProductsStayUnimodular)
{
    std::mt19937_64 rng(3);
    Mat2<double> m;
    for (int i = 0; i < 500; ++i) {
        m = m * random_sl2(rng, 1.1);
        EXPECT_LT(std::abs(m.det() - C(1)), 1e-13 * m.norm() * m.norm());
    }
}

TEST(FixedPoints, DiagonalCases)
{
    const auto f = fixed_points(Mat2<double>::diagonal(2));
    EXPECT_TRUE(f.attracting.is_infinity());
    EXPECT_EQ(f.repelling.value(), C(0));
    const auto g = fixed_points(Mat2<double>::diagonal(0.5));
    EXPECT_EQ(g.attracting.value(), C(0));
    EXPECT_TRUE(g.repelling.is_infinity());
}

TEST(FixedPoints, ParabolicRejected)
{
    try {
        fixed_points(Mat2<double>(1, 1, 0, 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotLoxodromic);
    }
    // elliptic trace inside (-2, 2)
    EXPECT_THROW(fixed_points(Mat2<double>(0, -1, 1, 0)), Error);
}

TEST(FixedPoints, AreFixedAndOrdered)
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = random_loxodromic(rng);
        const auto f = fixed_points(m);
        EXPECT_LT(chordal_distance(mobius_apply(m, f.attracting), f.attracting), 1e-8);
        EXPECT_LT(chordal_distance(mobius_apply(m, f.repelling), f.repelling), 1e-8);
        // iterating a generic point converges to the attracting point
        ExtendedPoint<double> z = pt(C(0.123, -0.456));
        for (int k = 0; k < 400; ++k)
            z = mobius_apply(m, z);
        EXPECT_LT(chordal_distance(z, f.attracting), 1e-6);
    }
}

TEST(ComplexLength, Examples)
{
    const Mat2<double> m(2, 1, 1, 1); // trace 3
    EXPECT_NEAR(complex_length_from_trace(C(4)).value.real(), 2 * acosh2, 1e-14);
    // eigenvalue ratio oracle: l = log(lambda^2)
    const double lam = (3 + std::sqrt(5.0)) / 2;
    EXPECT_NEAR(std::abs(complex_length(m).value - C(2 * std::log(lam))), 0, 1e-13);
    EXPECT_EQ(complex_length(m).value, complex_length(-m).value);
    const C l(3, 0.3);
    const auto d = Mat2<double>::diagonal(std::exp(l / 2.0));
    EXPECT_NEAR(std::abs(complex_length(d).value - l), 0, 1e-14);
}

TEST(ComplexLength, CanonicalStrip)
{
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 300; ++trial) {
        const auto m = random_loxodromic(rng);
        const C l = complex_length(m).value;
        EXPECT_GT(l.real(), 0);
        EXPECT_GT(l.imag(), -std::numbers::pi);
        EXPECT_LE(l.imag(), std::numbers::pi);
        const C tr = m.trace();
        const C c = 2.0 * std::cosh(l / 2.0);
        EXPECT_LT(std::min(std::abs(c - tr), std::abs(c + tr)), 1e-9 * std::max(1.0, std::abs(tr)));
    }
}

TEST(HalfLength, Examples)
{
    EXPECT_NEAR(std::abs(half_length_from_trace(C(-4)).value - C(acosh2)), 0, 1e-14);
    EXPECT_NEAR(std::abs(half_length_from_trace(C(4)).value - C(acosh2, std::numbers::pi)), 0, 1e-14);
    EXPECT_NEAR(std::abs(half_length_from_trace(C(-2 * std::cosh(1.0))).value - C(1)), 0, 1e-14);
}

TEST(HalfLength, LiftFlipShiftsByPiI)
{
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = random_loxodromic(rng);
        const C h = half_length(m).value, hm = half_length(-m).value;
        EXPECT_NEAR(std::abs(std::cosh(h) + m.trace() / 2.0), 0, 1e-9 * std::abs(m.trace()));
        EXPECT_NEAR(mod_defect(h - hm, C(0, std::numbers::pi), Modulus::TwoPiI).residual, 0, 1e-9);
    }
}

TEST(LoxodromicFrom, Examples)
{
    const auto d = loxodromic_from(pt(0), ExtendedPoint<double>::infinity(), C(2));
    EXPECT_LT(distance(d, Mat2<double>::diagonal(std::exp(1.0))), 1e-14);

    const auto m = loxodromic_from(pt(1), pt(-1), C(2));
    const auto f = fixed_points(m);
    EXPECT_LT(chordal_distance(f.repelling, pt(1)), 1e-12);
    EXPECT_LT(chordal_distance(f.attracting, pt(-1)), 1e-12);
    // same matrix as conjugating diag(e, 1/e) by the map sending (0, inf) to (1, -1)
    const C s(0, std::sqrt(0.5));
    const auto oracle = conjugate(Mat2<double>::diagonal(std::exp(1.0)), Mat2<double>(-s, s, s, s));
    EXPECT_LT(std::min(distance(m, oracle), distance(m, -oracle)), 1e-12);

    const C l(3, 0.3);
    const auto g = loxodromic_from(pt(0), ExtendedPoint<double>::infinity(), l);
    EXPECT_NEAR(std::abs(g.a() - std::exp(l / 2.0)), 0, 1e-14);
    EXPECT_NEAR(std::abs(complex_length(g).value - l), 0, 1e-13);
}

TEST(LoxodromicFrom, RoundTripsRandomData)
{
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> re(0.2, 8), im(-3, 3);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = pt(random_complex(rng, 4)), q = pt(random_complex(rng, 4));
        const C l(re(rng), im(rng));
        const auto m = loxodromic_from(p, q, l);
        const auto f = fixed_points(m);
        EXPECT_LT(chordal_distance(f.repelling, p), 1e-8);
        EXPECT_LT(chordal_distance(f.attracting, q), 1e-8);
        EXPECT_NEAR(mod_defect(complex_length(m).value, l, Modulus::TwoPiI).residual, 0, 1e-9);
    }
}

TEST(LoxodromicFrom, Preconditions)
{
    EXPECT_THROW(loxodromic_from(pt(1), pt(1), C(2)), Error);
    EXPECT_THROW(loxodromic_from(pt(0), pt(1), C(-1)), Error);
}

TEST(MapCircle, Examples)
{
    const Circle<double> c(3, 1);
    const auto same = map_circle(Mat2<double>::identity(), c);
    EXPECT_EQ(same.center, c.center);
    EXPECT_EQ(same.radius, c.radius);

    const auto scaled = map_circle(Mat2<double>::diagonal(std::sqrt(2.0)), c);
    EXPECT_NEAR(std::abs(scaled.center - C(6)), 0, 1e-14);
    EXPECT_NEAR(scaled.radius, 2, 1e-14);

    // z -> 1/z
    const Mat2<double> inv(0, C(0, 1), C(0, 1), 0);
    const auto img = map_circle(inv, c);
    EXPECT_NEAR(std::abs(img.center - C(3.0 / 8)), 0, 1e-15);
    EXPECT_NEAR(img.radius, 1.0 / 8, 1e-15);
    // three-point oracle
    for (C z : {C(2), C(4), C(3, 1)})
        EXPECT_NEAR(std::abs(1.0 / z - img.center), img.radius, 1e-15);
}

TEST(MapCircle, ThroughPoleIsALine)
{
    const Mat2<double> inv(0, C(0, 1), C(0, 1), 0);
    EXPECT_THROW(map_circle(inv, Circle<double>(1, 1)), Error);
}

TEST(MapCircle, ImagesOfSamplePointsLieOnTheImage)
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> rad(0.1, 2);
    for (int trial = 0; trial < 200; ++trial) {
        const auto m = random_sl2(rng);
        const Circle<double> c(random_complex(rng, 3), rad(rng));
        Circle<double> img(0, 1);
        try {
            img = map_circle(m, c);
        } catch (const Error&) {
            continue;
        }
        for (int k = 0; k < 6; ++k) {
            const auto w = mobius_apply(m, pt(c.center + std::polar(c.radius, 1.1 * k)));
            if (!w.is_infinity())
                EXPECT_NEAR(std::abs(w.value() - img.center) / img.radius, 1, 1e-7);
        }
    }
}

TEST(PlaneDistance, Examples)
{
    const Circle<double> a(0, 1), b(10, 1);
    EXPECT_NEAR(inversive_distance(a, b), 49, 1e-12);
    EXPECT_NEAR(plane_distance(a, b), std::acosh(49.0), 1e-12);
    try {
        plane_distance(a, Circle<double>(2, 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::CirclesMeet);
    }
    EXPECT_NEAR(plane_distance(Circle<double>(0, 1), Circle<double>(0, std::exp(2.0))), 2, 1e-12);
}

TEST(PlaneDistance, MatchesConcentricNormalForm)
{
    // Send the two limit points of the pencil to 0 and inf; the circles become concentric
    // and the distance is the log of the radius ratio.
    const Circle<double> a(0, 1), b(10, 1);
    const double x = 5 - std::sqrt(24.0); // limit points 5 +- sqrt(24)
    const Mat2<double> m = map_zero_infinity_to(pt(x), pt(10 - x)).inverse();
    const auto ia = map_circle(m, a), ib = map_circle(m, b);
    EXPECT_NEAR(std::abs(ia.center), 0, 1e-9);
    EXPECT_NEAR(std::abs(ib.center), 0, 1e-9);
    EXPECT_NEAR(std::abs(std::log(ib.radius / ia.radius)), plane_distance(a, b), 1e-10);
}

TEST(PlaneDistance, MoebiusInvariant)
{
    std::mt19937_64 rng(19);
    const Circle<double> a(C(0, 0.5), 0.7), b(C(3, -1), 1.2);
    const double d = plane_distance(a, b);
    for (int trial = 0; trial < 100; ++trial) {
        const auto m = random_sl2(rng);
        try {
            EXPECT_NEAR(plane_distance(map_circle(m, a), map_circle(m, b)), d, 1e-8);
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::ImageIsLine);
        }
    }
}

TEST(Branches, Examples)
{
    EXPECT_EQ(atanh_principal(C(0)), C(0));
    EXPECT_NEAR(std::abs(acosh_positive(C(2)) - C(acosh2)), 0, 1e-15);
    const C v = acosh_positive(C(-27.9834));
    EXPECT_NEAR(v.real(), 4.0244, 1e-4);
    EXPECT_NEAR(v.imag(), std::numbers::pi, 1e-15);
    EXPECT_THROW(atanh_principal(C(1)), Error);
    EXPECT_THROW(atanh_principal(C(-1)), Error);
}

TEST(Branches, AtanhInvertsTanhOnTheStrip)
{
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> re(-3, 3), im(-1.5, 1.5);
    for (int trial = 0; trial < 1000; ++trial) {
        const C v(re(rng), im(rng));
        EXPECT_NEAR(std::abs(atanh_principal(std::tanh(v)) - v), 0, 1e-9);
    }
    // tiny arguments keep full relative precision
    const C w(1e-40, -3e-41);
    EXPECT_NEAR(std::abs(atanh_principal(w) - w) / std::abs(w), 0, 1e-15);
}

TEST(Branches, AcoshPositiveRange)
{
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 1000; ++trial) {
        const C w = random_complex(rng, 10);
        const C v = acosh_positive(w);
        EXPECT_GE(v.real(), 0);
        EXPECT_GT(v.imag(), -std::numbers::pi);
        EXPECT_LE(v.imag(), std::numbers::pi);
        EXPECT_NEAR(std::abs(std::cosh(v) - w), 0, 1e-9 * std::max(1.0, std::abs(w)));
    }
}

TEST(ChordalDistance, HandlesInfinity)
{
    const auto inf = ExtendedPoint<double>::infinity();
    EXPECT_EQ(chordal_distance(inf, inf), 0);
    EXPECT_NEAR(chordal_distance(inf, pt(0)), 2, 1e-15);
    EXPECT_NEAR(chordal_distance(pt(1), pt(-1)), 2, 1e-15);
}

TEST(NormalizingMap, SendsTripleToStandardPosition)
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = pt(random_complex(rng, 3)), b = pt(random_complex(rng, 3)), c = pt(random_complex(rng, 3));
        const auto m = normalizing_map(a, b, c);
        EXPECT_LT(chordal_distance(mobius_apply(m, a), pt(0)), 1e-9);
        EXPECT_TRUE(chordal_distance(mobius_apply(m, b), ExtendedPoint<double>::infinity()) < 1e-9);
        EXPECT_LT(chordal_distance(mobius_apply(m, c), pt(1)), 1e-9);
    }
    EXPECT_THROW(normalizing_map(pt(0), pt(0), pt(1)), Error);
}

TEST(ExtendedPrecision, MatchesDouble)
{
    using L = long double;
    const auto m = loxodromic_from(ExtendedPoint<L>(std::complex<L>(1)), ExtendedPoint<L>(std::complex<L>(-1)), std::complex<L>(2, 0.5L));
    const auto md = loxodromic_from(pt(1), pt(-1), C(2, 0.5));
    EXPECT_NEAR(static_cast<double>(std::abs(complex_length(m).value - std::complex<L>(2, 0.5L))), 0, 1e-17);
    EXPECT_NEAR(std::abs(C(static_cast<double>(m.trace().real()), static_cast<double>(m.trace().imag())) - md.trace()), 0, 1e-14);
}
