#pragma once

#include "schottky/schottky.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>

namespace support {

using C = std::complex<double>;
using namespace schottky;

inline std::string data(const std::string& name)
{
    return std::string(SCHOTTKY_DATA_DIR) + "/" + name;
}

inline C random_complex(std::mt19937_64& rng, double scale = 1)
{
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng)};
}

// Random unimodular matrix with entries of size about scale.
inline Mat2<double> random_sl2(std::mt19937_64& rng, double scale = 1.5)
{
    C a, b, c;
    do {
        a = random_complex(rng, scale);
    } while (std::abs(a) < 0.3);
    b = random_complex(rng, scale);
    c = random_complex(rng, scale);
    return Mat2<double>(a, b, c, (C(1) + b * c) / a);
}

inline Mat2<double> random_loxodromic(std::mt19937_64& rng)
{
    for (;;) {
        auto m = random_sl2(rng);
        if (loxodromy_gap(m.trace()) > 0.1)
            return m;
    }
}

inline SchottkyParameters<double> rank2(C fix_plus, C l0, C l1)
{
    return {{ExtendedPoint<double>(fix_plus)}, {ComplexLength<double>(l0), ComplexLength<double>(l1)}};
}

inline MarkedSchottkyGroup<double> complex_point()
{
    return from_parameters(rank2(-1, C(6, 0.5), C(6, -0.4)));
}

// mod 2 pi i distance
inline double dist_2pii(C a, C b)
{
    return mod_defect(a, b, Modulus::TwoPiI).residual;
}

} // namespace support
