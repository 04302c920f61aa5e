#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace schottky {

enum class ErrorKind {
    NotLoxodromic,
    DegenerateFixedPoints,
    ImageIsLine,
    CirclesMeet,
    BranchPole,
    ZeroDenominator,
    ZeroArgument,
    InvalidWord,
    InvalidSlope,
    NotHyperbolicTriple,
    CuspDegenerate,
    DegenerateFactorization,
    NonConvergence,
    InsufficientPrefix,
    PathExitsLoxodromy,
    PathValidationFailed,
    InvalidArgument,
    ConfigError,
};

constexpr std::string_view to_string(ErrorKind k)
{
    switch (k) {
    case ErrorKind::NotLoxodromic: return "NotLoxodromic";
    case ErrorKind::DegenerateFixedPoints: return "DegenerateFixedPoints";
    case ErrorKind::ImageIsLine: return "ImageIsLine";
    case ErrorKind::CirclesMeet: return "CirclesMeet";
    case ErrorKind::BranchPole: return "BranchPole";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::ZeroArgument: return "ZeroArgument";
    case ErrorKind::InvalidWord: return "InvalidWord";
    case ErrorKind::InvalidSlope: return "InvalidSlope";
    case ErrorKind::NotHyperbolicTriple: return "NotHyperbolicTriple";
    case ErrorKind::CuspDegenerate: return "CuspDegenerate";
    case ErrorKind::DegenerateFactorization: return "DegenerateFactorization";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::InsufficientPrefix: return "InsufficientPrefix";
    case ErrorKind::PathExitsLoxodromy: return "PathExitsLoxodromy";
    case ErrorKind::PathValidationFailed: return "PathValidationFailed";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a kind and the module it came from.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string_view module, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + " [" + std::string(module) + "]: " + what)
        , kind_(kind)
        , module_(module)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }
    std::string_view module() const noexcept { return module_; }

private:
    ErrorKind kind_;
    std::string_view module_;
};

// Path sampling failures remember where they happened.
class PathError : public Error {
public:
    PathError(ErrorKind kind, const std::string& what, std::size_t sample)
        : Error(kind, "continuation", what + " (sample " + std::to_string(sample) + ")")
        , sample_(sample)
    {
    }

    std::size_t sample() const noexcept { return sample_; }

private:
    std::size_t sample_;
};

} // namespace schottky
