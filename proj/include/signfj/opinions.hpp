#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "signfj/rng.hpp"

namespace signfj {

enum class OpinionDistribution { Uniform, Exponential, PowerLaw };

inline OpinionDistribution parse_distribution(const std::string& name) {
    if (name == "uniform") return OpinionDistribution::Uniform;
    if (name == "exp" || name == "exponential") return OpinionDistribution::Exponential;
    if (name == "powerlaw") return OpinionDistribution::PowerLaw;
    throw std::invalid_argument("unknown opinion distribution `" + name + "`");
}

inline const char* to_string(OpinionDistribution d) {
    switch (d) {
        case OpinionDistribution::Uniform: return "uniform";
        case OpinionDistribution::Exponential: return "exponential";
        case OpinionDistribution::PowerLaw: return "powerlaw";
    }
    return "?";
}

// Exponential: rate 1, rejection-sampled into [0,1].
// Power law: exponent 2.5 with lower cutoff 0.01, rejection-sampled into [0,1].
inline constexpr double kExponentialRate = 1.0;
inline constexpr double kPowerLawExponent = 2.5;
inline constexpr double kPowerLawCutoff = 0.01;

/// Seeded opinion vectors in [-1,1]^n. Uniform draws directly on [-1,1];
/// the skewed distributions draw magnitudes in [0,1] and then negate each
/// entry independently with probability 1/2.
inline std::vector<double> gen_opinions(int n, OpinionDistribution distribution, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("gen_opinions: n must be >= 1");
    SplitMix64 rng = SplitMix64::substream(seed, 1);
    std::vector<double> s(static_cast<size_t>(n));
    switch (distribution) {
        case OpinionDistribution::Uniform:
            for (double& v : s) v = 2.0 * rng.next_double() - 1.0;
            break;
        case OpinionDistribution::Exponential:
            for (double& v : s) {
                double x;
                do {
                    x = -std::log(1.0 - rng.next_double()) / kExponentialRate;
                } while (x > 1.0);
                v = rng.next_double() < 0.5 ? -x : x;
            }
            break;
        case OpinionDistribution::PowerLaw:
            for (double& v : s) {
                double x;
                do {
                    x = kPowerLawCutoff * std::pow(1.0 - rng.next_double(), -1.0 / (kPowerLawExponent - 1.0));
                } while (x > 1.0);
                v = rng.next_double() < 0.5 ? -x : x;
            }
            break;
    }
    return s;
}

} // namespace signfj
