#pragma once

#include <cstdint>
#include <random>

namespace fracinv {

/// Uniform double in [0, 1) from the top 53 bits of the generator output.
/// Deliberately avoids std::uniform_real_distribution, whose mapping is
/// implementation-defined and would break byte-reproducibility of artifacts.
inline double uniform01(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [-1, 1).
inline double uniform_sym(std::mt19937_64& rng)
{
    return 2.0 * uniform01(rng) - 1.0;
}

} // namespace fracinv
