#pragma once

#include <cstdint>
#include <random>

#include "els/config.hpp"
#include "els/dynamics.hpp"

namespace els {

/// Uniform double in [-1, 1) from raw 64-bit engine output, so streams do
/// not depend on the standard library's distribution implementations.
double portable_uniform(std::mt19937_64& rng);

/// Random trigonometric polynomial with modes |m_i| <= max_mode, zero mean,
/// scaled to the given max norm.
ScalarField band_limited_noise(const Grid& grid, std::mt19937_64& rng, double amplitude, int max_mode = 4);

/// Divergence-free field grad^perp of band-limited noise, scaled to the given max norm.
VectorField2 solenoidal_noise(const Grid& grid, std::mt19937_64& rng, double amplitude, int max_mode = 4);

/// Builds the initial state named by c.initial.
SimState make_initial_state(const RunConfig& c, const MaterialParams& p);

}  // namespace els
