#pragma once

#include <cstdint>
#include <vector>

#include "scalekit/field.hpp"

namespace scalekit {

enum class SynthKind { gaussian_exp, blob };

/// Seeded synthetic-field request. Shapes must be square/cubic.
struct SynthSpec {
    std::vector<std::size_t> shape;
    SynthKind kind = SynthKind::gaussian_exp;
    std::uint64_t seed = 0;
    double spectral_slope = -3.0;  // power ~ k^beta (gaussian_exp)
    double sigma = 4.0;            // blob standard deviation, pixels
    std::vector<double> center;    // blob center, pixel coordinates; empty = grid center
    double amplitude = 1.0;        // blob peak value
};

/// Zero-mean, unit-variance Gaussian random field with isotropic power
/// spectrum ~ k^beta. Spectral synthesis filters cell-keyed white noise, so
/// the result is bit-reproducible for a fixed (shape, beta, seed).
ScalarField gaussian_random_field(const SynthSpec& spec);

/// exp() of the field above; strictly positive, kind volume_density.
ScalarField lognormal_field(const SynthSpec& spec);

/// amplitude * exp(-|x - center|^2 / (2 sigma^2)) sampled on the grid.
ScalarField gaussian_blob(const SynthSpec& spec);

}  // namespace scalekit
