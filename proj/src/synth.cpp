#include "scalekit/synth.hpp"

#include <cmath>

#include "scalekit/rng.hpp"
#include "fft_util.hpp"

namespace scalekit {

static void check_square(const SynthSpec& spec) {
    if (spec.shape.empty() || spec.shape.size() > 3)
        fail(Err::bad_params, "synthetic shapes must have rank 1..3");
    for (std::size_t e : spec.shape) {
        if (e < 2) fail(Err::bad_params, "extents must be >= 2");
        if (e != spec.shape[0]) fail(Err::non_cubic_grid, "extents must be equal");
    }
}

ScalarField gaussian_random_field(const SynthSpec& spec) {
    check_square(spec);
    const std::size_t total = shape_volume(spec.shape);
    const std::size_t extent = spec.shape[0];
    const std::size_t rank = spec.shape.size();

    // White noise keyed by (seed, cell index), then a k^(beta/2) filter.
    CounterRng rng{spec.seed};
    std::vector<double> noise(total);
    for (std::size_t i = 0; i < total; ++i) noise[i] = rng.gaussian(i);

    auto spectrum = detail::fft_forward(noise, spec.shape);

    std::vector<std::size_t> idx(rank, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        double k2 = 0.0;
        for (std::size_t a = 0; a < rank; ++a) {
            const double k = static_cast<double>(detail::fold_wavenumber(idx[a], extent));
            k2 += k * k;
        }
        // Zero mode removed before exponentiation.
        const double amp = (k2 == 0.0) ? 0.0 : std::pow(std::sqrt(k2), spec.spectral_slope / 2.0);
        spectrum[flat] *= amp;
        for (std::size_t a = rank; a-- > 0;) {
            if (++idx[a] < spec.shape[a]) break;
            idx[a] = 0;
        }
    }

    auto values = detail::fft_backward_real(spectrum, spec.shape);

    const double mean = pairwise_sum(values.data(), total) / static_cast<double>(total);
    std::vector<double> dev2(total);
    for (std::size_t i = 0; i < total; ++i) {
        const double d = values[i] - mean;
        dev2[i] = d * d;
    }
    const double variance = pairwise_sum(dev2.data(), total) / static_cast<double>(total);
    if (!(variance > 0.0)) fail(Err::bad_params, "degenerate field: zero variance");
    const double inv_std = 1.0 / std::sqrt(variance);

    ScalarField field = make_field(spec.shape, FieldKind::volume_density);
    for (std::size_t i = 0; i < total; ++i) field.data[i] = (values[i] - mean) * inv_std;
    return field;
}

ScalarField lognormal_field(const SynthSpec& spec) {
    if (spec.kind != SynthKind::gaussian_exp)
        fail(Err::bad_params, "lognormal_field expects kind gaussian_exp");
    ScalarField field = gaussian_random_field(spec);
    for (double& v : field.data) v = std::exp(v);
    return field;
}

ScalarField gaussian_blob(const SynthSpec& spec) {
    if (spec.kind != SynthKind::blob) fail(Err::bad_params, "gaussian_blob expects kind blob");
    check_square(spec);
    if (!(spec.sigma > 0.0)) fail(Err::bad_params, "sigma must be positive");
    if (!(spec.amplitude >= 0.0)) fail(Err::bad_params, "amplitude must be non-negative");

    const std::size_t rank = spec.shape.size();
    std::vector<double> center = spec.center;
    if (center.empty())
        for (std::size_t a = 0; a < rank; ++a)
            center.push_back(0.5 * static_cast<double>(spec.shape[a] - 1));
    if (center.size() != rank) fail(Err::bad_params, "center rank does not match shape");

    ScalarField field = make_field(spec.shape, FieldKind::volume_density);
    const double inv_two_sigma2 = 1.0 / (2.0 * spec.sigma * spec.sigma);

    std::vector<std::size_t> idx(rank, 0);
    for (std::size_t flat = 0; flat < field.size(); ++flat) {
        double r2 = 0.0;
        for (std::size_t a = 0; a < rank; ++a) {
            const double d = static_cast<double>(idx[a]) - center[a];
            r2 += d * d;
        }
        field.data[flat] = spec.amplitude * std::exp(-r2 * inv_two_sigma2);
        for (std::size_t a = rank; a-- > 0;) {
            if (++idx[a] < spec.shape[a]) break;
            idx[a] = 0;
        }
    }
    return field;
}

}  // namespace scalekit
