#include "scalekit/intervene.hpp"

#include <cmath>

namespace scalekit {

ScalarField perturb_scale(const ScaleDecomposition& decomp, const PerturbationSpec& spec) {
    if (spec.channel >= decomp.channel_count())
        fail(Err::bad_channel, "channel " + std::to_string(spec.channel) + " out of range");
    if (spec.factor < 0.0) fail(Err::negative_factor, "factor must be >= 0");

    ScalarField out = reconstruct(decomp);
    const double gain = spec.factor - 1.0;
    const auto& component = decomp.components[spec.channel].data;
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += gain * component[i];
    return out;
}

ScaleDecomposition tilt_components(const ScaleDecomposition& decomp, const TiltSpec& spec) {
    if (!(spec.pivot > 0.0)) fail(Err::bad_params, "pivot radius must be positive");
    if (decomp.components.empty()) fail(Err::shape_mismatch, "decomposition has no components");

    ScaleDecomposition tilted;
    tilted.ladder = decomp.ladder;
    tilted.source_shape = decomp.source_shape;
    tilted.source_digest = decomp.source_digest;

    for (std::size_t k = 0; k < decomp.components.size(); ++k) {
        const double weight = std::pow(decomp.ladder.radii[k] / spec.pivot, spec.index);
        ScalarField c = decomp.components[k];
        for (double& v : c.data) v *= weight;
        tilted.components.push_back(std::move(c));
    }
    const double residual_weight =
        std::pow(residual_radius(decomp.ladder) / spec.pivot, spec.index);
    tilted.residual = decomp.residual;
    for (double& v : tilted.residual.data) v *= residual_weight;
    return tilted;
}

ScalarField tilt_cascade(const ScaleDecomposition& decomp, const TiltSpec& spec) {
    return reconstruct(tilt_components(decomp, spec));
}

double channel_density_scale(const ScalarField& component) {
    const std::size_t n = component.size();
    std::vector<double> squares(n);
    for (std::size_t i = 0; i < n; ++i) squares[i] = component.data[i] * component.data[i];
    const double mass = pairwise_sum(component.data.data(), n);
    if (!(mass > 0.0)) return 0.0;
    return pairwise_sum(squares.data(), n) / mass;
}

CascadeFit measure_cascade(const ScaleDecomposition& decomp) {
    CascadeFit fit;
    for (std::size_t k = 0; k < decomp.components.size(); ++k) {
        const double n_k = channel_density_scale(decomp.components[k]);
        if (n_k > 0.0) {
            fit.radii.push_back(decomp.ladder.radii[k]);
            fit.density_scale.push_back(n_k);
        }
    }
    const std::size_t m = fit.radii.size();
    if (m < 2) fail(Err::insufficient_channels, "need >= 2 channels with positive density scale");

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double x = std::log(fit.radii[i]);
        const double y = std::log(fit.density_scale[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double count = static_cast<double>(m);
    const double denom = count * sxx - sx * sx;
    if (denom == 0.0) fail(Err::bad_params, "degenerate radii: cannot fit a slope");
    fit.exponent = (count * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.exponent * sx) / count;

    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double predicted = fit.intercept + fit.exponent * std::log(fit.radii[i]);
        const double r = std::log(fit.density_scale[i]) - predicted;
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / count);
    return fit;
}

}  // namespace scalekit
