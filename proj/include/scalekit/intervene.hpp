#pragma once

#include <cstddef>
#include <vector>

#include "scalekit/decompose.hpp"

namespace scalekit {

/// Single-scale magnification: channel index (0-based) and factor f >= 0.
/// f = 0 deletes the channel; f = 1 is the identity.
struct PerturbationSpec {
    std::size_t channel = 0;
    double factor = 1.0;
};

/// Coherent cascade tilt: every channel is reweighted by (r_i / r_ref)^s_c;
/// the residual participates at residual_radius(ladder).
struct TiltSpec {
    double index = 0.0;   // s_c
    double pivot = 1.0;   // r_ref, pixel units
};

/// Least-squares fit of log(density scale) against log(radius).
struct CascadeFit {
    std::vector<double> radii;          // channels included in the fit
    std::vector<double> density_scale;  // n_i for those channels
    double exponent = 0.0;              // kappa, the fitted slope
    double intercept = 0.0;
    double residual_rms = 0.0;
};

/// I_mod = reconstruct(decomp) + (f - 1) * component_j, in exactly that
/// algebraic form. Orthogonal channels are untouched.
ScalarField perturb_scale(const ScaleDecomposition& decomp, const PerturbationSpec& spec);

/// Decomposition with every component (and the residual) reweighted by its
/// tilt factor. Fitting this directly realizes the exact kappa -> kappa + s_c
/// shift; reconstructing it yields the tilted field.
ScaleDecomposition tilt_components(const ScaleDecomposition& decomp, const TiltSpec& spec);

/// reconstruct(tilt_components(decomp, spec)).
ScalarField tilt_cascade(const ScaleDecomposition& decomp, const TiltSpec& spec);

/// Mass-weighted mean density of a component: sum(v^2) / sum(v). Homogeneous
/// of degree 1 in amplitude. Zero-mass components have no density scale.
double channel_density_scale(const ScalarField& component);

/// Fit kappa over channels with positive density scale; the residual is
/// excluded. Needs at least two usable channels.
CascadeFit measure_cascade(const ScaleDecomposition& decomp);

}  // namespace scalekit
