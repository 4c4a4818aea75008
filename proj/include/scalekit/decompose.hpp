#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "scalekit/field.hpp"

namespace scalekit {

/// Strictly increasing channel radii in pixel units, r_1 >= 1.
struct ScaleLadder {
    std::vector<double> radii;

    std::size_t channel_count() const noexcept { return radii.size(); }
};

/// r_k = r_min * ratio^(k-1), k = 1..count.
ScaleLadder make_scales(double r_min, double ratio, std::size_t count);

/// Effective radius assigned to the residual when it is treated as one more
/// channel: r_N * ratio, with the ladder's top ratio (2 for single-channel
/// ladders).
double residual_radius(const ScaleLadder& ladder);

struct DiffusionConfig {
    /// Fraction of the explicit-stability limit h^2/(2d); timestep is
    /// safety * h^2 / (2d) with the final step of each channel shortened to
    /// land exactly on t_k = r_k^2 / 2. Boundaries are reflecting.
    double safety = 0.5;
};

/// Ordered per-scale components plus a residual. Construction guarantees:
///   - every component and the residual >= 0 pointwise (exactly);
///   - sum(components) + residual reproduces the source to 1e-10 * max;
///   - channel masses telescope to the source mass to 1e-10 relative.
struct ScaleDecomposition {
    std::vector<ScalarField> components;
    ScalarField residual;
    ScaleLadder ladder;
    std::vector<std::size_t> source_shape;
    std::string source_digest;

    std::size_t channel_count() const noexcept { return components.size(); }

    /// max |sum(components) + residual - source| over the grid.
    double superposition_error(const ScalarField& source) const;
};

/// Constrained diffusion decomposition. The working field evolves under
/// explicit diffusion steps whose increments are clamped to [-W, 0], so each
/// channel removes a non-negative layer; whatever survives past r_N is the
/// residual. Deterministic: fixed serial cell order, fixed step schedule.
ScaleDecomposition decompose(const ScalarField& field, const ScaleLadder& ladder,
                             const DiffusionConfig& config = {});

/// sum(components) + residual, accumulated channel by channel.
ScalarField reconstruct(const ScaleDecomposition& decomp);

/// total_mass of each component, then the residual, in order.
std::vector<double> channel_mass(const ScaleDecomposition& decomp);

/// Directory serialization: ladder.json, component_<k> NDF pairs (k 0-based),
/// residual NDF pair, source_hash.
void store_decomposition(const ScaleDecomposition& decomp, const std::filesystem::path& dir);
ScaleDecomposition load_decomposition(const std::filesystem::path& dir);

}  // namespace scalekit
