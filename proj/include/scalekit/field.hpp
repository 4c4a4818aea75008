#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scalekit/error.hpp"

namespace scalekit {

enum class FieldKind { volume_density, surface_density, ratio, component };

const char* kind_name(FieldKind kind) noexcept;
FieldKind kind_from_name(const std::string& name);  // throws MALFORMED_HEADER

struct PixelSize {
    double value = 0.0;
    std::string unit;
};

/// N-dimensional grid of 64-bit reals, row-major, slowest axis first.
/// Density-like kinds (volume_density, surface_density, component) are
/// non-negative up to a noise allowance of 1e-12 * max(data).
struct ScalarField {
    std::vector<std::size_t> shape;
    std::vector<double> data;
    FieldKind kind = FieldKind::volume_density;
    std::optional<PixelSize> pixel_size;
    std::optional<std::string> note;

    std::size_t rank() const noexcept { return shape.size(); }
    std::size_t size() const noexcept { return data.size(); }

    double max_value() const noexcept;
    double min_value() const noexcept;

    /// Noise floor for the non-negativity invariant: 1e-12 * max(data).
    double negativity_allowance() const noexcept { return 1e-12 * max_value(); }
};

std::size_t shape_volume(const std::vector<std::size_t>& shape);

ScalarField make_field(std::vector<std::size_t> shape, FieldKind kind, double fill = 0.0);

/// NDF pair I/O. `prefix` names the pair: `<prefix>.json` header plus
/// `<prefix>.bin` raw little-endian f64, row-major, no padding.
ScalarField load_field(const std::filesystem::path& prefix);
void store_field(const ScalarField& field, const std::filesystem::path& prefix);

/// Line-of-sight sum of a 3D volume along `axis` (0 = slowest). Pixel-unit
/// integration: values are summed without pixel_size weighting.
ScalarField project(const ScalarField& volume, int axis = 0);

/// Sum of all values under a fixed pairwise scheme (serial below 64
/// elements, halving recursion above). Bit-stable across runs.
double total_mass(const ScalarField& field);
double pairwise_sum(const double* values, std::size_t count);

/// Uniform 2D -> 3D lift: each z-column holds map2d / depth. Right inverse
/// of project along axis 0.
ScalarField lift_uniform(const ScalarField& map2d, std::size_t depth);

/// Isotropically binned power of the mean-subtracted field on a square or
/// cubic grid. Entry (k, P_k) for k = 1..extent/2 where P_k is the mean of
/// |F|^2 / N_total^2 over modes whose radial wavenumber rounds to k.
std::vector<std::pair<double, double>> power_spectrum(const ScalarField& field);

/// FNV-1a 64-bit over raw bytes; provenance digests, not security.
std::uint64_t fnv1a64(const void* bytes, std::size_t count) noexcept;
std::string digest_hex(const ScalarField& field);

}  // namespace scalekit
