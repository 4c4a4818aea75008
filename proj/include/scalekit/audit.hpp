#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scalekit/decompose.hpp"
#include "scalekit/intervene.hpp"

namespace scalekit {

/// External model-under-test: a process mapping a 2D observable NDF pair to
/// a 3D volume NDF pair. `command` tokens carry the {input} and {output}
/// path-prefix placeholders exactly once each.
struct ModelEndpoint {
    std::vector<std::string> command;
    double timeout_sec = 600.0;
    std::vector<std::size_t> expected_shape;  // 3D extents of the prediction
    int max_concurrent = 1;

    /// When set, scans record ground-truth volumes into this directory so a
    /// fixture process can serve them back. Unset for real external models.
    std::optional<std::filesystem::path> fixture_truth;
};

void validate_endpoint(const ModelEndpoint& endpoint);

/// Writes the observable into workdir, substitutes the placeholders, runs
/// the process, and loads + validates the 3D volume it produced.
ScalarField run_model(const ModelEndpoint& endpoint, const ScalarField& observable,
                      const std::filesystem::path& workdir);

/// Voxels where the intervened component is non-negligible; response metrics
/// are evaluated here.
struct SupportMask {
    std::vector<std::size_t> shape;
    std::vector<std::uint8_t> mask;  // 1 = in support
    double theta_support = 0.0;
    double tau_floor = 0.0;

    std::size_t count() const noexcept;
};

/// component >= theta * max(component), intersected with `valid`.
SupportMask make_support(const ScalarField& component, double theta,
                         const std::vector<std::uint8_t>& valid, double tau_floor);

/// A ratio field together with its validity mask; cells where the
/// denominator sits below the floor are masked (ratio forced to 1).
struct RatioField {
    ScalarField ratio;
    std::vector<std::uint8_t> valid;
    double masked_fraction = 0.0;
};

/// Deterministic baseline ratio implied by the intervention:
/// R* = 1 + (f - 1) * component / raw_volume on cells above the floor.
RatioField expected_ratio(const ScalarField& raw_volume, const ScalarField& component,
                          double factor, double tau_floor);

/// Model response ratio pred_mod / pred_raw with the same floor masking.
RatioField response_ratio(const ScalarField& pred_mod, const ScalarField& pred_raw,
                          double tau_floor);

struct Histogram {
    double lo = 0.0, hi = 0.0;
    std::vector<std::size_t> counts;
};

struct ClassifyConfig {
    double tau_floor = 1e-6;      // denominator floor, relative to max
    double theta_support = 0.01;  // support threshold, relative to component max
    double phi_frozen = 0.1;      // freezing flag: Phi below this
    double phi_divergent = 10.0;  // divergence flag: Phi above this
    std::size_t histogram_bins = 64;
};

struct ResponseReport {
    ScalarField ratio;     // R
    ScalarField expected;  // R*
    SupportMask support;
    double masked_fraction = 0.0;
    double monotonicity = 0.0;     // M: sign-agreement fraction on support
    double freezing = 1.0;         // Phi: |R-1| L1 over |R*-1| L1 on support
    double median_ratio = 1.0;     // median of R on support
    double median_expected = 1.0;  // median of R* on support
    bool negative_response = false;
    bool frozen = false;
    bool divergent = false;
    Histogram histogram;  // R over support
};

ResponseReport classify_response(const ScalarField& ratio, const std::vector<std::uint8_t>& valid,
                                 const ScalarField& expected, const SupportMask& support,
                                 double factor, const ClassifyConfig& config = {});

// -- Built-in fixtures (deterministic stand-ins for the model under test) --

enum class FixtureKind { oracle, frozen, signflip };

const char* fixture_kind_name(FixtureKind kind) noexcept;
FixtureKind fixture_kind_from_name(const std::string& name);

/// Ground-truth volumes keyed by the digest of the observable that should
/// elicit them, plus a manifest recording the raw key and per-entry
/// intervention indices.
class FixtureTruthStore {
public:
    explicit FixtureTruthStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

    void initialize();
    void add(const ScalarField& observable, const ScalarField& truth_volume,
             std::optional<std::size_t> point_index, bool is_raw);

    const std::filesystem::path& dir() const noexcept { return dir_; }

private:
    std::filesystem::path dir_;
};

/// Serve one model-protocol request from a truth directory (the CLI
/// `fixture` subcommand body). Appends one line per call to
/// <truth>/invocations.log.
///   oracle   — volume keyed by the input digest
///   frozen   — always the raw-keyed volume
///   signflip — truth on odd intervention indices, the reflection
///              2 * truth_raw - truth_mod (clamped at 0) on even ones
void fixture_serve(FixtureKind kind, const std::filesystem::path& truth_dir,
                   const std::filesystem::path& input_prefix,
                   const std::filesystem::path& output_prefix);

/// Endpoint whose process is this toolkit's own CLI in fixture mode.
ModelEndpoint builtin_fixture(FixtureKind kind, const std::filesystem::path& truth_dir,
                              const std::filesystem::path& cli_path,
                              std::vector<std::size_t> expected_shape,
                              double timeout_sec = 600.0);

// -- Scans --

struct ScanPoint {
    double factor = 1.0;
    std::size_t channel = 0;
    double radius = 0.0;
    bool failed = false;
    std::string error_tag;
    double median_response = 0.0;  // median(R) - 1 on support
    double monotonicity = 0.0;
    double freezing = 1.0;
    bool negative_response = false;
    bool frozen = false;
    bool divergent = false;
    double masked_fraction = 0.0;
    std::size_t support_count = 0;
    Histogram histogram;
};

struct ScanReport {
    std::string axis;  // "amplitude" or "frequency"
    std::vector<ScanPoint> points;
    std::size_t flip_count = 0;
    ClassifyConfig config;
};

/// Strict polarity inversions of median_response across consecutive
/// successful points.
std::size_t count_polarity_flips(const std::vector<ScanPoint>& points);

/// Perturb one channel across `factors`, run the model on raw + modified
/// observables (raw prediction computed once and reused), classify each
/// response. Per-point model failures mark the point failed and continue.
ScanReport amplitude_scan(const ModelEndpoint& endpoint, const ScaleDecomposition& decomp,
                          std::size_t channel, const std::vector<double>& factors,
                          const std::filesystem::path& workdir,
                          const ClassifyConfig& config = {}, int jobs = 1);

/// Perturb every channel in turn with a fixed factor and track the response
/// polarity across the ladder.
ScanReport frequency_scan(const ModelEndpoint& endpoint, const ScaleDecomposition& decomp,
                          double factor, const std::filesystem::path& workdir,
                          const ClassifyConfig& config = {}, int jobs = 1);

}  // namespace scalekit
