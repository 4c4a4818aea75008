#include <cmath>

#include "doctest.h"

#include "scalekit/intervene.hpp"
#include "scalekit/synth.hpp"
#include "test_util.hpp"

using namespace scalekit;

namespace {

ScaleDecomposition lognormal_decomposition(std::vector<std::size_t> shape, std::uint64_t seed,
                                           std::size_t channels) {
    SynthSpec spec;
    spec.shape = std::move(shape);
    spec.seed = seed;
    return decompose(lognormal_field(spec), make_scales(1.0, 2.0, channels));
}

// Constant components with prescribed per-channel amplitudes; the density
// scale of a constant field c is c itself.
ScaleDecomposition constant_decomposition(const std::vector<double>& radii,
                                          const std::vector<double>& levels) {
    ScaleDecomposition decomp;
    decomp.ladder.radii = radii;
    decomp.source_shape = {8, 8};
    for (double level : levels)
        decomp.components.push_back(make_field({8, 8}, FieldKind::component, level));
    decomp.residual = make_field({8, 8}, FieldKind::component, 0.0);
    return decomp;
}

}  // namespace

TEST_SUITE("intervene") {

TEST_CASE("perturb_scale: identity, linearity, mass arithmetic") {
    const ScaleDecomposition decomp = lognormal_decomposition({24, 24, 24}, 11, 3);
    const ScalarField base = reconstruct(decomp);

    const ScalarField identity = perturb_scale(decomp, {1, 1.0});
    CHECK(identity.data == base.data);  // f = 1 is bitwise inert

    const ScalarField boosted = perturb_scale(decomp, {1, 1.5});
    const auto& component = decomp.components[1];
    const double scale = boosted.max_value();
    for (std::size_t i = 0; i < base.size(); ++i) {
        const double lhs = boosted.data[i] - base.data[i];
        const double rhs = 0.5 * component.data[i];
        CHECK(std::abs(lhs - rhs) <= 1e-15 * scale);
    }

    const double mass_j = total_mass(component);
    const double grown = total_mass(perturb_scale(decomp, {1, 3.0}));
    const double expected = total_mass(base) + 2.0 * mass_j;
    CHECK(std::abs(grown - expected) <= 1e-12 * expected);
}

TEST_CASE("perturb_scale composition law") {
    const ScaleDecomposition decomp = lognormal_decomposition({20, 20}, 3, 3);
    const double f1 = 1.4, f2 = 2.2;

    // Two perturbations of the same channel add: f1 then f2 == f1 + f2 - 1.
    ScalarField once = perturb_scale(decomp, {2, f1});
    const auto& component = decomp.components[2];
    for (std::size_t i = 0; i < once.size(); ++i)
        once.data[i] += (f2 - 1.0) * component.data[i];
    const ScalarField combined = perturb_scale(decomp, {2, f1 + f2 - 1.0});
    const double scale = combined.max_value();
    for (std::size_t i = 0; i < once.size(); ++i)
        CHECK(std::abs(once.data[i] - combined.data[i]) <= 1e-14 * scale);
}

TEST_CASE("perturb_scale: channel deletion and validation") {
    const ScaleDecomposition decomp = lognormal_decomposition({20, 20}, 4, 2);
    const ScalarField deleted = perturb_scale(decomp, {0, 0.0});
    const ScalarField base = reconstruct(decomp);
    const auto& component = decomp.components[0];
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(deleted.data[i] ==
              doctest::Approx(base.data[i] - component.data[i]).epsilon(1e-12));
    CHECK(deleted.min_value() >= -1e-12 * base.max_value());

    CHECK_THROWS_AS(perturb_scale(decomp, {5, 1.5}), Error);   // BAD_CHANNEL
    CHECK_THROWS_AS(perturb_scale(decomp, {0, -0.5}), Error);  // NEGATIVE_FACTOR
    try {
        perturb_scale(decomp, {0, -0.5});
    } catch (const Error& e) {
        CHECK(e.code() == Err::negative_factor);
    }
}

TEST_CASE("tilt_cascade: identity and pivot invariance") {
    const ScaleDecomposition decomp = lognormal_decomposition({16, 16, 16}, 21, 3);
    const ScalarField base = reconstruct(decomp);

    const ScalarField flat = tilt_cascade(decomp, {0.0, 2.0});
    for (std::size_t i = 0; i < base.size(); ++i)
        CHECK(std::abs(flat.data[i] - base.data[i]) <= 1e-15 * base.max_value());

    // The channel sitting at the pivot is untouched for any s_c.
    const ScaleDecomposition tilted = tilt_components(decomp, {3.7, decomp.ladder.radii[1]});
    CHECK(tilted.components[1].data == decomp.components[1].data);

    CHECK(tilt_cascade(decomp, {2.0, 1.0}).min_value() >= 0.0);
}

TEST_CASE("two-channel toy masses under tilt") {
    // Masses {8, 1} at radii {1, 2}; r_ref = 1, s_c = 3 scales channel 1 by 8.
    ScaleDecomposition decomp = constant_decomposition({1.0, 2.0}, {8.0 / 64.0, 1.0 / 64.0});
    const auto before = channel_mass(decomp);
    CHECK(before[0] == doctest::Approx(8.0));
    CHECK(before[1] == doctest::Approx(1.0));

    const ScaleDecomposition tilted = tilt_components(decomp, {3.0, 1.0});
    const auto after = channel_mass(tilted);
    CHECK(after[0] == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(after[1] == doctest::Approx(8.0).epsilon(1e-14));
}

TEST_CASE("measure_cascade: two-point slope and exclusions") {
    const ScaleDecomposition decomp = constant_decomposition({1.0, 2.0}, {8.0, 1.0});
    const CascadeFit fit = measure_cascade(decomp);
    // kappa = log(1/8) / log 2 = -3 exactly.
    CHECK(fit.exponent == doctest::Approx(-3.0).epsilon(1e-14));
    CHECK(fit.residual_rms <= 1e-12);
    CHECK(fit.radii.size() == 2);

    const ScaleDecomposition sparse = constant_decomposition({1.0, 2.0, 4.0}, {0.0, 5.0, 0.0});
    CHECK_THROWS_AS(measure_cascade(sparse), Error);
    try {
        measure_cascade(sparse);
    } catch (const Error& e) {
        CHECK(e.code() == Err::insufficient_channels);
    }
}

TEST_CASE("density scale is homogeneous of degree one") {
    const ScalarField c = testutil::random_field({32, 32}, 5, FieldKind::component);
    const double n1 = channel_density_scale(c);
    ScalarField scaled = c;
    for (double& v : scaled.data) v *= 3.5;
    CHECK(channel_density_scale(scaled) == doctest::Approx(3.5 * n1).epsilon(1e-13));
}

TEST_CASE("tilt shifts the fitted exponent by exactly s_c") {
    const ScaleDecomposition decomp = lognormal_decomposition({32, 32, 32}, 2024, 4);
    const CascadeFit before = measure_cascade(decomp);

    for (double sc : {-1.0, 0.5, 2.5}) {
        const ScaleDecomposition tilted = tilt_components(decomp, {sc, 2.0});
        const CascadeFit after = measure_cascade(tilted);
        CHECK(std::abs(after.exponent - (before.exponent + sc)) <= 1e-10);
    }
}

TEST_CASE("total mass is monotone in s_c and anchored at zero") {
    const ScaleDecomposition decomp = lognormal_decomposition({16, 16, 16}, 77, 3);
    const double source_mass = total_mass(reconstruct(decomp));
    double previous = -1.0;
    for (double sc : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
        const double mass = total_mass(tilt_cascade(decomp, {sc, 1.0}));
        if (sc == 0.0) CHECK(mass == doctest::Approx(source_mass).epsilon(1e-12));
        CHECK(mass > previous);  // every radius >= pivot here, so mass grows with s_c
        previous = mass;
    }
}

}  // TEST_SUITE
