#include <cmath>
#include <cstring>

#include "doctest.h"

#include "scalekit/decompose.hpp"
#include "scalekit/synth.hpp"
#include "test_util.hpp"

using namespace scalekit;
using testutil::TempDir;

namespace {

// Reference implementation of the constrained-diffusion update, written
// independently of the library kernel: dimension-generic multi-index walk,
// neighbor-sum Laplacian, no buffer reuse. Slow on purpose.
struct ReferenceDecomposition {
    std::vector<std::vector<double>> components;
    std::vector<double> residual;
};

std::vector<double> reference_step(const std::vector<double>& state,
                                   const std::vector<std::size_t>& shape, double dt) {
    const std::size_t rank = shape.size();
    std::vector<std::size_t> strides(rank, 1);
    for (std::size_t a = rank - 1; a > 0; --a) strides[a - 1] = strides[a] * shape[a];

    std::vector<double> next(state.size());
    std::vector<std::size_t> index(rank, 0);
    for (std::size_t flat = 0; flat < state.size(); ++flat) {
        double neighbor_sum = 0.0;
        int neighbor_count = 0;
        for (std::size_t a = 0; a < rank; ++a) {
            if (index[a] > 0) {
                neighbor_sum += state[flat - strides[a]];
                ++neighbor_count;
            }
            if (index[a] + 1 < shape[a]) {
                neighbor_sum += state[flat + strides[a]];
                ++neighbor_count;
            }
        }
        const double laplacian = neighbor_sum - static_cast<double>(neighbor_count) * state[flat];
        double increment = dt * laplacian;
        if (increment > 0.0) increment = 0.0;
        if (increment < -state[flat]) increment = -state[flat];
        next[flat] = state[flat] + increment;

        for (std::size_t a = rank; a-- > 0;) {
            if (++index[a] < shape[a]) break;
            index[a] = 0;
        }
    }
    return next;
}

ReferenceDecomposition reference_decompose(const std::vector<double>& input,
                                           const std::vector<std::size_t>& shape,
                                           const std::vector<double>& radii, double safety) {
    const double dt_base = safety / (2.0 * static_cast<double>(shape.size()));
    ReferenceDecomposition result;
    std::vector<double> state = input;
    double elapsed = 0.0;
    for (double r : radii) {
        const double target = 0.5 * r * r;
        const std::vector<double> before = state;
        const double span = target - elapsed;
        const auto steps = static_cast<std::size_t>(std::ceil(span / dt_base));
        for (std::size_t s = 0; s < steps; ++s) {
            const double dt =
                (s + 1 == steps) ? span - static_cast<double>(steps - 1) * dt_base : dt_base;
            if (dt > 0.0) state = reference_step(state, shape, dt);
        }
        elapsed = target;
        std::vector<double> component(state.size());
        for (std::size_t i = 0; i < state.size(); ++i) component[i] = before[i] - state[i];
        result.components.push_back(std::move(component));
    }
    result.residual = state;
    return result;
}

}  // namespace

TEST_SUITE("decompose") {

TEST_CASE("make_scales") {
    const ScaleLadder octaves = make_scales(1.0, 2.0, 4);
    CHECK(octaves.radii == std::vector<double>{1.0, 2.0, 4.0, 8.0});
    CHECK(make_scales(2.0, 2.0, 1).radii == std::vector<double>{2.0});

    CHECK_THROWS_AS(make_scales(1.0, 1.0, 3), Error);  // ratio must exceed 1
    CHECK_THROWS_AS(make_scales(0.5, 2.0, 3), Error);
    CHECK_THROWS_AS(make_scales(1.0, 2.0, 0), Error);
}

TEST_CASE("zero and constant fields") {
    const ScaleLadder ladder = make_scales(1.0, 2.0, 3);

    const ScalarField zero = make_field({32, 32}, FieldKind::volume_density);
    const ScaleDecomposition dz = decompose(zero, ladder);
    for (const auto& c : dz.components)
        for (double v : c.data) CHECK(v == 0.0);
    for (double v : dz.residual.data) CHECK(v == 0.0);

    // A constant is a diffusion fixed point: nothing leaves the residual.
    const ScalarField constant = make_field({32, 32}, FieldKind::volume_density, 3.25);
    const ScaleDecomposition dc = decompose(constant, ladder);
    for (const auto& c : dc.components)
        for (double v : c.data) CHECK(v == 0.0);
    for (double v : dc.residual.data) CHECK(v == 3.25);
    const ScalarField back = reconstruct(dc);
    for (double v : back.data) CHECK(v == 3.25);
}

TEST_CASE("1D delta spike against the reference implementation") {
    ScalarField spike = make_field({64}, FieldKind::volume_density);
    spike.data[31] = 1.0;
    const ScaleLadder ladder = make_scales(1.0, 2.0, 3);  // {1, 2, 4}

    const ScaleDecomposition decomp = decompose(spike, ladder);
    const ReferenceDecomposition reference =
        reference_decompose(spike.data, spike.shape, ladder.radii, 0.5);

    const auto masses = channel_mass(decomp);
    REQUIRE(masses.size() == 4);
    for (std::size_t k = 0; k < 3; ++k) {
        const double expected = testutil::compensated_sum(reference.components[k]);
        CHECK(std::abs(masses[k] - expected) <= 1e-10);
        CHECK(masses[k] > 0.0);  // a spike sheds mass at every scale
    }
    const double expected_residual = testutil::compensated_sum(reference.residual);
    CHECK(std::abs(masses[3] - expected_residual) <= 1e-10);

    // Fieldwise agreement, not just masses.
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t i = 0; i < spike.size(); ++i)
            CHECK(std::abs(decomp.components[k].data[i] - reference.components[k][i]) <= 1e-12);
}

TEST_CASE("2D field against the reference implementation") {
    SynthSpec spec;
    spec.shape = {24, 24};
    spec.seed = 5150;
    const ScalarField field = lognormal_field(spec);
    const ScaleLadder ladder = make_scales(1.0, 2.0, 3);

    const ScaleDecomposition decomp = decompose(field, ladder);
    const ReferenceDecomposition reference =
        reference_decompose(field.data, field.shape, ladder.radii, 0.5);

    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t i = 0; i < field.size(); ++i)
            CHECK(std::abs(decomp.components[k].data[i] - reference.components[k][i]) <=
                  1e-10 * field.max_value());
}

TEST_CASE("superposition, non-negativity, mass telescoping") {
    SynthSpec spec;
    spec.shape = {32, 32, 32};
    spec.seed = 424242;
    const ScalarField field = lognormal_field(spec);
    const ScaleLadder ladder = make_scales(1.0, 2.0, 4);

    const ScaleDecomposition decomp = decompose(field, ladder);

    CHECK(decomp.superposition_error(field) <= 1e-10 * field.max_value());

    const double allowance = 1e-12 * field.max_value();
    for (const auto& c : decomp.components) CHECK(c.min_value() >= -allowance);
    CHECK(decomp.residual.min_value() >= -allowance);

    const auto masses = channel_mass(decomp);
    const double telescoped = testutil::compensated_sum(masses);
    const double source_mass = total_mass(field);
    CHECK(std::abs(telescoped - source_mass) <= 1e-10 * source_mass);
}

TEST_CASE("monotone damping of the working field") {
    // max(W) never grows, so the max of any partial reconstruction is bounded
    // by the source max; check the per-channel proxy: component max <= source max.
    SynthSpec spec;
    spec.shape = {48, 48};
    spec.seed = 8;
    const ScalarField field = lognormal_field(spec);
    const ScaleDecomposition decomp = decompose(field, make_scales(1.0, 2.0, 4));
    double previous_max = field.max_value();
    ScalarField running = field;
    for (const auto& c : decomp.components) {
        for (std::size_t i = 0; i < running.size(); ++i) running.data[i] -= c.data[i];
        const double now = running.max_value();
        CHECK(now <= previous_max * (1.0 + 1e-14));
        previous_max = now;
    }
}

TEST_CASE("scale attribution for Gaussian blobs") {
    for (double sigma : {2.0, 4.0, 8.0}) {
        SynthSpec spec;
        spec.kind = SynthKind::blob;
        spec.shape = {128, 128};
        spec.sigma = sigma;
        spec.amplitude = 1.0;
        const ScalarField blob = gaussian_blob(spec);
        const ScaleLadder ladder = make_scales(1.0, 2.0, 6);  // up to r = 32
        const ScaleDecomposition decomp = decompose(blob, ladder);
        const auto masses = channel_mass(decomp);
        std::size_t best = 0;
        for (std::size_t k = 1; k < decomp.channel_count(); ++k)
            if (masses[k] > masses[best]) best = k;
        const double r_best = ladder.radii[best];
        CHECK(r_best >= sigma / 2.0);
        CHECK(r_best <= sigma * 2.0);
    }
}

TEST_CASE("determinism: identical runs, identical bits") {
    SynthSpec spec;
    spec.shape = {24, 24, 24};
    spec.seed = 31337;
    const ScalarField field = lognormal_field(spec);
    const ScaleLadder ladder = make_scales(1.0, 2.0, 3);

    const ScaleDecomposition a = decompose(field, ladder);
    const ScaleDecomposition b = decompose(field, ladder);
    for (std::size_t k = 0; k < a.channel_count(); ++k)
        CHECK(std::memcmp(a.components[k].data.data(), b.components[k].data.data(),
                          8 * a.components[k].size()) == 0);
    CHECK(std::memcmp(a.residual.data.data(), b.residual.data.data(),
                      8 * a.residual.size()) == 0);
}

TEST_CASE("input validation") {
    const ScaleLadder ladder = make_scales(1.0, 2.0, 3);

    ScalarField negative = make_field({16, 16}, FieldKind::volume_density, 1.0);
    negative.data[5] = -0.5;
    CHECK_THROWS_AS(decompose(negative, ladder), Error);
    try {
        decompose(negative, ladder);
    } catch (const Error& e) {
        CHECK(e.code() == Err::negative_input);
    }

    // Tiny negatives within the allowance pass.
    ScalarField noisy = make_field({16, 16}, FieldKind::volume_density, 1.0);
    noisy.data[3] = -1e-13;
    CHECK_NOTHROW(decompose(noisy, ladder));

    const ScalarField small = make_field({8, 8}, FieldKind::volume_density, 1.0);
    try {
        decompose(small, ladder);  // r_3 = 4 >= 8/2
        FAIL("expected SCALE_TOO_LARGE");
    } catch (const Error& e) {
        CHECK(e.code() == Err::scale_too_large);
    }
}

TEST_CASE("reconstruct of a hand-built decomposition") {
    ScaleDecomposition decomp;
    decomp.ladder = make_scales(1.0, 2.0, 2);
    decomp.source_shape = {2, 2};
    ScalarField a = make_field({2, 2}, FieldKind::component, 1.0);
    ScalarField b = make_field({2, 2}, FieldKind::component, 2.0);
    ScalarField c = make_field({2, 2}, FieldKind::component, 4.0);
    decomp.components = {a, b};
    decomp.residual = c;
    const ScalarField sum = reconstruct(decomp);
    for (double v : sum.data) CHECK(v == 7.0);

    decomp.components[1] = make_field({3, 3}, FieldKind::component, 2.0);
    CHECK_THROWS_AS(reconstruct(decomp), Error);  // SHAPE_MISMATCH
}

TEST_CASE("decomposition directory round trip") {
    TempDir tmp("decomp_io");
    SynthSpec spec;
    spec.shape = {16, 16, 16};
    spec.seed = 606;
    const ScalarField field = lognormal_field(spec);
    const ScaleDecomposition decomp = decompose(field, make_scales(1.0, 2.0, 3));

    store_decomposition(decomp, tmp / "d");
    const ScaleDecomposition loaded = load_decomposition(tmp / "d");

    CHECK(loaded.ladder.radii == decomp.ladder.radii);
    CHECK(loaded.source_shape == decomp.source_shape);
    CHECK(loaded.source_digest == decomp.source_digest);
    REQUIRE(loaded.channel_count() == decomp.channel_count());
    for (std::size_t k = 0; k < decomp.channel_count(); ++k)
        CHECK(loaded.components[k].data == decomp.components[k].data);
    CHECK(loaded.residual.data == decomp.residual.data);
}

}  // TEST_SUITE
