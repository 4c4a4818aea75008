#include "scalekit/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"

namespace scalekit {

namespace fs = std::filesystem;
using nlohmann::json;

ScaleLadder make_scales(double r_min, double ratio, std::size_t count) {
    if (!(r_min >= 1.0)) fail(Err::bad_params, "r_min must be >= 1 pixel");
    if (!(ratio > 1.0)) fail(Err::bad_params, "ratio must be > 1");
    if (count == 0) fail(Err::bad_params, "count must be positive");

    ScaleLadder ladder;
    double r = r_min;
    for (std::size_t k = 0; k < count; ++k) {
        if (!std::isfinite(r)) fail(Err::bad_params, "non-finite radius in ladder");
        ladder.radii.push_back(r);
        r *= ratio;
    }
    return ladder;
}

double residual_radius(const ScaleLadder& ladder) {
    const std::size_t n = ladder.radii.size();
    if (n == 0) fail(Err::bad_params, "empty ladder");
    const double top = ladder.radii[n - 1];
    const double ratio = (n >= 2) ? top / ladder.radii[n - 2] : 2.0;
    return top * ratio;
}

namespace {

// One explicit diffusion step with reflecting (zero-flux) boundaries and the
// constrained update out = w + clamp(dt * lap(w), -w, 0). Cells are visited
// in a fixed row-major order; each cell reads only the previous state, so the
// result is independent of traversal order.
void step_1d(const double* w, double* out, std::size_t nx, double dt) {
    for (std::size_t x = 0; x < nx; ++x) {
        const double v = w[x];
        double lap = 0.0;
        if (x > 0) lap += w[x - 1] - v;
        if (x + 1 < nx) lap += w[x + 1] - v;
        double inc = dt * lap;
        if (inc < -v) inc = -v;
        if (inc > 0.0) inc = 0.0;
        out[x] = v + inc;
    }
}

void step_2d(const double* w, double* out, std::size_t ny, std::size_t nx, double dt) {
    for (std::size_t y = 0; y < ny; ++y) {
        const double* c = w + y * nx;
        const double* ym = (y > 0) ? c - nx : nullptr;
        const double* yp = (y + 1 < ny) ? c + nx : nullptr;
        double* o = out + y * nx;
        for (std::size_t x = 0; x < nx; ++x) {
            const double v = c[x];
            double lap = 0.0;
            if (x > 0) lap += c[x - 1] - v;
            if (x + 1 < nx) lap += c[x + 1] - v;
            if (ym) lap += ym[x] - v;
            if (yp) lap += yp[x] - v;
            double inc = dt * lap;
            if (inc < -v) inc = -v;
            if (inc > 0.0) inc = 0.0;
            o[x] = v + inc;
        }
    }
}

void step_3d(const double* w, double* out, std::size_t nz, std::size_t ny, std::size_t nx,
             double dt) {
    const std::size_t sz = ny * nx;
    for (std::size_t z = 0; z < nz; ++z) {
        for (std::size_t y = 0; y < ny; ++y) {
            const double* c = w + z * sz + y * nx;
            const double* zm = (z > 0) ? c - sz : nullptr;
            const double* zp = (z + 1 < nz) ? c + sz : nullptr;
            const double* ym = (y > 0) ? c - nx : nullptr;
            const double* yp = (y + 1 < ny) ? c + nx : nullptr;
            double* o = out + z * sz + y * nx;
            for (std::size_t x = 0; x < nx; ++x) {
                const double v = c[x];
                double lap = 0.0;
                if (x > 0) lap += c[x - 1] - v;
                if (x + 1 < nx) lap += c[x + 1] - v;
                if (ym) lap += ym[x] - v;
                if (yp) lap += yp[x] - v;
                if (zm) lap += zm[x] - v;
                if (zp) lap += zp[x] - v;
                double inc = dt * lap;
                if (inc < -v) inc = -v;
                if (inc > 0.0) inc = 0.0;
                o[x] = v + inc;
            }
        }
    }
}

void diffusion_step(const std::vector<double>& w, std::vector<double>& out,
                    const std::vector<std::size_t>& shape, double dt) {
    switch (shape.size()) {
        case 1: step_1d(w.data(), out.data(), shape[0], dt); break;
        case 2: step_2d(w.data(), out.data(), shape[0], shape[1], dt); break;
        case 3: step_3d(w.data(), out.data(), shape[0], shape[1], shape[2], dt); break;
        default: fail(Err::bad_params, "decompose supports rank 1..3");
    }
}

}  // namespace

ScaleDecomposition decompose(const ScalarField& field, const ScaleLadder& ladder,
                             const DiffusionConfig& config) {
    if (ladder.radii.empty()) fail(Err::bad_params, "empty ladder");
    for (std::size_t k = 1; k < ladder.radii.size(); ++k)
        if (!(ladder.radii[k] > ladder.radii[k - 1]))
            fail(Err::bad_params, "ladder radii must be strictly increasing");
    if (!(ladder.radii.front() >= 1.0)) fail(Err::bad_params, "r_1 must be >= 1 pixel");
    if (!(config.safety > 0.0 && config.safety <= 1.0))
        fail(Err::bad_params, "safety factor must be in (0, 1]");

    const std::size_t min_extent = *std::min_element(field.shape.begin(), field.shape.end());
    if (!(ladder.radii.back() < 0.5 * static_cast<double>(min_extent)))
        fail(Err::scale_too_large, "largest radius must be < min extent / 2");

    const double eps_neg = field.negativity_allowance();
    for (double v : field.data) {
        if (!std::isfinite(v)) fail(Err::malformed_data, "non-finite input value");
        if (v < -eps_neg) fail(Err::negative_input, "input below the negativity allowance");
    }

    const std::size_t dim = field.rank();
    const double dt_base = config.safety / (2.0 * static_cast<double>(dim));

    ScaleDecomposition decomp;
    decomp.ladder = ladder;
    decomp.source_shape = field.shape;
    decomp.source_digest = digest_hex(field);

    std::vector<double> working = field.data;
    std::vector<double> scratch(working.size());

    double elapsed = 0.0;
    for (double radius : ladder.radii) {
        const double target = 0.5 * radius * radius;
        const std::vector<double> channel_start = working;

        const double span = target - elapsed;
        const auto steps = static_cast<std::size_t>(std::ceil(span / dt_base));
        for (std::size_t s = 0; s < steps; ++s) {
            const double dt =
                (s + 1 == steps) ? span - static_cast<double>(steps - 1) * dt_base : dt_base;
            if (dt <= 0.0) continue;
            diffusion_step(working, scratch, field.shape, dt);
            working.swap(scratch);
        }
        elapsed = target;

        ScalarField component = make_field(field.shape, FieldKind::component);
        for (std::size_t i = 0; i < working.size(); ++i)
            component.data[i] = channel_start[i] - working[i];
        decomp.components.push_back(std::move(component));
    }

    decomp.residual = make_field(field.shape, FieldKind::component);
    decomp.residual.data = std::move(working);
    return decomp;
}

ScalarField reconstruct(const ScaleDecomposition& decomp) {
    if (decomp.components.empty()) fail(Err::shape_mismatch, "decomposition has no components");
    const auto& shape = decomp.residual.shape;
    for (const auto& c : decomp.components)
        if (c.shape != shape) fail(Err::shape_mismatch, "component shape differs from residual");

    ScalarField out = make_field(shape, FieldKind::volume_density);
    for (const auto& c : decomp.components)
        for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += c.data[i];
    for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += decomp.residual.data[i];
    return out;
}

std::vector<double> channel_mass(const ScaleDecomposition& decomp) {
    std::vector<double> masses;
    for (const auto& c : decomp.components) masses.push_back(total_mass(c));
    masses.push_back(total_mass(decomp.residual));
    return masses;
}

double ScaleDecomposition::superposition_error(const ScalarField& source) const {
    const ScalarField sum = reconstruct(*this);
    if (sum.shape != source.shape) fail(Err::shape_mismatch, "source shape differs");
    double worst = 0.0;
    for (std::size_t i = 0; i < sum.size(); ++i)
        worst = std::max(worst, std::abs(sum.data[i] - source.data[i]));
    return worst;
}

void store_decomposition(const ScaleDecomposition& decomp, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);

    json ladder;
    ladder["radii"] = decomp.ladder.radii;
    ladder["config"] = {{"boundary", "reflecting"}, {"scale_time", "r2_over_2"}};
    ladder["source_shape"] = decomp.source_shape;
    {
        std::ofstream out(dir / "ladder.json", std::ios::trunc);
        if (!out) fail(Err::io_failure, "cannot write " + (dir / "ladder.json").string());
        out << ladder.dump(2) << '\n';
    }
    {
        std::ofstream out(dir / "source_hash", std::ios::trunc);
        if (!out) fail(Err::io_failure, "cannot write " + (dir / "source_hash").string());
        out << decomp.source_digest << '\n';
    }
    for (std::size_t k = 0; k < decomp.components.size(); ++k)
        store_field(decomp.components[k], dir / ("component_" + std::to_string(k)));
    store_field(decomp.residual, dir / "residual");
}

ScaleDecomposition load_decomposition(const fs::path& dir) {
    std::ifstream ladder_in(dir / "ladder.json");
    if (!ladder_in) fail(Err::missing_file, "cannot open " + (dir / "ladder.json").string());
    json ladder;
    try {
        ladder = json::parse(ladder_in);
    } catch (const json::exception& e) {
        fail(Err::malformed_header, (dir / "ladder.json").string() + ": " + e.what());
    }

    ScaleDecomposition decomp;
    try {
        for (const auto& r : ladder.at("radii")) decomp.ladder.radii.push_back(r.get<double>());
        for (const auto& e : ladder.at("source_shape"))
            decomp.source_shape.push_back(e.get<std::size_t>());
    } catch (const json::exception& e) {
        fail(Err::malformed_header, (dir / "ladder.json").string() + ": " + e.what());
    }
    if (decomp.ladder.radii.empty()) fail(Err::malformed_header, "ladder has no radii");

    for (std::size_t k = 0; k < decomp.ladder.radii.size(); ++k)
        decomp.components.push_back(load_field(dir / ("component_" + std::to_string(k))));
    decomp.residual = load_field(dir / "residual");

    for (const auto& c : decomp.components)
        if (c.shape != decomp.residual.shape)
            fail(Err::shape_mismatch, "component shapes disagree in " + dir.string());

    std::ifstream hash_in(dir / "source_hash");
    if (hash_in) std::getline(hash_in, decomp.source_digest);
    return decomp;
}

}  // namespace scalekit
