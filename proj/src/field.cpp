#include "scalekit/field.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "json.hpp"

namespace scalekit {

namespace fs = std::filesystem;
using nlohmann::json;

const char* kind_name(FieldKind kind) noexcept {
    switch (kind) {
        case FieldKind::volume_density: return "volume_density";
        case FieldKind::surface_density: return "surface_density";
        case FieldKind::ratio: return "ratio";
        case FieldKind::component: return "component";
    }
    return "volume_density";
}

FieldKind kind_from_name(const std::string& name) {
    if (name == "volume_density") return FieldKind::volume_density;
    if (name == "surface_density") return FieldKind::surface_density;
    if (name == "ratio") return FieldKind::ratio;
    if (name == "component") return FieldKind::component;
    fail(Err::malformed_header, "unknown field_kind '" + name + "'");
}

std::size_t shape_volume(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t e : shape) n *= e;
    return n;
}

ScalarField make_field(std::vector<std::size_t> shape, FieldKind kind, double fill) {
    for (std::size_t e : shape)
        if (e == 0) fail(Err::bad_params, "zero extent in shape");
    ScalarField f;
    f.data.assign(shape_volume(shape), fill);
    f.shape = std::move(shape);
    f.kind = kind;
    return f;
}

double ScalarField::max_value() const noexcept {
    double m = -std::numeric_limits<double>::infinity();
    for (double v : data) m = std::max(m, v);
    return data.empty() ? 0.0 : m;
}

double ScalarField::min_value() const noexcept {
    double m = std::numeric_limits<double>::infinity();
    for (double v : data) m = std::min(m, v);
    return data.empty() ? 0.0 : m;
}

static_assert(std::endian::native == std::endian::little,
              "NDF binary payload is little-endian; big-endian hosts need a swap pass");

ScalarField load_field(const fs::path& prefix) {
    fs::path header_path = prefix;
    header_path += ".json";
    fs::path binary_path = prefix;
    binary_path += ".bin";

    std::ifstream header_in(header_path);
    if (!header_in) fail(Err::missing_file, "cannot open " + header_path.string());

    json header;
    try {
        header = json::parse(header_in);
    } catch (const json::exception& e) {
        fail(Err::malformed_header, header_path.string() + ": " + e.what());
    }

    ScalarField field;
    try {
        if (header.at("format_version").get<int>() != 1)
            fail(Err::malformed_header, "unsupported format_version");
        if (header.at("dtype").get<std::string>() != "f64le")
            fail(Err::malformed_header, "unsupported dtype");
        for (const auto& e : header.at("shape")) {
            auto v = e.get<std::int64_t>();
            if (v <= 0) fail(Err::malformed_header, "non-positive extent in shape");
            field.shape.push_back(static_cast<std::size_t>(v));
        }
        if (field.shape.empty()) fail(Err::malformed_header, "empty shape");
        field.kind = kind_from_name(header.at("field_kind").get<std::string>());
        if (header.contains("pixel_size")) {
            PixelSize ps;
            ps.value = header["pixel_size"].at("value").get<double>();
            ps.unit = header["pixel_size"].at("unit").get<std::string>();
            if (!(ps.value > 0.0)) fail(Err::malformed_header, "pixel_size must be positive");
            field.pixel_size = ps;
        }
        if (header.contains("note")) field.note = header["note"].get<std::string>();
    } catch (const json::exception& e) {
        fail(Err::malformed_header, header_path.string() + ": " + e.what());
    }

    std::error_code ec;
    const auto file_size = fs::file_size(binary_path, ec);
    if (ec) fail(Err::missing_file, "cannot stat " + binary_path.string());

    const std::size_t count = shape_volume(field.shape);
    if (file_size != 8 * count)
        fail(Err::length_mismatch, binary_path.string() + ": expected " +
                                       std::to_string(8 * count) + " bytes, found " +
                                       std::to_string(file_size));

    std::ifstream binary_in(binary_path, std::ios::binary);
    if (!binary_in) fail(Err::missing_file, "cannot open " + binary_path.string());
    field.data.resize(count);
    binary_in.read(reinterpret_cast<char*>(field.data.data()),
                   static_cast<std::streamsize>(8 * count));
    if (!binary_in) fail(Err::io_failure, "short read on " + binary_path.string());

    for (double v : field.data)
        if (!std::isfinite(v)) fail(Err::malformed_data, "non-finite value in " + binary_path.string());

    return field;
}

void store_field(const ScalarField& field, const fs::path& prefix) {
    if (field.data.size() != shape_volume(field.shape))
        fail(Err::length_mismatch, "data length does not match shape");

    json header;
    header["format_version"] = 1;
    header["dtype"] = "f64le";
    header["shape"] = field.shape;
    header["field_kind"] = kind_name(field.kind);
    if (field.pixel_size) {
        header["pixel_size"] = {{"value", field.pixel_size->value},
                                {"unit", field.pixel_size->unit}};
    }
    if (field.note) header["note"] = *field.note;

    fs::path header_path = prefix;
    header_path += ".json";
    fs::path binary_path = prefix;
    binary_path += ".bin";

    {
        std::ofstream out(header_path, std::ios::trunc);
        if (!out) fail(Err::io_failure, "cannot write " + header_path.string());
        out << header.dump(2) << '\n';
        if (!out) fail(Err::io_failure, "write failed on " + header_path.string());
    }
    {
        std::ofstream out(binary_path, std::ios::binary | std::ios::trunc);
        if (!out) fail(Err::io_failure, "cannot write " + binary_path.string());
        out.write(reinterpret_cast<const char*>(field.data.data()),
                  static_cast<std::streamsize>(8 * field.data.size()));
        if (!out) fail(Err::io_failure, "write failed on " + binary_path.string());
    }
}

double pairwise_sum(const double* values, std::size_t count) {
    if (count <= 64) {
        double acc = 0.0;
        for (std::size_t i = 0; i < count; ++i) acc += values[i];
        return acc;
    }
    const std::size_t half = count / 2;
    return pairwise_sum(values, half) + pairwise_sum(values + half, count - half);
}

double total_mass(const ScalarField& field) {
    return pairwise_sum(field.data.data(), field.data.size());
}

ScalarField project(const ScalarField& volume, int axis) {
    if (volume.rank() != 3) fail(Err::dim_mismatch, "project expects a 3D volume");
    if (axis < 0 || axis > 2) fail(Err::bad_params, "axis must be 0, 1 or 2");

    const std::size_t n0 = volume.shape[0], n1 = volume.shape[1], n2 = volume.shape[2];
    std::vector<std::size_t> out_shape;
    for (int a = 0; a < 3; ++a)
        if (a != axis) out_shape.push_back(volume.shape[static_cast<std::size_t>(a)]);

    ScalarField out = make_field(out_shape, FieldKind::surface_density);
    out.pixel_size = volume.pixel_size;

    const double* v = volume.data.data();
    double* o = out.data.data();
    const std::size_t s0 = n1 * n2;

    // Serial accumulation in increasing index along the projected axis.
    if (axis == 0) {
        for (std::size_t i = 0; i < n0; ++i)
            for (std::size_t j = 0; j < n1 * n2; ++j) o[j] += v[i * s0 + j];
    } else if (axis == 1) {
        for (std::size_t i = 0; i < n0; ++i)
            for (std::size_t j = 0; j < n1; ++j)
                for (std::size_t k = 0; k < n2; ++k) o[i * n2 + k] += v[i * s0 + j * n2 + k];
    } else {
        for (std::size_t i = 0; i < n0; ++i)
            for (std::size_t j = 0; j < n1; ++j) {
                const double* row = v + i * s0 + j * n2;
                double acc = 0.0;
                for (std::size_t k = 0; k < n2; ++k) acc += row[k];
                o[i * n1 + j] = acc;
            }
    }
    return out;
}

ScalarField lift_uniform(const ScalarField& map2d, std::size_t depth) {
    if (map2d.rank() != 2) fail(Err::dim_mismatch, "lift_uniform expects a 2D map");
    if (depth < 1) fail(Err::bad_params, "depth must be >= 1");

    const std::size_t plane = map2d.size();
    ScalarField out = make_field({depth, map2d.shape[0], map2d.shape[1]}, FieldKind::volume_density);
    out.pixel_size = map2d.pixel_size;
    const double inv = 1.0 / static_cast<double>(depth);
    for (std::size_t z = 0; z < depth; ++z)
        for (std::size_t j = 0; j < plane; ++j) out.data[z * plane + j] = map2d.data[j] * inv;
    return out;
}

std::uint64_t fnv1a64(const void* bytes, std::size_t count) noexcept {
    const auto* p = static_cast<const unsigned char*>(bytes);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < count; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string digest_hex(const ScalarField& field) {
    const std::uint64_t h = fnv1a64(field.data.data(), 8 * field.data.size());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace scalekit
