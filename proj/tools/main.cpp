#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "scalekit/audit.hpp"
#include "scalekit/decompose.hpp"
#include "scalekit/field.hpp"
#include "scalekit/intervene.hpp"
#include "scalekit/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace scalekit;

namespace {

constexpr const char* kToolkitVersion = "0.1.0";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) parts.push_back(item);
    return parts;
}

std::vector<std::size_t> parse_shape(const std::string& text) {
    std::vector<std::size_t> shape;
    for (const auto& part : split(text, ',')) {
        try {
            const long v = std::stol(part);
            if (v <= 0) throw UsageError("--shape extents must be positive: " + text);
            shape.push_back(static_cast<std::size_t>(v));
        } catch (const std::logic_error&) {
            throw UsageError("--shape expects comma-separated integers, got '" + text + "'");
        }
    }
    if (shape.empty()) throw UsageError("--shape must not be empty");
    return shape;
}

std::vector<double> parse_double_list(const std::string& text, const char* flag) {
    std::vector<double> values;
    for (const auto& part : split(text, ',')) {
        try {
            values.push_back(std::stod(part));
        } catch (const std::logic_error&) {
            throw UsageError(std::string(flag) + " expects comma-separated reals, got '" + text +
                             "'");
        }
    }
    if (values.empty()) throw UsageError(std::string(flag) + " must not be empty");
    return values;
}

// Ladder syntax rmin:ratio:count.
ScaleLadder parse_scales(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError("--scales expects rmin:ratio:count, got '" + text + "'");
    try {
        const double r_min = std::stod(parts[0]);
        const double ratio = std::stod(parts[1]);
        const long count = std::stol(parts[2]);
        if (count < 0) throw UsageError("--scales count must be non-negative");
        return make_scales(r_min, ratio, static_cast<std::size_t>(count));
    } catch (const std::logic_error&) {
        throw UsageError("--scales expects rmin:ratio:count, got '" + text + "'");
    }
}

std::optional<PixelSize> parse_pixel_size(const std::string& text) {
    if (text.empty()) return std::nullopt;
    const auto pos = text.find(':');
    if (pos == std::string::npos)
        throw UsageError("--pixel-size expects value:unit, got '" + text + "'");
    try {
        PixelSize ps;
        ps.value = std::stod(text.substr(0, pos));
        ps.unit = text.substr(pos + 1);
        return ps;
    } catch (const std::logic_error&) {
        throw UsageError("--pixel-size expects value:unit, got '" + text + "'");
    }
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest(const fs::path& path, const std::string& subcommand, json parameters,
                    json input_digests, const std::vector<fs::path>& outputs) {
    json manifest;
    manifest["subcommand"] = subcommand;
    manifest["parameters"] = std::move(parameters);
    manifest["inputs"] = std::move(input_digests);
    json out_list = json::array();
    for (const auto& p : outputs) out_list.push_back(p.string());
    manifest["outputs"] = out_list;
    manifest["version"] = kToolkitVersion;
    manifest["timestamp"] = iso_timestamp();

    std::ofstream out(path, std::ios::trunc);
    if (!out) fail(Err::io_failure, "cannot write " + path.string());
    out << manifest.dump(2) << '\n';
}

std::vector<fs::path> ndf_pair(const fs::path& prefix) {
    fs::path header = prefix, binary = prefix;
    header += ".json";
    binary += ".bin";
    return {header, binary};
}

std::size_t max_mass_channel(const ScaleDecomposition& decomp) {
    const auto masses = channel_mass(decomp);
    std::size_t best = 0;
    for (std::size_t k = 1; k < decomp.channel_count(); ++k)
        if (masses[k] > masses[best]) best = k;
    return best;
}

fs::path self_path() {
    std::error_code ec;
    const fs::path p = fs::read_symlink("/proc/self/exe", ec);
    return ec ? fs::path("scalekit") : p;
}

std::string format_flags(bool negative, bool frozen, bool divergent) {
    std::string flags;
    const auto append = [&](const char* name) {
        if (!flags.empty()) flags += '|';
        flags += name;
    };
    if (negative) append("NEGATIVE_RESPONSE");
    if (frozen) append("FROZEN");
    if (divergent) append("DIVERGENT");
    return flags.empty() ? "none" : flags;
}

void write_scan_report(const ScanReport& report, const fs::path& out_prefix,
                       std::vector<fs::path>& outputs) {
    fs::path text_path = out_prefix, points_path = out_prefix, hist_path = out_prefix;
    text_path += "_scan.txt";
    points_path += "_points.csv";
    hist_path += "_hist.csv";

    {
        std::ofstream out(text_path, std::ios::trunc);
        if (!out) fail(Err::io_failure, "cannot write " + text_path.string());
        out << std::setprecision(17);
        out << "axis = " << report.axis << '\n';
        out << "points = " << report.points.size() << '\n';
        out << "flip_count = " << report.flip_count << '\n';
        out << "tau_floor = " << report.config.tau_floor << '\n';
        out << "theta_support = " << report.config.theta_support << '\n';
        out << "phi_frozen = " << report.config.phi_frozen << '\n';
        out << "phi_divergent = " << report.config.phi_divergent << '\n';
        for (std::size_t k = 0; k < report.points.size(); ++k) {
            const auto& p = report.points[k];
            const std::string key = "point." + std::to_string(k) + ".";
            out << key << "channel = " << p.channel << '\n';
            out << key << "radius = " << p.radius << '\n';
            out << key << "factor = " << p.factor << '\n';
            out << key << "failed = " << (p.failed ? 1 : 0) << '\n';
            if (p.failed) {
                out << key << "error = " << p.error_tag << '\n';
                continue;
            }
            out << key << "median_response = " << p.median_response << '\n';
            out << key << "monotonicity = " << p.monotonicity << '\n';
            out << key << "freezing = " << p.freezing << '\n';
            out << key << "flags = "
                << format_flags(p.negative_response, p.frozen, p.divergent) << '\n';
            out << key << "masked_fraction = " << p.masked_fraction << '\n';
            out << key << "support_count = " << p.support_count << '\n';
        }
    }
    {
        std::ofstream out(points_path, std::ios::trunc);
        if (!out) fail(Err::io_failure, "cannot write " + points_path.string());
        out << std::setprecision(17);
        out << "point,channel,radius,factor,failed,error,median_response,monotonicity,"
               "freezing,negative_response,frozen,divergent,masked_fraction,support_count\n";
        for (std::size_t k = 0; k < report.points.size(); ++k) {
            const auto& p = report.points[k];
            out << k << ',' << p.channel << ',' << p.radius << ',' << p.factor << ','
                << (p.failed ? 1 : 0) << ',' << p.error_tag << ',';
            if (p.failed) {
                out << ",,,,,,,\n";
                continue;
            }
            out << p.median_response << ',' << p.monotonicity << ',' << p.freezing << ','
                << (p.negative_response ? 1 : 0) << ',' << (p.frozen ? 1 : 0) << ','
                << (p.divergent ? 1 : 0) << ',' << p.masked_fraction << ',' << p.support_count
                << '\n';
        }
    }
    {
        std::ofstream out(hist_path, std::ios::trunc);
        if (!out) fail(Err::io_failure, "cannot write " + hist_path.string());
        out << std::setprecision(17);
        out << "point,bin_lo,bin_hi,count\n";
        for (std::size_t k = 0; k < report.points.size(); ++k) {
            const auto& p = report.points[k];
            if (p.failed || p.histogram.counts.empty()) continue;
            const double width =
                (p.histogram.hi - p.histogram.lo) / static_cast<double>(p.histogram.counts.size());
            for (std::size_t b = 0; b < p.histogram.counts.size(); ++b) {
                out << k << ',' << p.histogram.lo + width * static_cast<double>(b) << ','
                    << p.histogram.lo + width * static_cast<double>(b + 1) << ','
                    << p.histogram.counts[b] << '\n';
            }
        }
    }
    outputs.push_back(text_path);
    outputs.push_back(points_path);
    outputs.push_back(hist_path);
}

// -- subcommand option blocks --

struct SynthOpts {
    std::string kind = "lognormal";
    std::string shape;
    double beta = -3.0;
    std::uint64_t seed = 0;
    double sigma = 4.0;
    std::string center;
    double amplitude = 1.0;
    std::string pixel_size;
    std::string out;
};

struct DecomposeOpts {
    std::string in, scales, out;
    double safety = 0.5;
};

struct ProjectOpts {
    std::string in, out;
    int axis = 0;
};

struct PerturbOpts {
    std::string in, out;
    std::size_t channel = 0;
    double factor = 1.0;
};

struct TiltOpts {
    std::string in, out, field_out;
    double sc = 0.0;
    double rref = 1.0;
};

struct FitOpts {
    std::string in, out;
};

struct AuditOpts {
    std::string in, out, mode = "amplitude", endpoint = "oracle", cmd, workdir;
    std::string f_list = "1.01,1.1,1.5,3.0";
    double factor = 1.5;
    long channel = -1;
    double tau_floor = 1e-6;
    double theta_support = 0.01;
    double timeout = 600.0;
    int jobs = 1;
};

struct FixtureOpts {
    std::string kind, truth, in, out;
};

int cmd_synth(const SynthOpts& o) {
    SynthSpec spec;
    spec.shape = parse_shape(o.shape);
    spec.seed = o.seed;
    spec.spectral_slope = o.beta;
    ScalarField field;
    if (o.kind == "lognormal") {
        spec.kind = SynthKind::gaussian_exp;
        field = lognormal_field(spec);
    } else if (o.kind == "blob") {
        spec.kind = SynthKind::blob;
        spec.sigma = o.sigma;
        spec.amplitude = o.amplitude;
        if (!o.center.empty()) spec.center = parse_double_list(o.center, "--center");
        field = gaussian_blob(spec);
    } else {
        throw UsageError("--kind must be lognormal or blob");
    }
    field.pixel_size = parse_pixel_size(o.pixel_size);
    store_field(field, o.out);

    auto outputs = ndf_pair(o.out);
    json params = {{"kind", o.kind}, {"shape", field.shape}, {"seed", o.seed}};
    if (o.kind == "lognormal") params["beta"] = o.beta;
    if (o.kind == "blob") {
        params["sigma"] = o.sigma;
        params["amplitude"] = o.amplitude;
    }
    write_manifest(fs::path(o.out + ".manifest.json"), "synth", params, json::object(), outputs);
    return 0;
}

int cmd_decompose(const DecomposeOpts& o) {
    const ScaleLadder ladder = parse_scales(o.scales);
    const ScalarField field = load_field(o.in);
    DiffusionConfig config;
    config.safety = o.safety;
    const ScaleDecomposition decomp = decompose(field, ladder, config);
    fs::create_directories(o.out);
    store_decomposition(decomp, o.out);

    std::vector<fs::path> outputs = {fs::path(o.out) / "ladder.json",
                                     fs::path(o.out) / "source_hash"};
    for (std::size_t k = 0; k < decomp.channel_count(); ++k)
        for (const auto& p : ndf_pair(fs::path(o.out) / ("component_" + std::to_string(k))))
            outputs.push_back(p);
    for (const auto& p : ndf_pair(fs::path(o.out) / "residual")) outputs.push_back(p);

    write_manifest(fs::path(o.out) / "manifest.json", "decompose",
                   {{"scales", o.scales}, {"safety", o.safety}},
                   {{o.in, digest_hex(field)}}, outputs);
    return 0;
}

int cmd_project(const ProjectOpts& o) {
    const ScalarField volume = load_field(o.in);
    const ScalarField surface = project(volume, o.axis);
    store_field(surface, o.out);
    write_manifest(fs::path(o.out + ".manifest.json"), "project", {{"axis", o.axis}},
                   {{o.in, digest_hex(volume)}}, ndf_pair(o.out));
    return 0;
}

int cmd_perturb(const PerturbOpts& o) {
    const ScaleDecomposition decomp = load_decomposition(o.in);
    const ScalarField modified = perturb_scale(decomp, PerturbationSpec{o.channel, o.factor});
    store_field(modified, o.out);
    write_manifest(fs::path(o.out + ".manifest.json"), "perturb",
                   {{"channel", o.channel}, {"f", o.factor}},
                   {{o.in, decomp.source_digest}}, ndf_pair(o.out));
    return 0;
}

int cmd_tilt(const TiltOpts& o) {
    const ScaleDecomposition decomp = load_decomposition(o.in);
    const TiltSpec spec{o.sc, o.rref};
    if (o.rref < decomp.ladder.radii.front() || o.rref > decomp.ladder.radii.back())
        std::cerr << "warning: pivot " << o.rref << " lies outside the ladder ["
                  << decomp.ladder.radii.front() << ", " << decomp.ladder.radii.back() << "]\n";
    const ScaleDecomposition tilted = tilt_components(decomp, spec);
    fs::create_directories(o.out);
    store_decomposition(tilted, o.out);

    std::vector<fs::path> outputs = {fs::path(o.out) / "ladder.json",
                                     fs::path(o.out) / "source_hash"};
    for (std::size_t k = 0; k < tilted.channel_count(); ++k)
        for (const auto& p : ndf_pair(fs::path(o.out) / ("component_" + std::to_string(k))))
            outputs.push_back(p);
    for (const auto& p : ndf_pair(fs::path(o.out) / "residual")) outputs.push_back(p);

    if (!o.field_out.empty()) {
        store_field(reconstruct(tilted), o.field_out);
        for (const auto& p : ndf_pair(o.field_out)) outputs.push_back(p);
    }
    write_manifest(fs::path(o.out) / "manifest.json", "tilt",
                   {{"sc", o.sc}, {"rref", o.rref}}, {{o.in, decomp.source_digest}}, outputs);
    return 0;
}

int cmd_fit(const FitOpts& o) {
    const ScaleDecomposition decomp = load_decomposition(o.in);
    const CascadeFit fit = measure_cascade(decomp);

    std::ofstream out(o.out, std::ios::trunc);
    if (!out) fail(Err::io_failure, "cannot write " + o.out);
    out << std::setprecision(17);
    out << "kappa = " << fit.exponent << '\n';
    out << "intercept = " << fit.intercept << '\n';
    out << "residual_rms = " << fit.residual_rms << '\n';
    out << "channels = " << fit.radii.size() << '\n';
    for (std::size_t k = 0; k < fit.radii.size(); ++k) {
        out << "channel." << k << ".radius = " << fit.radii[k] << '\n';
        out << "channel." << k << ".density_scale = " << fit.density_scale[k] << '\n';
    }
    out.close();

    write_manifest(fs::path(o.out + ".manifest.json"), "fit", json::object(),
                   {{o.in, decomp.source_digest}}, {fs::path(o.out)});
    return 0;
}

int cmd_audit(const AuditOpts& o) {
    const ScaleDecomposition decomp = load_decomposition(o.in);
    if (decomp.source_shape.size() != 3)
        fail(Err::dim_mismatch, "audit requires a 3D decomposition");

    const fs::path workdir = o.workdir.empty() ? fs::path(o.out + "_work") : fs::path(o.workdir);
    fs::create_directories(workdir);

    ModelEndpoint endpoint;
    if (o.endpoint == "external") {
        if (o.cmd.empty()) throw UsageError("--endpoint external requires --cmd");
        std::istringstream in(o.cmd);
        std::string token;
        while (in >> token) endpoint.command.push_back(token);
        endpoint.expected_shape = decomp.source_shape;
        endpoint.timeout_sec = o.timeout;
    } else {
        const FixtureKind kind = fixture_kind_from_name(o.endpoint);
        endpoint = builtin_fixture(kind, workdir / "truth", self_path(), decomp.source_shape,
                                   o.timeout);
    }
    endpoint.max_concurrent = std::max(1, o.jobs);

    ClassifyConfig config;
    config.tau_floor = o.tau_floor;
    config.theta_support = o.theta_support;

    ScanReport report;
    json params = {{"mode", o.mode},           {"endpoint", o.endpoint},
                   {"tau_floor", o.tau_floor}, {"theta_support", o.theta_support},
                   {"jobs", o.jobs},           {"timeout", o.timeout}};
    if (o.mode == "amplitude") {
        const std::size_t channel =
            o.channel >= 0 ? static_cast<std::size_t>(o.channel) : max_mass_channel(decomp);
        const auto factors = parse_double_list(o.f_list, "--f-list");
        report = amplitude_scan(endpoint, decomp, channel, factors, workdir, config, o.jobs);
        params["channel"] = channel;
        params["f_list"] = factors;
    } else if (o.mode == "frequency") {
        report = frequency_scan(endpoint, decomp, o.factor, workdir, config, o.jobs);
        params["f"] = o.factor;
    } else {
        throw UsageError("--mode must be amplitude or frequency");
    }

    std::vector<fs::path> outputs;
    write_scan_report(report, o.out, outputs);
    write_manifest(fs::path(o.out + ".manifest.json"), "audit", params,
                   {{o.in, decomp.source_digest}}, outputs);

    std::cout << "axis = " << report.axis << ", points = " << report.points.size()
              << ", flips = " << report.flip_count << '\n';
    return 0;
}

int cmd_fixture(const FixtureOpts& o) {
    fixture_serve(fixture_kind_from_name(o.kind), o.truth, o.in, o.out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scalekit: constrained multiscale decomposition, scale-space "
                 "interventions and generative-model audits"};
    app.require_subcommand(1);

    SynthOpts synth_opts;
    auto* synth_cmd = app.add_subcommand("synth", "generate a seeded synthetic field");
    synth_cmd->add_option("--kind", synth_opts.kind, "lognormal | blob")->capture_default_str();
    synth_cmd->add_option("--shape", synth_opts.shape, "extents, e.g. 64,64,64")->required();
    synth_cmd->add_option("--beta", synth_opts.beta, "spectral slope (lognormal)")
        ->capture_default_str();
    synth_cmd->add_option("--seed", synth_opts.seed, "random seed")->capture_default_str();
    synth_cmd->add_option("--sigma", synth_opts.sigma, "blob standard deviation, pixels")
        ->capture_default_str();
    synth_cmd->add_option("--center", synth_opts.center, "blob center, e.g. 32,32,32");
    synth_cmd->add_option("--amplitude", synth_opts.amplitude, "blob peak value")
        ->capture_default_str();
    synth_cmd->add_option("--pixel-size", synth_opts.pixel_size, "metadata, value:unit");
    synth_cmd->add_option("--out", synth_opts.out, "output NDF prefix")->required();

    DecomposeOpts dec_opts;
    auto* dec_cmd = app.add_subcommand("decompose", "constrained diffusion decomposition");
    dec_cmd->add_option("--in", dec_opts.in, "input NDF prefix")->required();
    dec_cmd->add_option("--scales", dec_opts.scales, "ladder rmin:ratio:count")->required();
    dec_cmd->add_option("--safety", dec_opts.safety, "timestep safety factor in (0,1]")
        ->capture_default_str();
    dec_cmd->add_option("--out", dec_opts.out, "output decomposition directory")->required();

    ProjectOpts proj_opts;
    auto* proj_cmd = app.add_subcommand("project", "line-of-sight projection of a 3D volume");
    proj_cmd->add_option("--in", proj_opts.in, "input NDF prefix (3D)")->required();
    proj_cmd->add_option("--axis", proj_opts.axis, "projection axis, 0 = slowest")
        ->capture_default_str();
    proj_cmd->add_option("--out", proj_opts.out, "output NDF prefix")->required();

    PerturbOpts pert_opts;
    auto* pert_cmd = app.add_subcommand("perturb", "single-scale magnification");
    pert_cmd->add_option("--in", pert_opts.in, "input decomposition directory")->required();
    pert_cmd->add_option("--channel", pert_opts.channel, "0-based channel index")
        ->capture_default_str();
    pert_cmd->add_option("--f", pert_opts.factor, "magnification factor (>= 0)")
        ->capture_default_str();
    pert_cmd->add_option("--out", pert_opts.out, "output NDF prefix")->required();

    TiltOpts tilt_opts;
    auto* tilt_cmd = app.add_subcommand("tilt", "coherent cascade tilt");
    tilt_cmd->add_option("--in", tilt_opts.in, "input decomposition directory")->required();
    tilt_cmd->add_option("--sc", tilt_opts.sc, "tilt index s_c")->required();
    tilt_cmd->add_option("--rref", tilt_opts.rref, "pivot radius, pixels")->required();
    tilt_cmd->add_option("--out", tilt_opts.out, "output decomposition directory")->required();
    tilt_cmd->add_option("--field-out", tilt_opts.field_out,
                         "also write the reconstructed tilted field to this NDF prefix");

    FitOpts fit_opts;
    auto* fit_cmd = app.add_subcommand("fit", "cascade-exponent fit");
    fit_cmd->add_option("--in", fit_opts.in, "input decomposition directory")->required();
    fit_cmd->add_option("--out", fit_opts.out, "output report path")->required();

    AuditOpts audit_opts;
    auto* audit_cmd = app.add_subcommand("audit", "scan a model-under-test");
    audit_cmd->add_option("--in", audit_opts.in, "baseline decomposition directory")->required();
    audit_cmd->add_option("--mode", audit_opts.mode, "amplitude | frequency")
        ->capture_default_str();
    audit_cmd->add_option("--endpoint", audit_opts.endpoint,
                          "oracle | frozen | signflip | external")
        ->capture_default_str();
    audit_cmd->add_option("--cmd", audit_opts.cmd,
                          "external command template with {input} and {output}");
    audit_cmd->add_option("--channel", audit_opts.channel,
                          "channel for amplitude mode (default: largest-mass channel)");
    audit_cmd->add_option("--f", audit_opts.factor, "factor for frequency mode")
        ->capture_default_str();
    audit_cmd->add_option("--f-list", audit_opts.f_list, "factors for amplitude mode")
        ->capture_default_str();
    audit_cmd->add_option("--tau-floor", audit_opts.tau_floor, "ratio denominator floor")
        ->capture_default_str();
    audit_cmd->add_option("--theta-support", audit_opts.theta_support, "support threshold")
        ->capture_default_str();
    audit_cmd->add_option("--jobs", audit_opts.jobs, "concurrent model invocations")
        ->capture_default_str();
    audit_cmd->add_option("--timeout", audit_opts.timeout, "model timeout, seconds")
        ->capture_default_str();
    audit_cmd->add_option("--workdir", audit_opts.workdir, "scratch directory");
    audit_cmd->add_option("--out", audit_opts.out, "report output prefix")->required();

    FixtureOpts fix_opts;
    auto* fix_cmd = app.add_subcommand("fixture", "serve one model-protocol request");
    fix_cmd->add_option("--kind", fix_opts.kind, "oracle | frozen | signflip")->required();
    fix_cmd->add_option("--truth", fix_opts.truth, "truth directory")->required();
    fix_cmd->add_option("--in", fix_opts.in, "observable NDF prefix")->required();
    fix_cmd->add_option("--out", fix_opts.out, "prediction NDF prefix")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(synth_cmd)) return cmd_synth(synth_opts);
        if (app.got_subcommand(dec_cmd)) return cmd_decompose(dec_opts);
        if (app.got_subcommand(proj_cmd)) return cmd_project(proj_opts);
        if (app.got_subcommand(pert_cmd)) return cmd_perturb(pert_opts);
        if (app.got_subcommand(tilt_cmd)) return cmd_tilt(tilt_opts);
        if (app.got_subcommand(fit_cmd)) return cmd_fit(fit_opts);
        if (app.got_subcommand(audit_cmd)) return cmd_audit(audit_opts);
        if (app.got_subcommand(fix_cmd)) return cmd_fixture(fix_opts);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
