#include "scalekit/audit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>

#include "json.hpp"

#include "subprocess.hpp"

namespace scalekit {

namespace fs = std::filesystem;
using nlohmann::json;

static std::size_t count_substring(const std::string& haystack, const std::string& needle) {
    std::size_t count = 0, pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.length();
    }
    return count;
}

void validate_endpoint(const ModelEndpoint& endpoint) {
    std::size_t inputs = 0, outputs = 0;
    for (const auto& token : endpoint.command) {
        inputs += count_substring(token, "{input}");
        outputs += count_substring(token, "{output}");
    }
    if (inputs != 1 || outputs != 1)
        fail(Err::bad_params, "command template must contain {input} and {output} exactly once");
    if (!(endpoint.timeout_sec > 0.0)) fail(Err::bad_params, "timeout must be positive");
    if (endpoint.expected_shape.size() != 3)
        fail(Err::bad_params, "expected output shape must be 3D");
    if (endpoint.max_concurrent < 1) fail(Err::bad_params, "max_concurrent must be >= 1");
}

static std::string substitute(std::string token, const std::string& placeholder,
                              const std::string& value) {
    const auto pos = token.find(placeholder);
    if (pos != std::string::npos) token.replace(pos, placeholder.size(), value);
    return token;
}

ScalarField run_model(const ModelEndpoint& endpoint, const ScalarField& observable,
                      const fs::path& workdir) {
    validate_endpoint(endpoint);
    if (observable.kind != FieldKind::surface_density)
        fail(Err::bad_params, "observable must be a surface_density field");

    std::error_code ec;
    fs::create_directories(workdir, ec);

    const std::string digest = digest_hex(observable);
    const fs::path input_prefix = workdir / ("obs_" + digest);
    const fs::path output_prefix = workdir / ("pred_" + digest);
    store_field(observable, input_prefix);

    std::vector<std::string> argv;
    for (const auto& token : endpoint.command)
        argv.push_back(substitute(substitute(token, "{input}", input_prefix.string()), "{output}",
                                  output_prefix.string()));

    const auto result = detail::run_process(argv, endpoint.timeout_sec);
    if (result.timed_out) fail(Err::model_timeout, "model exceeded " +
                                                       std::to_string(endpoint.timeout_sec) + " s");
    if (result.spawn_failed) fail(Err::model_failure, "could not launch model process");
    if (result.exit_code != 0)
        fail(Err::model_failure, "model exited with code " + std::to_string(result.exit_code));

    ScalarField prediction;
    try {
        prediction = load_field(output_prefix);
    } catch (const Error& e) {
        fail(Err::bad_output, std::string("model output unreadable: ") + e.what());
    }
    if (prediction.shape != endpoint.expected_shape)
        fail(Err::bad_output, "model output shape differs from the declared shape");
    if (prediction.min_value() < -prediction.negativity_allowance())
        fail(Err::bad_output, "model output violates non-negativity");
    return prediction;
}

std::size_t SupportMask::count() const noexcept {
    std::size_t n = 0;
    for (auto b : mask) n += b;
    return n;
}

SupportMask make_support(const ScalarField& component, double theta,
                         const std::vector<std::uint8_t>& valid, double tau_floor) {
    if (valid.size() != component.size())
        fail(Err::shape_mismatch, "validity mask size differs from component");
    SupportMask support;
    support.shape = component.shape;
    support.theta_support = theta;
    support.tau_floor = tau_floor;
    support.mask.assign(component.size(), 0);
    const double threshold = theta * component.max_value();
    if (threshold > 0.0) {
        for (std::size_t i = 0; i < component.size(); ++i)
            support.mask[i] = (component.data[i] >= threshold && valid[i]) ? 1 : 0;
    }
    return support;
}

RatioField expected_ratio(const ScalarField& raw_volume, const ScalarField& component,
                          double factor, double tau_floor) {
    if (raw_volume.shape != component.shape)
        fail(Err::shape_mismatch, "component shape differs from the raw volume");
    RatioField out;
    out.ratio = make_field(raw_volume.shape, FieldKind::ratio, 1.0);
    out.valid.assign(raw_volume.size(), 0);
    const double floor = tau_floor * raw_volume.max_value();
    const double gain = factor - 1.0;
    std::size_t masked = 0;
    for (std::size_t i = 0; i < raw_volume.size(); ++i) {
        const double denom = raw_volume.data[i];
        if (denom >= floor && denom > 0.0) {
            out.ratio.data[i] = 1.0 + gain * component.data[i] / denom;
            out.valid[i] = 1;
        } else {
            ++masked;
        }
    }
    out.masked_fraction = static_cast<double>(masked) / static_cast<double>(raw_volume.size());
    return out;
}

RatioField response_ratio(const ScalarField& pred_mod, const ScalarField& pred_raw,
                          double tau_floor) {
    if (pred_mod.shape != pred_raw.shape)
        fail(Err::shape_mismatch, "prediction shapes differ");
    RatioField out;
    out.ratio = make_field(pred_raw.shape, FieldKind::ratio, 1.0);
    out.valid.assign(pred_raw.size(), 0);
    const double floor = tau_floor * pred_raw.max_value();
    std::size_t masked = 0;
    for (std::size_t i = 0; i < pred_raw.size(); ++i) {
        const double denom = pred_raw.data[i];
        if (denom >= floor && denom > 0.0) {
            out.ratio.data[i] = pred_mod.data[i] / denom;
            out.valid[i] = 1;
        } else {
            ++masked;
        }
    }
    if (masked == pred_raw.size()) fail(Err::all_masked, "floor excludes every cell");
    out.masked_fraction = static_cast<double>(masked) / static_cast<double>(pred_raw.size());
    return out;
}

static int sign_of(double v) noexcept { return (v > 0.0) - (v < 0.0); }

static double median_of(std::vector<double> values) {
    const std::size_t n = values.size();
    const std::size_t mid = n / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                     values.end());
    const double upper = values[mid];
    if (n % 2 == 1) return upper;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid - 1),
                     values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (values[mid - 1] + upper);
}

ResponseReport classify_response(const ScalarField& ratio, const std::vector<std::uint8_t>& valid,
                                 const ScalarField& expected, const SupportMask& support,
                                 double factor, const ClassifyConfig& config) {
    if (factor == 1.0) fail(Err::bad_params, "classification requires f != 1");
    if (ratio.shape != expected.shape || ratio.shape != support.shape)
        fail(Err::shape_mismatch, "ratio, expected and support shapes differ");
    if (valid.size() != ratio.size()) fail(Err::shape_mismatch, "validity mask size differs");

    const std::size_t support_count = support.count();
    if (support_count == 0) fail(Err::empty_support, "no cells above the support threshold");

    ResponseReport report;
    report.ratio = ratio;
    report.expected = expected;
    report.support = support;

    std::size_t valid_count = 0, agree = 0;
    double inside_l1 = 0.0, expected_l1 = 0.0;
    double outside_l1 = 0.0, expected_outside_l1 = 0.0;
    std::vector<double> support_ratio, support_expected;
    support_ratio.reserve(support_count);
    support_expected.reserve(support_count);

    for (std::size_t i = 0; i < ratio.size(); ++i) {
        valid_count += valid[i];
        if (support.mask[i]) {
            const double dr = ratio.data[i] - 1.0;
            const double de = expected.data[i] - 1.0;
            if (sign_of(dr) == sign_of(de)) ++agree;
            inside_l1 += std::abs(dr);
            expected_l1 += std::abs(de);
            support_ratio.push_back(ratio.data[i]);
            support_expected.push_back(expected.data[i]);
        } else if (valid[i]) {
            outside_l1 += std::abs(ratio.data[i] - 1.0);
            expected_outside_l1 += std::abs(expected.data[i] - 1.0);
        }
    }

    report.masked_fraction =
        1.0 - static_cast<double>(valid_count) / static_cast<double>(ratio.size());
    report.monotonicity = static_cast<double>(agree) / static_cast<double>(support_count);
    report.freezing = (expected_l1 == 0.0 && inside_l1 == 0.0)
                          ? 1.0
                          : inside_l1 / expected_l1;
    report.median_ratio = median_of(std::move(support_ratio));
    report.median_expected = median_of(std::move(support_expected));

    report.negative_response = report.median_ratio < 1.0 && report.median_expected > 1.0;
    report.frozen = report.freezing < config.phi_frozen;
    // Bleed test: the intervened component itself carries a diffuse
    // sub-threshold tail, so a raw outside>inside comparison flags even the
    // deterministic baseline. Artifacts count only where the response
    // outside the footprint exceeds what the baseline places there.
    const bool bleeding = outside_l1 > inside_l1 &&
                          outside_l1 - expected_outside_l1 >
                              1e-6 * (outside_l1 + inside_l1);
    report.divergent = report.freezing > config.phi_divergent || bleeding;

    // Histogram of R over support; a flat response collapses to one bin
    // centered on its value.
    double lo = ratio.data[0], hi = ratio.data[0];
    bool first = true;
    for (std::size_t i = 0; i < ratio.size(); ++i) {
        if (!support.mask[i]) continue;
        if (first) {
            lo = hi = ratio.data[i];
            first = false;
        } else {
            lo = std::min(lo, ratio.data[i]);
            hi = std::max(hi, ratio.data[i]);
        }
    }
    if (hi <= lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    report.histogram.lo = lo;
    report.histogram.hi = hi;
    report.histogram.counts.assign(config.histogram_bins, 0);
    const double scale = static_cast<double>(config.histogram_bins) / (hi - lo);
    for (std::size_t i = 0; i < ratio.size(); ++i) {
        if (!support.mask[i]) continue;
        auto bin = static_cast<std::size_t>((ratio.data[i] - lo) * scale);
        if (bin >= config.histogram_bins) bin = config.histogram_bins - 1;
        report.histogram.counts[bin] += 1;
    }
    return report;
}

// -- Fixtures --

const char* fixture_kind_name(FixtureKind kind) noexcept {
    switch (kind) {
        case FixtureKind::oracle: return "oracle";
        case FixtureKind::frozen: return "frozen";
        case FixtureKind::signflip: return "signflip";
    }
    return "oracle";
}

FixtureKind fixture_kind_from_name(const std::string& name) {
    if (name == "oracle") return FixtureKind::oracle;
    if (name == "frozen") return FixtureKind::frozen;
    if (name == "signflip") return FixtureKind::signflip;
    fail(Err::bad_params, "unknown fixture kind '" + name + "'");
}

static fs::path manifest_path(const fs::path& dir) { return dir / "manifest.json"; }

static json load_manifest(const fs::path& dir) {
    std::ifstream in(manifest_path(dir));
    if (!in) fail(Err::missing_truth, "no manifest in " + dir.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(Err::missing_truth, "unreadable manifest in " + dir.string() + ": " + e.what());
    }
}

void FixtureTruthStore::initialize() {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    json manifest;
    manifest["entries"] = json::object();
    std::ofstream out(manifest_path(dir_), std::ios::trunc);
    if (!out) fail(Err::io_failure, "cannot write manifest in " + dir_.string());
    out << manifest.dump(2) << '\n';
}

void FixtureTruthStore::add(const ScalarField& observable, const ScalarField& truth_volume,
                            std::optional<std::size_t> point_index, bool is_raw) {
    json manifest = load_manifest(dir_);
    const std::string digest = digest_hex(observable);
    json entry;
    entry["raw"] = is_raw;
    if (point_index) entry["index"] = *point_index;
    manifest["entries"][digest] = entry;
    if (is_raw) manifest["raw"] = digest;
    store_field(truth_volume, dir_ / digest);
    std::ofstream out(manifest_path(dir_), std::ios::trunc);
    if (!out) fail(Err::io_failure, "cannot write manifest in " + dir_.string());
    out << manifest.dump(2) << '\n';
}

void fixture_serve(FixtureKind kind, const fs::path& truth_dir, const fs::path& input_prefix,
                   const fs::path& output_prefix) {
    const json manifest = load_manifest(truth_dir);
    const ScalarField observable = load_field(input_prefix);
    const std::string digest = digest_hex(observable);

    {
        std::ofstream log(truth_dir / "invocations.log", std::ios::app);
        log << digest << ' ' << fixture_kind_name(kind) << '\n';
    }

    const auto& entries = manifest.at("entries");
    const auto serve_keyed = [&](const std::string& key) {
        if (!entries.contains(key))
            fail(Err::missing_truth, "no truth volume for digest " + key);
        store_field(load_field(truth_dir / key), output_prefix);
    };

    switch (kind) {
        case FixtureKind::oracle:
            serve_keyed(digest);
            return;
        case FixtureKind::frozen: {
            if (!manifest.contains("raw"))
                fail(Err::missing_truth, "truth store has no raw entry");
            serve_keyed(manifest["raw"].get<std::string>());
            return;
        }
        case FixtureKind::signflip: {
            if (!entries.contains(digest))
                fail(Err::missing_truth, "no truth volume for digest " + digest);
            const auto& entry = entries.at(digest);
            if (entry.value("raw", false)) {
                serve_keyed(digest);
                return;
            }
            const auto index = entry.at("index").get<std::size_t>();
            if (index % 2 == 1) {
                serve_keyed(digest);
                return;
            }
            if (!manifest.contains("raw"))
                fail(Err::missing_truth, "truth store has no raw entry");
            const ScalarField truth = load_field(truth_dir / digest);
            const ScalarField raw = load_field(truth_dir / manifest["raw"].get<std::string>());
            if (truth.shape != raw.shape)
                fail(Err::shape_mismatch, "truth and raw volume shapes differ");
            ScalarField reflected = raw;
            for (std::size_t i = 0; i < reflected.size(); ++i)
                reflected.data[i] = std::max(0.0, 2.0 * raw.data[i] - truth.data[i]);
            store_field(reflected, output_prefix);
            return;
        }
    }
}

ModelEndpoint builtin_fixture(FixtureKind kind, const fs::path& truth_dir,
                              const fs::path& cli_path, std::vector<std::size_t> expected_shape,
                              double timeout_sec) {
    ModelEndpoint endpoint;
    endpoint.command = {cli_path.string(), "fixture",
                        "--kind",          fixture_kind_name(kind),
                        "--truth",         truth_dir.string(),
                        "--in",            "{input}",
                        "--out",           "{output}"};
    endpoint.timeout_sec = timeout_sec;
    endpoint.expected_shape = std::move(expected_shape);
    endpoint.fixture_truth = truth_dir;
    return endpoint;
}

// -- Scans --

std::size_t count_polarity_flips(const std::vector<ScanPoint>& points) {
    std::vector<double> medians;
    for (const auto& p : points)
        if (!p.failed) medians.push_back(p.median_response);
    std::size_t flips = 0;
    for (std::size_t i = 1; i < medians.size(); ++i)
        if (medians[i - 1] * medians[i] < 0.0) ++flips;
    return flips;
}

namespace {

struct PreparedPoint {
    double factor;
    std::size_t channel;
    ScalarField observable;  // projected modified volume
};

ScanReport run_scan(const ModelEndpoint& endpoint, const ScaleDecomposition& decomp,
                    std::string axis, const std::vector<std::pair<std::size_t, double>>& schedule,
                    const fs::path& workdir, const ClassifyConfig& config, int jobs) {
    validate_endpoint(endpoint);
    for (const auto& [channel, factor] : schedule) {
        if (channel >= decomp.channel_count()) fail(Err::bad_channel, "channel out of range");
        if (!(factor > 0.0)) fail(Err::negative_factor, "factor must be > 0");
        if (factor == 1.0) fail(Err::bad_params, "scan factors must differ from 1");
    }

    const ScalarField raw_volume = reconstruct(decomp);
    const ScalarField raw_observable = project(raw_volume, 0);

    std::optional<FixtureTruthStore> truth;
    if (endpoint.fixture_truth) {
        truth.emplace(*endpoint.fixture_truth);
        truth->initialize();
        truth->add(raw_observable, raw_volume, std::nullopt, true);
    }

    // Serial preparation keeps the truth manifest single-writer; model
    // invocations below may run concurrently.
    std::vector<PreparedPoint> prepared;
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const auto [channel, factor] = schedule[k];
        const ScalarField modified =
            perturb_scale(decomp, PerturbationSpec{channel, factor});
        PreparedPoint point{factor, channel, project(modified, 0)};
        if (truth) truth->add(point.observable, modified, k, false);
        prepared.push_back(std::move(point));
    }

    const ScalarField raw_prediction = run_model(endpoint, raw_observable, workdir);

    ScanReport report;
    report.axis = std::move(axis);
    report.config = config;
    report.points.resize(prepared.size());

    const auto run_point = [&](std::size_t k) {
        ScanPoint& point = report.points[k];
        point.factor = prepared[k].factor;
        point.channel = prepared[k].channel;
        point.radius = decomp.ladder.radii[prepared[k].channel];
        try {
            const ScalarField prediction = run_model(endpoint, prepared[k].observable, workdir);
            const RatioField response =
                response_ratio(prediction, raw_prediction, config.tau_floor);
            const RatioField baseline = expected_ratio(
                raw_volume, decomp.components[prepared[k].channel], prepared[k].factor,
                config.tau_floor);
            std::vector<std::uint8_t> valid(response.valid.size());
            for (std::size_t i = 0; i < valid.size(); ++i)
                valid[i] = response.valid[i] & baseline.valid[i];
            const SupportMask support = make_support(decomp.components[prepared[k].channel],
                                                     config.theta_support, valid,
                                                     config.tau_floor);
            const ResponseReport rr = classify_response(response.ratio, valid, baseline.ratio,
                                                        support, prepared[k].factor, config);
            point.median_response = rr.median_ratio - 1.0;
            point.monotonicity = rr.monotonicity;
            point.freezing = rr.freezing;
            point.negative_response = rr.negative_response;
            point.frozen = rr.frozen;
            point.divergent = rr.divergent;
            point.masked_fraction = rr.masked_fraction;
            point.support_count = rr.support.count();
            point.histogram = rr.histogram;
        } catch (const Error& e) {
            point.failed = true;
            point.error_tag = e.tag();
        }
    };

    const int workers = std::max(1, std::min(jobs, endpoint.max_concurrent));
    if (workers == 1 || prepared.size() <= 1) {
        for (std::size_t k = 0; k < prepared.size(); ++k) run_point(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t k = next.fetch_add(1);
                    if (k >= prepared.size()) return;
                    run_point(k);
                }
            });
        for (auto& th : pool) th.join();
    }

    report.flip_count = count_polarity_flips(report.points);
    return report;
}

}  // namespace

ScanReport amplitude_scan(const ModelEndpoint& endpoint, const ScaleDecomposition& decomp,
                          std::size_t channel, const std::vector<double>& factors,
                          const fs::path& workdir, const ClassifyConfig& config, int jobs) {
    if (factors.empty()) fail(Err::bad_params, "amplitude scan needs at least one factor");
    std::vector<std::pair<std::size_t, double>> schedule;
    for (double f : factors) schedule.emplace_back(channel, f);
    return run_scan(endpoint, decomp, "amplitude", schedule, workdir, config, jobs);
}

ScanReport frequency_scan(const ModelEndpoint& endpoint, const ScaleDecomposition& decomp,
                          double factor, const fs::path& workdir, const ClassifyConfig& config,
                          int jobs) {
    if (decomp.channel_count() < 2)
        fail(Err::insufficient_channels, "frequency scan needs >= 2 channels");
    std::vector<std::pair<std::size_t, double>> schedule;
    for (std::size_t j = 0; j < decomp.channel_count(); ++j) schedule.emplace_back(j, factor);
    return run_scan(endpoint, decomp, "frequency", schedule, workdir, config, jobs);
}

}  // namespace scalekit
