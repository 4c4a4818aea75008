#include <cmath>
#include <mutex>

#include <fftw3.h>

#include "scalekit/field.hpp"
#include "fft_util.hpp"

namespace scalekit {

namespace detail {

// FFTW planning is not thread-safe; execution of a created plan is.
static std::mutex plan_mutex;

static std::vector<std::complex<double>> run_c2c(const std::vector<std::complex<double>>& input,
                                                 const std::vector<std::size_t>& shape, int sign) {
    const std::size_t total = shape_volume(shape);
    std::vector<std::complex<double>> output(total);

    std::vector<int> dims;
    for (std::size_t e : shape) dims.push_back(static_cast<int>(e));

    // FFTW_ESTIMATE leaves the input untouched and plans deterministically.
    auto* in = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(input.data()));
    auto* out = reinterpret_cast<fftw_complex*>(output.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), in, out, sign,
                             FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(plan);
    }
    return output;
}

std::vector<std::complex<double>> fft_forward(const std::vector<double>& real_input,
                                              const std::vector<std::size_t>& shape) {
    std::vector<std::complex<double>> in(real_input.size());
    for (std::size_t i = 0; i < real_input.size(); ++i) in[i] = real_input[i];
    return run_c2c(in, shape, FFTW_FORWARD);
}

std::vector<double> fft_backward_real(const std::vector<std::complex<double>>& spectrum,
                                      const std::vector<std::size_t>& shape) {
    auto out = run_c2c(spectrum, shape, FFTW_BACKWARD);
    const double scale = 1.0 / static_cast<double>(shape_volume(shape));
    std::vector<double> real_out(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) real_out[i] = out[i].real() * scale;
    return real_out;
}

}  // namespace detail

std::vector<std::pair<double, double>> power_spectrum(const ScalarField& field) {
    if (field.rank() < 1 || field.rank() > 3)
        fail(Err::bad_params, "power_spectrum supports rank 1..3");
    const std::size_t extent = field.shape[0];
    for (std::size_t e : field.shape)
        if (e != extent) fail(Err::non_cubic_grid, "power_spectrum requires equal extents");

    const std::size_t total = field.size();
    std::vector<double> centered(total);
    const double mean = total_mass(field) / static_cast<double>(total);
    for (std::size_t i = 0; i < total; ++i) centered[i] = field.data[i] - mean;

    const auto spectrum = detail::fft_forward(centered, field.shape);

    const std::size_t bin_count = extent / 2;
    std::vector<double> power(bin_count + 1, 0.0);
    std::vector<std::size_t> modes(bin_count + 1, 0);
    const double norm = 1.0 / (static_cast<double>(total) * static_cast<double>(total));

    const std::size_t rank = field.rank();
    std::vector<std::size_t> idx(rank, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        double k2 = 0.0;
        for (std::size_t a = 0; a < rank; ++a) {
            const double k = static_cast<double>(detail::fold_wavenumber(idx[a], extent));
            k2 += k * k;
        }
        const long bin = std::lround(std::sqrt(k2));
        if (bin >= 1 && static_cast<std::size_t>(bin) <= bin_count) {
            power[static_cast<std::size_t>(bin)] += std::norm(spectrum[flat]) * norm;
            modes[static_cast<std::size_t>(bin)] += 1;
        }
        for (std::size_t a = rank; a-- > 0;) {
            if (++idx[a] < field.shape[a]) break;
            idx[a] = 0;
        }
    }

    std::vector<std::pair<double, double>> result;
    for (std::size_t b = 1; b <= bin_count; ++b) {
        const double mean_power = modes[b] ? power[b] / static_cast<double>(modes[b]) : 0.0;
        result.emplace_back(static_cast<double>(b), mean_power);
    }
    return result;
}

}  // namespace scalekit
