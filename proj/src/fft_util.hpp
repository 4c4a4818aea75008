#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace scalekit::detail {

// Unnormalized complex-to-complex DFTs (FFTW, FFTW_ESTIMATE plans; results
// are reproducible run-to-run on a given build). Rank 1..3, row-major.
std::vector<std::complex<double>> fft_forward(const std::vector<double>& real_input,
                                              const std::vector<std::size_t>& shape);

// Inverse transform of `spectrum`, scaled by 1/N_total; returns the real part.
std::vector<double> fft_backward_real(const std::vector<std::complex<double>>& spectrum,
                                      const std::vector<std::size_t>& shape);

// Fold a row-major frequency index into the signed range [-n/2, n/2).
inline long fold_wavenumber(std::size_t index, std::size_t extent) {
    const long n = static_cast<long>(extent);
    const long j = static_cast<long>(index);
    return (j <= n / 2) ? j : j - n;
}

}  // namespace scalekit::detail
