#pragma once

// Data-parallel inner loops. Each kernel has a straightforward serial
// reference (kept for testing and benchmarking) and an OpenMP version used
// by the library. Both must agree to floating-point round-off.

#include <span>
#include <vector>

#include "icg/sgfilter.hpp"

namespace icg::kernels {

struct EnergyRatio {
    std::vector<double> coeff;     // short-window / long-window mean-square energy
    std::vector<double> enhanced;  // coeff[n] * x[n]
};

namespace serial {

// Direct convolution with edge fits. Requires x.size() >= kernel.length.
[[nodiscard]] std::vector<double> sg_convolve(std::span<const double> x, const SgKernel& kernel);

// Direct per-sample window sums, O(n * long_len).
[[nodiscard]] EnergyRatio relative_energy(std::span<const double> x, int short_len, int long_len);

}  // namespace serial

namespace omp {

[[nodiscard]] std::vector<double> sg_convolve(std::span<const double> x, const SgKernel& kernel);

// Prefix sums of squares, then an independent ratio per sample.
[[nodiscard]] EnergyRatio relative_energy(std::span<const double> x, int short_len, int long_len);

}  // namespace omp

// Inclusive window [n - left, n + right] for a centred window of `len`.
struct CentredWindow {
    int left = 0;
    int right = 0;
};

[[nodiscard]] constexpr CentredWindow centred(int len) noexcept {
    const int left = (len - 1) / 2;
    return {left, len - 1 - left};
}

}  // namespace icg::kernels
