#pragma once

#include <vector>

#include "icg/core.hpp"

namespace icg {

// Savitzky-Golay smoothing kernel. `coeffs` are the centred weights;
// `edge_weights[p]` evaluates the polynomial fitted to the first `length`
// samples at position p (p < length / 2). The right edge uses the same
// weights mirrored.
struct SgKernel {
    int length = 0;
    int order = 0;
    std::vector<double> coeffs;
    std::vector<std::vector<double>> edge_weights;

    [[nodiscard]] int half() const noexcept { return length / 2; }
};

// Least-squares smoothing weights for a degree-`order` fit over `length`
// centred points. Throws InvalidGeometry unless length is odd and > order.
[[nodiscard]] SgKernel sg_coefficients(int length, int order);

// Process-wide cache of kernels; safe to call from concurrent workers.
[[nodiscard]] const SgKernel& cached_sg_kernel(int length, int order);

// Same-length smoothing with one-sided polynomial fits at the edges.
// Throws SignalTooShort when the signal is shorter than the kernel.
[[nodiscard]] Signal sg_apply(const Signal& signal, const SgKernel& kernel);

// ||low band|| / ||high band|| split at `cutoff_hz` on the DFT grid; the DC
// bin belongs to neither band. Returns +infinity when the high band carries
// no energy.
[[nodiscard]] double estimate_snr(const Signal& signal, double cutoff_hz);

enum class StopReason { TargetReached, NoImprovement, MaxLength, Fixed };

[[nodiscard]] const char* stop_reason_name(StopReason r) noexcept;

struct SnrStep {
    int length = 0;
    double snr = 0.0;
};

struct AdaptiveFilterResult {
    Signal filtered;
    int length = 0;
    StopReason reason = StopReason::MaxLength;
    std::vector<SnrStep> trace;  // one entry per length tried, in order
};

// Grows the SG length from sg_len_start in sg_len_step increments until the
// filtered SNR reaches snr_thr, improves by less than snr_impr_thr relative
// to the previous length, or sg_len_max is hit. When params.fixed_sg_len > 0
// that length is applied once instead. Lengths that do not exceed sg_order
// are fitted with order length - 1.
[[nodiscard]] AdaptiveFilterResult adaptive_filter(const Signal& signal, const DelineationParams& params);

// Polynomial order actually used at a given length.
[[nodiscard]] int effective_sg_order(int length, int order) noexcept;

}  // namespace icg
