#pragma once

#include <optional>
#include <vector>

#include "icg/core.hpp"

namespace icg {

// First differences of the C-normalised signal, expressed per 4 ms step.
// deriv[i] = slope from sample i to sample i + 1.
struct SlopeTrace {
    std::vector<double> deriv;
};

[[nodiscard]] SlopeTrace normalized_slope(std::span<const double> x, double c_ampl, double fs);

struct BSearchWindow {
    SampleIndex left = 0;   // C - b_window_ms
    SampleIndex right = 0;  // last sample before C at or below a_frac * C amplitude
};

[[nodiscard]] BSearchWindow b_search_window(const Signal& signal, SampleIndex c_pos, double c_ampl,
                                            const DelineationParams& params);

// B point of the beat whose C peak sits at c_pos. Scans from the right
// window edge towards the left for a local minimum or a slope steeper than
// b_slope1, then for a rising slope above b_slope2, and otherwise returns the
// window minimum. Throws WindowOutOfRange when the window precedes sample 0.
[[nodiscard]] SampleIndex detect_b(const Signal& signal, SampleIndex c_pos, double c_ampl, const DelineationParams& params);

struct XoPair {
    SampleIndex x = 0;
    SampleIndex o = 0;

    friend bool operator==(const XoPair&, const XoPair&) = default;
};

// Optional limits on where O may fall: the next detected C, or failing that
// the mean C-C interval in samples.
struct XoContext {
    std::optional<SampleIndex> next_c;
    std::optional<double> mean_cc_samples;
};

// Search window bounds in samples relative to C.
struct XoWindows {
    SampleIndex o_first, o_last, x_first, x_last, gap_min, gap_max;
};

[[nodiscard]] XoWindows xo_windows(const DelineationParams& params, double fs);

// Highest-contrast feasible (X, O) pair after the C peak, or none.
[[nodiscard]] std::optional<XoPair> detect_xo(const Signal& signal, SampleIndex c_pos, const DelineationParams& params,
                                              const XoContext& context = {});

}  // namespace icg
