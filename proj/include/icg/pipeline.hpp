#pragma once

#include <vector>

#include "icg/core.hpp"
#include "icg/sgfilter.hpp"

namespace icg {

struct WindowInfo {
    WindowSegment segment;
    int sg_length = 0;
    StopReason stop = StopReason::MaxLength;
    std::size_t c_count = 0;
    SampleIndex next_start = 0;
};

struct PipelineResult {
    std::vector<BeatAnnotation> beats;  // absolute indices, strictly increasing C
    std::vector<WindowInfo> windows;

    [[nodiscard]] double mean_sg_length() const noexcept;
};

// Streams the record in window_s windows, each starting at the last O point
// found in the previous one. Amplitudes refer to the filtered window the
// point was detected in. Throws SignalTooShort for records shorter than one
// window.
[[nodiscard]] PipelineResult run_pipeline_detailed(const Signal& signal, const DelineationParams& params);

[[nodiscard]] std::vector<BeatAnnotation> run_pipeline(const Signal& signal, const DelineationParams& params);

}  // namespace icg
