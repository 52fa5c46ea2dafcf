#pragma once

#include <optional>
#include <span>
#include <vector>

#include "icg/core.hpp"

namespace icg {

// Per-beat hemodynamic parameters. Fields are absent when a required point
// (or, for cc_time/hr, the next beat) is missing.
struct HemoParams {
    std::optional<double> cc_time_ms;
    std::optional<double> hr_bpm;
    std::optional<double> lvet_ms;   // B -> X
    std::optional<double> ivrt_ms;   // X -> O
    std::optional<double> bc_ampl;   // amp_c - amp_b
};

// `beats` must be sorted by C index.
[[nodiscard]] std::vector<HemoParams> compute_hemo(std::span<const BeatAnnotation> beats, double fs);

}  // namespace icg
