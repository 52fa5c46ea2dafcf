#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "icg/core.hpp"

namespace icg {

// Beat shapes: B at a local minimum, B as a notch on the upstroke, and a
// slope-break B with an X that is only a local (not global) minimum.
enum class Morphology { BLocalMin, BNotch, XLocalMinOnly };

[[nodiscard]] const char* morphology_name(Morphology m) noexcept;
[[nodiscard]] Morphology parse_morphology(const std::string& name);

struct NoiseComponent {
    enum class Kind { White, Sinusoid, BaselineDrift };
    Kind kind = Kind::White;
    double amplitude = 0.0;  // sigma for white noise, peak amplitude otherwise
    double freq_hz = 0.0;
};

struct SyntheticBeatSpec {
    Morphology morphology = Morphology::BLocalMin;
    double hr_bpm = 60.0;
    double c_ampl = 1.0;
    double b_offset_ms = 70.0;  // before C
    double x_offset_ms = 24.0;  // after C
    double o_offset_ms = 36.0;  // after C
    std::vector<NoiseComponent> noise;
};

struct GroundTruthRecord {
    Signal signal;
    std::vector<BeatAnnotation> beats;
};

// Deterministic beat train with planted B/C/X/O points. Every planted point
// is checked on the noise-free waveform before noise is added; placements
// that break ordering, the detector windows in `params`, or the feature
// checks raise InfeasibleSpec.
[[nodiscard]] GroundTruthRecord generate(const SyntheticBeatSpec& spec, double duration_s, double fs, std::uint64_t seed,
                                         const DelineationParams& params = {});

}  // namespace icg
