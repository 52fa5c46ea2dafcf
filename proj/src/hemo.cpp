#include "icg/hemo.hpp"

namespace icg {

namespace {

std::optional<double> interval_ms(const std::optional<SampleIndex>& from, const std::optional<SampleIndex>& to, double fs) {
    if (!from || !to) return std::nullopt;
    return samples_to_ms(*to - *from, fs);
}

}  // namespace

std::vector<HemoParams> compute_hemo(std::span<const BeatAnnotation> beats, double fs) {
    std::vector<HemoParams> out(beats.size());
    for (std::size_t i = 0; i < beats.size(); ++i) {
        const auto& beat = beats[i];
        auto& h = out[i];
        if (i + 1 < beats.size()) h.cc_time_ms = interval_ms(beat.c, beats[i + 1].c, fs);
        if (h.cc_time_ms && *h.cc_time_ms > 0.0) h.hr_bpm = 60000.0 / *h.cc_time_ms;
        h.lvet_ms = interval_ms(beat.b, beat.x, fs);
        h.ivrt_ms = interval_ms(beat.x, beat.o, fs);
        if (beat.amp_c && beat.amp_b) h.bc_ampl = *beat.amp_c - *beat.amp_b;
    }
    return out;
}

}  // namespace icg
