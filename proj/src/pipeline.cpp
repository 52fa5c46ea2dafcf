#include "icg/pipeline.hpp"

#include <algorithm>
#include <numeric>

#include "icg/bxo.hpp"
#include "icg/cdetect.hpp"

namespace icg {

double PipelineResult::mean_sg_length() const noexcept {
    if (windows.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& w : windows) sum += w.sg_length;
    return sum / static_cast<double>(windows.size());
}

namespace {

// Delineates every C peak of one filtered window; indices stay window-relative.
std::vector<BeatAnnotation> delineate_window(const Signal& filtered, const CPeakList& peaks, const CcHistory& history,
                                             const DelineationParams& params) {
    const auto b_reach = ms_to_samples(params.b_window_ms, filtered.fs);
    std::optional<double> mean_cc;
    if (auto m = history.mean_interval_s()) mean_cc = *m * filtered.fs;

    std::vector<BeatAnnotation> beats(peaks.size());
    for (std::size_t k = 0; k < peaks.size(); ++k) {
        const auto c = peaks.positions[k];
        auto& beat = beats[k];
        beat.c = c;
        if (c - b_reach >= 0) beat.b = detect_b(filtered, c, peaks.amplitudes[k], params);
        XoContext ctx{k + 1 < peaks.size() ? std::optional<SampleIndex>(peaks.positions[k + 1]) : std::nullopt, mean_cc};
        if (auto xo = detect_xo(filtered, c, params, ctx)) {
            beat.x = xo->x;
            beat.o = xo->o;
        }
        fill_amplitudes(beat, filtered);
    }
    return beats;
}

void shift(BeatAnnotation& beat, SampleIndex by) {
    for (auto* p : {&beat.b, &beat.c, &beat.x, &beat.o})
        if (*p) **p += by;
}

}  // namespace

PipelineResult run_pipeline_detailed(const Signal& signal, const DelineationParams& params) {
    params.validate();
    require_valid(signal);
    const auto window = ms_to_samples(params.window_s * 1000.0, signal.fs);
    const auto min_window = ms_to_samples(1000.0, signal.fs);
    const auto n = signal.size();
    if (n < window) {
        throw SignalTooShort("record of " + std::to_string(n) + " samples is shorter than one " +
                             std::to_string(params.window_s) + " s window");
    }
    const auto seam_overlap = ms_to_samples(500.0, signal.fs);
    const auto c_anchor = ms_to_samples(params.merge_interval_s * 1000.0, signal.fs);

    PipelineResult res;
    CcHistory history(static_cast<std::size_t>(params.cc_history));
    SampleIndex start = 0;
    while (true) {
        const SampleIndex len = std::min(window, n - start);
        if (len < min_window) break;
        const Signal segment = signal.slice(start, len);
        const auto filt = adaptive_filter(segment, params);
        const auto trace = relative_energy(filt.filtered, params.relen_long_ms, params.relen_short_ms);
        const auto peaks = detect_c_peaks(filt.filtered, trace, params, history, start);
        auto beats = delineate_window(filt.filtered, peaks, history, params);

        const bool last = start + len >= n;
        SampleIndex next = start + len;
        if (!last) {
            std::optional<SampleIndex> last_o;
            for (const auto& b : beats)
                if (b.o) last_o = std::max(last_o.value_or(0), *b.o);
            if (last_o) {
                next = start + *last_o;
            } else if (!peaks.positions.empty()) {
                next = std::min(start + len - seam_overlap, start + peaks.positions.back() + c_anchor);
            }
            // a C left for the next window needs room in front of it
            const auto& cs = peaks.positions;
            for (std::size_t k = 0; k < cs.size(); ++k) {
                if (start + cs[k] < next) continue;
                const SampleIndex floor = start + (k > 0 ? cs[k - 1] + 1 : 1);
                next = std::max(std::min(next, start + cs[k] - c_anchor), floor);
                break;
            }
            if (next <= start) next = start + len;
        }

        for (auto& b : beats) {
            shift(b, start);
            if (!last && *b.c >= next) continue;
            // a C re-found just past the seam is the one already committed
            if (!res.beats.empty() && *b.c < *res.beats.back().c + c_anchor) continue;
            history.push(*b.c, signal.fs);
            res.beats.push_back(b);
        }
        res.windows.push_back({{start, len}, filt.length, filt.reason, peaks.size(), next});
        if (last) break;
        start = next;
    }
    return res;
}

std::vector<BeatAnnotation> run_pipeline(const Signal& signal, const DelineationParams& params) {
    return run_pipeline_detailed(signal, params).beats;
}

}  // namespace icg
