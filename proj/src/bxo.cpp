#include "icg/bxo.hpp"

#include <algorithm>

namespace icg {

namespace {
constexpr double kSlopeStepMs = 4.0;
}

SlopeTrace normalized_slope(std::span<const double> x, double c_ampl, double fs) {
    SlopeTrace t;
    if (x.size() < 2) return t;
    const double scale = (c_ampl != 0.0 ? 1.0 / std::abs(c_ampl) : 1.0) * fs * kSlopeStepMs / 1000.0;
    t.deriv.resize(x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) t.deriv[i] = (x[i + 1] - x[i]) * scale;
    return t;
}

BSearchWindow b_search_window(const Signal& signal, SampleIndex c_pos, double c_ampl, const DelineationParams& params) {
    const SampleIndex left = c_pos - ms_to_samples(params.b_window_ms, signal.fs);
    if (left < 0 || c_pos >= signal.size()) {
        throw WindowOutOfRange("B search window for C at " + std::to_string(c_pos) + " falls outside the signal");
    }
    const double level = params.a_frac * c_ampl;
    SampleIndex right = left;
    for (SampleIndex i = c_pos - 1; i >= left; --i) {
        if (signal[i] <= level) {
            right = i;
            break;
        }
    }
    return {left, right};
}

SampleIndex detect_b(const Signal& signal, SampleIndex c_pos, double c_ampl, const DelineationParams& params) {
    const auto [left, right] = b_search_window(signal, c_pos, c_ampl, params);
    const auto x = signal.view();
    const auto slope = normalized_slope(x, c_ampl, signal.fs);
    // slope arriving at sample i
    auto slope_at = [&](SampleIndex i) { return slope.deriv[static_cast<std::size_t>(i - 1)]; };

    for (SampleIndex i = right; i > left; --i)
        if (is_local_min(x, i) || std::abs(slope_at(i)) > params.b_slope1) return i;
    for (SampleIndex i = right; i > left; --i)
        if (slope_at(i) > params.b_slope2) return i;
    const auto first = x.begin() + left;
    return static_cast<SampleIndex>(std::min_element(first, x.begin() + right + 1) - x.begin());
}

XoWindows xo_windows(const DelineationParams& params, double fs) {
    return {ms_to_samples(params.co_min_ms, fs), ms_to_samples(params.co_max_ms, fs),
            ms_to_samples(params.cx_min_ms, fs), ms_to_samples(params.cx_max_ms, fs),
            ms_to_samples(params.xo_min_ms, fs), ms_to_samples(params.xo_max_ms, fs)};
}

std::optional<XoPair> detect_xo(const Signal& signal, SampleIndex c_pos, const DelineationParams& params,
                                const XoContext& context) {
    const auto x = signal.view();
    const auto w = xo_windows(params, signal.fs);

    std::optional<SampleIndex> o_limit;
    if (context.next_c) {
        o_limit = c_pos + (*context.next_c - c_pos) / 2;
    } else if (context.mean_cc_samples) {
        o_limit = c_pos + static_cast<SampleIndex>(0.5 * *context.mean_cc_samples);
    }

    const auto o_cands = local_maxima(x, c_pos + w.o_first, c_pos + w.o_last);
    const auto x_cands = local_minima(x, c_pos + w.x_first, c_pos + w.x_last);
    if (o_cands.empty() || x_cands.empty()) return std::nullopt;

    // minima between candidates are counted over the whole span they can cover
    const auto minima = local_minima(x, x_cands.front(), o_cands.back());
    auto minima_between = [&](SampleIndex a, SampleIndex b) {
        return std::count_if(minima.begin(), minima.end(), [&](SampleIndex m) { return m > a && m < b; });
    };

    std::optional<XoPair> best;
    double best_diff = 0.0;
    for (auto xi : x_cands) {
        for (auto oi : o_cands) {
            const auto gap = oi - xi;
            if (gap < w.gap_min || gap > w.gap_max) continue;
            const double diff = x[static_cast<std::size_t>(oi)] - x[static_cast<std::size_t>(xi)];
            if (!(diff > 0.0)) continue;
            if (minima_between(xi, oi) >= params.xo_max_minima) continue;
            if (o_limit && oi > *o_limit) continue;
            if (!best || diff > best_diff) {
                best = XoPair{xi, oi};
                best_diff = diff;
            }
        }
    }
    return best;
}

}  // namespace icg
