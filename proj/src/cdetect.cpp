#include "icg/cdetect.hpp"

#include <algorithm>
#include <numeric>

#include "icg/kernels.hpp"

namespace icg {

void CcHistory::push(SampleIndex c_abs, double fs) {
    if (last_c_) {
        intervals_.push_back(static_cast<double>(c_abs - *last_c_) / fs);
        while (intervals_.size() > capacity_) intervals_.pop_front();
    }
    last_c_ = c_abs;
}

std::optional<double> CcHistory::mean_interval_s() const noexcept {
    if (intervals_.empty()) return std::nullopt;
    return std::accumulate(intervals_.begin(), intervals_.end(), 0.0) / static_cast<double>(intervals_.size());
}

RelEnTrace relative_energy(const Signal& signal, double long_ms, double short_ms) {
    require_valid(signal);
    const auto long_len = std::max<SampleIndex>(1, ms_to_samples(long_ms, signal.fs));
    const auto short_len = std::max<SampleIndex>(1, ms_to_samples(short_ms, signal.fs));
    if (signal.size() < long_len) {
        throw SignalTooShort("relative energy needs at least " + std::to_string(long_len) + " samples, got " +
                             std::to_string(signal.size()));
    }
    auto r = kernels::omp::relative_energy(signal.view(), static_cast<int>(short_len), static_cast<int>(long_len));
    return RelEnTrace{std::move(r.enhanced), std::move(r.coeff)};
}

std::optional<double> reference_peak_value(const RelEnTrace& trace, double fs, const DelineationParams& params) {
    const auto& xre = trace.xre;
    auto peaks = local_maxima(xre, 0, static_cast<SampleIndex>(xre.size()) - 1);
    std::erase_if(peaks, [&](SampleIndex i) { return xre[static_cast<std::size_t>(i)] <= 0.0; });
    if (peaks.empty()) return std::nullopt;

    std::stable_sort(peaks.begin(), peaks.end(),
                     [&](SampleIndex a, SampleIndex b) { return xre[static_cast<std::size_t>(a)] > xre[static_cast<std::size_t>(b)]; });
    const auto sep = ms_to_samples(params.merge_interval_s * 1000.0, fs);
    std::vector<SampleIndex> distinct;
    for (auto p : peaks) {
        const bool near = std::any_of(distinct.begin(), distinct.end(), [&](SampleIndex q) { return std::abs(p - q) < sep; });
        if (!near) distinct.push_back(p);
        if (distinct.size() == 2) break;
    }
    const double highest = xre[static_cast<std::size_t>(distinct[0])];
    if (distinct.size() < 2) return highest;
    const double second = xre[static_cast<std::size_t>(distinct[1])];
    double mean_abs = 0.0;
    for (double v : xre) mean_abs += std::abs(v);
    mean_abs /= static_cast<double>(xre.size());
    return second > params.max_val_mean_factor * mean_abs ? second : highest;
}

namespace {

// The candidate must dominate its +-2 sample neighbourhood.
bool is_peak_candidate(std::span<const double> x, SampleIndex i) {
    const auto n = static_cast<SampleIndex>(x.size());
    if (i < 2 || i > n - 3) return false;
    for (SampleIndex j = i - 2; j <= i + 2; ++j)
        if (x[static_cast<std::size_t>(j)] > x[static_cast<std::size_t>(i)]) return false;
    return true;
}

}  // namespace

CPeakList detect_c_peaks(const Signal& signal, const RelEnTrace& trace, const DelineationParams& params,
                         const CcHistory& history, SampleIndex origin) {
    require_valid(signal);
    if (trace.xre.size() != signal.samples.size()) throw DataError("Rel-En trace does not match the signal length");
    CPeakList out;
    const auto max_val = reference_peak_value(trace, signal.fs, params);
    if (!max_val) return out;

    const double thr_max = params.thr_max_frac * *max_val;
    const double thr_min = params.thr_min_frac * *max_val;
    const auto x = signal.view();
    const auto n = signal.size();

    // active regions: upward crossing of thr_max until xre falls below thr_min
    std::vector<SampleIndex> candidates;
    SampleIndex region_start = -1;
    auto close_region = [&](SampleIndex end) {
        const auto first = x.begin() + region_start;
        const auto best = static_cast<SampleIndex>(std::max_element(first, x.begin() + end) - x.begin());
        if (is_peak_candidate(x, best)) candidates.push_back(best);
        region_start = -1;
    };
    for (SampleIndex i = 0; i < n; ++i) {
        const double v = trace.xre[static_cast<std::size_t>(i)];
        if (region_start < 0) {
            if (v > thr_max) region_start = i;
        } else if (v < thr_min) {
            close_region(i);
        }
    }
    if (region_start >= 0) close_region(n);

    // candidates closer than the merge interval keep the higher one
    const auto merge = ms_to_samples(params.merge_interval_s * 1000.0, signal.fs);
    std::vector<SampleIndex> merged;
    for (auto c : candidates) {
        if (!merged.empty() && c - merged.back() < merge) {
            if (x[static_cast<std::size_t>(c)] > x[static_cast<std::size_t>(merged.back())]) merged.back() = c;
        } else {
            merged.push_back(c);
        }
    }

    // reject beats arriving faster than the recent rhythm allows
    CcHistory local = history;
    for (auto c : merged) {
        const SampleIndex abs_c = origin + c;
        if (local.full() && local.last_c()) {
            const double interval = static_cast<double>(abs_c - *local.last_c()) / signal.fs;
            if (interval < *local.mean_interval_s() / params.cc_valid_factor) continue;
        }
        if (local.last_c() && abs_c <= *local.last_c()) continue;
        local.push(abs_c, signal.fs);
        out.positions.push_back(c);
        out.amplitudes.push_back(x[static_cast<std::size_t>(c)]);
    }
    return out;
}

}  // namespace icg
