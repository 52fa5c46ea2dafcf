#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "icg/core.hpp"

namespace icg {

struct RelEnTrace {
    std::vector<double> xre;
    std::vector<double> c_coeff;
};

struct CPeakList {
    std::vector<SampleIndex> positions;  // relative to the analysed signal
    std::vector<double> amplitudes;

    [[nodiscard]] std::size_t size() const noexcept { return positions.size(); }
};

// Recent accepted C peaks: the last C (absolute index) and up to
// `capacity` C-C intervals in seconds, newest last.
class CcHistory {
public:
    explicit CcHistory(std::size_t capacity = 5) : capacity_(capacity) {}

    void push(SampleIndex c_abs, double fs);

    [[nodiscard]] std::optional<SampleIndex> last_c() const noexcept { return last_c_; }
    [[nodiscard]] const std::deque<double>& intervals() const noexcept { return intervals_; }
    [[nodiscard]] bool full() const noexcept { return intervals_.size() >= capacity_; }
    [[nodiscard]] std::optional<double> mean_interval_s() const noexcept;

private:
    std::size_t capacity_;
    std::optional<SampleIndex> last_c_;
    std::deque<double> intervals_;
};

// Short/long mean-square energy ratio with windows centred on each sample,
// truncated at the record edges. Throws SignalTooShort when the signal is
// shorter than the long window.
[[nodiscard]] RelEnTrace relative_energy(const Signal& signal, double long_ms, double short_ms);

// Max_val of the enhanced trace: the second highest of the xre peaks that are
// at least merge_interval_s apart when it exceeds max_val_mean_factor times
// mean(|xre|), otherwise the highest. Empty when xre has no positive peak.
[[nodiscard]] std::optional<double> reference_peak_value(const RelEnTrace& trace, double fs, const DelineationParams& params);

// C peaks of one window. `history` supplies the cross-window validity state;
// `origin` is the absolute index of signal sample 0.
[[nodiscard]] CPeakList detect_c_peaks(const Signal& signal, const RelEnTrace& trace, const DelineationParams& params,
                                       const CcHistory& history, SampleIndex origin = 0);

}  // namespace icg
