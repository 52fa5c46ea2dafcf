#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace icg {

using SampleIndex = std::ptrdiff_t;

// Error hierarchy. DataError is anything caused by the input data (the CLI
// maps it to exit status 2); everything else is a usage/configuration error.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidGeometry : public Error {
public:
    using Error::Error;
};

class InvalidParams : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class SignalTooShort : public DataError {
public:
    using DataError::DataError;
};

class CutoffAboveNyquist : public Error {
public:
    using Error::Error;
};

class WindowOutOfRange : public DataError {
public:
    using DataError::DataError;
};

class InfeasibleSpec : public Error {
public:
    using Error::Error;
};

class EmptyGrid : public Error {
public:
    using Error::Error;
};

// Uniformly sampled dZ/dt waveform.
struct Signal {
    std::vector<double> samples;
    double fs = 0.0;

    [[nodiscard]] SampleIndex size() const noexcept { return static_cast<SampleIndex>(samples.size()); }
    [[nodiscard]] bool empty() const noexcept { return samples.empty(); }
    [[nodiscard]] double duration_s() const noexcept { return fs > 0 ? static_cast<double>(samples.size()) / fs : 0.0; }
    [[nodiscard]] double operator[](SampleIndex i) const { return samples[static_cast<std::size_t>(i)]; }
    [[nodiscard]] std::span<const double> view() const noexcept { return samples; }

    // Copy of [start, start + length) with the same sampling rate.
    [[nodiscard]] Signal slice(SampleIndex start, SampleIndex length) const;
};

// Throws DataError when fs <= 0 or the signal is empty.
void require_valid(const Signal& signal);

struct WindowSegment {
    SampleIndex start = 0;
    SampleIndex length = 0;
};

// One beat. Indices are absolute sample positions in the record the
// annotation refers to.
struct BeatAnnotation {
    std::optional<SampleIndex> b, c, x, o;
    std::optional<double> amp_b, amp_c, amp_x, amp_o;

    friend bool operator==(const BeatAnnotation&, const BeatAnnotation&) = default;
};

enum class PointType { B = 0, C = 1, X = 2, O = 3 };
inline constexpr PointType kPointTypes[] = {PointType::B, PointType::C, PointType::X, PointType::O};

[[nodiscard]] const char* point_name(PointType p) noexcept;
[[nodiscard]] std::optional<SampleIndex> point_of(const BeatAnnotation& beat, PointType p) noexcept;

// True when every present point of the beat is ordered b < c < x < o.
[[nodiscard]] bool is_ordered(const BeatAnnotation& beat) noexcept;

// Sets the amplitude fields from `signal` for every present point.
void fill_amplitudes(BeatAnnotation& beat, const Signal& signal);

// Every tunable constant of the delineator, in physical units.
struct DelineationParams {
    // adaptive Savitzky-Golay stage
    double snr_thr = 30.0;
    double snr_impr_thr = 0.01;
    double snr_cutoff_hz = 20.0;
    int sg_order = 3;
    int sg_len_start = 3;
    int sg_len_step = 2;
    int sg_len_max = 31;
    int fixed_sg_len = 0;  // > 0 bypasses the adaptive loop

    // relative-energy C detection
    double relen_long_ms = 950.0;
    double relen_short_ms = 140.0;
    double thr_max_frac = 0.2;
    double thr_min_frac = 0.02;
    double max_val_mean_factor = 2.0;
    double merge_interval_s = 0.25;
    double cc_valid_factor = 1.7;
    int cc_history = 5;

    // B point
    double b_window_ms = 80.0;
    double a_frac = 0.5;
    double b_slope1 = 0.11;
    double b_slope2 = 0.08;

    // X-O pair
    double co_min_ms = 20.0;
    double co_max_ms = 40.0;
    double cx_min_ms = 15.0;
    double cx_max_ms = 30.0;
    double xo_min_ms = 2.0;
    double xo_max_ms = 15.0;
    int xo_max_minima = 3;

    // streaming
    double window_s = 3.0;

    // Throws InvalidParams on violated constraints.
    void validate() const;

    // String-keyed access used by config files and grid search. Throws
    // InvalidParams for unknown keys or unparsable values.
    void set(const std::string& key, double value);
    [[nodiscard]] double get(const std::string& key) const;
    [[nodiscard]] static const std::vector<std::string>& keys();

    friend bool operator==(const DelineationParams&, const DelineationParams&) = default;
};

// round(t_ms * fs / 1000).
[[nodiscard]] SampleIndex ms_to_samples(double t_ms, double fs);
[[nodiscard]] double samples_to_ms(SampleIndex n, double fs) noexcept;

// Local extrema. A plateau counts once, at its leftmost sample, when the
// plateau is strictly below (minimum) or above (maximum) both flanking
// samples. Edge samples are never extrema.
[[nodiscard]] bool is_local_min(std::span<const double> x, SampleIndex i) noexcept;
[[nodiscard]] bool is_local_max(std::span<const double> x, SampleIndex i) noexcept;

// Extrema indices inside [first, last] (clamped to the span).
[[nodiscard]] std::vector<SampleIndex> local_minima(std::span<const double> x, SampleIndex first, SampleIndex last);
[[nodiscard]] std::vector<SampleIndex> local_maxima(std::span<const double> x, SampleIndex first, SampleIndex last);

}  // namespace icg
