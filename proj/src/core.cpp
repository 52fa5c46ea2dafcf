#include "icg/core.hpp"

#include <algorithm>
#include <map>
#include <variant>

namespace icg {

Signal Signal::slice(SampleIndex start, SampleIndex length) const {
    if (start < 0 || length < 0 || start + length > size()) {
        throw WindowOutOfRange("slice [" + std::to_string(start) + ", " + std::to_string(start + length) +
                               ") outside record of " + std::to_string(size()) + " samples");
    }
    Signal out;
    out.fs = fs;
    out.samples.assign(samples.begin() + start, samples.begin() + start + length);
    return out;
}

void require_valid(const Signal& signal) {
    if (!(signal.fs > 0.0)) throw DataError("sampling rate must be positive");
    if (signal.empty()) throw DataError("signal is empty");
}

const char* point_name(PointType p) noexcept {
    switch (p) {
        case PointType::B: return "B";
        case PointType::C: return "C";
        case PointType::X: return "X";
        case PointType::O: return "O";
    }
    return "?";
}

std::optional<SampleIndex> point_of(const BeatAnnotation& beat, PointType p) noexcept {
    switch (p) {
        case PointType::B: return beat.b;
        case PointType::C: return beat.c;
        case PointType::X: return beat.x;
        case PointType::O: return beat.o;
    }
    return std::nullopt;
}

bool is_ordered(const BeatAnnotation& beat) noexcept {
    std::optional<SampleIndex> prev;
    for (auto p : kPointTypes) {
        auto v = point_of(beat, p);
        if (!v) continue;
        if (prev && *v <= *prev) return false;
        prev = v;
    }
    return true;
}

void fill_amplitudes(BeatAnnotation& beat, const Signal& signal) {
    auto amp = [&](const std::optional<SampleIndex>& idx) -> std::optional<double> {
        if (!idx || *idx < 0 || *idx >= signal.size()) return std::nullopt;
        return signal[*idx];
    };
    beat.amp_b = amp(beat.b);
    beat.amp_c = amp(beat.c);
    beat.amp_x = amp(beat.x);
    beat.amp_o = amp(beat.o);
}

namespace {

using Field = std::variant<double DelineationParams::*, int DelineationParams::*>;

const std::map<std::string, Field>& field_table() {
    static const std::map<std::string, Field> table = {
        {"snr_thr", &DelineationParams::snr_thr},
        {"snr_impr_thr", &DelineationParams::snr_impr_thr},
        {"snr_cutoff_hz", &DelineationParams::snr_cutoff_hz},
        {"sg_order", &DelineationParams::sg_order},
        {"sg_len_start", &DelineationParams::sg_len_start},
        {"sg_len_step", &DelineationParams::sg_len_step},
        {"sg_len_max", &DelineationParams::sg_len_max},
        {"fixed_sg_len", &DelineationParams::fixed_sg_len},
        {"relen_long_ms", &DelineationParams::relen_long_ms},
        {"relen_short_ms", &DelineationParams::relen_short_ms},
        {"thr_max_frac", &DelineationParams::thr_max_frac},
        {"thr_min_frac", &DelineationParams::thr_min_frac},
        {"max_val_mean_factor", &DelineationParams::max_val_mean_factor},
        {"merge_interval_s", &DelineationParams::merge_interval_s},
        {"cc_valid_factor", &DelineationParams::cc_valid_factor},
        {"cc_history", &DelineationParams::cc_history},
        {"b_window_ms", &DelineationParams::b_window_ms},
        {"a_frac", &DelineationParams::a_frac},
        {"b_slope1", &DelineationParams::b_slope1},
        {"b_slope2", &DelineationParams::b_slope2},
        {"co_min_ms", &DelineationParams::co_min_ms},
        {"co_max_ms", &DelineationParams::co_max_ms},
        {"cx_min_ms", &DelineationParams::cx_min_ms},
        {"cx_max_ms", &DelineationParams::cx_max_ms},
        {"xo_min_ms", &DelineationParams::xo_min_ms},
        {"xo_max_ms", &DelineationParams::xo_max_ms},
        {"xo_max_minima", &DelineationParams::xo_max_minima},
        {"window_s", &DelineationParams::window_s},
    };
    return table;
}

const Field& lookup(const std::string& key) {
    const auto& table = field_table();
    auto it = table.find(key);
    if (it == table.end()) throw InvalidParams("unknown parameter '" + key + "'");
    return it->second;
}

}  // namespace

void DelineationParams::set(const std::string& key, double value) {
    std::visit(
        [&](auto member) {
            using T = std::remove_reference_t<decltype(this->*member)>;
            if constexpr (std::is_same_v<T, int>) {
                if (value != std::floor(value)) throw InvalidParams("parameter '" + key + "' must be an integer");
                this->*member = static_cast<int>(value);
            } else {
                this->*member = value;
            }
        },
        lookup(key));
}

double DelineationParams::get(const std::string& key) const {
    return std::visit([&](auto member) { return static_cast<double>(this->*member); }, lookup(key));
}

const std::vector<std::string>& DelineationParams::keys() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, _] : field_table()) v.push_back(k);
        return v;
    }();
    return names;
}

void DelineationParams::validate() const {
    auto fail = [](const std::string& what) { throw InvalidParams(what); };
    if (sg_order < 0) fail("sg_order must be >= 0");
    if (sg_len_start < 1 || sg_len_start % 2 == 0) fail("sg_len_start must be odd");
    if (sg_len_step <= 0 || sg_len_step % 2 != 0) fail("sg_len_step must be even and positive");
    if (sg_len_max % 2 == 0 || sg_len_max <= sg_order) fail("sg_len_max must be odd and > sg_order");
    if (sg_len_max < sg_len_start) fail("sg_len_max must be >= sg_len_start");
    if (fixed_sg_len < 0 || (fixed_sg_len > 0 && fixed_sg_len % 2 == 0)) fail("fixed_sg_len must be 0 or odd");
    if (!(snr_thr > 0)) fail("snr_thr must be positive");
    if (snr_impr_thr < 0) fail("snr_impr_thr must be >= 0");
    if (!(snr_cutoff_hz > 0)) fail("snr_cutoff_hz must be positive");
    if (!(relen_short_ms > 0) || !(relen_long_ms >= relen_short_ms)) fail("relen windows must satisfy 0 < short <= long");
    if (!(thr_min_frac < thr_max_frac) || thr_min_frac < 0) fail("need 0 <= thr_min_frac < thr_max_frac");
    if (!(merge_interval_s >= 0)) fail("merge_interval_s must be >= 0");
    if (!(cc_valid_factor > 0)) fail("cc_valid_factor must be positive");
    if (cc_history < 1) fail("cc_history must be >= 1");
    if (!(b_window_ms > 0)) fail("b_window_ms must be positive");
    if (!(a_frac > 0 && a_frac < 1)) fail("a_frac must lie in (0, 1)");
    if (!(b_slope1 > 0) || !(b_slope2 > 0)) fail("b_slope1 and b_slope2 must be positive");
    if (!(co_min_ms >= 0 && co_min_ms < co_max_ms)) fail("need 0 <= co_min_ms < co_max_ms");
    if (!(cx_min_ms >= 0 && cx_min_ms < cx_max_ms)) fail("need 0 <= cx_min_ms < cx_max_ms");
    if (!(xo_min_ms < xo_max_ms)) fail("need xo_min_ms < xo_max_ms");
    if (xo_max_minima < 1) fail("xo_max_minima must be >= 1");
    if (!(window_s >= 1.0)) fail("window_s must be >= 1 s");
}

SampleIndex ms_to_samples(double t_ms, double fs) {
    return static_cast<SampleIndex>(std::llround(t_ms * fs / 1000.0));
}

double samples_to_ms(SampleIndex n, double fs) noexcept { return static_cast<double>(n) * 1000.0 / fs; }

namespace {

// End (inclusive) of the run of samples equal to x[i].
SampleIndex run_end(std::span<const double> x, SampleIndex i) noexcept {
    const auto n = static_cast<SampleIndex>(x.size());
    SampleIndex j = i;
    while (j + 1 < n && x[static_cast<std::size_t>(j + 1)] == x[static_cast<std::size_t>(i)]) ++j;
    return j;
}

template <typename Cmp>
bool is_extremum(std::span<const double> x, SampleIndex i, Cmp beyond) noexcept {
    const auto n = static_cast<SampleIndex>(x.size());
    if (i <= 0 || i >= n - 1) return false;
    const double v = x[static_cast<std::size_t>(i)];
    if (!beyond(x[static_cast<std::size_t>(i - 1)], v)) return false;
    const SampleIndex j = run_end(x, i);
    if (j >= n - 1) return false;
    return beyond(x[static_cast<std::size_t>(j + 1)], v);
}

template <typename Pred>
std::vector<SampleIndex> collect(std::span<const double> x, SampleIndex first, SampleIndex last, Pred pred) {
    std::vector<SampleIndex> out;
    first = std::max<SampleIndex>(first, 1);
    last = std::min<SampleIndex>(last, static_cast<SampleIndex>(x.size()) - 2);
    for (SampleIndex i = first; i <= last; ++i)
        if (pred(x, i)) out.push_back(i);
    return out;
}

}  // namespace

bool is_local_min(std::span<const double> x, SampleIndex i) noexcept {
    return is_extremum(x, i, [](double nb, double v) { return nb > v; });
}

bool is_local_max(std::span<const double> x, SampleIndex i) noexcept {
    return is_extremum(x, i, [](double nb, double v) { return nb < v; });
}

std::vector<SampleIndex> local_minima(std::span<const double> x, SampleIndex first, SampleIndex last) {
    return collect(x, first, last, is_local_min);
}

std::vector<SampleIndex> local_maxima(std::span<const double> x, SampleIndex first, SampleIndex last) {
    return collect(x, first, last, is_local_max);
}

}  // namespace icg
