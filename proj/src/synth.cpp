#include "icg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numbers>
#include <random>
#include <utility>

#include "icg/bxo.hpp"

namespace icg {

const char* morphology_name(Morphology m) noexcept {
    switch (m) {
        case Morphology::BLocalMin: return "b-local-min";
        case Morphology::BNotch: return "b-notch";
        case Morphology::XLocalMinOnly: return "x-local-min-only";
    }
    return "?";
}

Morphology parse_morphology(const std::string& name) {
    for (auto m : {Morphology::BLocalMin, Morphology::BNotch, Morphology::XLocalMinOnly})
        if (name == morphology_name(m)) return m;
    throw InfeasibleSpec("unknown morphology '" + name + "'");
}

namespace {

// Shape constants, in units of the C amplitude and milliseconds.
constexpr double kPedestal = 0.3;  // level of the pre-wave the upstroke starts from
constexpr double kPedestalMs = 100.0;
constexpr double kLocalMinDip = 0.08;
constexpr double kLocalMinDipMs = 40.0;  // descent from the pedestal into a local-minimum B
constexpr double kNotchDepth = 0.16;
constexpr double kNotchMs = 16.0;
constexpr double kBreakSlope = 0.035;  // per ms, arriving at a slope-break B
constexpr double kBreakMs = 24.0;      // steep descent into B
constexpr double kBreakTailMs = 60.0;
constexpr double kXLevel = 0.85;
constexpr double kOLevel = 0.9;
constexpr double kFallMs = 180.0;
constexpr double kTroughShallow = 0.3;
constexpr double kTroughDeep = 0.45;

// cos^2 bump of unit height centred at `centre`, zero outside +-half.
double lobe(double t, double centre, double half) {
    const double u = (t - centre) / half;
    if (u <= -1.0 || u >= 1.0) return 0.0;
    const double c = std::cos(std::numbers::pi / 2.0 * u);
    return c * c;
}

struct BeatGeometry {
    double b_ms, x_ms, o_ms;  // signed offsets from C (b negative)
    double fall_ms;
    double trough_ms, trough_half_ms, trough_depth;
};

BeatGeometry geometry(const SyntheticBeatSpec& spec, double fs, double rr_ms) {
    // snap feature times to the sample grid so planted indices are exact
    auto snap = [&](double ms) { return samples_to_ms(ms_to_samples(ms, fs), fs); };
    BeatGeometry g{};
    g.b_ms = -snap(spec.b_offset_ms);
    g.x_ms = snap(spec.x_offset_ms);
    g.o_ms = snap(spec.o_offset_ms);
    g.fall_ms = std::min(kFallMs, 0.25 * rr_ms);
    g.trough_ms = 0.34 * rr_ms;
    g.trough_half_ms = 0.1 * rr_ms;
    g.trough_depth = spec.morphology == Morphology::XLocalMinOnly ? kTroughDeep : kTroughShallow;
    return g;
}

// Half-cosine step from (t0, v0) to (t1, v1); flat at both ends.
double ease(double t, double t0, double v0, double t1, double v1) {
    const double u = std::clamp((t - t0) / (t1 - t0), 0.0, 1.0);
    return v0 + (v1 - v0) * 0.5 * (1.0 - std::cos(std::numbers::pi * u));
}

// Piecewise half-cosine through the knots; zero outside them.
double through(double t, std::initializer_list<std::pair<double, double>> knots) {
    const auto* prev = knots.begin();
    if (t <= prev->first) return 0.0;
    for (const auto* k = prev + 1; k != knots.end(); prev = k++)
        if (t <= k->first) return ease(t, prev->first, prev->second, k->first, k->second);
    return 0.0;
}

// Noise-free template value (units of C amplitude) at t ms from C.
double template_value(const SyntheticBeatSpec& spec, const BeatGeometry& g, double t) {
    double v = 0.0;
    if (t <= 0.0) {
        switch (spec.morphology) {
            case Morphology::BLocalMin:
            case Morphology::BNotch: {
                const double d = spec.morphology == Morphology::BNotch ? kNotchMs : kLocalMinDipMs;
                const double depth = spec.morphology == Morphology::BNotch ? kNotchDepth : kLocalMinDip;
                v = through(t, {{g.b_ms - d - kPedestalMs, 0.0}, {g.b_ms - d, kPedestal}, {g.b_ms, kPedestal - depth}, {0.0, 1.0}});
                break;
            }
            case Morphology::XLocalMinOnly: {
                // pedestal, then the upstroke from B with a quarter-sine descent and shoulder in front of it
                if (t <= g.b_ms) v = kPedestal * lobe(t, g.b_ms, kPedestalMs);
                else v = kPedestal + (1.0 - kPedestal) * lobe(t, 0.0, -g.b_ms);
                const double depth = 2.0 * kBreakSlope * kBreakMs / std::numbers::pi;
                const double u = g.b_ms - t;
                if (u > 0.0 && u <= kBreakMs) {
                    v -= depth * std::sin(std::numbers::pi / 2.0 * u / kBreakMs);
                } else if (u > kBreakMs) {
                    v -= depth * lobe(t, g.b_ms - kBreakMs, kBreakTailMs);
                }
                break;
            }
        }
    } else {
        v = through(t, {{0.0, 1.0}, {g.x_ms, kXLevel}, {g.o_ms, kOLevel}, {g.fall_ms, 0.0}});
    }
    v -= g.trough_depth * lobe(t, g.trough_ms, g.trough_half_ms);
    return v;
}

double lead_ms(const SyntheticBeatSpec& spec, const BeatGeometry& g) {
    switch (spec.morphology) {
        case Morphology::BLocalMin: return -g.b_ms + kLocalMinDipMs + kPedestalMs;
        case Morphology::BNotch: return -g.b_ms + kNotchMs + kPedestalMs;
        case Morphology::XLocalMinOnly: break;
    }
    return -g.b_ms + std::max(kPedestalMs, kBreakMs + kBreakTailMs);
}

void check_spec(const SyntheticBeatSpec& spec, double duration_s, double fs, const DelineationParams& params) {
    auto fail = [](const std::string& why) { throw InfeasibleSpec(why); };
    if (duration_s < 3.0) fail("duration must be at least 3 s");
    if (fs < 100.0) fail("sampling rate must be at least 100 Hz");
    if (!(spec.hr_bpm >= 30.0 && spec.hr_bpm <= 150.0)) fail("hr_bpm must lie in [30, 150]");
    if (!(spec.c_ampl > 0.0)) fail("c_ampl must be positive");
    if (!(spec.b_offset_ms > 0.0 && spec.b_offset_ms < params.b_window_ms)) fail("B must lie inside the B search window");
    if (spec.x_offset_ms < params.cx_min_ms || spec.x_offset_ms > params.cx_max_ms) fail("X must lie inside the X window");
    if (spec.o_offset_ms < params.co_min_ms || spec.o_offset_ms > params.co_max_ms) fail("O must lie inside the O window");
    const double gap = spec.o_offset_ms - spec.x_offset_ms;
    if (gap < params.xo_min_ms || gap > params.xo_max_ms) fail("X-O gap outside the allowed range");
    for (const auto& n : spec.noise) {
        if (n.amplitude < 0.0) fail("noise amplitude must be >= 0");
        if (n.kind != NoiseComponent::Kind::White && !(n.freq_hz > 0.0 && n.freq_hz < fs / 2.0))
            fail("noise frequency must lie in (0, fs/2)");
    }
}

// Confirms each planted point is the feature it claims to be.
void verify(const SyntheticBeatSpec& spec, const Signal& clean, const BeatAnnotation& beat, SampleIndex next_c,
            const DelineationParams& params) {
    const auto x = clean.view();
    auto fail = [&](const std::string& what) {
        throw InfeasibleSpec(std::string(morphology_name(spec.morphology)) + ": planted " + what + " at C=" +
                             std::to_string(*beat.c) + " is not a genuine feature");
    };
    const auto b = *beat.b, c = *beat.c, xi = *beat.x, o = *beat.o;
    if (!(b < c && c < xi && xi < o)) fail("point order");
    if (!is_local_max(x, c)) fail("C");
    for (auto i = c - (c - b) * 2; i < next_c && i < clean.size(); ++i)
        if (i >= 0 && i != c && x[static_cast<std::size_t>(i)] >= x[static_cast<std::size_t>(c)]) fail("C (not the beat maximum)");
    if (!is_local_min(x, xi)) fail("X");
    if (!is_local_max(x, o)) fail("O");
    if (spec.morphology == Morphology::XLocalMinOnly) {
        const auto lo = std::min_element(x.begin() + c, x.begin() + std::min(next_c, clean.size()));
        if (static_cast<SampleIndex>(lo - x.begin()) == xi) fail("X (is the global minimum)");
        if (is_local_min(x, b)) fail("B (slope break must not be a minimum)");
    } else if (!is_local_min(x, b)) {
        fail("B");
    }
    // the delineation rules must recover the planted points from the clean waveform
    if (detect_b(clean, c, x[static_cast<std::size_t>(c)], params) != b) fail("B (not what the B rule finds)");
    XoContext ctx;
    if (next_c < clean.size()) ctx.next_c = next_c;
    if (detect_xo(clean, c, params, ctx) != XoPair{xi, o}) fail("X/O (not the pair the X-O rule finds)");
}

}  // namespace

GroundTruthRecord generate(const SyntheticBeatSpec& spec, double duration_s, double fs, std::uint64_t seed,
                           const DelineationParams& params) {
    check_spec(spec, duration_s, fs, params);
    const double rr_ms = 60000.0 / spec.hr_bpm;
    const auto g = geometry(spec, fs, rr_ms);
    const auto n = static_cast<SampleIndex>(std::llround(duration_s * fs));
    const auto rr = ms_to_samples(rr_ms, fs);
    const auto lead = ms_to_samples(lead_ms(spec, g) + 40.0, fs);
    const auto tail = ms_to_samples(0.5 * rr_ms, fs);

    // C positions: first beat half an interval in, whole beats only
    std::vector<SampleIndex> cs;
    for (SampleIndex c = std::max(lead, rr / 2); c + tail <= n; c += rr) cs.push_back(c);
    if (cs.empty()) throw InfeasibleSpec("duration too short for a single beat");

    Signal clean{std::vector<double>(static_cast<std::size_t>(n), 0.0), fs};
    for (auto c : cs) {
        const auto lo = std::max<SampleIndex>(0, c - lead);
        const auto hi = std::min<SampleIndex>(n - 1, c + rr - lead);
        for (auto i = lo; i <= hi; ++i)
            clean.samples[static_cast<std::size_t>(i)] += spec.c_ampl * template_value(spec, g, samples_to_ms(i - c, fs));
    }

    GroundTruthRecord rec;
    for (std::size_t k = 0; k < cs.size(); ++k) {
        BeatAnnotation beat;
        beat.c = cs[k];
        beat.b = cs[k] + ms_to_samples(g.b_ms, fs);
        beat.x = cs[k] + ms_to_samples(g.x_ms, fs);
        beat.o = cs[k] + ms_to_samples(g.o_ms, fs);
        verify(spec, clean, beat, k + 1 < cs.size() ? cs[k + 1] : n, params);
        rec.beats.push_back(beat);
    }

    rec.signal = clean;
    std::mt19937_64 rng(seed);
    for (const auto& comp : spec.noise) {
        if (comp.kind == NoiseComponent::Kind::White) {
            std::normal_distribution<double> dist(0.0, comp.amplitude);
            for (auto& v : rec.signal.samples) v += dist(rng);
        } else {
            std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
            const double phase = phase_dist(rng);
            for (SampleIndex i = 0; i < n; ++i)
                rec.signal.samples[static_cast<std::size_t>(i)] +=
                    comp.amplitude * std::sin(2.0 * std::numbers::pi * comp.freq_hz * static_cast<double>(i) / fs + phase);
        }
    }
    for (auto& beat : rec.beats) fill_amplitudes(beat, rec.signal);
    return rec;
}

}  // namespace icg
