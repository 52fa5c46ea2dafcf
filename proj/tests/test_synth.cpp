#include <doctest.h>

#include <algorithm>

#include "icg/eval.hpp"
#include "icg/pipeline.hpp"
#include "icg/synth.hpp"

using namespace icg;

namespace {

constexpr Morphology kAll[] = {Morphology::BLocalMin, Morphology::BNotch, Morphology::XLocalMinOnly};

}  // namespace

TEST_CASE("morphology names round-trip") {
    for (auto m : kAll) CHECK(parse_morphology(morphology_name(m)) == m);
    CHECK_THROWS_AS((void)parse_morphology("b-spike"), InfeasibleSpec);
}

TEST_CASE("same seed gives a bit-identical record") {
    SyntheticBeatSpec spec;
    spec.morphology = Morphology::BNotch;
    spec.noise = {{NoiseComponent::Kind::White, 0.05, 0.0}, {NoiseComponent::Kind::Sinusoid, 0.1, 50.0}};
    const auto a = generate(spec, 10.0, 250.0, 42);
    const auto b = generate(spec, 10.0, 250.0, 42);
    CHECK(a.signal.samples == b.signal.samples);
    CHECK(a.beats == b.beats);
    const auto c = generate(spec, 10.0, 250.0, 43);
    CHECK(c.signal.samples != a.signal.samples);
    CHECK(c.beats.size() == a.beats.size());
}

TEST_CASE("planted points are genuine features of the clean waveform") {
    for (auto m : kAll) {
        for (double hr : {45.0, 60.0, 90.0, 120.0}) {
            for (double fs : {250.0, 500.0, 1000.0}) {
                CAPTURE(morphology_name(m));
                CAPTURE(hr);
                CAPTURE(fs);
                SyntheticBeatSpec spec;
                spec.morphology = m;
                spec.hr_bpm = hr;
                const auto rec = generate(spec, 10.0, fs, 0);
                const auto x = rec.signal.view();
                REQUIRE(rec.beats.size() >= 5);
                for (const auto& beat : rec.beats) {
                    CHECK(is_ordered(beat));
                    CHECK(is_local_max(x, *beat.c));
                    CHECK(is_local_min(x, *beat.x));
                    CHECK(is_local_max(x, *beat.o));
                    if (m == Morphology::XLocalMinOnly) CHECK_FALSE(is_local_min(x, *beat.b));
                    else CHECK(is_local_min(x, *beat.b));
                    CHECK(*beat.amp_c == rec.signal[*beat.c]);
                    CHECK(*beat.amp_b == rec.signal[*beat.b]);
                }
            }
        }
    }
}

TEST_CASE("planted offsets follow the spec") {
    SyntheticBeatSpec spec;
    spec.b_offset_ms = 60;
    spec.x_offset_ms = 20;
    spec.o_offset_ms = 32;
    const auto rec = generate(spec, 5.0, 250.0, 0);
    for (const auto& beat : rec.beats) {
        CHECK(*beat.c - *beat.b == 15);
        CHECK(*beat.x - *beat.c == 5);
        CHECK(*beat.o - *beat.c == 8);
    }
    // 60 bpm: one beat per second
    for (std::size_t k = 1; k < rec.beats.size(); ++k) CHECK(*rec.beats[k].c - *rec.beats[k - 1].c == 250);
}

TEST_CASE("the slope-break X is a local but not a global minimum") {
    SyntheticBeatSpec spec;
    spec.morphology = Morphology::XLocalMinOnly;
    const auto rec = generate(spec, 6.0, 250.0, 0);
    const auto x = rec.signal.view();
    for (std::size_t k = 0; k + 1 < rec.beats.size(); ++k) {
        const auto c = *rec.beats[k].c, next = *rec.beats[k + 1].c;
        const auto lo = std::min_element(x.begin() + c, x.begin() + next);
        CHECK(static_cast<SampleIndex>(lo - x.begin()) != *rec.beats[k].x);
    }
}

TEST_CASE("infeasible specs are refused") {
    SyntheticBeatSpec ok;
    CHECK_NOTHROW((void)generate(ok, 3.0, 250.0, 0));
    CHECK_THROWS_AS((void)generate(ok, 2.0, 250.0, 0), InfeasibleSpec);
    CHECK_THROWS_AS((void)generate(ok, 10.0, 50.0, 0), InfeasibleSpec);

    auto s = ok;
    s.x_offset_ms = 40;  // outside the X window
    CHECK_THROWS_AS((void)generate(s, 10.0, 250.0, 0), InfeasibleSpec);
    s = ok;
    s.o_offset_ms = 20;  // O before X
    CHECK_THROWS_AS((void)generate(s, 10.0, 250.0, 0), InfeasibleSpec);
    s = ok;
    s.b_offset_ms = 90;  // outside the B window
    CHECK_THROWS_AS((void)generate(s, 10.0, 250.0, 0), InfeasibleSpec);
    s = ok;
    s.hr_bpm = 200;
    CHECK_THROWS_AS((void)generate(s, 10.0, 250.0, 0), InfeasibleSpec);
    s = ok;
    s.c_ampl = -1;
    CHECK_THROWS_AS((void)generate(s, 10.0, 250.0, 0), InfeasibleSpec);
    s = ok;
    s.noise = {{NoiseComponent::Kind::Sinusoid, 0.1, 200.0}};  // above Nyquist
    CHECK_THROWS_AS((void)generate(s, 10.0, 250.0, 0), InfeasibleSpec);

    // windows narrowed so the default placements no longer fit
    DelineationParams p;
    p.cx_max_ms = 20;
    CHECK_THROWS_AS((void)generate(ok, 10.0, 250.0, 0, p), InfeasibleSpec);
}

TEST_CASE("amplitudes scale with c_ampl") {
    SyntheticBeatSpec spec;
    const auto unit = generate(spec, 4.0, 250.0, 0);
    spec.c_ampl = 2.5;
    const auto big = generate(spec, 4.0, 250.0, 0);
    for (std::size_t i = 0; i < unit.signal.samples.size(); ++i)
        CHECK(big.signal.samples[i] == doctest::Approx(2.5 * unit.signal.samples[i]));
    CHECK(*big.beats[0].amp_c == doctest::Approx(2.5));
}

TEST_CASE("at 5% white noise at least 29 of 30 C peaks are found") {
    for (auto m : kAll) {
        SyntheticBeatSpec spec;
        spec.morphology = m;
        spec.noise = {{NoiseComponent::Kind::White, 0.05, 0.0}};
        const auto rec = generate(spec, 30.0, 250.0, 7);
        REQUIRE(rec.beats.size() == 30);
        const auto ev = evaluate_record(run_pipeline(rec.signal, {}), rec.beats, 250.0, 30.0);
        CHECK(ev.matches[static_cast<std::size_t>(PointType::C)].tp >= 29);
    }
}
