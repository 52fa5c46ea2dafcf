#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>

#include "corpus.hpp"
#include "icg/eval.hpp"

using namespace icg;

namespace {

// Maximum bipartite matching by augmenting paths.
std::size_t max_matching(const std::vector<SampleIndex>& det, const std::vector<SampleIndex>& ref, SampleIndex reach) {
    std::vector<int> owner(det.size(), -1);
    std::function<bool(std::size_t, std::vector<bool>&)> augment = [&](std::size_t r, std::vector<bool>& seen) {
        for (std::size_t d = 0; d < det.size(); ++d) {
            if (seen[d] || std::abs(det[d] - ref[r]) > reach) continue;
            seen[d] = true;
            if (owner[d] < 0 || augment(static_cast<std::size_t>(owner[d]), seen)) {
                owner[d] = static_cast<int>(r);
                return true;
            }
        }
        return false;
    };
    std::size_t n = 0;
    for (std::size_t r = 0; r < ref.size(); ++r) {
        std::vector<bool> seen(det.size());
        n += augment(r, seen);
    }
    return n;
}

std::vector<SampleIndex> sorted_random(std::mt19937_64& rng, std::size_t n, SampleIndex hi) {
    std::uniform_int_distribution<SampleIndex> u(0, hi);
    std::vector<SampleIndex> v(n);
    for (auto& x : v) x = u(rng);
    std::sort(v.begin(), v.end());
    return v;
}

BeatAnnotation full_beat(SampleIndex b, SampleIndex c, SampleIndex x, SampleIndex o) {
    BeatAnnotation a;
    a.b = b;
    a.c = c;
    a.x = x;
    a.o = o;
    a.amp_b = 0.2;
    a.amp_c = 1.0;
    a.amp_x = 0.6;
    a.amp_o = 0.7;
    return a;
}

}  // namespace

TEST_CASE("identical point sets match completely") {
    const std::vector<SampleIndex> p{10, 300, 550, 800};
    const auto m = match_points(p, p, 30, 250);
    CHECK(m.tp == 4);
    CHECK(m.fp == 0);
    CHECK(m.fn == 0);
    for (double o : m.offsets_ms) CHECK(o == 0.0);
}

TEST_CASE("the tolerance boundary is closed") {
    for (double fs : {200.0, 1000.0}) {
        const auto at = ms_to_samples(30, fs), past = ms_to_samples(31, fs);
        const std::vector<SampleIndex> ref{1000};
        const auto hit = match_points(std::vector<SampleIndex>{1000 + at}, ref, 30, fs);
        CHECK(hit.tp == 1);
        CHECK(hit.offsets_ms[0] == doctest::Approx(30.0));
        const auto early = match_points(std::vector<SampleIndex>{1000 - at}, ref, 30, fs);
        CHECK(early.tp == 1);
        if (past > at) {
            const auto miss = match_points(std::vector<SampleIndex>{1000 + past}, ref, 30, fs);
            CHECK(miss.tp == 0);
            CHECK(miss.fp == 1);
            CHECK(miss.fn == 1);
        }
    }
    // 31 ms at 1 kHz
    const auto m = match_points(std::vector<SampleIndex>{131}, std::vector<SampleIndex>{100}, 30, 1000);
    CHECK(m.fp == 1);
    CHECK(m.fn == 1);
}

TEST_CASE("closest pairs are taken first") {
    const auto m = match_points(std::vector<SampleIndex>{95, 104}, std::vector<SampleIndex>{100}, 30, 250);
    REQUIRE(m.tp == 1);
    CHECK(m.pairs[0] == std::pair<std::size_t, std::size_t>{0, 1});
    CHECK(m.fp == 1);
}

TEST_CASE("matching is one-to-one, swap-symmetric and never beats the optimum") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 300; ++trial) {
        const auto det = sorted_random(rng, 1 + trial % 12, 400);
        const auto ref = sorted_random(rng, 1 + (trial * 7) % 11, 400);
        const double fs = trial % 2 ? 250.0 : 1000.0;
        const auto m = match_points(det, ref, 30, fs);
        std::vector<int> ref_hits(ref.size()), det_hits(det.size());
        for (auto [r, d] : m.pairs) {
            ++ref_hits[r];
            ++det_hits[d];
            CHECK(std::abs(det[d] - ref[r]) <= ms_to_samples(30, fs));
        }
        CHECK(std::all_of(ref_hits.begin(), ref_hits.end(), [](int h) { return h <= 1; }));
        CHECK(std::all_of(det_hits.begin(), det_hits.end(), [](int h) { return h <= 1; }));
        CHECK(m.tp + m.fp == det.size());
        CHECK(m.tp + m.fn == ref.size());

        const auto s = match_points(ref, det, 30, fs);
        CHECK(s.tp == m.tp);
        CHECK(s.fp == m.fn);
        CHECK(s.fn == m.fp);

        CHECK(m.tp <= max_matching(det, ref, ms_to_samples(30, fs)));
    }
}

TEST_CASE("greedy equals the optimum when references are well separated") {
    std::mt19937_64 rng(321);
    std::uniform_int_distribution<SampleIndex> jitter(-12, 12), gap(16, 60);
    for (int trial = 0; trial < 300; ++trial) {
        // 30 ms at 250 Hz is 7.5 samples; spacing stays above twice that
        std::vector<SampleIndex> ref, det;
        SampleIndex t = 20;
        for (int k = 0; k < 10; ++k) {
            t += gap(rng);
            ref.push_back(t);
            if (trial % 4 != k % 4) det.push_back(t + jitter(rng));
            if (k % 5 == trial % 5) det.push_back(t + jitter(rng));
        }
        std::sort(det.begin(), det.end());
        const auto m = match_points(det, ref, 30, 250);
        CHECK(m.tp == max_matching(det, ref, 7));
    }
}

TEST_CASE("score formulas") {
    MatchResult m;
    m.tp = 8;
    m.fp = 1;
    m.fn = 1;
    const auto s = score(m);
    CHECK(*s.se == doctest::Approx(88.888889).epsilon(1e-6));
    CHECK(*s.ppv == doctest::Approx(88.888889).epsilon(1e-6));
    CHECK(*s.der == doctest::Approx(22.222222).epsilon(1e-6));
    CHECK(*s.gmean == doctest::Approx(88.888889).epsilon(1e-6));

    CHECK(std::abs(geometric_mean(99.09, 98.13) - 98.60) <= 0.01);

    const auto empty = score(MatchResult{});
    CHECK_FALSE(empty.se);
    CHECK_FALSE(empty.ppv);
    CHECK_FALSE(empty.der);
    CHECK_FALSE(empty.gmean);
    CHECK_FALSE(empty.me);
    CHECK_FALSE(empty.sigma);

    // nothing detected: sensitivity 0 and no precision, which still scores 0
    MatchResult missed;
    missed.fn = 3;
    const auto z = score(missed);
    CHECK(*z.se == 0.0);
    CHECK_FALSE(z.ppv);
    CHECK(*z.gmean == 0.0);
}

TEST_CASE("offset statistics use magnitudes and the population spread") {
    MatchResult m;
    m.tp = 4;
    m.offsets_ms = {-4.0, 4.0, 8.0, -12.0};
    const auto s = score(m);
    CHECK(*s.me == doctest::Approx(7.0));
    // |offsets| = 4, 4, 8, 12 around 7: variance (9 + 9 + 1 + 25) / 4
    CHECK(*s.sigma == doctest::Approx(std::sqrt(11.0)));

    const std::vector<std::optional<double>> v{1.0, std::nullopt, 2.0, 3.0, 4.0};
    const auto ms = mean_std(std::span<const std::optional<double>>(v));
    CHECK(ms.n == 4);
    CHECK(ms.mean == doctest::Approx(2.5));
    CHECK(ms.sd == doctest::Approx(std::sqrt(1.25)));
}

TEST_CASE("records are aggregated without weighting") {
    std::vector<BeatAnnotation> ref, half;
    for (int k = 0; k < 10; ++k) ref.push_back(full_beat(250 * k + 80, 250 * k + 100, 250 * k + 106, 250 * k + 109));
    for (int k = 0; k < 2; ++k) half.push_back(ref[static_cast<std::size_t>(k)]);
    const std::vector<RecordEval> recs{evaluate_record(ref, ref, 250), evaluate_record(half, std::span(ref).first(4), 250)};
    const auto rep = aggregate(recs, 30);
    // 100 and 50 sensitivity average to 75 regardless of record size
    CHECK(rep[PointType::C].se.mean == doctest::Approx(75.0));
    CHECK(rep[PointType::C].se.sd == doctest::Approx(25.0));
    CHECK(rep[PointType::C].tp == 12);
    CHECK(rep[PointType::C].fn == 2);
    CHECK(rep.records == 2);
}

TEST_CASE("hemodynamic errors vanish on identical annotations") {
    std::vector<BeatAnnotation> ref;
    for (int k = 0; k < 10; ++k) ref.push_back(full_beat(1000 * k + 300, 1000 * k + 370, 1000 * k + 394, 1000 * k + 406));
    const auto e = hemo_error(ref, ref, 1000);
    for (auto p : kHemoParams) {
        const auto k = static_cast<std::size_t>(p);
        REQUIRE(e.abs_mean[k]);
        CHECK(*e.abs_mean[k] == 0.0);
        CHECK(*e.rel_mean[k] == 0.0);
    }
    CHECK(e.count[static_cast<std::size_t>(HemoParam::CcTime)] == 9);
    CHECK(e.count[static_cast<std::size_t>(HemoParam::Lvet)] == 10);
}

TEST_CASE("a planted 10 ms LVET change is measured exactly") {
    std::vector<BeatAnnotation> ref, det;
    for (int k = 0; k < 10; ++k) {
        ref.push_back(full_beat(1000 * k + 300, 1000 * k + 370, 1000 * k + 670, 1000 * k + 690));
        auto d = ref.back();
        *d.b -= 10;  // 10 ms at 1 kHz
        det.push_back(d);
    }
    const auto e = hemo_error(det, ref, 1000);
    const auto lvet = static_cast<std::size_t>(HemoParam::Lvet);
    CHECK(*e.abs_mean[lvet] == 10.0);
    CHECK(*e.abs_sd[lvet] == 0.0);
    CHECK(*e.rel_mean[lvet] == doctest::Approx(10.0 / 370.0));
    CHECK(*e.abs_mean[static_cast<std::size_t>(HemoParam::Ivrt)] == 0.0);
}

TEST_CASE("beats without a C match are left out of the hemodynamic errors") {
    std::vector<BeatAnnotation> ref{full_beat(300, 370, 394, 406), full_beat(1300, 1370, 1394, 1406)};
    std::vector<BeatAnnotation> det{ref[0]};
    det[0].x.reset();
    const auto e = hemo_error(det, ref, 1000);
    CHECK_FALSE(e.abs_mean[static_cast<std::size_t>(HemoParam::Lvet)]);
    CHECK(e.count[static_cast<std::size_t>(HemoParam::BcAmpl)] == 1);
}

TEST_CASE("calibration over a singleton grid returns that configuration") {
    const auto corpus = testing::synth_corpus(1, 6.0, {});
    const std::vector<GridAxis> grid{{"a_frac", {0.4}}};
    const auto res = calibrate(corpus, grid);
    REQUIRE(res.table.size() == 1);
    CHECK(res.best == 0);
    CHECK(res.best_params.a_frac == 0.4);
    CHECK_THROWS_AS((void)calibrate(corpus, std::vector<GridAxis>{}), EmptyGrid);
    CHECK_THROWS_AS((void)calibrate(corpus, std::vector<GridAxis>{{"a_frac", {}}}), EmptyGrid);
    CHECK_THROWS_AS((void)calibrate(corpus, std::vector<GridAxis>{{"bogus", {1.0}}}), InvalidParams);
}

TEST_CASE("grid order runs the last axis fastest") {
    const auto corpus = testing::synth_corpus(1, 4.0, {});
    const std::vector<GridAxis> grid{{"a_frac", {0.4, 0.5}}, {"b_slope1", {0.1, 0.11, 0.12}}};
    const auto res = calibrate(corpus, grid);
    REQUIRE(res.table.size() == 6);
    CHECK(res.table[1].values == std::vector<double>{0.4, 0.11});
    CHECK(res.table[3].values == std::vector<double>{0.5, 0.1});
}

TEST_CASE("default parameters rank in the top decile of a local grid") {
    const auto corpus = testing::synth_corpus(2, 12.0, testing::standard_noise(), 50);
    const std::vector<GridAxis> grid{
        {"a_frac", {0.3, 0.5, 0.7}}, {"b_slope1", {0.07, 0.11, 0.15}}, {"b_slope2", {0.05, 0.08, 0.1}}, {"co_max_ms", {30, 40}}};
    const auto res = calibrate(corpus, grid);
    REQUIRE(res.table.size() == 54);
    const DelineationParams d;
    const auto it = std::find_if(res.table.begin(), res.table.end(), [&](const CalibrationRow& r) {
        return r.values == std::vector<double>{d.a_frac, d.b_slope1, d.b_slope2, d.co_max_ms};
    });
    REQUIRE(it != res.table.end());
    const auto better = std::count_if(res.table.begin(), res.table.end(),
                                      [&](const CalibrationRow& r) { return r.objective > it->objective; });
    CHECK(static_cast<double>(better) < 0.1 * static_cast<double>(res.table.size()));
}

TEST_CASE("a_frac chosen on notch beats has the best B score") {
    std::vector<AnnotatedRecord> corpus;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        SyntheticBeatSpec spec;
        spec.morphology = Morphology::BNotch;
        spec.noise = testing::standard_noise();
        auto rec = generate(spec, 12.0, 250.0, seed);
        corpus.push_back({"notch", rec.signal, rec.beats});
    }
    const std::vector<GridAxis> grid{{"a_frac", {0.3, 0.5, 0.7}}};
    const auto res = calibrate(corpus, grid);
    for (const auto& row : res.table) CHECK(res.table[res.best].gmean[0] >= row.gmean[0]);
}

TEST_CASE("calibration is deterministic") {
    const auto corpus = testing::synth_corpus(1, 6.0, testing::standard_noise());
    const std::vector<GridAxis> grid{{"a_frac", {0.3, 0.5}}, {"b_slope2", {0.06, 0.08}}};
    const auto a = calibrate(corpus, grid), b = calibrate(corpus, grid);
    REQUIRE(a.table.size() == b.table.size());
    for (std::size_t i = 0; i < a.table.size(); ++i) {
        CHECK(a.table[i].values == b.table[i].values);
        CHECK(a.table[i].gmean == b.table[i].gmean);
        CHECK(a.table[i].objective == b.table[i].objective);
    }
    CHECK(a.best == b.best);
}

TEST_CASE("sweep rows and length checks") {
    const auto corpus = testing::synth_corpus(1, 4.0, {});
    const std::vector<int> lengths{5, 9};
    const auto rows = sweep_filter_lengths(corpus, lengths);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].label == "L=5");
    CHECK(rows[0].mean_sg_length == 5.0);
    CHECK(rows[2].label == "adaptive");
    CHECK(rows[2].length == 0);
    CHECK_THROWS_AS((void)sweep_filter_lengths(corpus, std::vector<int>{4}), InvalidParams);
}

TEST_CASE("on clean beats the adaptive length is within 2 points of the best fixed length") {
    const auto corpus = testing::synth_corpus(3, 15.0, {});
    const std::vector<int> lengths{3, 5, 9, 13, 17, 21, 25};
    const auto rows = sweep_filter_lengths(corpus, lengths);
    const auto& adaptive = rows.back();
    for (std::size_t k = 0; k < 4; ++k) {
        double best = 0.0;
        for (std::size_t i = 0; i + 1 < rows.size(); ++i) best = std::max(best, rows[i].gmean[k]);
        CHECK(adaptive.gmean[k] >= best - 2.0);
    }
}

TEST_CASE("at 5 dB SNR the adaptive length is no worse than length 3") {
    // white noise 5 dB below the clean beat train's power
    auto clean = testing::synth_corpus(3, 15.0, {});
    double power = 0.0;
    for (double v : clean.front().signal.samples) power += v * v;
    power /= static_cast<double>(clean.front().signal.samples.size());
    const double sigma = std::sqrt(power / std::pow(10.0, 0.5));
    const auto corpus = testing::synth_corpus(3, 15.0, {{NoiseComponent::Kind::White, sigma, 0.0}});
    const std::vector<int> lengths{3};
    const auto rows = sweep_filter_lengths(corpus, lengths);
    for (std::size_t k = 0; k < 4; ++k) {
        CAPTURE(k);
        CHECK(rows[1].gmean[k] >= rows[0].gmean[k]);
    }
}
