#include "icg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <tuple>

#include "icg/hemo.hpp"
#include "icg/pipeline.hpp"

namespace icg {

MatchResult match_points(std::span<const SampleIndex> detected, std::span<const SampleIndex> reference, double tolerance_ms,
                         double fs) {
    const double reach = tolerance_ms * fs / 1000.0 + 1e-9;
    struct Candidate {
        SampleIndex dist, lo, hi;
        std::size_t r, d;
    };
    std::vector<Candidate> cands;
    std::size_t first = 0;
    for (std::size_t r = 0; r < reference.size(); ++r) {
        while (first < detected.size() && static_cast<double>(reference[r] - detected[first]) > reach) ++first;
        for (std::size_t d = first; d < detected.size(); ++d) {
            const auto delta = detected[d] - reference[r];
            if (static_cast<double>(delta) > reach) break;
            cands.push_back({std::abs(delta), std::min(detected[d], reference[r]), std::max(detected[d], reference[r]), r, d});
        }
    }
    // the key is symmetric in (detected, reference) so swapping the inputs
    // selects the same pairs
    std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        return std::tie(a.dist, a.lo, a.hi, a.r, a.d) < std::tie(b.dist, b.lo, b.hi, b.r, b.d);
    });

    MatchResult m;
    std::vector<bool> ref_used(reference.size()), det_used(detected.size());
    for (const auto& c : cands) {
        if (ref_used[c.r] || det_used[c.d]) continue;
        ref_used[c.r] = det_used[c.d] = true;
        m.pairs.emplace_back(c.r, c.d);
    }
    std::sort(m.pairs.begin(), m.pairs.end());
    for (auto [r, d] : m.pairs) m.offsets_ms.push_back(samples_to_ms(detected[d] - reference[r], fs));
    m.tp = m.pairs.size();
    m.fp = detected.size() - m.tp;
    m.fn = reference.size() - m.tp;
    return m;
}

double geometric_mean(double se, double ppv) noexcept { return std::sqrt(se * ppv); }

MeanStd mean_std(std::span<const double> values) {
    MeanStd r;
    r.n = values.size();
    if (values.empty()) return r;
    r.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(r.n);
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.sd = std::sqrt(ss / static_cast<double>(r.n));
    return r;
}

MeanStd mean_std(std::span<const std::optional<double>> values) {
    std::vector<double> present;
    for (const auto& v : values)
        if (v) present.push_back(*v);
    return mean_std(std::span<const double>(present));
}

PointMetrics score(const MatchResult& m) {
    PointMetrics s;
    const auto tp = static_cast<double>(m.tp), fp = static_cast<double>(m.fp), fn = static_cast<double>(m.fn);
    if (m.tp + m.fn > 0) {
        s.se = 100.0 * tp / (tp + fn);
        s.der = 100.0 * (fp + fn) / (tp + fn);
    }
    if (m.tp + m.fp > 0) s.ppv = 100.0 * tp / (tp + fp);
    if (s.se && s.ppv) {
        s.gmean = geometric_mean(*s.se, *s.ppv);
    } else if (s.se || s.ppv) {
        s.gmean = 0.0;  // tp == 0: nothing detected, or nothing to detect
    }
    if (!m.offsets_ms.empty()) {
        std::vector<double> mag(m.offsets_ms.size());
        std::transform(m.offsets_ms.begin(), m.offsets_ms.end(), mag.begin(), [](double v) { return std::abs(v); });
        const auto ms = mean_std(std::span<const double>(mag));
        s.me = ms.mean;
        s.sigma = ms.sd;
    }
    return s;
}

const char* hemo_name(HemoParam p) noexcept {
    switch (p) {
        case HemoParam::CcTime: return "cc_time";
        case HemoParam::Hr: return "hr";
        case HemoParam::Lvet: return "lvet";
        case HemoParam::Ivrt: return "ivrt";
        case HemoParam::BcAmpl: return "bc_ampl";
    }
    return "?";
}

namespace {

std::optional<double> hemo_field(const HemoParams& h, HemoParam p) {
    switch (p) {
        case HemoParam::CcTime: return h.cc_time_ms;
        case HemoParam::Hr: return h.hr_bpm;
        case HemoParam::Lvet: return h.lvet_ms;
        case HemoParam::Ivrt: return h.ivrt_ms;
        case HemoParam::BcAmpl: return h.bc_ampl;
    }
    return std::nullopt;
}

std::vector<SampleIndex> indices_of(std::span<const BeatAnnotation> beats, PointType p) {
    std::vector<SampleIndex> out;
    for (const auto& b : beats)
        if (auto v = point_of(b, p)) out.push_back(*v);
    std::sort(out.begin(), out.end());
    return out;
}

// Beats that carry a C peak, in C order, so index k lines up with the k-th C.
std::vector<BeatAnnotation> beats_with_c(std::span<const BeatAnnotation> beats) {
    std::vector<BeatAnnotation> out;
    std::copy_if(beats.begin(), beats.end(), std::back_inserter(out), [](const BeatAnnotation& b) { return b.c.has_value(); });
    std::stable_sort(out.begin(), out.end(), [](const BeatAnnotation& a, const BeatAnnotation& b) { return *a.c < *b.c; });
    return out;
}

template <typename Fn>
void for_each_index(std::size_t n, Fn&& fn) {
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(icg_eval_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace

HemoErrors hemo_error(std::span<const BeatAnnotation> detected, std::span<const BeatAnnotation> reference, double fs,
                      double tolerance_ms) {
    const auto det = beats_with_c(detected);
    const auto ref = beats_with_c(reference);
    std::vector<SampleIndex> det_c, ref_c;
    for (const auto& b : det) det_c.push_back(*b.c);
    for (const auto& b : ref) ref_c.push_back(*b.c);
    const auto match = match_points(det_c, ref_c, tolerance_ms, fs);
    const auto det_h = compute_hemo(det, fs);
    const auto ref_h = compute_hemo(ref, fs);

    HemoErrors out;
    for (auto p : kHemoParams) {
        const auto k = static_cast<std::size_t>(p);
        std::vector<double> abs_err, rel_err;
        for (auto [r, d] : match.pairs) {
            const auto card = hemo_field(ref_h[r], p);
            const auto alg = hemo_field(det_h[d], p);
            if (!card || !alg) continue;
            const double e = std::abs(*card - *alg);
            abs_err.push_back(e);
            if (*card != 0.0) rel_err.push_back(e / std::abs(*card));
        }
        out.count[k] = abs_err.size();
        if (!abs_err.empty()) {
            const auto a = mean_std(std::span<const double>(abs_err));
            out.abs_mean[k] = a.mean;
            out.abs_sd[k] = a.sd;
        }
        if (!rel_err.empty()) {
            const auto r = mean_std(std::span<const double>(rel_err));
            out.rel_mean[k] = r.mean;
            out.rel_sd[k] = r.sd;
        }
    }
    return out;
}

RecordEval evaluate_record(std::span<const BeatAnnotation> detected, std::span<const BeatAnnotation> reference, double fs,
                           double tolerance_ms) {
    RecordEval ev;
    for (auto p : kPointTypes) {
        const auto k = static_cast<std::size_t>(p);
        ev.matches[k] = match_points(indices_of(detected, p), indices_of(reference, p), tolerance_ms, fs);
        ev.metrics[k] = score(ev.matches[k]);
    }
    ev.hemo = hemo_error(detected, reference, fs, tolerance_ms);
    return ev;
}

EvalReport aggregate(std::span<const RecordEval> records, double tolerance_ms) {
    EvalReport rep;
    rep.tolerance_ms = tolerance_ms;
    rep.records = records.size();
    for (auto p : kPointTypes) {
        const auto k = static_cast<std::size_t>(p);
        std::vector<std::optional<double>> se, ppv, der, gm, me, sg;
        auto& d = rep.detection[k];
        for (const auto& r : records) {
            const auto& m = r.metrics[k];
            se.push_back(m.se);
            ppv.push_back(m.ppv);
            der.push_back(m.der);
            gm.push_back(m.gmean);
            me.push_back(m.me);
            sg.push_back(m.sigma);
            d.tp += r.matches[k].tp;
            d.fp += r.matches[k].fp;
            d.fn += r.matches[k].fn;
        }
        d.se = mean_std(std::span<const std::optional<double>>(se));
        d.ppv = mean_std(std::span<const std::optional<double>>(ppv));
        d.der = mean_std(std::span<const std::optional<double>>(der));
        d.gmean = mean_std(std::span<const std::optional<double>>(gm));
        d.me = mean_std(std::span<const std::optional<double>>(me));
        d.sigma = mean_std(std::span<const std::optional<double>>(sg));
    }
    for (auto p : kHemoParams) {
        const auto k = static_cast<std::size_t>(p);
        std::vector<std::optional<double>> a, r;
        for (const auto& rec : records) {
            a.push_back(rec.hemo.abs_mean[k]);
            r.push_back(rec.hemo.rel_mean[k]);
        }
        rep.hemo[k].abs_err = mean_std(std::span<const std::optional<double>>(a));
        rep.hemo[k].rel_err = mean_std(std::span<const std::optional<double>>(r));
    }
    return rep;
}

EvalReport evaluate_corpus(std::span<const AnnotatedRecord> corpus, const DelineationParams& params, double tolerance_ms,
                           double* mean_sg_length) {
    std::vector<RecordEval> evals(corpus.size());
    std::vector<double> lengths(corpus.size());
    for_each_index(corpus.size(), [&](std::size_t i) {
        const auto& rec = corpus[i];
        const auto run = run_pipeline_detailed(rec.signal, params);
        evals[i] = evaluate_record(run.beats, rec.reference, rec.signal.fs, tolerance_ms);
        lengths[i] = run.mean_sg_length();
    });
    if (mean_sg_length) *mean_sg_length = mean_std(std::span<const double>(lengths)).mean;
    return aggregate(evals, tolerance_ms);
}

namespace {

std::array<double, 4> gmeans_of(const EvalReport& rep) {
    std::array<double, 4> g{};
    for (auto p : kPointTypes) {
        const auto& d = rep[p];
        g[static_cast<std::size_t>(p)] = d.gmean.n > 0 ? d.gmean.mean : 0.0;
    }
    return g;
}

}  // namespace

CalibrationResult calibrate(std::span<const AnnotatedRecord> corpus, std::span<const GridAxis> grid,
                            const DelineationParams& base, double tolerance_ms) {
    if (grid.empty() || corpus.empty()) throw EmptyGrid("calibration needs a non-empty grid and corpus");
    std::size_t total = 1;
    for (const auto& axis : grid) {
        if (axis.values.empty()) throw EmptyGrid("grid axis '" + axis.name + "' has no values");
        (void)base.get(axis.name);
        total *= axis.values.size();
    }

    CalibrationResult res;
    for (const auto& axis : grid) res.axes.push_back(axis.name);
    res.table.resize(total);
    std::vector<DelineationParams> configs(total, base);
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t rem = i;
        auto& row = res.table[i];
        row.values.resize(grid.size());
        for (std::size_t a = grid.size(); a-- > 0;) {
            const auto& axis = grid[a];
            const double v = axis.values[rem % axis.values.size()];
            rem /= axis.values.size();
            row.values[a] = v;
            configs[i].set(axis.name, v);
        }
    }

    for_each_index(total, [&](std::size_t i) {
        auto& row = res.table[i];
        // an infeasible combination scores zero rather than aborting the search
        try {
            configs[i].validate();
        } catch (const InvalidParams&) {
            return;
        }
        row.gmean = gmeans_of(evaluate_corpus(corpus, configs[i], tolerance_ms));
        row.objective = (row.gmean[0] + row.gmean[2] + row.gmean[3]) / 3.0;
    });

    for (std::size_t i = 1; i < total; ++i)
        if (res.table[i].objective > res.table[res.best].objective) res.best = i;
    res.best_params = configs[res.best];
    return res;
}

std::vector<SweepRow> sweep_filter_lengths(std::span<const AnnotatedRecord> corpus, std::span<const int> lengths,
                                           const DelineationParams& base, double tolerance_ms) {
    for (int len : lengths)
        if (len <= 0 || len % 2 == 0) throw InvalidParams("sweep lengths must be odd and positive, got " + std::to_string(len));

    std::vector<SweepRow> rows(lengths.size() + 1);
    std::vector<DelineationParams> configs(rows.size(), base);
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        configs[i].fixed_sg_len = lengths[i];
        rows[i].label = "L=" + std::to_string(lengths[i]);
        rows[i].length = lengths[i];
    }
    configs.back().fixed_sg_len = 0;
    rows.back().label = "adaptive";

    // corpus evaluation is the parallel level; configurations run in order
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double mean_len = 0.0;
        rows[i].gmean = gmeans_of(evaluate_corpus(corpus, configs[i], tolerance_ms, &mean_len));
        rows[i].mean_sg_length = mean_len;
    }
    return rows;
}

}  // namespace icg
