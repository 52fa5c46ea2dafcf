#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "icg/core.hpp"

namespace icg {

struct MatchResult {
    std::size_t tp = 0, fp = 0, fn = 0;
    std::vector<double> offsets_ms;                          // detected - reference, per matched pair
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (reference index, detected index)
};

// One-to-one greedy matching: candidate pairs within tolerance (closed
// interval) are taken in order of increasing distance. Inputs sorted.
[[nodiscard]] MatchResult match_points(std::span<const SampleIndex> detected, std::span<const SampleIndex> reference,
                                       double tolerance_ms, double fs);

// Detection quality of one point type in one record; percentages and ms.
struct PointMetrics {
    std::optional<double> se, ppv, der, gmean, me, sigma;
};

[[nodiscard]] PointMetrics score(const MatchResult& m);
[[nodiscard]] double geometric_mean(double se, double ppv) noexcept;

struct MeanStd {
    double mean = 0.0;
    double sd = 0.0;
    std::size_t n = 0;
};

// Mean and population standard deviation of the present values.
[[nodiscard]] MeanStd mean_std(std::span<const std::optional<double>> values);
[[nodiscard]] MeanStd mean_std(std::span<const double> values);

enum class HemoParam { CcTime = 0, Hr = 1, Lvet = 2, Ivrt = 3, BcAmpl = 4 };
inline constexpr HemoParam kHemoParams[] = {HemoParam::CcTime, HemoParam::Hr, HemoParam::Lvet, HemoParam::Ivrt,
                                            HemoParam::BcAmpl};
[[nodiscard]] const char* hemo_name(HemoParam p) noexcept;

// Per-record hemodynamic errors over C-matched beats. Relative errors are
// fractions of the reference value.
struct HemoErrors {
    std::array<std::optional<double>, 5> abs_mean{}, abs_sd{}, rel_mean{}, rel_sd{};
    std::array<std::size_t, 5> count{};
};

[[nodiscard]] HemoErrors hemo_error(std::span<const BeatAnnotation> detected, std::span<const BeatAnnotation> reference,
                                    double fs, double tolerance_ms = 30.0);

struct RecordEval {
    std::array<MatchResult, 4> matches;
    std::array<PointMetrics, 4> metrics;
    HemoErrors hemo;
};

[[nodiscard]] RecordEval evaluate_record(std::span<const BeatAnnotation> detected, std::span<const BeatAnnotation> reference,
                                         double fs, double tolerance_ms = 30.0);

// Unweighted aggregation across records.
struct EvalReport {
    double tolerance_ms = 30.0;
    std::size_t records = 0;
    struct Detection {
        MeanStd se, ppv, der, gmean, me, sigma;
        std::size_t tp = 0, fp = 0, fn = 0;
    };
    std::array<Detection, 4> detection;
    struct Hemo {
        MeanStd abs_err, rel_err;
    };
    std::array<Hemo, 5> hemo;

    [[nodiscard]] const Detection& operator[](PointType p) const { return detection[static_cast<std::size_t>(p)]; }
    [[nodiscard]] const Hemo& operator[](HemoParam p) const { return hemo[static_cast<std::size_t>(p)]; }
};

[[nodiscard]] EvalReport aggregate(std::span<const RecordEval> records, double tolerance_ms);

// Annotated record used by corpus-level evaluation.
struct AnnotatedRecord {
    std::string name;
    Signal signal;
    std::vector<BeatAnnotation> reference;
};

// Runs the delineator on every record (in parallel) and aggregates.
[[nodiscard]] EvalReport evaluate_corpus(std::span<const AnnotatedRecord> corpus, const DelineationParams& params,
                                         double tolerance_ms = 30.0, double* mean_sg_length = nullptr);

struct GridAxis {
    std::string name;  // DelineationParams key
    std::vector<double> values;
};

struct CalibrationRow {
    std::vector<double> values;      // one per axis
    std::array<double, 4> gmean{};   // mean Gmean per point type (absent -> 0)
    double objective = 0.0;          // mean of B, X and O Gmean
};

struct CalibrationResult {
    std::vector<std::string> axes;
    std::vector<CalibrationRow> table;  // Cartesian order, last axis fastest
    std::size_t best = 0;
    DelineationParams best_params;
};

// Exhaustive grid search; ties resolve to the first row in grid order.
// Throws EmptyGrid for an empty grid or corpus.
[[nodiscard]] CalibrationResult calibrate(std::span<const AnnotatedRecord> corpus, std::span<const GridAxis> grid,
                                          const DelineationParams& base = {}, double tolerance_ms = 30.0);

struct SweepRow {
    std::string label;  // "adaptive" or "L=<n>"
    int length = 0;     // 0 for adaptive
    std::array<double, 4> gmean{};
    double mean_sg_length = 0.0;
};

// Full pipeline at each fixed SG length and once adaptive (last row).
[[nodiscard]] std::vector<SweepRow> sweep_filter_lengths(std::span<const AnnotatedRecord> corpus, std::span<const int> lengths,
                                                         const DelineationParams& base = {}, double tolerance_ms = 30.0);

}  // namespace icg
