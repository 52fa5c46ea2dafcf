#pragma once

// Plain-text file formats shared by the CLI and the corpus tools.
//
//   signal file      optional "# fs=<Hz>" line, optional header row, then one
//                    row per sample: "time_s,value" or just "value"
//   annotation file  optional "# fs=<Hz>" line, header "b,c,x,o[,amp_b,
//                    amp_c,amp_x,amp_o]", one row per beat, empty cell for an
//                    absent point
//   config file      flat "key=value" lines, '#' comments; grid files allow
//                    comma-separated value lists
//   report file      "key=value" lines

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "icg/core.hpp"
#include "icg/eval.hpp"
#include "icg/synth.hpp"

namespace icg::io {

// Shortest round-trip decimal representation.
[[nodiscard]] std::string format_number(double v);

// fs precedence: `fs_override`, then the "# fs=" line, then the median step
// of a time column. Throws DataError when none is available.
[[nodiscard]] Signal read_signal(const std::filesystem::path& path, std::optional<double> fs_override = std::nullopt);
void write_signal(const std::filesystem::path& path, const Signal& signal);

struct AnnotationFile {
    std::vector<BeatAnnotation> beats;
    std::optional<double> fs;
};

[[nodiscard]] AnnotationFile read_annotations(const std::filesystem::path& path);
void write_annotations(const std::filesystem::path& path, const std::vector<BeatAnnotation>& beats, double fs);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

[[nodiscard]] KeyValues read_key_values(const std::filesystem::path& path);
[[nodiscard]] DelineationParams read_params(const std::filesystem::path& path);
[[nodiscard]] DelineationParams params_from(const KeyValues& kv);
[[nodiscard]] std::vector<GridAxis> read_grid(const std::filesystem::path& path);

// Keys: morphology, hr_bpm, c_ampl, b_offset_ms, x_offset_ms, o_offset_ms,
// fs, and noise entries "white=<sigma>", "sinusoid=<f>:<a>", "drift=<f>:<a>"
// (repeatable). Returns the beat description and the sampling rate (default 250 Hz).
[[nodiscard]] std::pair<SyntheticBeatSpec, double> read_synth_spec(const std::filesystem::path& path);
[[nodiscard]] std::pair<SyntheticBeatSpec, double> synth_spec_from(const KeyValues& kv);

[[nodiscard]] std::string format_report(const EvalReport& report);
void write_text(const std::filesystem::path& path, const std::string& text);

// Pairs "<name>_signal.csv" with "<name>_truth.csv" in `dir`, sorted by name.
[[nodiscard]] std::vector<AnnotatedRecord> load_corpus(const std::filesystem::path& dir);
void write_record(const std::filesystem::path& dir, const std::string& name, const GroundTruthRecord& rec);

}  // namespace icg::io
