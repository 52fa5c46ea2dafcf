#include "icg/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace icg::io {

namespace fs = std::filesystem;

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return in;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    return out;
}

std::optional<double> parse_double(const std::string& s) {
    double v = 0.0;
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end) return std::nullopt;
    return v;
}

// Splits on ',', ';', tab or runs of spaces; keeps empty cells between commas.
std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    const bool delimited = line.find_first_of(",;\t") != std::string::npos;
    if (delimited) {
        std::string cur;
        for (char ch : line) {
            if (ch == ',' || ch == ';' || ch == '\t') {
                cells.push_back(trim(cur));
                cur.clear();
            } else {
                cur += ch;
            }
        }
        cells.push_back(trim(cur));
    } else {
        std::istringstream ss(line);
        std::string tok;
        while (ss >> tok) cells.push_back(tok);
    }
    return cells;
}

// "# fs=250" style metadata; returns fs when the comment carries it.
std::optional<double> comment_fs(const std::string& line) {
    auto body = trim(std::string_view(line).substr(1));
    if (body.rfind("fs=", 0) != 0) return std::nullopt;
    return parse_double(trim(body.substr(3)));
}

[[noreturn]] void bad_line(const fs::path& path, std::size_t line_no, const std::string& why) {
    throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + why);
}

}  // namespace

Signal read_signal(const fs::path& path, std::optional<double> fs_override) {
    auto in = open_in(path);
    std::optional<double> header_fs;
    std::vector<double> times, values;
    std::string line;
    std::size_t line_no = 0, columns = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            if (auto f = comment_fs(t)) header_fs = f;
            continue;
        }
        const auto cells = split_cells(t);
        std::vector<double> nums;
        for (const auto& c : cells) {
            if (auto v = parse_double(c)) nums.push_back(*v);
        }
        if (nums.size() != cells.size()) {
            if (!header_seen && values.empty()) {
                header_seen = true;
                continue;
            }
            bad_line(path, line_no, "non-numeric sample");
        }
        if (columns == 0) columns = nums.size();
        if (nums.size() != columns || columns > 2) bad_line(path, line_no, "expected 1 or 2 columns consistently");
        if (columns == 2) times.push_back(nums[0]);
        values.push_back(nums.back());
    }
    if (values.empty()) throw DataError("'" + path.string() + "' contains no samples");

    double rate = 0.0;
    if (fs_override) {
        rate = *fs_override;
    } else if (header_fs) {
        rate = *header_fs;
    } else if (times.size() >= 2) {
        std::vector<double> steps;
        for (std::size_t i = 1; i < times.size(); ++i) steps.push_back(times[i] - times[i - 1]);
        std::nth_element(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(steps.size() / 2), steps.end());
        const double step = steps[steps.size() / 2];
        if (step > 0) rate = 1.0 / step;
    }
    if (!(rate > 0.0)) throw DataError("'" + path.string() + "': sampling rate unknown (pass --fs)");
    return Signal{std::move(values), rate};
}

void write_signal(const fs::path& path, const Signal& signal) {
    auto out = open_out(path);
    out << "# fs=" << format_number(signal.fs) << "\n";
    out << "time_s,value\n";
    for (SampleIndex i = 0; i < signal.size(); ++i)
        out << format_number(static_cast<double>(i) / signal.fs) << ',' << format_number(signal[i]) << '\n';
    if (!out) throw DataError("failed writing '" + path.string() + "'");
}

AnnotationFile read_annotations(const fs::path& path) {
    auto in = open_in(path);
    AnnotationFile af;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            if (auto f = comment_fs(t)) af.fs = f;
            continue;
        }
        auto cells = split_cells(t);
        if (!header_seen && !cells.empty() && cells[0] == "b") {
            header_seen = true;
            continue;
        }
        if (cells.size() != 4 && cells.size() != 8) bad_line(path, line_no, "expected 4 or 8 columns");
        BeatAnnotation beat;
        std::array<std::optional<SampleIndex>*, 4> idx{&beat.b, &beat.c, &beat.x, &beat.o};
        std::array<std::optional<double>*, 4> amp{&beat.amp_b, &beat.amp_c, &beat.amp_x, &beat.amp_o};
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (cells[k].empty()) continue;
            const auto v = parse_double(cells[k]);
            if (!v) bad_line(path, line_no, "malformed cell '" + cells[k] + "'");
            if (k < 4) {
                if (*v != std::floor(*v) || *v < 0) bad_line(path, line_no, "sample index must be a non-negative integer");
                *idx[k] = static_cast<SampleIndex>(*v);
            } else {
                *amp[k - 4] = *v;
            }
        }
        if (!is_ordered(beat)) bad_line(path, line_no, "points must satisfy b < c < x < o");
        af.beats.push_back(beat);
    }
    return af;
}

void write_annotations(const fs::path& path, const std::vector<BeatAnnotation>& beats, double fs) {
    auto out = open_out(path);
    out << "# fs=" << format_number(fs) << "\n";
    out << "b,c,x,o,amp_b,amp_c,amp_x,amp_o\n";
    auto idx = [](const std::optional<SampleIndex>& v) { return v ? std::to_string(*v) : std::string(); };
    auto amp = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    for (const auto& b : beats) {
        out << idx(b.b) << ',' << idx(b.c) << ',' << idx(b.x) << ',' << idx(b.o) << ',' << amp(b.amp_b) << ','
            << amp(b.amp_c) << ',' << amp(b.amp_x) << ',' << amp(b.amp_o) << '\n';
    }
    if (!out) throw DataError("failed writing '" + path.string() + "'");
}

KeyValues read_key_values(const fs::path& path) {
    auto in = open_in(path);
    KeyValues kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        const auto t = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) bad_line(path, line_no, "expected key=value");
        kv.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return kv;
}

DelineationParams params_from(const KeyValues& kv) {
    DelineationParams p;
    for (const auto& [k, v] : kv) {
        const auto num = parse_double(v);
        if (!num) throw InvalidParams("parameter '" + k + "' has non-numeric value '" + v + "'");
        p.set(k, *num);
    }
    p.validate();
    return p;
}

DelineationParams read_params(const fs::path& path) { return params_from(read_key_values(path)); }

std::vector<GridAxis> read_grid(const fs::path& path) {
    std::vector<GridAxis> grid;
    const DelineationParams probe;
    for (const auto& [k, v] : read_key_values(path)) {
        GridAxis axis{k, {}};
        (void)probe.get(k);
        for (const auto& cell : split_cells(v)) {
            const auto num = parse_double(cell);
            if (!num) throw InvalidParams("grid axis '" + k + "' has non-numeric value '" + cell + "'");
            axis.values.push_back(*num);
        }
        grid.push_back(std::move(axis));
    }
    return grid;
}

std::pair<SyntheticBeatSpec, double> synth_spec_from(const KeyValues& kv) {
    SyntheticBeatSpec spec;
    double rate = 250.0;
    auto number = [](const std::string& k, const std::string& v) {
        const auto n = parse_double(v);
        if (!n) throw InfeasibleSpec("synth key '" + k + "' has non-numeric value '" + v + "'");
        return *n;
    };
    auto freq_amp = [&](const std::string& k, const std::string& v) {
        const auto colon = v.find(':');
        if (colon == std::string::npos) throw InfeasibleSpec("synth key '" + k + "' expects <freq_hz>:<amplitude>");
        return std::pair{number(k, trim(v.substr(0, colon))), number(k, trim(v.substr(colon + 1)))};
    };
    for (const auto& [k, v] : kv) {
        if (k == "morphology") spec.morphology = parse_morphology(v);
        else if (k == "hr_bpm") spec.hr_bpm = number(k, v);
        else if (k == "c_ampl") spec.c_ampl = number(k, v);
        else if (k == "b_offset_ms") spec.b_offset_ms = number(k, v);
        else if (k == "x_offset_ms") spec.x_offset_ms = number(k, v);
        else if (k == "o_offset_ms") spec.o_offset_ms = number(k, v);
        else if (k == "fs") rate = number(k, v);
        else if (k == "white") spec.noise.push_back({NoiseComponent::Kind::White, number(k, v), 0.0});
        else if (k == "sinusoid" || k == "drift") {
            const auto [f, a] = freq_amp(k, v);
            spec.noise.push_back({k == "drift" ? NoiseComponent::Kind::BaselineDrift : NoiseComponent::Kind::Sinusoid, a, f});
        } else if (k == "noise" && v == "none") {
            spec.noise.clear();
        } else {
            throw InfeasibleSpec("unknown synth key '" + k + "'");
        }
    }
    return {spec, rate};
}

std::pair<SyntheticBeatSpec, double> read_synth_spec(const fs::path& path) { return synth_spec_from(read_key_values(path)); }

std::string format_report(const EvalReport& report) {
    std::ostringstream out;
    out << "tolerance_ms=" << format_number(report.tolerance_ms) << '\n';
    out << "records=" << report.records << '\n';
    auto emit = [&](const std::string& key, const MeanStd& m) {
        if (m.n == 0) {
            out << key << "=\n";
            return;
        }
        out << key << '=' << format_number(m.mean) << '\n';
        out << key << "_sd=" << format_number(m.sd) << '\n';
    };
    for (auto p : kPointTypes) {
        const auto& d = report[p];
        const std::string pre = point_name(p);
        out << pre << ".tp=" << d.tp << '\n' << pre << ".fp=" << d.fp << '\n' << pre << ".fn=" << d.fn << '\n';
        emit(pre + ".se", d.se);
        emit(pre + ".ppv", d.ppv);
        emit(pre + ".der", d.der);
        emit(pre + ".gmean", d.gmean);
        emit(pre + ".me_ms", d.me);
        emit(pre + ".sigma_ms", d.sigma);
    }
    for (auto p : kHemoParams) {
        const auto& h = report[p];
        const std::string pre = std::string("hemo.") + hemo_name(p);
        emit(pre + ".abs_err", h.abs_err);
        emit(pre + ".rel_err_pct", MeanStd{h.rel_err.mean * 100.0, h.rel_err.sd * 100.0, h.rel_err.n});
    }
    return out.str();
}

void write_text(const fs::path& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
    if (!out) throw DataError("failed writing '" + path.string() + "'");
}

std::vector<AnnotatedRecord> load_corpus(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw DataError("corpus directory '" + dir.string() + "' does not exist");
    const std::string suffix = "_signal.csv";
    std::vector<AnnotatedRecord> corpus;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto fname = entry.path().filename().string();
        if (fname.size() <= suffix.size() || fname.compare(fname.size() - suffix.size(), suffix.size(), suffix) != 0) continue;
        const auto name = fname.substr(0, fname.size() - suffix.size());
        const auto truth_path = dir / (name + "_truth.csv");
        if (!fs::exists(truth_path)) throw DataError("record '" + name + "' has no truth file '" + truth_path.string() + "'");
        auto truth = read_annotations(truth_path);
        AnnotatedRecord rec{name, read_signal(entry.path(), truth.fs), std::move(truth.beats)};
        corpus.push_back(std::move(rec));
    }
    std::sort(corpus.begin(), corpus.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    if (corpus.empty()) throw DataError("corpus directory '" + dir.string() + "' holds no *_signal.csv records");
    return corpus;
}

void write_record(const fs::path& dir, const std::string& name, const GroundTruthRecord& rec) {
    write_signal(dir / (name + "_signal.csv"), rec.signal);
    write_annotations(dir / (name + "_truth.csv"), rec.beats, rec.signal.fs);
}

}  // namespace icg::io
