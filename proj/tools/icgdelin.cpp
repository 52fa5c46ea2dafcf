// icgdelin: command-line front end for the ICG delineator.
//
// Exit status: 0 success, 1 usage or configuration error, 2 data error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "icg/eval.hpp"
#include "icg/io.hpp"
#include "icg/pipeline.hpp"
#include "icg/synth.hpp"

namespace fs = std::filesystem;
using namespace icg;

namespace {

DelineationParams load_params(const std::string& path) {
    return path.empty() ? DelineationParams{} : io::read_params(path);
}

std::string ensure_parent(const std::string& out) {
    const auto parent = fs::path(out).parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    return out;
}

int cmd_delineate(const std::string& input, double fs, const std::string& params_path, const std::string& out) {
    const auto params = load_params(params_path);
    const auto signal = io::read_signal(input, fs);
    const auto beats = run_pipeline(signal, params);
    io::write_annotations(ensure_parent(out), beats, signal.fs);
    return 0;
}

int cmd_eval(const std::string& detected, const std::string& reference, double tol, std::optional<double> fs_opt,
             const std::string& out) {
    const auto det = io::read_annotations(detected);
    const auto ref = io::read_annotations(reference);
    const auto fs = fs_opt ? fs_opt : (ref.fs ? ref.fs : det.fs);
    if (!fs) throw DataError("sampling rate unknown: neither annotation file carries '# fs=' (pass --fs)");
    if (det.fs && ref.fs && *det.fs != *ref.fs && !fs_opt)
        throw DataError("annotation files disagree on the sampling rate");
    const RecordEval rec = evaluate_record(det.beats, ref.beats, *fs, tol);
    io::write_text(ensure_parent(out), io::format_report(aggregate(std::span(&rec, 1), tol)));
    return 0;
}

int cmd_synth(const std::string& spec_path, double seconds, std::uint64_t seed, std::optional<double> fs_opt,
              const std::string& out) {
    auto [spec, rate] = io::read_synth_spec(spec_path);
    if (fs_opt) rate = *fs_opt;
    const auto rec = generate(spec, seconds, rate, seed);
    const fs::path prefix(out);
    const auto dir = prefix.parent_path().empty() ? fs::path(".") : prefix.parent_path();
    fs::create_directories(dir);
    io::write_record(dir, prefix.filename().string(), rec);
    return 0;
}

std::string gmean_header() { return "gmean_b,gmean_c,gmean_x,gmean_o"; }

std::string gmean_cells(const std::array<double, 4>& g) {
    std::ostringstream s;
    for (std::size_t k = 0; k < 4; ++k) s << (k ? "," : "") << io::format_number(g[k]);
    return s.str();
}

int cmd_calibrate(const std::string& corpus_dir, const std::string& grid_path, const std::string& params_path, double tol,
                  const std::string& out) {
    const auto corpus = io::load_corpus(corpus_dir);
    const auto grid = io::read_grid(grid_path);
    const auto res = calibrate(corpus, grid, load_params(params_path), tol);
    std::ostringstream table;
    for (const auto& a : res.axes) table << a << ',';
    table << gmean_header() << ",objective,best\n";
    for (std::size_t i = 0; i < res.table.size(); ++i) {
        const auto& row = res.table[i];
        for (double v : row.values) table << io::format_number(v) << ',';
        table << gmean_cells(row.gmean) << ',' << io::format_number(row.objective) << ',' << (i == res.best ? 1 : 0) << '\n';
    }
    io::write_text(ensure_parent(out), table.str());
    std::cout << "best:";
    for (std::size_t a = 0; a < res.axes.size(); ++a)
        std::cout << ' ' << res.axes[a] << '=' << io::format_number(res.table[res.best].values[a]);
    std::cout << " objective=" << io::format_number(res.table[res.best].objective) << '\n';
    return 0;
}

int cmd_sweep(const std::string& corpus_dir, const std::vector<int>& lengths, const std::string& params_path, double tol,
              const std::string& out) {
    const auto corpus = io::load_corpus(corpus_dir);
    const auto rows = sweep_filter_lengths(corpus, lengths, load_params(params_path), tol);
    std::ostringstream table;
    table << "config,length," << gmean_header() << ",mean_sg_length\n";
    for (const auto& r : rows)
        table << r.label << ',' << r.length << ',' << gmean_cells(r.gmean) << ',' << io::format_number(r.mean_sg_length) << '\n';
    io::write_text(ensure_parent(out), table.str());
    return 0;
}

int cmd_plotdata(const std::string& input, const std::string& annotations, std::optional<double> fs_opt,
                 const std::string& out) {
    const auto ann = io::read_annotations(annotations);
    const auto signal = io::read_signal(input, fs_opt ? fs_opt : ann.fs);
    std::map<SampleIndex, std::string> marks;
    for (const auto& b : ann.beats) {
        for (auto p : kPointTypes) {
            const auto idx = point_of(b, p);
            if (!idx) continue;
            if (*idx >= signal.size()) throw DataError("annotation index " + std::to_string(*idx) + " beyond the signal");
            auto& m = marks[*idx];
            m += point_name(p);
        }
    }
    std::ostringstream s;
    s << "index,time_s,value,point\n";
    for (SampleIndex i = 0; i < signal.size(); ++i) {
        s << i << ',' << io::format_number(static_cast<double>(i) / signal.fs) << ',' << io::format_number(signal[i]) << ',';
        if (auto it = marks.find(i); it != marks.end()) s << it->second;
        s << '\n';
    }
    io::write_text(ensure_parent(out), s.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Beat-to-beat impedance cardiogram delineation"};
    app.require_subcommand(1);

    std::string input, out, params_path, detected, reference, spec_path, corpus, grid_path, annotations;
    double fs = 0.0, tol = 30.0, seconds = 30.0;
    std::optional<double> fs_opt;
    std::uint64_t seed = 1;
    std::vector<int> lengths{5, 9, 13, 17, 21, 25};

    auto* del = app.add_subcommand("delineate", "detect B/C/X/O points in a signal file");
    del->add_option("--input", input, "signal file")->required();
    del->add_option("--fs", fs, "sampling rate in Hz")->required()->check(CLI::PositiveNumber);
    del->add_option("--params", params_path, "key=value parameter file");
    del->add_option("--out", out, "annotation file to write")->required();

    auto* ev = app.add_subcommand("eval", "score detected annotations against a reference");
    ev->add_option("--detected", detected)->required();
    ev->add_option("--reference", reference)->required();
    ev->add_option("--tolerance-ms", tol, "matching tolerance (30 or 150 typical)")->check(CLI::PositiveNumber);
    ev->add_option("--fs", fs_opt, "sampling rate override");
    ev->add_option("--out", out, "report file")->required();

    auto* sy = app.add_subcommand("synth", "generate a synthetic record with ground truth");
    sy->add_option("--spec", spec_path, "key=value beat spec")->required();
    sy->add_option("--seconds", seconds)->check(CLI::PositiveNumber);
    sy->add_option("--seed", seed);
    sy->add_option("--fs", fs_opt, "sampling rate override");
    sy->add_option("--out", out, "output prefix; writes <prefix>_signal.csv and <prefix>_truth.csv")->required();

    auto* cal = app.add_subcommand("calibrate", "grid-search delineation parameters on a corpus");
    cal->add_option("--corpus", corpus)->required();
    cal->add_option("--grid", grid_path, "key=v1,v2,... grid file")->required();
    cal->add_option("--params", params_path, "base parameter file");
    cal->add_option("--tolerance-ms", tol)->check(CLI::PositiveNumber);
    cal->add_option("--out", out, "score table")->required();

    auto* sw = app.add_subcommand("sweep", "compare fixed SG lengths against the adaptive length");
    sw->add_option("--corpus", corpus)->required();
    sw->add_option("--lengths", lengths)->delimiter(',');
    sw->add_option("--params", params_path, "base parameter file");
    sw->add_option("--tolerance-ms", tol)->check(CLI::PositiveNumber);
    sw->add_option("--out", out, "sweep table")->required();

    auto* pd = app.add_subcommand("plotdata", "emit signal samples aligned with annotation markers");
    pd->add_option("--input", input)->required();
    pd->add_option("--annotations", annotations)->required();
    pd->add_option("--fs", fs_opt, "sampling rate override");
    pd->add_option("--out", out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "icgdelin: " << e.what() << '\n';
        return 1;
    }

    try {
        if (*del) return cmd_delineate(input, fs, params_path, out);
        if (*ev) return cmd_eval(detected, reference, tol, fs_opt, out);
        if (*sy) return cmd_synth(spec_path, seconds, seed, fs_opt, out);
        if (*cal) return cmd_calibrate(corpus, grid_path, params_path, tol, out);
        if (*sw) return cmd_sweep(corpus, lengths, params_path, tol, out);
        if (*pd) return cmd_plotdata(input, annotations, fs_opt, out);
    } catch (const DataError& e) {
        std::cerr << "icgdelin: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "icgdelin: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "icgdelin: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
