#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "icg/io.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::current_path() / "cli_work";

struct Run {
    int status;
    std::string err;
};

Run icgdelin(const std::string& args) {
    fs::create_directories(kDir);
    const auto err_path = kDir / "stderr.txt";
    const std::string cmd = std::string("\"") + ICGDELIN_PATH + "\" " + args + " 2> \"" + err_path.string() + "\"";
    const int raw = std::system(cmd.c_str());
    std::ifstream in(err_path);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string p(const std::string& name) { return "\"" + (kDir / name).string() + "\""; }

std::string value_of(const std::string& report, const std::string& key) {
    const auto at = report.find("\n" + key + "=");
    if (at == std::string::npos) return "<missing>";
    const auto start = at + key.size() + 2;
    return report.substr(start, report.find('\n', start) - start);
}

void write(const std::string& name, const std::string& body) {
    fs::create_directories(kDir);
    std::ofstream(kDir / name) << body;
}

}  // namespace

TEST_CASE("synth, delineate and eval chain to a perfect score") {
    write("clean.spec", "morphology=b-notch\nhr_bpm=70\n");
    REQUIRE(icgdelin("synth --spec " + p("clean.spec") + " --seconds 20 --seed 4 --out " + p("rec")).status == 0);
    REQUIRE(fs::exists(kDir / "rec_signal.csv"));
    REQUIRE(fs::exists(kDir / "rec_truth.csv"));
    REQUIRE(icgdelin("delineate --input " + p("rec_signal.csv") + " --fs 250 --out " + p("det.csv")).status == 0);
    REQUIRE(icgdelin("eval --detected " + p("det.csv") + " --reference " + p("rec_truth.csv") + " --out " + p("r30.txt"))
                .status == 0);
    const auto report = "\n" + slurp(kDir / "r30.txt");
    for (const char* pt : {"B", "C", "X", "O"}) {
        CAPTURE(pt);
        CHECK(value_of(report, std::string(pt) + ".gmean") == "100");
        CHECK(value_of(report, std::string(pt) + ".fp") == "0");
    }
}

TEST_CASE("a wider tolerance never scores lower") {
    write("noisy.spec", "morphology=x-local-min-only\nwhite=0.08\ndrift=0.25:0.2\n");
    REQUIRE(icgdelin("synth --spec " + p("noisy.spec") + " --seconds 30 --seed 9 --out " + p("nz")).status == 0);
    REQUIRE(icgdelin("delineate --input " + p("nz_signal.csv") + " --fs 250 --out " + p("nz_det.csv")).status == 0);
    const std::string base = "eval --detected " + p("nz_det.csv") + " --reference " + p("nz_truth.csv");
    REQUIRE(icgdelin(base + " --tolerance-ms 30 --out " + p("t30.txt")).status == 0);
    REQUIRE(icgdelin(base + " --tolerance-ms 150 --out " + p("t150.txt")).status == 0);
    const auto r30 = "\n" + slurp(kDir / "t30.txt"), r150 = "\n" + slurp(kDir / "t150.txt");
    for (const char* pt : {"B", "C", "X", "O"}) {
        CAPTURE(pt);
        CHECK(std::stoul(value_of(r150, std::string(pt) + ".tp")) >= std::stoul(value_of(r30, std::string(pt) + ".tp")));
    }
}

TEST_CASE("a missing input is a data error naming the path") {
    const auto r = icgdelin("delineate --input " + p("absent.csv") + " --fs 250 --out " + p("x.csv"));
    CHECK(r.status == 2);
    CHECK(r.err.find("absent.csv") != std::string::npos);
}

TEST_CASE("usage errors exit with 1") {
    CHECK(icgdelin("").status == 1);
    CHECK(icgdelin("delineate --fs 250").status == 1);
    CHECK(icgdelin("frobnicate").status == 1);
    write("bad.params", "a_frac=7\n");
    write("tiny.csv", "# fs=250\n1\n2\n");
    CHECK(icgdelin("delineate --input " + p("tiny.csv") + " --fs 250 --params " + p("bad.params") + " --out " + p("y.csv"))
              .status == 1);
}

TEST_CASE("a too-short signal is a data error") {
    write("short.csv", "# fs=250\n1\n2\n3\n");
    CHECK(icgdelin("delineate --input " + p("short.csv") + " --fs 250 --out " + p("z.csv")).status == 2);
}

TEST_CASE("plotdata marks annotated samples") {
    write("pd.spec", "hr_bpm=60\n");
    REQUIRE(icgdelin("synth --spec " + p("pd.spec") + " --seconds 4 --out " + p("pd")).status == 0);
    REQUIRE(icgdelin("plotdata --input " + p("pd_signal.csv") + " --annotations " + p("pd_truth.csv") + " --out " +
                     p("pd_plot.csv"))
                .status == 0);
    std::ifstream in(kDir / "pd_plot.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "index,time_s,value,point");
    int rows = 0, marked = 0;
    while (std::getline(in, line)) {
        ++rows;
        if (line.back() != ',') ++marked;
    }
    CHECK(rows == 1000);
    CHECK(marked == 16);
}

TEST_CASE("sweep and calibrate run on a corpus directory") {
    fs::create_directories(kDir / "corpus");
    write("c.spec", "white=0.03\n");
    for (int k = 0; k < 2; ++k)
        REQUIRE(icgdelin("synth --spec " + p("c.spec") + " --seconds 8 --seed " + std::to_string(k) + " --out " +
                         p("corpus/r" + std::to_string(k)))
                    .status == 0);
    REQUIRE(icgdelin("sweep --corpus " + p("corpus") + " --lengths 3,5 --out " + p("sweep.csv")).status == 0);
    const auto sweep = slurp(kDir / "sweep.csv");
    CHECK(sweep.rfind("config,length,gmean_b,gmean_c,gmean_x,gmean_o,mean_sg_length\n", 0) == 0);
    CHECK(sweep.find("\nL=3,3,") != std::string::npos);
    CHECK(sweep.find("\nL=5,5,") != std::string::npos);
    CHECK(sweep.find("\nadaptive,0,") != std::string::npos);

    write("grid.txt", "a_frac=0.4,0.5\n");
    REQUIRE(icgdelin("calibrate --corpus " + p("corpus") + " --grid " + p("grid.txt") + " --out " + p("cal.csv")).status == 0);
    const auto cal = slurp(kDir / "cal.csv");
    CHECK(cal.rfind("a_frac,gmean_b,gmean_c,gmean_x,gmean_o,objective,best\n", 0) == 0);
    CHECK(std::count(cal.begin(), cal.end(), '\n') == 3);
}

TEST_CASE("delineation output is byte-identical across runs") {
    write("det.spec", "morphology=b-local-min\nwhite=0.05\n");
    REQUIRE(icgdelin("synth --spec " + p("det.spec") + " --seconds 15 --seed 2 --out " + p("dt")).status == 0);
    REQUIRE(icgdelin("delineate --input " + p("dt_signal.csv") + " --fs 250 --out " + p("d1.csv")).status == 0);
    REQUIRE(icgdelin("delineate --input " + p("dt_signal.csv") + " --fs 250 --out " + p("d2.csv")).status == 0);
    CHECK(slurp(kDir / "d1.csv") == slurp(kDir / "d2.csv"));
    CHECK_FALSE(slurp(kDir / "d1.csv").empty());
}
