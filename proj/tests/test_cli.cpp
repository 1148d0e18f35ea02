#include <sstream>

#include <nlohmann/json.hpp>

#include "curvemean/cli.hpp"
#include "curvemean/ingestion.hpp"
#include "curvemean/synthetic.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace curvemean;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string path_of(const testing::TempDir& dir, const char* name) { return (dir.path / name).string(); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("version and help") {
    const auto version = invoke({"--version"});
    CHECK(version.code == 0);
    CHECK(version.out.find('.') != std::string::npos);
    const auto help = invoke({"--help"});
    CHECK(help.code == 0);
    for (const char* sub : {"segment", "smooth", "align", "mean", "procrustes", "simulate", "benchmark"})
        CHECK(help.out.find(sub) != std::string::npos);
    CHECK(invoke({"mean", "--help"}).code == 0);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"frobnicate"}).code == 2);
    CHECK(invoke({"mean", "--input", "x.csv", "--no-such-flag"}).code == 2);
    CHECK(invoke({"simulate"}).code == 2);
    CHECK(invoke({"benchmark", "--replications", "2"}).code == 2);
    CHECK(invoke({"mean", "--input", "/nonexistent/data.csv"}).code == 2);
    CHECK(invoke({"mean", "--input", "x.csv", "--method", "median"}).code == 2);
}

TEST_CASE("euclidean mean of opposite signals is zero") {
    testing::TempDir dir;
    write_text_file(dir.path / "d.csv", "1,-2,3.5\n-1,2,-3.5\n");
    const auto r = invoke({"mean", "--method", "euclidean", "-i", path_of(dir, "d.csv")});
    CHECK(r.code == 0);
    const auto mean = parse_signals_csv(r.out);
    REQUIRE(mean.size() == 1);
    for (double v : mean[0].values()) CHECK(v == 0.0);
}

TEST_CASE("frechet mean recovers constructed shifts") {
    testing::TempDir dir;
    const auto bump = bump_shape({{0.5, 0.05, 1.0}});
    const std::vector<double> shifts{0.04, -0.06, 0.01, 0.05, -0.04};
    std::vector<SampledSignal> data;
    for (double s : shifts) data.push_back(testing::rotate_fourier(bump, s).sample(128));
    store_signals(data, dir.path / "d.csv");
    write_text_file(dir.path / "cfg.json", R"({"rho": 1e-10})");
    const auto r = invoke({"mean", "--method", "frechet", "--family", "translation", "--smoother", "fourier-gcv",
                           "-i", path_of(dir, "d.csv"), "-o", path_of(dir, "m.csv"), "--params",
                           path_of(dir, "p.json"), "--trace", path_of(dir, "t.json"), "--config",
                           path_of(dir, "cfg.json")});
    REQUIRE(r.code == 0);
    const auto params = nlohmann::json::parse(read_text_file(dir.path / "p.json"));
    CHECK(params["method"] == "frechet");
    for (std::size_t j = 0; j < shifts.size(); ++j)
        CHECK(std::abs(params["parameters"][j][0].get<double>() - shifts[j]) <= 1e-3);
    const auto trace = nlohmann::json::parse(read_text_file(dir.path / "t.json"))["trace"];
    REQUIRE(trace.size() >= 2);
    for (const auto& entry : trace) {
        CHECK(entry.contains("criterion"));
        CHECK(entry.contains("step"));
        CHECK(entry.contains("backtracks"));
    }
    CHECK(trace[1]["criterion"].get<double>() < trace[0]["criterion"].get<double>());
    CHECK(load_signals(dir.path / "m.csv").front().size() == 128);
}

TEST_CASE("config file values yield to flags") {
    testing::TempDir dir;
    write_text_file(dir.path / "cfg.json", R"({"J": 4, "n": 16, "seed": 3})");
    const auto from_file = invoke({"simulate", "--config", path_of(dir, "cfg.json")});
    REQUIRE(from_file.code == 0);
    CHECK(parse_signals_csv(from_file.out).size() == 4);
    const auto overridden = invoke({"simulate", "--config", path_of(dir, "cfg.json"), "--J", "6"});
    REQUIRE(overridden.code == 0);
    const auto data = parse_signals_csv(overridden.out);
    CHECK(data.size() == 6);
    CHECK(data[0].size() == 16);
    write_text_file(dir.path / "bad.json", R"({"J": [1, 2]})");
    CHECK(invoke({"simulate", "--config", path_of(dir, "bad.json")}).code == 2);
    write_text_file(dir.path / "broken.json", "{");
    CHECK(invoke({"simulate", "--config", path_of(dir, "broken.json")}).code == 2);
}

TEST_CASE("benchmark reruns are byte-identical across thread counts") {
    testing::TempDir dir;
    const std::vector<std::string> base{"benchmark", "--seed", "7", "--replications", "4", "--J", "5"};
    auto first = base, second = base;
    first.insert(first.end(), {"-o", path_of(dir, "a.csv"), "--summary", path_of(dir, "a.json")});
    second.insert(second.end(), {"-o", path_of(dir, "b.csv"), "--summary", path_of(dir, "b.json"), "--threads", "3"});
    REQUIRE(invoke(first).code == 0);
    REQUIRE(invoke(second).code == 0);
    CHECK(read_text_file(dir.path / "a.csv") == read_text_file(dir.path / "b.csv"));
    CHECK(read_text_file(dir.path / "a.json") == read_text_file(dir.path / "b.json"));
    CHECK(read_text_file(dir.path / "a.csv").rfind("replication,frechet_mse,procrustes_mse\n", 0) == 0);
}

TEST_CASE("simulate writes shifts and truth") {
    testing::TempDir dir;
    const auto r = invoke({"simulate", "--seed", "1", "--J", "3", "--shifts", path_of(dir, "s.json"), "--truth",
                           path_of(dir, "f.csv"), "-o", path_of(dir, "d.csv")});
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(read_text_file(dir.path / "s.json"))["true_shifts"].size() == 3);
    CHECK(load_signals(dir.path / "f.csv").size() == 1);
    CHECK(load_signals(dir.path / "d.csv").size() == 3);
}

TEST_CASE("smooth and its input errors") {
    testing::TempDir dir;
    std::mt19937_64 rng(1);
    store_signals({SampledSignal(testing::random_vector(rng, 48)), SampledSignal(testing::random_vector(rng, 48))},
                  dir.path / "d.csv");
    const auto fourier = invoke({"smooth", "-i", path_of(dir, "d.csv"), "--method", "fourier", "--cutoff", "3"});
    REQUIRE(fourier.code == 0);
    CHECK(parse_signals_csv(fourier.out).size() == 2);
    // 48 samples is not a power of two
    CHECK(invoke({"smooth", "-i", path_of(dir, "d.csv"), "--method", "wavelet"}).code == 2);
    CHECK(invoke({"smooth", "-i", path_of(dir, "d.csv"), "--method", "fourier", "--cutoff", "30"}).code == 2);
    write_text_file(dir.path / "ragged.csv", "1,2,3\n4,5\n");
    const auto ragged = invoke({"smooth", "-i", path_of(dir, "ragged.csv")});
    CHECK(ragged.code == 2);
    CHECK(ragged.err.find("row 2") != std::string::npos);
}

TEST_CASE("segment a record") {
    testing::TempDir dir;
    std::string text = "mV\n";
    for (int i = 0; i < 3000; ++i) text += (i % 300 == 150 ? "1.0\n" : "0.0\n");
    write_text_file(dir.path / "rec.csv", text);
    const auto r = invoke({"segment", "-i", path_of(dir, "rec.csv"), "--sample-rate", "360", "--window", "128",
                           "--peaks", path_of(dir, "p.json")});
    REQUIRE(r.code == 0);
    const auto beats = parse_signals_csv(r.out);
    CHECK(beats.size() == 10);
    CHECK(beats[0][63] == 1.0);
    CHECK(nlohmann::json::parse(read_text_file(dir.path / "p.json"))["used"][0] == 150);
    CHECK(invoke({"segment", "-i", path_of(dir, "rec.csv")}).code == 2);
}

TEST_CASE("procrustes and align subcommands") {
    testing::TempDir dir;
    REQUIRE(invoke({"simulate", "--seed", "2", "--J", "4", "-o", path_of(dir, "d.csv")}).code == 0);
    const auto p = invoke({"procrustes", "-i", path_of(dir, "d.csv"), "--params", path_of(dir, "p.json")});
    REQUIRE(p.code == 0);
    CHECK(nlohmann::json::parse(read_text_file(dir.path / "p.json"))["parameters"].size() == 4);
    const auto a = invoke({"align", "-i", path_of(dir, "d.csv"), "--params", path_of(dir, "a.json"), "--family",
                           "diffeo", "--max-iter", "3"});
    REQUIRE(a.code == 0);
    CHECK(nlohmann::json::parse(read_text_file(dir.path / "a.json"))["parameters"][0].size() == 10);
    // a single signal cannot be aligned
    write_text_file(dir.path / "one.csv", "1,2,3,4\n");
    const auto one = invoke({"mean", "--method", "frechet", "-i", path_of(dir, "one.csv")});
    CHECK(one.code == 2);
}

}
