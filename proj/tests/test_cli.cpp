#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdiv/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "fdiv");
    std::ostringstream out, err;
    const int code = fdx::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

class Scratch {
public:
    Scratch() : dir_(fs::temp_directory_path() / ("fdiv_cli_test_" + std::to_string(::getpid()))) {
        fs::create_directories(dir_);
    }
    ~Scratch() { fs::remove_all(dir_); }

    std::string file(const std::string& name, const std::string& content) const {
        const auto p = dir_ / name;
        std::ofstream(p) << content;
        return p.string();
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

private:
    fs::path dir_;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("divergence of a distribution with itself prints 0") {
    Scratch s;
    const auto nu = s.file("nu.json", R"({"weights": [0.2, 0.3, 0.5]})");
    const auto r = run({"divergence", "--g", "kl", "--nu", nu, "--pi", nu});
    CHECK(r.code == 0);
    CHECK(r.out == "0\n");
}

TEST_CASE("legendre report for the KL example") {
    Scratch s;
    const auto pi = s.file("half.json", R"({"weights": [0.5, 0.5]})");
    const auto h = s.file("h.csv", "h\n0\n1.0986122886681098\n");
    const auto r = run({"legendre", "--g", "kl", "--pi", pi, "--h", h, "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(std::abs(j["exact"].get<double>() - 0.693147) <= 1e-6);
    CHECK(std::abs(j["crude"].get<double>() - 0.735759) <= 1e-6);
    CHECK(std::abs(j["tight"].get<double>() - 0.693147) <= 1e-6);
    CHECK(j["nu_star"].size() == 2);
}

TEST_CASE("bound subcommand") {
    Scratch s;
    const auto pi = s.file("half.json", R"({"weights": [0.5, 0.5]})");
    const auto h = s.file("h.json", R"({"values": [0, 1.0986122886681098]})");
    const auto nu = s.file("nu.json", R"({"weights": [0.25, 0.75]})");
    const auto r = run({"bound", "--row", "kl", "--pi", pi, "--h", h, "--nu", nu, "--lambda", "1"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("value 0.823959217\n") != std::string::npos);

    const auto tv = run({"bound", "--row", "total_variation", "--pi", pi, "--h", s.file("h01.json", R"({"values": [0, 1]})"),
                         "--d", "0.5", "--gamma", "1", "--format", "csv"});
    REQUIRE(tv.code == 0);
    CHECK(tv.out == "row,value,d_value,gamma\ntotal_variation,1,0.5,1\n");
}

TEST_CASE("exit codes for bad input") {
    Scratch s;
    const auto pi = s.file("half.json", R"({"weights": [0.5, 0.5]})");
    const auto h = s.file("h.json", R"({"values": [0, 1]})");
    CHECK(run({}).code == fdx::cli::kInvalidConfig);
    CHECK(run({"frobnicate"}).code == fdx::cli::kInvalidConfig);
    CHECK(run({"divergence", "--g", "kl"}).code == fdx::cli::kInvalidConfig);
    CHECK(run({"divergence", "--g", "nope", "--nu", pi, "--pi", pi}).code == fdx::cli::kInvalidConfig);
    CHECK(run({"bound", "--row", "kl", "--pi", pi, "--h", h}).code == fdx::cli::kInvalidConfig);
    CHECK(run({"bound", "--row", "kl", "--pi", pi, "--h", h, "--d", "-1"}).code == fdx::cli::kInvalidConfig);
    CHECK(run({"bound", "--row", "kl", "--pi", pi, "--h", h, "--d", "1", "--nu", pi}).code == fdx::cli::kInvalidConfig);
    CHECK(run({"divergence", "--g", "kl", "--nu", s.path("missing.json"), "--pi", pi}).code == fdx::cli::kIoError);
    CHECK(run({"divergence", "--g", "kl", "--nu", s.file("bad.json", "{\"weights\": [0.5]"), "--pi", pi}).code ==
          fdx::cli::kInvalidConfig);
    CHECK(run({"verify", "--instances", "2", "--csv", s.path("no/such/dir/out.csv")}).code == fdx::cli::kIoError);
    CHECK(run({"verify", "--rows", "kl,nope"}).code == fdx::cli::kInvalidConfig);
    CHECK(run({"legendre", "--help"}).code == 0);
}

TEST_CASE("verify is byte-stable and exits 0 without violations") {
    Scratch s;
    const auto a = run({"verify", "--seed", "7", "--instances", "30", "--csv", s.path("a.csv"), "--dominance"});
    const auto b = run({"verify", "--seed", "7", "--instances", "30", "--csv", s.path("b.csv"), "--dominance"});
    CHECK(a.code == 0);
    CHECK(a.out.find("violations 0\n") != std::string::npos);
    CHECK(a.out == b.out);
    const auto ca = slurp(s.path("a.csv"));
    CHECK(ca == slurp(s.path("b.csv")));
    CHECK(ca.rfind("row,n,seed,lambda,c,gamma,d_value,e_nu_h,bound,slack\n", 0) == 0);
    std::size_t lines = 0;
    for (char ch : ca) lines += ch == '\n';
    CHECK(lines == 1 + 13 * 30);
}

TEST_CASE("pacbayes subcommand") {
    Scratch s;
    const auto cfg = s.file("cfg.json", R"({"model": {"type": "bernoulli", "n_samples": 2}, "generator": "kl",
        "epsilon": 0.05, "posterior": "gibbs:1", "n_trials": 400, "master_seed": 3})");
    const auto r = run({"pacbayes", "--config", cfg, "--trials-csv", s.path("t.csv"), "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["n_trials"] == 400);
    CHECK(j["moment_exact"] == true);
    CHECK(j["violation_frequency"].get<double>() <= j["tolerance"].get<double>());
    const auto csv = slurp(s.path("t.csv"));
    CHECK(csv.rfind("trial,seed,e_nu_r,e_nu_R,certificate,violated\n", 0) == 0);
    const auto again = run({"pacbayes", "--config", cfg, "--format", "json"});
    CHECK(again.out == r.out);
    CHECK(run({"pacbayes", "--config", s.file("bad.json", R"({"model": 1, "generator": "kl"})")}).code ==
          fdx::cli::kInvalidConfig);
    CHECK(run({"pacbayes", "--config", s.path("missing.json")}).code == fdx::cli::kIoError);
}

TEST_CASE("sweep emits one CSV line per point") {
    Scratch s;
    const auto pi = s.file("half.json", R"({"weights": [0.5, 0.5]})");
    const auto h = s.file("h.json", R"({"values": [0, 1]})");
    const auto r = run({"sweep", "--row", "kl", "--pi", pi, "--h", h, "--d", "0.1", "--param", "lambda", "--from",
                        "0.5", "--to", "2", "--points", "4", "--log"});
    REQUIRE(r.code == 0);
    std::size_t lines = 0;
    for (char ch : r.out) lines += ch == '\n';
    CHECK(lines == 5);
    CHECK(r.out.rfind("row,param,x,value\nkl,lambda,0.5,", 0) == 0);
}
