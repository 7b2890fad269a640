#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// The harness provides the binary and preset locations via the environment.
std::string cli_bin() {
    const char* p = std::getenv("NONLOC_CLI_BIN");
    REQUIRE(p != nullptr);
    return p;
}

std::string preset(const std::string& name) {
    const char* p = std::getenv("NONLOC_PRESET_DIR");
    REQUIRE(p != nullptr);
    return std::string(p) + "/" + name;
}

struct run_result {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

run_result run_cli(const std::string& args) {
    const std::string cmd =
        cli_bin() + " " + args + " > cli_stdout.txt 2> cli_stderr.txt";
    const int status = std::system(cmd.c_str());
    run_result r;
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    r.code = WEXITSTATUS(status);
    r.out = slurp("cli_stdout.txt");
    r.err = slurp("cli_stderr.txt");
    return r;
}

json load_record(const std::string& dir) {
    return json::parse(slurp(dir + "/run_record.json"));
}

struct scratch_dir {
    std::string path;
    explicit scratch_dir(std::string p) : path(std::move(p)) { fs::remove_all(path); }
    ~scratch_dir() { fs::remove_all(path); }
};

bool mentions(const std::string& text, const std::string& needle) {
    return text.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("solve emits artifacts and a deterministic record") {
    scratch_dir a("cli_a"), b("cli_b");
    const std::string common = "solve -c " + preset("ac1.toml") + " -o ";
    const run_result first = run_cli(common + a.path);
    REQUIRE(first.code == 0);
    CHECK(mentions(first.out, "converged"));
    CHECK(mentions(first.out, "artifacts: " + a.path));
    CHECK(fs::exists(a.path + "/solution.csv"));
    CHECK(fs::exists(a.path + "/residual_history.csv"));

    const run_result second = run_cli(common + b.path);
    REQUIRE(second.code == 0);

    const json ra = load_record(a.path), rb = load_record(b.path);
    CHECK(ra["pass"] == true);
    CHECK(ra["content_hash"] == rb["content_hash"]);
    CHECK(mentions(first.out, ra["content_hash"].get<std::string>()));
    CHECK(ra["report"]["solve"]["converged"] == true);
    CHECK(mentions(ra["config"].get<std::string>(), "zero_order"));
    CHECK(ra.contains("version"));
    CHECK(ra.contains("generated_at"));
}

TEST_CASE("zero forcing produces the zero solution") {
    scratch_dir dir("cli_zero");
    const run_result r = run_cli("solve -c " + preset("ac1.toml") +
                                 " --set solver.f_const=0.0 -o " + dir.path);
    REQUIRE(r.code == 0);
    std::ifstream csv(dir.path + "/solution.csv");
    std::string line;
    REQUIRE(std::getline(csv, line));
    CHECK(line == "x,d,u");
    int rows = 0;
    while (std::getline(csv, line)) {
        const std::size_t last = line.rfind(',');
        REQUIRE(last != std::string::npos);
        CHECK(std::stod(line.substr(last + 1)) == 0.0);
        ++rows;
    }
    CHECK(rows > 100);
}

TEST_CASE("configuration mistakes exit with code 1") {
    const run_result coarse = run_cli("solve -c " + preset("ac1.toml") +
                                      " --set grid.h_target=0.2 -o cli_bad");
    CHECK(coarse.code == 1);
    CHECK(mentions(coarse.err, "config error"));
    CHECK(mentions(coarse.err, "epsilon/4"));

    const run_result unknown = run_cli("study nonsense -c " + preset("ac4.toml") +
                                       " -o cli_bad");
    CHECK(unknown.code == 1);
    CHECK(mentions(unknown.err, "unknown study 'nonsense'"));

    const run_result missing = run_cli("solve -c no_such_file.toml -o cli_bad");
    CHECK(missing.code == 1);
    CHECK(mentions(missing.err, "cannot open"));

    const run_result method = run_cli("solve -c " + preset("ac1.toml") +
                                      " --set 'solver.method=\"newton\"' -o cli_bad");
    CHECK(method.code == 1);
    CHECK(mentions(method.err, "unknown solver.method"));
    fs::remove_all("cli_bad");
}

TEST_CASE("threshold failures exit with code 3") {
    scratch_dir dir("cli_tight");
    // The family's real spread is about 2.7%, so a 0.1% gate must fail.
    const run_result r = run_cli("study jump -c " + preset("ac4.toml") +
                                 " --set acceptance.spread_threshold=0.001 -o " + dir.path);
    CHECK(r.code == 3);
    CHECK(mentions(r.out, "FAILED"));
    CHECK(load_record(dir.path)["pass"] == false);
}

TEST_CASE("non-convergence exits with code 2") {
    scratch_dir dir("cli_short");
    const run_result r = run_cli("solve -c " + preset("ac1.toml") +
                                 " --set solver.max_iter=3 -o " + dir.path);
    CHECK(r.code == 2);
    CHECK(mentions(r.out, "NOT converged"));
}

TEST_CASE("validate echoes the canonical configuration") {
    const run_result ok = run_cli("validate -c " + preset("ac1.toml"));
    REQUIRE(ok.code == 0);
    CHECK(mentions(ok.out, "ok: "));
    CHECK(mentions(ok.out, "[kernel]"));
    CHECK(mentions(ok.out, "family = \"zero_order\""));

    const run_result bad = run_cli("validate -c " + preset("ac1.toml") +
                                   " --set grid.h_target=0.5");
    CHECK(bad.code == 1);
}

TEST_CASE("barrier check certifies the standard sweep") {
    scratch_dir dir("cli_barrier");
    const run_result r = run_cli("barrier-check -c " + preset("ac8.toml") + " -o " + dir.path);
    REQUIRE(r.code == 0);
    CHECK(mentions(r.out, "beta0"));
    CHECK(load_record(dir.path)["pass"] == true);
}
