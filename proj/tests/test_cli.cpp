#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "shellforge/circuit.hpp"
#include "shellforge/cli.hpp"
#include "shellforge/gesture.hpp"
#include "shellforge/mesh_io.hpp"
#include "shellforge/primitives.hpp"

using namespace shellforge;
namespace fs = std::filesystem;

namespace {

int run(std::initializer_list<const char*> args) {
    std::vector<const char*> argv{"shellforge"};
    argv.insert(argv.end(), args.begin(), args.end());
    return dispatch(static_cast<int>(argv.size()), argv.data());
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    out << text;
}

std::string fixture_spec_path() {
    fs::create_directories("cli_fixtures");
    std::string path = "cli_fixtures/circuit.json";
    write_text(path, blank_to_json_text(fixtures::egg_blank()));
    return path;
}

}  // namespace

TEST_CASE("cli: unknown flags and missing subcommands exit 1") {
    CHECK(run({"definitely-not-a-subcommand"}) == 1);
    CHECK(run({"blank", "--definitely-not-a-flag", "x"}) == 1);
    CHECK(run({}) == 1);
    CHECK(run({"--help"}) == 0);
}

TEST_CASE("cli: blank and bracket generate printable parts with reports") {
    std::string spec = fixture_spec_path();
    CHECK(run({"blank", "--spec", spec.c_str(), "-o", "cli_out", "--pitch", "0.4"}) == 0);
    CHECK(fs::exists("cli_out/blank.stl"));
    CHECK(fs::exists("cli_out/blank_report.json"));
    TriangleMesh blank = load_mesh("cli_out/blank.stl");
    CHECK(validate(blank).watertight);

    CHECK(run({"bracket", "--spec", spec.c_str(), "-o", "cli_out", "--pitch", "0.4"}) == 0);
    CHECK(fs::exists("cli_out/bracket.stl"));
}

TEST_CASE("cli: validate prints diagnostics and exit codes behave") {
    fs::create_directories("cli_fixtures");
    save_mesh(make_box({0, 0, 0}, {10, 10, 10}), "cli_fixtures/cube.stl");
    CHECK(run({"validate", "--mesh", "cli_fixtures/cube.stl"}) == 0);
    CHECK(run({"validate", "--mesh", "cli_fixtures/does_not_exist.stl"}) == 2);
}

TEST_CASE("cli: shell then split on a generated solid") {
    fs::create_directories("cli_fixtures");
    save_mesh(make_icosphere(12.0, 3), "cli_fixtures/ball.stl");
    CHECK(run({"shell", "--mesh", "cli_fixtures/ball.stl", "--thickness", "3", "--pitch", "0.3",
               "-o", "cli_out", "--name", "ball_shell"}) == 0);
    CHECK(run({"split", "--mesh", "cli_out/ball_shell.stl", "--plane", "0,0,1,0", "-o",
               "cli_out", "--name", "ball"}) == 0);
    CHECK(fs::exists("cli_out/ball_below.stl"));
    CHECK(fs::exists("cli_out/ball_above.stl"));
    TriangleMesh below = load_mesh("cli_out/ball_below.stl");
    CHECK(validate(below).watertight);
    // Stage failure (tangent plane) exits 2, not a crash.
    CHECK(run({"split", "--mesh", "cli_out/ball_shell.stl", "--plane", "0,0,1,50", "-o",
               "cli_out", "--name", "miss"}) == 2);
}

TEST_CASE("cli: gesture synth/train/classify round trip") {
    fs::create_directories("cli_out");
    CHECK(run({"gesture", "synth", "--out", "cli_out/corpus.jsonl", "--seed", "7", "--n", "8",
               "--device-id", "dev-1"}) == 0);
    CHECK(run({"gesture", "train", "--data", "cli_out/corpus.jsonl", "--out",
               "cli_out/model.json", "--seed", "42", "--epochs", "120", "--device-id",
               "dev-1"}) == 0);
    CHECK(run({"gesture", "classify", "--model", "cli_out/model.json", "--data",
               "cli_out/corpus.jsonl"}) == 0);
    CHECK(run({"gesture", "check", "--hole", "14", "--cover", "2"}) == 0);
    // Usage error: missing required seed.
    CHECK(run({"gesture", "train", "--data", "cli_out/corpus.jsonl"}) == 1);
}

TEST_CASE("cli: gesture eval writes the accuracy report") {
    CHECK(run({"gesture", "eval", "--corpus", "synth", "--seed", "7", "--n", "6", "--splits",
               "2", "-o", "cli_out"}) == 0);
    CHECK(fs::exists("cli_out/gesture_eval_report.json"));
}

TEST_CASE("cli: identical invocations produce byte-identical outputs") {
    std::string spec = fixture_spec_path();

    auto run_and_grab = [&](const char* dir) {
        REQUIRE(run({"blank", "--spec", spec.c_str(), "-o", dir, "--pitch", "0.5"}) == 0);
        return read_file_bytes(std::string(dir) + "/blank.stl");
    };
    fs::remove_all("cli_det1");
    fs::remove_all("cli_det2");
    auto b1 = run_and_grab("cli_det1");
    auto b2 = run_and_grab("cli_det2");
    CHECK(b1 == b2);

    REQUIRE(run({"gesture", "synth", "--out", "cli_det1/c.jsonl", "--seed", "5"}) == 0);
    REQUIRE(run({"gesture", "synth", "--out", "cli_det2/c.jsonl", "--seed", "5"}) == 0);
    CHECK(read_file_bytes("cli_det1/c.jsonl") == read_file_bytes("cli_det2/c.jsonl"));

    REQUIRE(run({"gesture", "train", "--data", "cli_det1/c.jsonl", "--out", "cli_det1/m.json",
                 "--seed", "9", "--epochs", "80"}) == 0);
    REQUIRE(run({"gesture", "train", "--data", "cli_det2/c.jsonl", "--out", "cli_det2/m.json",
                 "--seed", "9", "--epochs", "80"}) == 0);
    CHECK(read_file_bytes("cli_det1/m.json") == read_file_bytes("cli_det2/m.json"));
}
