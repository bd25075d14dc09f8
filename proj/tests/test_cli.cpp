#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "helpers.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

std::string shell_quote(const std::string& s) { return "'" + s + "'"; }

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path() / "genodyn_cli_test";
    fs::create_directories(dir);
    const fs::path out = dir / ("out" + std::to_string(counter) + ".txt");
    const fs::path err = dir / ("err" + std::to_string(counter) + ".txt");
    ++counter;

    const std::string cmd = shell_quote(GENODYN_CLI_PATH) + " " + args + " > " +
                            shell_quote(out.string()) + " 2> " + shell_quote(err.string());
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = testutil::read_file(out.string());
    r.err = testutil::read_file(err.string());
    return r;
}

std::string net(const std::string& name) { return testutil::network_path(name); }

} // namespace

TEST_CASE("classify reports the toggle pitchfork as JSON") {
    const auto r = run_cli("classify " + net("toggle.grn") + " --param m --from 0 --to 3");
    REQUIRE(r.exit_code == 0);
    const auto d = json::parse(r.out);
    CHECK(d["kind"] == "pitchfork");
    CHECK(std::abs(d["mu0"].get<double>() - 2.0) <= 1e-6);
    CHECK(d["post_check"]["ok"].get<bool>());
    CHECK(d["meta"]["version"] == "0.1.0");
    CHECK(d["meta"].contains("config"));
    CHECK(d["meta"].contains("rtol"));
}

TEST_CASE("qwindow prints the reference window") {
    const auto r = run_cli("qwindow 1 2 3");
    REQUIRE(r.exit_code == 0);
    const auto d = json::parse(r.out);
    CHECK(d["q_hopf"].get<double>() == -60.0);
    CHECK(d["q_pitch"].get<double>() == 6.0);
    CHECK(d["gamma"].get<double>() == doctest::Approx(3.3166247903554).epsilon(1e-12));
}

TEST_CASE("parse failures exit 2 with line-numbered diagnostics") {
    const auto r =
        run_cli("parse " + std::string(GENODYN_TEST_DATA_DIR) + "/bad01_lexical.grn");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find(":2:") != std::string::npos); // file:line:col prefix
}

TEST_CASE("parse emits canonical text that parses back") {
    const auto r = run_cli("parse " + net("twolayer.grn"));
    REQUIRE(r.exit_code == 0);
    auto reparsed = genodyn::netlang::parse_network(r.out);
    CHECK(reparsed.ok());
}

TEST_CASE("layers emits the documented JSON shape") {
    const auto r = run_cli("layers " + net("repressilator_w.grn"));
    REQUIRE(r.exit_code == 0);
    const auto d = json::parse(r.out);
    CHECK(d["core"] == json::array({"x", "y", "z"}));
    CHECK(d["layers"]["w"] == 1);
    CHECK(d["layers"]["x"] == 0);
    CHECK(d["max_layer"] == 1);
}

TEST_CASE("identical configurations produce byte-identical artifacts") {
    const std::string args =
        "continue " + net("toggle.grn") + " --param m --from 0 --to 3 --steps 30";
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);

    const std::string eq_args = "equilibria " + net("toggle.grn") +
                                " --set m=3 --seed 42 --jitter 0.3 --grid 6";
    const auto c = run_cli(eq_args);
    const auto d = run_cli(eq_args);
    REQUIRE(c.exit_code == 0);
    CHECK(c.out == d.out);
}

TEST_CASE("continue emits the pinned CSV columns with a metadata header") {
    const auto r = run_cli("continue " + net("toggle.grn") + " --param m --from 0 --to 2 --steps 10");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("# genodyn 0.1.0\n") == 0);
    CHECK(r.out.find("# config ") != std::string::npos);
    CHECK(r.out.find("# rtol=") != std::string::npos);
    CHECK(r.out.find("mu,x_x,x_y,re_lambda_max,det_j\n") != std::string::npos);
}

TEST_CASE("unknown parameter overrides are rejected before any computation") {
    const auto r = run_cli("equilibria " + net("toggle.grn") + " --set bogus=1");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("unknown parameter override") != std::string::npos);
}

TEST_CASE("spectrum emits the cyclic roots as CSV") {
    const auto r = run_cli("spectrum --n 3 --q -8 --alpha 1");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("re,im\n") != std::string::npos);
    CHECK(r.out.find("-3,0\n") != std::string::npos);
}

TEST_CASE("equilibria reports the index data alongside the roots") {
    const auto r = run_cli("equilibria " + net("toggle.grn") + " --set m=3");
    REQUIRE(r.exit_code == 0);
    const auto d = json::parse(r.out);
    CHECK(d["equilibria"].size() == 3);
    CHECK(d["index_sum"] == 1);
    CHECK(d["index_consistent"].get<bool>());
}

TEST_CASE("simulate decays to the resting point from the box center") {
    const auto r = run_cli("simulate " + net("toggle.grn") +
                           " --t1 60 --sample-dt 60 --set m=1");
    REQUIRE(r.exit_code == 0);
    // final CSV row should be 60,1,1 up to integrator accuracy
    const auto last = r.out.rfind("\n60,");
    REQUIRE(last != std::string::npos);
    const std::string row = r.out.substr(last + 1);
    double t, x, y;
    REQUIRE(std::sscanf(row.c_str(), "%lf,%lf,%lf", &t, &x, &y) == 3);
    CHECK(std::abs(x - 1.0) < 1e-6);
    CHECK(std::abs(y - 1.0) < 1e-6);
}

TEST_CASE("induce extends an explicit core value set") {
    const auto r = run_cli("induce " + net("repressilator_w.grn") +
                           " --core x=1 --core y=1 --core z=1");
    REQUIRE(r.exit_code == 0);
    const auto d = json::parse(r.out);
    REQUIRE(d["induced"].size() == 1);
    CHECK(d["induced"][0]["state"]["w"].get<double>() == doctest::Approx(1.0));
    CHECK(d["induced"][0]["residual"].get<double>() <= 1e-10);
}

TEST_CASE("--out writes the artifact atomically to a file") {
    const fs::path dir = fs::temp_directory_path() / "genodyn_cli_test";
    fs::create_directories(dir);
    const fs::path target = dir / "qwindow.json";
    fs::remove(target);
    const auto r = run_cli("qwindow 1 1 1 --out " + shell_quote(target.string()));
    REQUIRE(r.exit_code == 0);
    REQUIRE(fs::exists(target));
    const auto d = json::parse(testutil::read_file(target.string()));
    CHECK(d["q_hopf"].get<double>() == -8.0);
    CHECK_FALSE(fs::exists(target.string() + ".tmp"));
}

TEST_CASE("validation failures exit 2 with named violations") {
    const auto r =
        run_cli("layers " + std::string(GENODYN_TEST_DATA_DIR) + "/invalid_structure.grn");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("no predecessor") != std::string::npos);
}

TEST_CASE("computation errors exit 1 with a JSON error object on stderr") {
    const auto r = run_cli("continue " + net("toggle.grn") + " --param m --from 1 --to 1");
    CHECK(r.exit_code == 1);
    const auto d = json::parse(r.err);
    CHECK(d.contains("error"));
    CHECK(d["subcommand"] == "continue");
}

TEST_CASE("results do not depend on the worker count") {
    const std::string args = "equilibria " + net("repressilator.grn") + " --set m=3 --grid 6";
    const fs::path dir = fs::temp_directory_path() / "genodyn_cli_test";
    fs::create_directories(dir);
    auto run_with_threads = [&](const char* threads) {
        const fs::path out = dir / (std::string("thr") + threads + ".json");
        const std::string cmd = std::string("GENODYN_THREADS=") + threads + " " +
                                shell_quote(GENODYN_CLI_PATH) + " " + args + " > " +
                                shell_quote(out.string()) + " 2>/dev/null";
        REQUIRE(std::system(cmd.c_str()) == 0);
        return testutil::read_file(out.string());
    };
    CHECK(run_with_threads("1") == run_with_threads("4"));
}
