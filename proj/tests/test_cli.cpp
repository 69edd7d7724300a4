#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("birkreg_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string spec(const std::string& name) { return std::string(BIRKREG_GALLERY_DIR) + "/" + name + ".json"; }

int run(const std::string& args, const std::string& stdout_file = "") {
    const std::string out = stdout_file.empty() ? "/dev/null" : stdout_file;
    const std::string cmd = std::string(BIRKREG_CLI) + " " + args + " > " + out + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

}  // namespace

TEST_CASE("classify exit codes") {
    CHECK(run("classify " + spec("example4")) == 0);
    CHECK(run("classify " + spec("cauchy2")) == 3);
    CHECK(run("classify " + (scratch() / "missing.json").string()) == 4);

    const auto broken = scratch() / "broken.json";
    std::ofstream(broken) << "{\"order\": 2, \"form\": {\"type\": \"model\"}, \"boundary_conditions\": [";
    CHECK(run("classify " + broken.string()) == 4);

    const auto dependent = scratch() / "dependent.json";
    std::ofstream(dependent) << R"({"order": 2, "form": {"type": "model"},
        "boundary_conditions": [{"a": {"0": [1, 0]}}, {"a": {"0": [2, 0]}}]})";
    CHECK(run("classify " + dependent.string()) == 4);

    CHECK(run("") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("classify") == 2);
    CHECK(run("scan " + spec("dirichlet2") + " --kind other") == 2);
}

TEST_CASE("classify output") {
    const auto out = scratch() / "classify.json";
    REQUIRE(run("classify " + spec("example4") + " -o " + out.string()) == 0);
    const auto j = json::parse(slurp(out));
    CHECK(j["regularity"]["regular"] == true);
    CHECK(j["complete_regularity"]["completely_regular"] == false);

    const auto piped = scratch() / "classify_stdout.json";
    REQUIRE(run("classify " + spec("example4"), piped.string()) == 0);
    CHECK(json::parse(slurp(piped)) == j);
}

TEST_CASE("scan command") {
    const auto out = scratch() / "scan.json";
    const auto csv = scratch() / "scan.csv";
    REQUIRE(run("scan " + spec("dirichlet2") + " --samples 6 --grid 16 --csv " + csv.string() + " -o " +
                out.string()) == 0);
    const auto j = json::parse(slurp(out));
    CHECK(j["kind"] == "green");
    CHECK(j["samples"] == 6);
    CHECK(j["bound_violated"] == false);
    const auto text = slurp(csv);
    CHECK(first_line(text) == "abs_rho,arg_rho,quantity,log_abs_rho,log_quantity");
    CHECK(std::count(text.begin(), text.end(), '\n') == 7);

    CHECK(run("scan " + spec("dirichlet2") + " --ray 0") == 1);
    CHECK(run("scan " + spec("example4") + " --kind resolvent --samples 4 --rmax 20") == 0);
}

TEST_CASE("spectrum command") {
    const auto out = scratch() / "spectrum.json";
    REQUIRE(run("spectrum " + spec("dirichlet2") + " --rmax 10 --sector -0.3 0.3 -o " + out.string()) == 0);
    const auto j = json::parse(slurp(out));
    REQUIRE(j["roots"].size() == 3);
    CHECK(j["roots"][0]["rho"][0].get<double>() == doctest::Approx(3.14159265358979));
}

TEST_CASE("numrange command") {
    const auto out = scratch() / "numrange.json";
    const auto csv = scratch() / "numrange.csv";
    REQUIRE(run("numrange " + spec("example4") + " --max-dim 32 --angles 16 --csv " + csv.string() + " -o " +
                out.string()) == 0);
    const auto j = json::parse(slurp(out));
    CHECK(j["verdict"] == "whole_plane");
    CHECK(j["evidence"].size() == 3);
    CHECK(first_line(slurp(csv)) == "N,theta,sigma");
    CHECK(run("numrange " + spec("shift1")) == 4);
}

TEST_CASE("report command is reproducible") {
    const auto a = scratch() / "report_a.json";
    const auto b = scratch() / "report_b.json";
    REQUIRE(run("report " + spec("example4") + " -o " + a.string()) == 0);
    REQUIRE(run("--jobs 3 report " + spec("example4") + " -o " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(json::parse(slurp(a))["tool"] == "birkreg");
}
