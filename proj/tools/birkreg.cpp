// birkreg: regularity checks for two-point boundary value problems.
//
// Exit codes:
//   0  success (classify: operator is regular)
//   1  computation failed (blocked ray, root finding, conditioning)
//   2  usage error
//   3  classify: operator is not regular
//   4  invalid input (unreadable file, schema violation, dependent rows)

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "birkreg/report.hpp"

namespace {

using namespace birkreg;
using nlohmann::json;

enum Exit { ok = 0, failed = 1, usage = 2, not_regular = 3, invalid = 4 };

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Birkhoff and complete regularity checks for ordinary differential operators"};
    app.require_subcommand(1);
    app.fallthrough();

    ReportOptions opts;
    double tol = 0.0;
    std::string output;
    app.add_option("--tol", tol, "Threshold for |theta| in the regularity test");
    app.add_option("--seed", opts.seed, "Seed for random test functions")->capture_default_str();
    app.add_option("--jobs", opts.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_option("-o,--output", output, "JSON output file (default stdout)");

    std::string path;
    auto* classify_cmd = app.add_subcommand("classify", "Regularity and complete-regularity verdicts");
    classify_cmd->add_option("spec", path, "Operator spec (JSON)")->required();

    auto* scan_cmd = app.add_subcommand("scan", "Green-kernel or resolvent decay along a ray");
    scan_cmd->add_option("spec", path, "Operator spec (JSON)")->required();
    double ray = 0.0;
    std::string csv;
    scan_cmd->add_option("--kind", opts.scan.kind, "green or resolvent")
        ->capture_default_str()
        ->check(CLI::IsMember({"green", "resolvent"}));
    scan_cmd->add_option("--ray", ray, "Ray angle in radians (default pi/(2n))");
    scan_cmd->add_option("--rmin", opts.scan.r_min)->capture_default_str();
    scan_cmd->add_option("--rmax", opts.scan.r_max)->capture_default_str();
    scan_cmd->add_option("--samples", opts.scan.samples)->capture_default_str();
    scan_cmd->add_option("--grid", opts.scan.grid, "Lattice size for kernel suprema")->capture_default_str();
    scan_cmd->add_option("--csv", csv, "Sample CSV file ('-' for stdout)");

    auto* spectrum_cmd = app.add_subcommand("spectrum", "Roots, brackets, rarity and ray clearance");
    spectrum_cmd->add_option("spec", path, "Operator spec (JSON)")->required();
    std::vector<double> sector;
    spectrum_cmd->add_option("--rmax", opts.spectrum.r_max)->capture_default_str();
    spectrum_cmd->add_option("--sector", sector, "Angular interval BEGIN END in radians")->expected(2);
    spectrum_cmd->add_option("--epsilon", opts.spectrum.epsilon, "Omega(epsilon) opening (default pi/(4n))");

    auto* numrange_cmd = app.add_subcommand("numrange", "Galerkin numerical range and half-plane verdict");
    numrange_cmd->add_option("spec", path, "Operator spec (JSON)")->required();
    int max_dim = 64;
    numrange_cmd->add_option("--max-dim", max_dim, "Largest dimension; dimensions double from 8")->capture_default_str();
    numrange_cmd->add_option("--angles", opts.range.angles)->capture_default_str();
    numrange_cmd->add_option("--csv", csv, "Profile CSV file ('-' for stdout)");

    auto* report_cmd = app.add_subcommand("report", "Every applicable analysis in one JSON document");
    report_cmd->add_option("spec", path, "Operator spec (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    }
    if (app.count("--tol")) opts.tol = tol;
    if (scan_cmd->count("--ray")) opts.scan.ray = ray;
    if (!sector.empty()) opts.spectrum.sector = std::make_pair(sector[0], sector[1]);

    OperatorSpec spec;
    try {
        spec = load_spec(path);
    } catch (const std::exception& e) {
        std::cerr << "birkreg: " << e.what() << "\n";
        return invalid;
    }

    try {
        if (*classify_cmd) {
            auto j = classify(spec, opts);
            write_json(output, j);
            return j["regularity"]["regular"].get<bool>() ? ok : not_regular;
        }
        const auto nbc = normalize(spec);
        if (*scan_cmd) {
            const auto scan = run_scan(nbc, opts.scan, opts.jobs);
            if (!csv.empty()) write_text(csv, scan_csv(scan));
            write_json(output, scan_summary(scan, spec.order));
        } else if (*spectrum_cmd) {
            write_json(output, spectrum(nbc, opts.spectrum));
        } else if (*numrange_cmd) {
            opts.range.dimensions.clear();
            for (int d = 8; d <= max_dim; d *= 2) opts.range.dimensions.push_back(d);
            opts.range.jobs = opts.jobs;
            const auto analysis = analyze_numerical_range(spec, opts.range);
            if (!csv.empty()) write_text(csv, profiles_csv(analysis.profiles));
            write_json(output, to_json(analysis));
        } else if (*report_cmd) {
            write_json(output, build_report(spec, opts));
        }
    } catch (const argument_error& e) {
        std::cerr << "birkreg: " << e.what() << "\n";
        return invalid;
    } catch (const std::exception& e) {
        std::cerr << "birkreg: " << e.what() << "\n";
        return failed;
    }
    return ok;
}
