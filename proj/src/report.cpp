#include "birkreg/report.hpp"

#include <cmath>
#include <cstdio>

#include "birkreg/geometry.hpp"

namespace birkreg {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXcd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
        rows.push_back(row);
    }
    return rows;
}

json root_to_json(const EigenRoot& r) {
    return {{"rho", complex_to_json(r.rho)},
            {"lambda", complex_to_json(r.lambda)},
            {"multiplicity", r.multiplicity},
            {"residual", r.residual}};
}

double default_ray(int n) { return pi / (2.0 * n); }

// Runs a section and records its failure instead of propagating it.
template <typename F>
json guarded(json& errors, const std::string& section, F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        errors.push_back({{"section", section}, {"message", e.what()}});
        return json{{"error", e.what()}};
    }
}

}  // namespace

json to_json(const RegularityVerdict& v) {
    json j{{"regular", v.regular},
           {"theta0", complex_to_json(v.theta0)},
           {"kappa", v.kappa},
           {"orders", v.orders},
           {"tol", v.tol}};
    j["theta1"] = v.theta1 ? complex_to_json(*v.theta1) : json(nullptr);
    return j;
}

json to_json(const CompleteRegularityReport& r) {
    json j{{"completely_regular", r.completely_regular},
           {"max_angle", r.max_angle},
           {"principal_angles", r.principal_angles},
           {"tolerances", {{"rank_cutoff", r.tolerances.rank_cutoff}, {"angle_tol", r.tolerances.angle_tol}}}};
    if (r.A) {
        j["A"] = matrix_to_json(*r.A);
        j["A_convention"] = "minimal_norm";
    } else {
        j["A"] = nullptr;
    }
    return j;
}

json not_applicable(const std::string& reason) { return {{"status", "not applicable"}, {"reason", reason}}; }

json classify(const OperatorSpec& spec, const ReportOptions& options) {
    const auto nbc = normalize(spec);
    json j;
    j["regularity"] = to_json(classify_regularity(nbc, options.tol));
    if (spec.is_divergence())
        j["complete_regularity"] = to_json(check_completely_regular(split_bc(spec)));
    else
        j["complete_regularity"] = not_applicable("operator is not in divergence form");
    return j;
}

SpectralScan run_scan(const NormalizedBC& nbc, const ScanRequest& request, int jobs) {
    const auto radii = geometric_radii(request.r_min, request.r_max, request.samples);
    ScanOptions opts;
    opts.grid = request.grid;
    opts.jobs = jobs;
    const double ray = request.ray.value_or(default_ray(nbc.n()));
    if (request.kind == "green") return green_sup_scan(nbc, ray, radii, opts);
    if (request.kind == "resolvent") return resolvent_scan(nbc, ray, radii, opts);
    throw argument_error("unknown scan kind '" + request.kind + "' (expected green or resolvent)");
}

double expected_exponent(const std::string& kind, int n) {
    if (kind == "green") return 1.0 - n;
    if (kind == "resolvent") return -static_cast<double>(n);
    throw argument_error("unknown scan kind '" + kind + "'");
}

json scan_summary(const SpectralScan& scan, int n) {
    const double expected = expected_exponent(scan.kind, n);
    return {{"kind", scan.kind},
            {"angle", scan.angle},
            {"samples", scan.samples.size()},
            {"r_min", std::abs(scan.samples.front().rho)},
            {"r_max", std::abs(scan.samples.back().rho)},
            {"fitted_exponent", scan.fitted_exponent},
            {"fit_residual", scan.fit_residual},
            {"prefactor", scan.prefactor},
            {"expected_exponent", expected},
            {"band", exponent_band},
            {"bound_violated", scan.fitted_exponent > expected + exponent_band}};
}

std::string scan_csv(const SpectralScan& scan) {
    std::string out = "abs_rho,arg_rho,quantity,log_abs_rho,log_quantity\n";
    char buf[160];
    for (const auto& s : scan.samples) {
        const double r = std::abs(s.rho);
        std::snprintf(buf, sizeof buf, "%.12e,%.12e,%.12e,%.12e,%.12e\n", r, std::arg(s.rho), s.quantity, std::log(r),
                      std::log(s.quantity));
        out += buf;
    }
    return out;
}

json spectrum(const NormalizedBC& nbc, const SpectrumRequest& request) {
    const int n = nbc.n();
    RootRegion region{request.r_min, request.r_max, 0.0, 2.0 * pi, 8};
    if (request.sector) {
        region.sector_begin = request.sector->first;
        region.sector_end = request.sector->second;
    }
    const auto roots = find_roots(nbc, region);
    json j;
    j["region"] = {{"r_min", region.r_min},
                   {"r_max", region.r_max},
                   {"sector", {region.sector_begin, region.sector_end}}};
    j["roots"] = json::array();
    for (const auto& r : roots) j["roots"].push_back(root_to_json(r));

    const auto eigen = find_eigenvalues(nbc, request.r_min, request.r_max);
    const auto groups = bracket_groups(eigen, n);
    int largest = 0;
    j["brackets"] = json::array();
    for (const auto& g : groups) {
        json lambdas = json::array();
        for (const auto& l : g.lambdas) lambdas.push_back(complex_to_json(l));
        j["brackets"].push_back({{"lambdas", lambdas}, {"size", g.size}});
        largest = std::max(largest, g.size);
    }
    j["max_bracket_size"] = largest;
    j["bracket_over_two"] = largest > 2;

    const double epsilon = request.epsilon.value_or(pi / (4.0 * n));
    const auto sectors = omega_sectors(n, epsilon);
    j["rarity"] = json::array();
    for (const auto& s : sectors.sectors) {
        std::vector<double> moduli;
        for (const auto& r : roots)
            if (s.contains(std::arg(r.rho))) moduli.push_back(std::abs(r.rho));
        std::sort(moduli.begin(), moduli.end());
        const auto l = is_rare(moduli, request.l_max);
        j["rarity"].push_back({{"sector", {s.begin, s.end}},
                               {"count", moduli.size()},
                               {"l", l ? json(*l) : json(nullptr)}});
    }

    std::vector<cplx> lambdas;
    for (const auto& r : eigen) lambdas.push_back(r.lambda);
    const auto disks = disks_from_eigenvalues(lambdas, n, request.delta);
    std::vector<double> rays;
    for (const auto& s : sectors.sectors) rays.push_back(s.bisector());
    for (double a : critical_rays(n).angles) rays.push_back(a);
    std::sort(rays.begin(), rays.end());
    j["clearance"] = json::array();
    for (double a : rays) {
        const auto c = ray_clearance(a, disks, request.r_max);
        j["clearance"].push_back({{"angle", a}, {"blocked", c.blocked}, {"radius", c.radius}});
    }
    j["delta"] = request.delta;
    j["epsilon"] = epsilon;
    return j;
}

json geometry_summary(int n, std::optional<double> epsilon) {
    const double eps = epsilon.value_or(pi / (4.0 * n));
    json sectors = json::array();
    for (const auto& s : omega_sectors(n, eps).sectors) sectors.push_back({s.begin, s.end});
    return {{"critical_rays", critical_rays(n).angles}, {"epsilon", eps}, {"omega_sectors", sectors}};
}

json build_report(const OperatorSpec& spec, const ReportOptions& options) {
    const int n = spec.order;
    json errors = json::array();
    json r;
    r["tool"] = "birkreg";
    r["version"] = version;
    r["seed"] = options.seed;
    r["spec"] = to_json(spec);

    const auto nbc = normalize(spec);
    const auto verdict = classify_regularity(nbc, options.tol);
    r["regularity"] = to_json(verdict);

    std::optional<CompleteRegularityReport> cr;
    if (spec.is_divergence()) {
        r["complete_regularity"] = guarded(errors, "complete_regularity", [&] {
            cr = check_completely_regular(split_bc(spec));
            return to_json(*cr);
        });
        if (cr && cr->A) {
            r["form_identity"] = guarded(errors, "form_identity", [&] {
                const auto res = verify_form_identity(spec, *cr->A, options.form_trials, options.seed);
                return json{{"max_residual", res.max_residual},
                            {"trials", res.trials},
                            {"degree", res.degree},
                            {"seed", options.seed},
                            {"tol", 1e-8},
                            {"passed", res.max_residual <= 1e-8}};
            });
        } else {
            r["form_identity"] = not_applicable("no boundary-form matrix without complete regularity");
        }
        r["numrange"] = guarded(errors, "numrange", [&] {
            auto range = options.range;
            range.jobs = options.jobs;
            return to_json(analyze_numerical_range(spec, range));
        });
    } else {
        r["complete_regularity"] = not_applicable("operator is not in divergence form");
        r["form_identity"] = not_applicable("operator is not in divergence form");
        r["numrange"] = not_applicable("operator is not in divergence form");
    }

    r["geometry"] = guarded(errors, "geometry", [&] { return geometry_summary(n, options.spectrum.epsilon); });

    json scans = json::object();
    for (const char* kind : {"green", "resolvent"}) {
        scans[kind] = guarded(errors, std::string("scan.") + kind, [&] {
            auto req = options.scan;
            req.kind = kind;
            return scan_summary(run_scan(nbc, req, options.jobs), n);
        });
    }
    r["scans"] = scans;

    r["spectrum"] = guarded(errors, "spectrum", [&] { return spectrum(nbc, options.spectrum); });

    if (verdict.regular) {
        r["gram"] = guarded(errors, "gram", [&] {
            json g = json::array();
            for (const auto& c : gram_condition(nbc, options.gram_count)) g.push_back({{"N", c.count}, {"condition", c.condition}});
            return g;
        });
    } else {
        r["gram"] = not_applicable("eigenfunction system of a non-regular operator");
    }

    json consistency;
    consistency["complete_implies_regular"] = !(cr && cr->completely_regular) || verdict.regular;
    if (r["numrange"].contains("verdict"))
        consistency["complete_implies_half_plane"] =
            !(cr && cr->completely_regular) || r["numrange"]["verdict"] == "half_plane";
    r["consistency"] = consistency;
    r["errors"] = errors;
    return r;
}

}  // namespace birkreg
