// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "birkreg/report.hpp"
#include "support.hpp"

using namespace birkreg;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

NormalizedBC nbc_of(const std::string& name) { return normalize(support::gallery(name)); }

// Regularity matrix from the definition, eps_i = exp(2 pi i (i-1)/n).
cplx theta_oracle(const NormalizedBC& nbc, bool swap) {
    const int n = nbc.n();
    const int m = (n + 1) / 2;
    Eigen::MatrixXcd t(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 1; i <= n; ++i) {
            const auto& f = nbc.leading[static_cast<size_t>(j)];
            const bool use_a = i <= m && !(swap && i == m);
            t(j, i - 1) = (use_a ? f.a : f.b) * std::pow(std::polar(1.0, 2.0 * pi * (i - 1) / n), f.order);
        }
    return support::cofactor_det(t);
}

SpectralScan scan(const std::string& name, const std::string& kind, double angle, double r_min, double r_max,
                  int samples) {
    const auto nbc = nbc_of(name);
    const auto radii = geometric_radii(r_min, r_max, samples);
    ScanOptions opts;
    opts.jobs = 4;
    return kind == "green" ? green_sup_scan(nbc, angle, radii, opts) : resolvent_scan(nbc, angle, radii, opts);
}

void criterion_1(Outcome& o) {
    const auto start = clock_type::now();
    const auto j = classify(support::gallery("example4"));
    const double t = seconds_since(start);
    const bool regular = j["regularity"]["regular"];
    const bool complete = j["complete_regularity"]["completely_regular"];
    o.detail << "regular=" << regular << " completely_regular=" << complete << " time=" << t << "s";
    o.require(regular && !complete, "verdicts");
    o.require(t < 1.0, "runtime");
}

void criterion_2(Outcome& o) {
    const std::vector<std::pair<std::string, double>> cases{
        {"dirichlet2", 1.0}, {"periodic2", -2.0}, {"cauchy2", 0.0}, {"example4", 4.0}};
    for (const auto& [name, expected] : cases) {
        const auto nbc = nbc_of(name);
        const auto t = theta_determinants(nbc.leading, nbc.n());
        const cplx oracle = theta_oracle(nbc, false);
        o.detail << name << "=" << t.theta0.real() << " ";
        o.require(std::abs(t.theta0 - oracle) < 1e-12, name + " oracle");
        o.require(std::abs(std::abs(oracle) - std::abs(expected)) < 1e-12 && std::abs(oracle.imag()) < 1e-12,
                  name + " value");
    }
    const auto nbc = nbc_of("shift1");
    const auto t = theta_determinants(nbc.leading, 1);
    o.detail << "shift1=(" << t.theta0.real() << "," << (t.theta1 ? t.theta1->real() : 0.0) << ")";
    o.require(t.theta0 == theta_oracle(nbc, false) && t.theta0 == cplx(1.0), "odd theta0");
    o.require(t.theta1 && *t.theta1 == theta_oracle(nbc, true) && *t.theta1 == cplx(-1.0), "odd theta1");
}

void criterion_3(Outcome& o) {
    const auto start = clock_type::now();
    const auto d = scan("dirichlet2", "green", pi / 4, 10.0, 200.0, 24);
    std::vector<double> scaled;
    for (const auto& s : d.samples) scaled.push_back(s.quantity * std::abs(s.rho));
    std::vector<double> sorted = scaled;
    std::sort(sorted.begin(), sorted.end());
    const double ratio = sorted.back() / sorted[sorted.size() / 2];
    const auto e = scan("example4", "green", pi / 8, 5.0, 60.0, 24);
    const auto c = scan("cauchy2", "green", pi / 4, 5.0, 60.0, 24);
    const double t = seconds_since(start);
    o.detail << "dirichlet2=" << d.fitted_exponent << " max/median=" << ratio << " example4=" << e.fitted_exponent
             << " cauchy2=" << c.fitted_exponent << " time=" << t << "s";
    o.require(std::abs(d.fitted_exponent + 1.0) <= 0.15, "dirichlet2 exponent");
    o.require(ratio <= 2.0, "dirichlet2 max/median");
    o.require(std::abs(e.fitted_exponent + 3.0) <= 0.3, "example4 exponent");
    o.require(c.fitted_exponent >= 0.0, "cauchy2 violation");
    o.require(t < 60.0, "runtime");
}

void criterion_4(Outcome& o) {
    const auto d = scan("dirichlet2", "resolvent", pi / 4, 5.0, 60.0, 24);
    const cplx rho = std::polar(2.0, pi / 4);
    const double norm = resolvent_norm(nbc_of("dirichlet2"), rho, 64);
    const double oracle = 1.0 / std::abs(rho * rho - pi * pi);
    const auto e = scan("example4", "resolvent", pi / 8, 5.0, 60.0, 24);
    o.detail << "dirichlet2=" << d.fitted_exponent << " norm=" << norm << " oracle=" << oracle
             << " example4=" << e.fitted_exponent;
    o.require(std::abs(d.fitted_exponent + 2.0) <= 0.2, "dirichlet2 exponent");
    o.require(std::abs(norm / 0.0939 - 1.0) <= 0.02 && std::abs(norm / oracle - 1.0) <= 0.02, "pointwise norm");
    o.require(std::abs(e.fitted_exponent + 4.0) <= 0.4, "example4 exponent");
}

void criterion_5(Outcome& o) {
    const auto d = nbc_of("dirichlet2");
    const auto roots = find_eigenvalues(d, 1.0, 64.0);
    double worst = roots.size() == 20 ? 0.0 : 1.0;
    for (size_t j = 0; j < std::min<size_t>(roots.size(), 20); ++j)
        worst = std::max(worst, std::abs(roots[j].rho - pi * static_cast<double>(j + 1)));
    o.detail << "dirichlet roots=" << roots.size() << " max_err=" << worst;
    o.require(roots.size() == 20 && worst <= 1e-8, "dirichlet roots");

    const auto p = find_eigenvalues(nbc_of("periodic2"), 1.0, 40.0);
    bool periodic_ok = p.size() == 6;
    for (size_t j = 0; j < p.size(); ++j)
        periodic_ok = periodic_ok && p[j].multiplicity == 2 &&
                      std::abs(std::abs(p[j].rho) - 2.0 * pi * static_cast<double>(j + 1)) <= 1e-8;
    o.detail << " periodic roots=" << p.size();
    o.require(periodic_ok, "periodic roots");

    int largest = 0;
    for (const auto& name : support::gallery_names()) {
        const auto nbc = nbc_of(name);
        if (!classify_regularity(nbc).regular) continue;
        const auto r = find_eigenvalues(nbc, 0.5, 40.0);
        for (const auto& g : bracket_groups(r, nbc.n())) largest = std::max(largest, g.size);
    }
    o.detail << " max_bracket=" << largest;
    o.require(largest <= 2, "bracket size");

    std::vector<cplx> lambdas;
    for (const auto& r : roots) lambdas.push_back(r.lambda);
    const auto disks = disks_from_eigenvalues(lambdas, 2, 0.5);
    bool open_rays = true;
    for (double a : {pi / 4, pi / 2, 3 * pi / 4, 5 * pi / 4, 3 * pi / 2, 7 * pi / 4}) {
        const auto c = ray_clearance(a, disks, 64.0);
        open_rays = open_rays && !c.blocked && std::isfinite(c.radius);
    }
    const auto real_axis = ray_clearance(0.0, disks, 64.0);
    o.detail << " real_axis_blocked=" << real_axis.blocked;
    o.require(open_rays, "non-critical rays clear");
    o.require(real_axis.blocked, "real axis blocked");
}

void criterion_6(Outcome& o) {
    const auto ex = check_completely_regular(split_bc(support::gallery("example4")));
    o.detail << "example4 angle=" << ex.max_angle << " verdict=" << ex.completely_regular;
    o.require(std::abs(ex.max_angle - pi / 4) <= 1e-8 && !ex.completely_regular, "example4");
    for (const char* name : {"dirichlet2", "dirichlet4", "neumann2", "neumann4"})
        o.require(check_completely_regular(split_bc(support::gallery(name))).completely_regular, name);

    std::mt19937_64 rng(2024);
    int flips = 0;
    for (const char* name : {"example4", "dirichlet2", "dirichlet4", "neumann2", "neumann4"}) {
        auto spec = support::gallery(name);
        const bool base = check_completely_regular(split_bc(spec)).completely_regular;
        const auto rows = spec.rows;
        for (int trial = 0; trial < 100; ++trial) {
            spec.rows = support::recombine(rows, support::random_invertible(spec.order, rng));
            if (check_completely_regular(split_bc(spec)).completely_regular != base) ++flips;
        }
    }
    o.detail << " recombination flips=" << flips;
    o.require(flips == 0, "recombination invariance");
}

// (p_0 y, y) + sum_k (p_k y^(k), y^(k)) + (q_k y^(k), y^(k-1)) - (r_k y^(k-1), y^(k)) by exact integration.
cplx volume_oracle(const DivergenceForm& f, const Poly& y) {
    cplx acc = inner(f.p[0] * y, y);
    for (int k = 1; k <= f.m(); ++k) {
        const auto ku = static_cast<size_t>(k);
        const Poly dk = y.derivative(k), dk1 = y.derivative(k - 1);
        acc += inner(f.p[ku] * dk, dk) + inner(f.q[ku] * dk, dk1) - inner(f.r[ku] * dk1, dk);
    }
    return acc;
}

void criterion_7(Outcome& o) {
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (const char* name : {"dirichlet2", "dirichlet4", "neumann2", "neumann4"}) {
        const auto spec = support::gallery(name);
        const auto a = boundary_form_matrix(split_bc(spec));
        const auto basis = admissible_polynomials(spec, 2 * spec.order + 4);
        const auto coefficients = classical_coefficients(spec);
        for (int trial = 0; trial < 50; ++trial) {
            Eigen::VectorXcd c(basis.cols());
            for (auto& v : c) v = support::random_complex(rng);
            const Eigen::VectorXcd mono = basis * c;
            const Poly y(std::vector<cplx>(mono.data(), mono.data() + mono.size()));
            const cplx lhs = inner(apply_operator(coefficients, y), y);
            const Eigen::VectorXcd w = wedge_vector(spec, y);
            const cplx rhs = volume_oracle(spec.divergence(), y) + w.dot(a * w);
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300));
        }
        worst = std::max(worst, verify_form_identity(spec, a, 50, 1).max_residual);
    }
    o.detail << "max relative residual=" << worst;
    o.require(worst <= 1e-8, "residual");
}

void criterion_8(Outcome& o) {
    const auto start = clock_type::now();
    RangeOptions opts;
    opts.jobs = 4;
    const auto d = analyze_numerical_range(support::gallery("dirichlet4"), opts);
    const auto e = analyze_numerical_range(support::gallery("example4"), opts);
    const double t = seconds_since(start);

    double lo = 1e300, hi = -1e300;
    for (const auto& [n, s] : d.verdict.evidence) lo = std::min(lo, s), hi = std::max(hi, s);
    const double variation = (hi - lo) / std::abs(lo);
    o.detail << "dirichlet4=" << to_string(d.verdict.verdict) << " variation=" << variation
             << " example4=" << to_string(e.verdict.verdict) << " min_sigma=";
    bool growing = e.verdict.evidence.size() == 4;
    for (size_t i = 0; i < e.verdict.evidence.size(); ++i) {
        o.detail << (i ? "," : "") << e.verdict.evidence[i].second;
        if (i) growing = growing && e.verdict.evidence[i].second >= 1.5 * e.verdict.evidence[i - 1].second &&
                         e.verdict.evidence[i - 1].second > 0.0;
    }
    o.detail << " time=" << t << "s";
    o.require(d.verdict.verdict == RangeVerdict::half_plane && variation < 0.1, "dirichlet4");
    o.require(e.verdict.verdict == RangeVerdict::whole_plane && growing, "example4");
    o.require(t < 120.0, "runtime");
}

void criterion_9(Outcome& o) {
    int counterexamples = 0, checked = 0;
    for (const auto& name : support::gallery_names()) {
        const auto spec = support::gallery(name);
        if (!spec.is_divergence()) continue;
        if (!check_completely_regular(split_bc(spec)).completely_regular) continue;
        ++checked;
        if (!classify_regularity(spec).regular) ++counterexamples;
        RangeOptions opts;
        opts.dimensions = {8, 16, 32};
        opts.jobs = 4;
        if (analyze_numerical_range(spec, opts).verdict.verdict != RangeVerdict::half_plane) ++counterexamples;
    }
    o.detail << "completely regular members=" << checked << " counterexamples=" << counterexamples;
    o.require(counterexamples == 0 && checked > 0, "implications");

    bool rarity = true;
    for (double q : {2.0, 3.0, 2.5}) {
        std::vector<double> geometric;
        for (int j = 0; j < 30; ++j) geometric.push_back(std::pow(q, j));
        rarity = rarity && is_rare(geometric, 10) == 1;
    }
    for (double step : {1.0, 0.5, 3.0}) {
        std::vector<double> arithmetic;
        for (int j = 1; j <= 200; ++j) arithmetic.push_back(step * j);
        rarity = rarity && !is_rare(arithmetic, 10).has_value();
    }
    o.detail << " rarity=" << (rarity ? "ok" : "wrong");
    o.require(rarity, "rarity");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
        {"example operator is regular but not completely regular", criterion_1},
        {"regularity determinants match cofactor oracles", criterion_2},
        {"Green kernel decay", criterion_3},
        {"resolvent decay", criterion_4},
        {"eigenvalue localization and brackets", criterion_5},
        {"complete-regularity subspace test", criterion_6},
        {"quadratic-form identity", criterion_7},
        {"numerical-range dichotomy", criterion_8},
        {"implications across the gallery", criterion_9},
    };
    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        if (!o.pass) ++failures;
        std::printf("%s  %zu  %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.str().c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
