#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include <json.hpp>

#include "birkreg/birkhoff.hpp"
#include "birkreg/numrange.hpp"
#include "birkreg/quasiform.hpp"
#include "birkreg/spectral.hpp"

namespace birkreg {

inline constexpr const char* version = "0.1.0";

struct ScanRequest {
    std::string kind = "green";  // green | resolvent
    std::optional<double> ray;   // default pi/(2n)
    double r_min = 5.0;
    double r_max = 60.0;
    int samples = 24;
    int grid = 48;
};

struct SpectrumRequest {
    double r_min = 0.25;
    double r_max = 20.0;
    std::optional<std::pair<double, double>> sector;
    std::optional<double> epsilon;  // default pi/(4n)
    double delta = 0.5;
    int l_max = 10;
};

struct ReportOptions {
    std::optional<double> tol;
    std::uint64_t seed = 0;
    int jobs = 1;
    int form_trials = 50;
    int gram_count = 16;
    ScanRequest scan;
    SpectrumRequest spectrum;
    RangeOptions range;
};

nlohmann::json to_json(const RegularityVerdict& v);
nlohmann::json to_json(const CompleteRegularityReport& r);
nlohmann::json not_applicable(const std::string& reason);

/// Regularity verdict plus, for divergence form, the complete-regularity test.
nlohmann::json classify(const OperatorSpec& spec, const ReportOptions& options = {});

SpectralScan run_scan(const NormalizedBC& nbc, const ScanRequest& request, int jobs = 1);

/// Exponent the regular case should show: 1 - n for kernels, -n for resolvents.
double expected_exponent(const std::string& kind, int n);

/// Fitted exponent above expected + band counts as a violated bound.
inline constexpr double exponent_band = 0.5;

nlohmann::json scan_summary(const SpectralScan& scan, int n);

/// Columns abs_rho, arg_rho, quantity, log_abs_rho, log_quantity.
std::string scan_csv(const SpectralScan& scan);

/// Roots, bracket groups, rarity per Omega(epsilon) sector and a clearance table.
nlohmann::json spectrum(const NormalizedBC& nbc, const SpectrumRequest& request);

nlohmann::json geometry_summary(int n, std::optional<double> epsilon = std::nullopt);

/// Runs every applicable analysis; failures are recorded under "errors"
/// and the remaining sections are kept.
nlohmann::json build_report(const OperatorSpec& spec, const ReportOptions& options = {});

}  // namespace birkreg
