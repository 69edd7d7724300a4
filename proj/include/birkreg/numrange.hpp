#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "birkreg/model.hpp"

namespace birkreg {

/// Galerkin realization of (Ly, y) on polynomials of degree N + 2m - 1 that
/// satisfy every boundary condition. Basis columns hold coefficients over the
/// orthonormal shifted Legendre polynomials.
struct Discretization {
    int dimension = 0;
    int degree = 0;
    Eigen::MatrixXcd S;
    Eigen::MatrixXcd M;
    Eigen::MatrixXcd basis;

    /// Bare pencil, no underlying operator.
    static Discretization pencil(Eigen::MatrixXcd S, Eigen::MatrixXcd M);
};

/// Form matrix F over the full Legendre basis of the given degree:
/// c^H F c = volume form + (y^v, y^) for y = sum c_i phi_i.
Eigen::MatrixXcd form_matrix(const DivergenceForm& form, int degree);

/// Rows of the boundary constraints over the same basis, each row normalized.
Eigen::MatrixXcd constraint_matrix(const OperatorSpec& spec, int degree);

Discretization discretize(const OperatorSpec& spec, int N);

struct RangeProfile {
    int dimension = 0;
    std::vector<double> theta;
    std::vector<double> sigma;

    double min_sigma() const;
};

/// sigma(theta) = largest eigenvalue of the Hermitian part of e^{i theta} S
/// after the congruence that turns M into the identity.
RangeProfile support_profile(const Discretization& disc, int angles);

enum class RangeVerdict { half_plane, whole_plane, inconclusive };

std::string to_string(RangeVerdict v);

struct HalfPlaneVerdict {
    RangeVerdict verdict = RangeVerdict::inconclusive;
    std::vector<std::pair<int, double>> evidence;  // (N, min_theta sigma_N)
    double growth_factor = 1.5;
    double bounded_slack = 0.1;
    double noise_floor = 1e-11;  // relative to the largest |sigma|
};

/// half_plane: max_N min sigma_N <= first + slack |first| + floor.
/// whole_plane: min sigma_N > floor and grows by growth_factor at each step.
/// floor = noise_floor * max |sigma| over every profile.
HalfPlaneVerdict half_plane_verdict(const std::vector<RangeProfile>& profiles, double growth_factor = 1.5);

struct RangeOptions {
    std::vector<int> dimensions{8, 16, 32, 64};
    int angles = 64;
    int max_angle_doublings = 3;
    double growth_factor = 1.5;
    int jobs = 1;
};

struct RangeAnalysis {
    std::vector<RangeProfile> profiles;
    HalfPlaneVerdict verdict;
    int angles = 0;
};

/// Profiles for every dimension; the angle grid is doubled until two
/// consecutive grids give the same verdict.
RangeAnalysis analyze_numerical_range(const OperatorSpec& spec, const RangeOptions& options = {});

std::string profiles_csv(const std::vector<RangeProfile>& profiles);
nlohmann::json to_json(const RangeAnalysis& analysis);

}  // namespace birkreg
