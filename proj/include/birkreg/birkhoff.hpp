#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "birkreg/normalize.hpp"

namespace birkreg {

/// exp(2 pi i k / n); exact when 4k/n is an integer.
cplx unit_root(long k, int n);

struct ThetaPair {
    cplx theta0;
    std::optional<cplx> theta1;  // odd n only
};

/// Matrix of the regularity determinant: column i carries a_j eps_i^{k_j}
/// for i <= m and b_j eps_i^{k_j} beyond, m = ceil(n/2). With
/// swap_middle the m-th column uses b_j instead (second odd-order number).
Eigen::MatrixXcd theta_matrix(std::span<const LeadingForm> lf, int n, bool swap_middle = false);

/// Determinant by LU with partial pivoting.
cplx determinant(const Eigen::MatrixXcd& m);

ThetaPair theta_determinants(std::span<const LeadingForm> lf, int n);

struct RegularityVerdict {
    bool regular = false;
    cplx theta0;
    std::optional<cplx> theta1;
    int kappa = 0;
    std::vector<int> orders;
    double tol = 0.0;
};

/// Default threshold: 1e-9 times the product of the row max magnitudes.
double default_regularity_tol(const NormalizedBC& nbc);

RegularityVerdict classify_regularity(const NormalizedBC& nbc, std::optional<double> tol = std::nullopt);
RegularityVerdict classify_regularity(const OperatorSpec& spec, std::optional<double> tol = std::nullopt);

}  // namespace birkreg
