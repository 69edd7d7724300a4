#pragma once

#include <vector>

#include <Eigen/Dense>

namespace birkreg {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b]; exact for polynomials of degree 2n - 1.
QuadratureRule gauss_legendre(int n, double a = 0.0, double b = 1.0);

/// Derivatives of the L2(0,1)-orthonormal shifted Legendre polynomials
/// phi_i(x) = sqrt(2i+1) P_i(2x - 1). Returns a (max_order + 1) x (degree + 1)
/// table: entry (s, i) = phi_i^(s)(x).
Eigen::MatrixXd legendre_jet(int degree, int max_order, double x);

}  // namespace birkreg
