#pragma once

#include <vector>

#include <Eigen/Dense>

#include "birkreg/errors.hpp"

namespace birkreg::linalg {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Orthonormal basis of the column space; singular values at or below
/// cutoff * scale are treated as zero. scale <= 0 means "largest singular value".
Matrix range_basis(const Matrix& a, double cutoff, double scale = -1.0);

/// Orthonormal basis of the null space, same cutoff convention.
Matrix null_basis(const Matrix& a, double cutoff, double scale = -1.0);

int numerical_rank(const Matrix& a, double cutoff, double scale = -1.0);

/// Principal angles (ascending) between the spans of two orthonormal bases
/// of equal dimension. Small angles come from the sine route, large ones
/// from the cosine route.
std::vector<double> principal_angles(const Matrix& q1, const Matrix& q2);

/// Largest singular value.
double spectral_norm(const Matrix& a);

}  // namespace birkreg::linalg
