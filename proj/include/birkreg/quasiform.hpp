#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "birkreg/model.hpp"

namespace birkreg {

/// sum_s c_s(x) y^(s)(x); index s is the derivative order.
using DiffExpr = std::vector<Poly>;

/// Quasi-derivatives y^[0..2m] of a divergence-form operator, each expressed
/// through ordinary derivatives with polynomial coefficients. The last one,
/// y^[2m], equals l(y).
std::vector<DiffExpr> quasi_derivatives(const DivergenceForm& form);

/// Maps the ordinary jet (y, ..., y^(2m-1)) at a point to the quasi jet
/// (y^[0], ..., y^[2m-1]).
struct QuasiTransition {
    int point = 0;
    Eigen::MatrixXcd matrix;
};

QuasiTransition quasi_transition(const OperatorSpec& spec, int point);

/// Boundary conditions written as B y^ + C yv = 0 with
///   y^ = (y(0), ..., y^(m-1)(0), y(1), ..., y^(m-1)(1)),
///   yv = (y^[2m-1](0), ..., y^[m](0), -y^[2m-1](1), ..., -y^[m](1)).
struct SplitBC {
    Eigen::MatrixXcd B;
    Eigen::MatrixXcd C;
    int m = 0;
};

SplitBC split_bc(const OperatorSpec& spec);

/// Inverse of split_bc: ordinary-derivative rows for a given (B, C).
std::vector<BoundaryRow> rows_from_split(const OperatorSpec& spec, const SplitBC& split);

struct SubspaceTolerances {
    double rank_cutoff = 1e-10;  // relative to the largest singular value of [B | C]
    double angle_tol = 1e-8;     // radians
};

struct CompleteRegularityReport {
    bool completely_regular = false;
    Eigen::MatrixXcd preimage_basis;    // B^{-1}(im C)
    Eigen::MatrixXcd complement_basis;  // C^{2m} minus ker C
    std::vector<double> principal_angles;
    double max_angle = 0.0;
    std::optional<Eigen::MatrixXcd> A;
    SubspaceTolerances tolerances;
};

CompleteRegularityReport check_completely_regular(const SplitBC& split, const SubspaceTolerances& tol = {});

/// Minimal-norm A with (y2, x) = (A y1, x) whenever B y1 + C y2 = 0 and
/// x lies in B^{-1}(im C). A vanishes on the orthogonal complement of that
/// subspace and maps into it. Throws not_completely_regular_error.
Eigen::MatrixXcd boundary_form_matrix(const SplitBC& split, const SubspaceTolerances& tol = {});

/// y^ and yv of a polynomial.
Eigen::VectorXcd wedge_vector(const OperatorSpec& spec, const Poly& y);
Eigen::VectorXcd vee_vector(const OperatorSpec& spec, const Poly& y);

/// Orthonormal basis (monomial coefficients, columns) of the polynomials of
/// the given degree that satisfy every boundary condition.
Eigen::MatrixXcd admissible_polynomials(const OperatorSpec& spec, int degree);

/// Integrated-by-parts form without the boundary part:
/// sum_k [(p_k y^(k), y^(k)) + (q_k y^(k), y^(k-1)) - (r_k y^(k-1), y^(k))] + (p_0 y, y).
cplx volume_form(const DivergenceForm& form, const Poly& y);

struct FormIdentityResult {
    double max_residual = 0.0;
    int trials = 0;
    int degree = 0;
};

/// Compares (Ly, y) with volume_form + (A y^, y^) on random admissible
/// polynomials and returns the worst relative residual.
FormIdentityResult verify_form_identity(const OperatorSpec& spec, const Eigen::MatrixXcd& A, int trials,
                                        std::uint64_t seed = 0);

}  // namespace birkreg
