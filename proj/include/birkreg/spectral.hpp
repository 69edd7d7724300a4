#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "birkreg/geometry.hpp"
#include "birkreg/normalize.hpp"

// Spectral engine for the model operator (-i)^n y^(n) under the operator's
// own boundary rows. Fundamental system: e_k(x) = exp(mu_k x), mu_k = i eps_k rho.

namespace birkreg {

/// value = mantissa * exp(log_scale), 0.5 <= |mantissa| <= 2 unless zero.
struct ScaledValue {
    cplx mantissa;
    double log_scale = 0.0;

    static ScaledValue make(cplx z, double log_scale);
    cplx value() const;
};

/// Characteristic determinant det[U_j(e_k)].
ScaledValue char_det(const NormalizedBC& nbc, cplx rho);

/// Determinant after dividing column k by exp(max(0, Re mu_k)) and row j by
/// |rho|^{k_j}; same zeros and phase as the characteristic determinant.
cplx scaled_char_det(const NormalizedBC& nbc, cplx rho);

/// Delta'(rho) / Delta(rho), computed as tr(M^{-1} M') on the scaled matrix.
cplx char_det_log_derivative(const NormalizedBC& nbc, cplx rho);

struct EigenRoot {
    cplx rho;
    cplx lambda;
    int multiplicity = 1;
    double residual = 0.0;  // |scaled_char_det(rho)|
};

/// Annulus r_min < |rho| < r_max intersected with the angular interval
/// [sector_begin, sector_end]. An interval of length >= 2 pi means the full circle.
struct RootRegion {
    double r_min = 1.0;
    double r_max = 10.0;
    double sector_begin = 0.0;
    double sector_end = 2.0 * pi;
    int grid = 8;
};

struct RootOptions {
    double residual_tol = 1e-8;
    int newton_max = 50;
    int max_depth = 40;
};

/// Argument-principle search with adaptive box splitting and Newton
/// refinement (multiplicity-aware). Roots are sorted by modulus, then argument.
std::vector<EigenRoot> find_roots(const NormalizedBC& nbc, const RootRegion& region, const RootOptions& options = {});

/// Winding number of the scaled characteristic determinant around the
/// boundary of a polar box (counterclockwise).
int count_zeros(const NormalizedBC& nbc, const RootRegion& region);

/// Eigenvalues lambda = rho^n with one root per lambda, taken from the
/// sector of opening 2 pi/n around the positive real axis (slightly rotated).
std::vector<EigenRoot> find_eigenvalues(const NormalizedBC& nbc, double r_min, double r_max,
                                        const RootOptions& options = {});

/// Green kernel G(x, xi, rho) of (L - rho^n)^{-1}: a bounded one-sided
/// particular kernel minus the solution of the boundary problem that
/// restores every boundary condition.
class GreenKernel {
public:
    /// Throws conditioning_error when the equilibrated boundary matrix has
    /// reciprocal condition below rcond_min.
    GreenKernel(const NormalizedBC& nbc, cplx rho, double rcond_min = 1e-13);

    cplx operator()(double x, double xi) const { return derivative(x, xi, 0); }

    /// d^s/dx^s G(x, xi). side: +1 takes the x > xi branch, -1 the x < xi
    /// branch, 0 picks by position (on the diagonal: x > xi, except at x = 0).
    /// Boundary conditions act on the x < xi branch at 0 and the x > xi
    /// branch at 1, so G(., 0) and G(., 1) are the one-sided limits in xi.
    cplx derivative(double x, double xi, int order, int side = 0) const;

    /// Coefficients of the boundary correction for a fixed xi.
    Eigen::VectorXcd correction(double xi) const;
    cplx evaluate(double x, double xi, const Eigen::VectorXcd& corr, int order = 0, int side = 0) const;

    int order() const { return n_; }
    cplx rho() const { return rho_; }
    double rcond() const { return rcond_; }

private:
    cplx particular(double x, double xi, int order, bool right) const;
    bool right_branch(double x, double xi) const;

    int n_;
    cplx rho_;
    std::vector<cplx> mu_;
    std::vector<cplx> weight_;
    std::vector<double> shift_;
    std::vector<bool> forward_;
    std::vector<double> row_scale_;
    std::vector<BoundaryRow> rows_;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu_;
    double rcond_ = 0.0;
};

struct ScanSample {
    cplx rho;
    double quantity = 0.0;
};

struct SpectralScan {
    std::string kind;
    double angle = 0.0;
    std::vector<ScanSample> samples;  // sorted by |rho|
    double fitted_exponent = 0.0;
    double fit_residual = 0.0;
    double prefactor = 0.0;  // M in quantity ~ M |rho|^exponent
};

/// Least-squares fit of log(quantity) against log|rho|.
void fit_decay(SpectralScan& scan);

/// radius_count radii spaced geometrically over [r_min, r_max].
std::vector<double> geometric_radii(double r_min, double r_max, int count);

struct ScanOptions {
    int grid = 48;             // lattice size for kernel suprema
    int quad_nodes = 64;       // minimum Nystrom nodes
    double nodes_per_rho = 4;  // extra Nystrom nodes per unit |rho|
    double disk_radius = 0.5;  // delta for the root-disk check
    std::optional<double> epsilon;  // Omega(epsilon) opening, default pi/(4n)
    bool check_clearance = true;
    int jobs = 1;
};

/// Nodes used by resolvent scans at a given |rho|.
int resolvent_nodes(const ScanOptions& options, double abs_rho);

/// Computes the roots near the ray and fails with ray_blocked_error if a
/// disk of radius delta around any of them meets the ray beyond r_min.
Clearance check_ray(const NormalizedBC& nbc, double angle, double r_min, double r_max, double delta);

SpectralScan green_sup_scan(const NormalizedBC& nbc, double angle, std::span<const double> radii,
                            const ScanOptions& options = {});

/// Largest singular value of the symmetric-weighted Nystrom matrix of G on
/// Gauss-Legendre nodes: the L2 norm of (L - rho^n)^{-1} in the limit.
double resolvent_norm(const NormalizedBC& nbc, cplx rho, int quad_nodes);

SpectralScan resolvent_scan(const NormalizedBC& nbc, double angle, std::span<const double> radii,
                            const ScanOptions& options = {});

/// Resolvent norms on an explicit point sequence (no ray requirement).
SpectralScan resolvent_scan_points(const NormalizedBC& nbc, std::span<const cplx> points,
                                   const ScanOptions& options = {});

/// y(x) = sum_k c_k exp(mu_k x - shift_k).
struct Eigenfunction {
    cplx rho;
    std::vector<cplx> exponents;
    std::vector<double> shifts;
    Eigen::VectorXcd coeffs;

    cplx operator()(double x) const { return derivative(x, 0); }
    cplx derivative(double x, int order) const;
};

/// Null vectors of the boundary matrix at a root (unit coefficient norm).
/// A double root may return one or two functions depending on its geometric
/// multiplicity; associated functions are not constructed.
std::vector<Eigenfunction> eigenfunctions(const NormalizedBC& nbc, const EigenRoot& root);

/// (f, g) in L2(0, 1), closed form.
cplx inner(const Eigenfunction& f, const Eigenfunction& g);

struct BracketGroup {
    std::vector<cplx> lambdas;
    int size = 0;  // counts multiplicity
};

/// Single-linkage grouping of eigenvalues closer than tau (1 + |lambda|^{1 - 1/n}).
std::vector<BracketGroup> bracket_groups(std::span<const EigenRoot> roots, int n, double tau = 1.0);

struct GramConditioning {
    int count = 0;
    double condition = 0.0;
};

struct GramOptions {
    double r_min = 0.5;
    double tau = 1.0;
};

/// Condition numbers of the Gram matrices of the first N = 4, 8, ..., count
/// normalized eigenfunctions, with each bracket orthonormalized.
std::vector<GramConditioning> gram_condition(const NormalizedBC& nbc, int count, const GramOptions& options = {});

}  // namespace birkreg
