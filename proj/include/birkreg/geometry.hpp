#pragma once

#include <optional>
#include <span>
#include <vector>

#include "birkreg/errors.hpp"

namespace birkreg {

/// Sorted directions in [0, 2 pi).
struct RaySet {
    std::vector<double> angles;
};

enum class RayConvention {
    /// Directions where Re(i eps_k rho) = 0: {+-pi/2 - arg(i eps_k)}.
    exponent_balance,
    /// The literal +-(pi/(2n) + arg(i eps_k)) variant, kept for comparison.
    shifted,
};

RaySet critical_rays(int n, RayConvention convention = RayConvention::exponent_balance);

/// Closed angular interval [begin, end]; begin in [0, 2 pi), end may exceed 2 pi.
struct Sector {
    double begin = 0.0;
    double end = 0.0;
    double bisector() const { return 0.5 * (begin + end); }
    bool contains(double angle) const;
};

struct SectorSet {
    std::vector<Sector> sectors;
    double epsilon = 0.0;
};

/// Closed sectors left after removing open sectors of opening epsilon
/// bisected by the critical rays. Requires 0 < epsilon < pi/(2n).
SectorSet omega_sectors(int n, double epsilon);

struct DiskSet {
    std::vector<cplx> centers;
    double radius = 0.0;
};

/// All n-th roots of every lambda, as disk centers of the given radius.
DiskSet disks_from_eigenvalues(std::span<const cplx> lambdas, int n, double radius);

struct Clearance {
    /// Intersections persist into the outer half of [0, r_max].
    bool blocked = false;
    /// Smallest R0 such that the ray beyond R0 meets no disk (within r_max).
    double radius = 0.0;
};

Clearance ray_clearance(double angle, const DiskSet& disks, double r_max);

/// First l in 1..l_max with |rho_{j+l}| / |rho_j| >= 2 for every j.
std::optional<int> is_rare(std::span<const double> moduli, int l_max);

/// Angle reduced to [0, 2 pi).
double wrap_angle(double a);

/// Distance on the circle, in [0, pi].
double angular_distance(double a, double b);

/// Distance from a direction to the nearest critical ray.
double distance_to_critical(double angle, int n);

}  // namespace birkreg
