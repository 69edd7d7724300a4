#include "birkreg/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace birkreg {

double wrap_angle(double a) {
    double r = std::fmod(a, 2.0 * pi);
    if (r < 0.0) r += 2.0 * pi;
    if (r >= 2.0 * pi) r -= 2.0 * pi;
    return r;
}

double angular_distance(double a, double b) {
    const double d = wrap_angle(a - b);
    return std::min(d, 2.0 * pi - d);
}

bool Sector::contains(double angle) const {
    const double a = wrap_angle(angle);
    const double eps = 1e-14;
    return (a >= begin - eps && a <= end + eps) || (a + 2.0 * pi >= begin - eps && a + 2.0 * pi <= end + eps);
}

RaySet critical_rays(int n, RayConvention convention) {
    if (n < 1) throw argument_error("order must be positive");
    std::vector<double> raw;
    for (int k = 1; k <= n; ++k) {
        // arg(i eps_k) = pi/2 + 2 pi (k-1)/n
        const double arg_alpha = pi / 2 + 2.0 * pi * (k - 1) / n;
        if (convention == RayConvention::exponent_balance) {
            raw.push_back(pi / 2 - arg_alpha);
            raw.push_back(-pi / 2 - arg_alpha);
        } else {
            raw.push_back(pi / (2.0 * n) + arg_alpha);
            raw.push_back(-(pi / (2.0 * n) + arg_alpha));
        }
    }
    for (auto& a : raw) {
        a = wrap_angle(a);
        if (2.0 * pi - a < 1e-12) a = 0.0;
    }
    std::sort(raw.begin(), raw.end());
    RaySet out;
    for (double a : raw)
        if (out.angles.empty() || a - out.angles.back() > 1e-12) out.angles.push_back(a);
    if (out.angles.size() > 1 && out.angles.front() + 2.0 * pi - out.angles.back() <= 1e-12) out.angles.pop_back();
    return out;
}

SectorSet omega_sectors(int n, double epsilon) {
    if (!(epsilon > 0.0) || !(epsilon < pi / (2.0 * n)))
        throw argument_error("epsilon must lie in (0, pi/(2n))");
    const auto rays = critical_rays(n).angles;
    SectorSet out;
    out.epsilon = epsilon;
    for (size_t i = 0; i < rays.size(); ++i) {
        const double next = i + 1 < rays.size() ? rays[i + 1] : rays.front() + 2.0 * pi;
        out.sectors.push_back({rays[i] + epsilon / 2, next - epsilon / 2});
    }
    return out;
}

DiskSet disks_from_eigenvalues(std::span<const cplx> lambdas, int n, double radius) {
    DiskSet out;
    out.radius = radius;
    for (const auto& lambda : lambdas) {
        const double mod = std::pow(std::abs(lambda), 1.0 / n);
        const double arg = std::arg(lambda);
        for (int k = 0; k < n; ++k) out.centers.push_back(std::polar(mod, (arg + 2.0 * pi * k) / n));
    }
    return out;
}

Clearance ray_clearance(double angle, const DiskSet& disks, double r_max) {
    Clearance out;
    const cplx dir = std::polar(1.0, -angle);
    for (const auto& c : disks.centers) {
        const cplx rel = c * dir;  // center in ray-aligned coordinates
        const double off = std::abs(rel.imag());
        if (off > disks.radius) continue;
        const double half = std::sqrt(disks.radius * disks.radius - off * off);
        const double hi = rel.real() + half;
        if (hi < 0.0) continue;
        out.radius = std::max(out.radius, hi);
    }
    out.blocked = out.radius > 0.5 * r_max;
    return out;
}

std::optional<int> is_rare(std::span<const double> moduli, int l_max) {
    const auto len = static_cast<int>(moduli.size());
    for (int l = 1; l <= l_max; ++l) {
        bool ok = true;
        for (int j = 0; j + l < len && ok; ++j)
            ok = moduli[static_cast<size_t>(j + l)] >= 2.0 * moduli[static_cast<size_t>(j)];
        if (ok) return l;
    }
    return std::nullopt;
}

double distance_to_critical(double angle, int n) {
    double best = 2.0 * pi;
    for (double r : critical_rays(n).angles) best = std::min(best, angular_distance(angle, r));
    return best;
}

}  // namespace birkreg
