#include "birkreg/quadrature.hpp"

#include <cmath>

#include "birkreg/errors.hpp"

namespace birkreg {

QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw argument_error("quadrature needs at least one node");
    QuadratureRule rule;
    rule.nodes.resize(static_cast<size_t>(n));
    rule.weights.resize(static_cast<size_t>(n));
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        double p0 = 1.0, p1 = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        const auto lo = static_cast<size_t>(i);
        const auto hi = static_cast<size_t>(n - 1 - i);
        rule.nodes[lo] = mid - half * z;
        rule.nodes[hi] = mid + half * z;
        rule.weights[lo] = half * w;
        rule.weights[hi] = half * w;
    }
    return rule;
}

Eigen::MatrixXd legendre_jet(int degree, int max_order, double x) {
    const double t = 2.0 * x - 1.0;
    // P(s, i) = P_i^(s)(t) via (i+1) P_{i+1}^(s) = (2i+1)(t P_i^(s) + s P_i^(s-1)) - i P_{i-1}^(s).
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(max_order + 1, degree + 1);
    for (int s = 0; s <= max_order; ++s) {
        p(s, 0) = s == 0 ? 1.0 : 0.0;
        if (degree >= 1) p(s, 1) = s == 0 ? t : (s == 1 ? 1.0 : 0.0);
        for (int i = 1; i < degree; ++i) {
            const double lower = s > 0 ? p(s - 1, i) : 0.0;
            p(s, i + 1) = ((2.0 * i + 1.0) * (t * p(s, i) + s * lower) - i * p(s, i - 1)) / (i + 1.0);
        }
    }
    for (int i = 0; i <= degree; ++i) {
        double scale = std::sqrt(2.0 * i + 1.0);
        for (int s = 0; s <= max_order; ++s) {
            p(s, i) *= scale;
            scale *= 2.0;
        }
    }
    return p;
}

}  // namespace birkreg
