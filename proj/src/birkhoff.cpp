#include "birkreg/birkhoff.hpp"

#include <cmath>

namespace birkreg {

cplx unit_root(long k, int n) {
    const long r = ((k % n) + n) % n;
    if ((4 * r) % n == 0) {
        switch ((4 * r) / n) {
            case 0: return {1.0, 0.0};
            case 1: return {0.0, 1.0};
            case 2: return {-1.0, 0.0};
            default: return {0.0, -1.0};
        }
    }
    const double phase = 2.0 * pi * static_cast<double>(r) / n;
    return {std::cos(phase), std::sin(phase)};
}

Eigen::MatrixXcd theta_matrix(std::span<const LeadingForm> lf, int n, bool swap_middle) {
    if (static_cast<int>(lf.size()) != n) throw argument_error("need exactly n leading forms");
    const int m = (n + 1) / 2;
    Eigen::MatrixXcd t(n, n);
    for (int j = 0; j < n; ++j) {
        const auto& f = lf[static_cast<size_t>(j)];
        for (int i = 1; i <= n; ++i) {
            const bool use_a = swap_middle ? (i < m) : (i <= m);
            t(j, i - 1) = (use_a ? f.a : f.b) * unit_root(static_cast<long>(i - 1) * f.order, n);
        }
    }
    return t;
}

cplx determinant(const Eigen::MatrixXcd& m) {
    if (m.rows() == 0) return 1.0;
    return Eigen::PartialPivLU<Eigen::MatrixXcd>(m).determinant();
}

ThetaPair theta_determinants(std::span<const LeadingForm> lf, int n) {
    ThetaPair out;
    out.theta0 = determinant(theta_matrix(lf, n, false));
    if (n % 2 == 1) out.theta1 = determinant(theta_matrix(lf, n, true));
    return out;
}

double default_regularity_tol(const NormalizedBC& nbc) {
    double prod = 1.0;
    for (const auto& row : nbc.rows) prod *= row.max_abs();
    return 1e-9 * prod;
}

RegularityVerdict classify_regularity(const NormalizedBC& nbc, std::optional<double> tol) {
    RegularityVerdict v;
    const auto theta = theta_determinants(nbc.leading, nbc.n());
    v.theta0 = theta.theta0;
    v.theta1 = theta.theta1;
    v.kappa = nbc.total_order;
    v.orders = nbc.orders;
    v.tol = tol.value_or(default_regularity_tol(nbc));
    v.regular = std::abs(v.theta0) > v.tol && (!v.theta1 || std::abs(*v.theta1) > v.tol);
    return v;
}

RegularityVerdict classify_regularity(const OperatorSpec& spec, std::optional<double> tol) {
    return classify_regularity(normalize(spec), tol);
}

}  // namespace birkreg
