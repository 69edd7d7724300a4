#include "birkreg/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace birkreg::linalg {

namespace {

double threshold(const Eigen::VectorXd& sv, double cutoff, double scale) {
    const double s = scale > 0.0 ? scale : (sv.size() > 0 ? sv(0) : 0.0);
    return cutoff * s;
}

}  // namespace

int numerical_rank(const Matrix& a, double cutoff, double scale) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(a);
    const auto& sv = svd.singularValues();
    const double t = threshold(sv, cutoff, scale);
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > t) ++r;
    return r;
}

Matrix range_basis(const Matrix& a, double cutoff, double scale) {
    if (a.size() == 0) return Matrix(a.rows(), 0);
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    const double t = threshold(sv, cutoff, scale);
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > t) ++r;
    return svd.matrixU().leftCols(r);
}

Matrix null_basis(const Matrix& a, double cutoff, double scale) {
    if (a.rows() == 0) return Matrix::Identity(a.cols(), a.cols());
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double t = threshold(sv, cutoff, scale);
    Eigen::Index r = 0;
    while (r < sv.size() && sv(r) > t) ++r;
    return svd.matrixV().rightCols(a.cols() - r);
}

std::vector<double> principal_angles(const Matrix& q1, const Matrix& q2) {
    if (q1.cols() != q2.cols()) throw argument_error("principal angles need subspaces of equal dimension");
    const Eigen::Index d = q1.cols();
    if (d == 0) return {};
    Eigen::JacobiSVD<Matrix> cos_svd(q1.adjoint() * q2);
    const Matrix residual = q2 - q1 * (q1.adjoint() * q2);
    Eigen::JacobiSVD<Matrix> sin_svd(residual);
    std::vector<double> angles(static_cast<size_t>(d));
    // cos values descend, sin values descend; pair the i-th smallest angle
    // with the i-th largest cosine and the i-th smallest sine.
    const auto& c = cos_svd.singularValues();
    const auto& s = sin_svd.singularValues();
    for (Eigen::Index i = 0; i < d; ++i) {
        const double cosv = std::clamp(c(i), 0.0, 1.0);
        const Eigen::Index si = d - 1 - i;
        const double sinv = si < s.size() ? std::clamp(s(si), 0.0, 1.0) : 0.0;
        angles[static_cast<size_t>(i)] = cosv > std::sqrt(0.5) ? std::asin(sinv) : std::acos(cosv);
    }
    std::sort(angles.begin(), angles.end());
    return angles;
}

double spectral_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

}  // namespace birkreg::linalg
