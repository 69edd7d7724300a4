#pragma once

#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "birkreg/model.hpp"

namespace support {

using birkreg::cplx;

inline birkreg::OperatorSpec gallery(const std::string& name) {
    return birkreg::load_spec(std::string(BIRKREG_GALLERY_DIR) + "/" + name + ".json");
}

inline const std::vector<std::string>& gallery_names() {
    static const std::vector<std::string> names{"dirichlet2", "dirichlet4", "neumann2", "neumann4",
                                                "periodic2",  "cauchy2",    "example4", "shift1"};
    return names;
}

inline cplx random_complex(std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    return {normal(rng), normal(rng)};
}

/// Laplace expansion along the first row.
inline cplx cofactor_det(const Eigen::MatrixXcd& a) {
    const auto n = a.rows();
    if (n == 0) return 1.0;
    if (n == 1) return a(0, 0);
    cplx acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (a(0, j) == cplx(0.0)) continue;
        Eigen::MatrixXcd minor(n - 1, n - 1);
        for (Eigen::Index r = 1; r < n; ++r)
            for (Eigen::Index c = 0, k = 0; c < n; ++c)
                if (c != j) minor(r - 1, k++) = a(r, c);
        acc += ((j % 2) ? -1.0 : 1.0) * a(0, j) * cofactor_det(minor);
    }
    return acc;
}

/// Random well-conditioned invertible matrix.
inline Eigen::MatrixXcd random_invertible(int n, std::mt19937_64& rng) {
    for (;;) {
        Eigen::MatrixXcd m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = random_complex(rng);
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
        const auto& s = svd.singularValues();
        if (s(n - 1) > 0.05 * s(0)) return m;
    }
}

inline std::vector<birkreg::BoundaryRow> recombine(const std::vector<birkreg::BoundaryRow>& rows,
                                                   const Eigen::MatrixXcd& t) {
    const int n = static_cast<int>(rows.size());
    std::vector<birkreg::BoundaryRow> out(rows.size(), birkreg::BoundaryRow(rows.front().size()));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[static_cast<size_t>(i)] += t(i, j) * rows[static_cast<size_t>(j)];
    return out;
}

/// Shifted Legendre polynomials built from the three-term recurrence,
/// normalized in L2(0, 1).
inline std::vector<birkreg::Poly> legendre_polys(int degree) {
    using birkreg::Poly;
    const Poly t{-1.0, 2.0};  // 2x - 1
    std::vector<Poly> p{Poly{1.0}, t};
    for (int k = 1; k < degree; ++k)
        p.push_back((static_cast<double>(2 * k + 1) / (k + 1)) * (t * p[static_cast<size_t>(k)]) -
                    (static_cast<double>(k) / (k + 1)) * p[static_cast<size_t>(k - 1)]);
    p.resize(static_cast<size_t>(degree + 1));
    for (int k = 0; k <= degree; ++k) p[static_cast<size_t>(k)] *= std::sqrt(2.0 * k + 1.0);
    return p;
}

inline birkreg::Poly combine(const std::vector<birkreg::Poly>& basis, const Eigen::VectorXcd& c) {
    birkreg::Poly y;
    for (Eigen::Index i = 0; i < c.size(); ++i) y += c(i) * basis[static_cast<size_t>(i)];
    return y;
}

}  // namespace support
