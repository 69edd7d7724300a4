#include "birkreg/quasiform.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "birkreg/linalg.hpp"

namespace birkreg {

namespace {

DiffExpr unit_expr(int size, int s, cplx c = 1.0) {
    DiffExpr e(static_cast<size_t>(size));
    if (s >= 0 && s < size) e[static_cast<size_t>(s)] = Poly::constant(c);
    return e;
}

// d/dx of sum_s c_s y^(s).
DiffExpr differentiate(const DiffExpr& e) {
    DiffExpr out(e.size());
    for (size_t s = 0; s < e.size(); ++s) {
        out[s] += e[s].derivative();
        if (s + 1 < e.size()) out[s + 1] += e[s];
        else if (!e[s].is_zero()) throw std::logic_error("quasi-derivative exceeds the operator order");
    }
    return out;
}

void add_term(DiffExpr& e, const Poly& coef, int s, double sign) {
    if (s < 0 || coef.is_zero()) return;
    e[static_cast<size_t>(s)] += sign * coef;
}

Eigen::MatrixXcd inverse_of(const Eigen::MatrixXcd& t) { return t.fullPivLu().inverse(); }

}  // namespace

std::vector<DiffExpr> quasi_derivatives(const DivergenceForm& form) {
    const int m = form.m();
    const int size = 2 * m + 1;
    std::vector<DiffExpr> qd;
    qd.reserve(static_cast<size_t>(size));
    for (int k = 0; k < m; ++k) qd.push_back(unit_expr(size, k));
    auto top = unit_expr(size, m);
    add_term(top, form.r[static_cast<size_t>(m)], m - 1, -1.0);
    qd.push_back(top);
    for (int k = 1; k <= m; ++k) {
        DiffExpr e = differentiate(qd.back());
        for (auto& c : e) c = -c;
        add_term(e, form.p[static_cast<size_t>(m - k)], m - k, 1.0);
        add_term(e, form.q[static_cast<size_t>(m - k + 1)], m - k + 1, 1.0);
        add_term(e, form.r[static_cast<size_t>(m - k)], m - k - 1, -1.0);
        qd.push_back(std::move(e));
    }
    return qd;
}

QuasiTransition quasi_transition(const OperatorSpec& spec, int point) {
    if (point != 0 && point != 1) throw argument_error("quasi transition point must be 0 or 1");
    const auto qd = quasi_derivatives(spec.divergence());
    const int n = spec.order;
    QuasiTransition t{point, Eigen::MatrixXcd::Zero(n, n)};
    for (int k = 0; k < n; ++k)
        for (int s = 0; s < n; ++s) t.matrix(k, s) = qd[static_cast<size_t>(k)][static_cast<size_t>(s)](static_cast<double>(point));
    return t;
}

SplitBC split_bc(const OperatorSpec& spec) {
    const int n = spec.order;
    const int m = n / 2;
    const auto t0inv = inverse_of(quasi_transition(spec, 0).matrix);
    const auto t1inv = inverse_of(quasi_transition(spec, 1).matrix);
    SplitBC out{Eigen::MatrixXcd::Zero(n, n), Eigen::MatrixXcd::Zero(n, n), m};
    for (int j = 0; j < n; ++j) {
        const auto& row = spec.rows[static_cast<size_t>(j)];
        Eigen::RowVectorXcd a(n), b(n);
        for (int s = 0; s < n; ++s) {
            a(s) = row.at_zero[static_cast<size_t>(s)];
            b(s) = row.at_one[static_cast<size_t>(s)];
        }
        const Eigen::RowVectorXcd alpha = a * t0inv;
        const Eigen::RowVectorXcd beta = b * t1inv;
        for (int i = 0; i < m; ++i) {
            out.B(j, i) = alpha(i);
            out.B(j, m + i) = beta(i);
            out.C(j, i) = alpha(n - 1 - i);
            out.C(j, m + i) = -beta(n - 1 - i);
        }
    }
    Eigen::MatrixXcd bc(n, 2 * n);
    bc << out.B, out.C;
    if (linalg::numerical_rank(bc, 1e-10) < n) throw rank_deficient_error("[B | C] is rank deficient");
    return out;
}

std::vector<BoundaryRow> rows_from_split(const OperatorSpec& spec, const SplitBC& split) {
    const int n = spec.order;
    const int m = n / 2;
    const auto t0 = quasi_transition(spec, 0).matrix;
    const auto t1 = quasi_transition(spec, 1).matrix;
    std::vector<BoundaryRow> rows;
    for (int j = 0; j < split.B.rows(); ++j) {
        Eigen::RowVectorXcd alpha = Eigen::RowVectorXcd::Zero(n), beta = Eigen::RowVectorXcd::Zero(n);
        for (int i = 0; i < m; ++i) {
            alpha(i) = split.B(j, i);
            beta(i) = split.B(j, m + i);
            alpha(n - 1 - i) = split.C(j, i);
            beta(n - 1 - i) = -split.C(j, m + i);
        }
        const Eigen::RowVectorXcd a = alpha * t0;
        const Eigen::RowVectorXcd b = beta * t1;
        BoundaryRow row(n);
        for (int s = 0; s < n; ++s) {
            row.at_zero[static_cast<size_t>(s)] = a(s);
            row.at_one[static_cast<size_t>(s)] = b(s);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

double pair_scale(const SplitBC& split) {
    Eigen::MatrixXcd bc(split.B.rows(), split.B.cols() + split.C.cols());
    bc << split.B, split.C;
    return linalg::spectral_norm(bc);
}

Eigen::MatrixXcd preimage_of_image(const SplitBC& split, const SubspaceTolerances& tol, double scale) {
    const Eigen::Index n = split.B.rows();
    const auto im_c = linalg::range_basis(split.C, tol.rank_cutoff, scale);
    const Eigen::MatrixXcd proj = Eigen::MatrixXcd::Identity(n, n) - im_c * im_c.adjoint();
    return linalg::null_basis(proj * split.B, tol.rank_cutoff, scale);
}

}  // namespace

CompleteRegularityReport check_completely_regular(const SplitBC& split, const SubspaceTolerances& tol) {
    CompleteRegularityReport rep;
    rep.tolerances = tol;
    const double scale = pair_scale(split);
    rep.preimage_basis = preimage_of_image(split, tol, scale);
    rep.complement_basis = linalg::range_basis(split.C.adjoint(), tol.rank_cutoff, scale);
    if (rep.preimage_basis.cols() != rep.complement_basis.cols()) {
        rep.max_angle = pi / 2;
        rep.completely_regular = false;
        return rep;
    }
    rep.principal_angles = linalg::principal_angles(rep.preimage_basis, rep.complement_basis);
    rep.max_angle = rep.principal_angles.empty() ? 0.0 : rep.principal_angles.back();
    rep.completely_regular = rep.max_angle <= tol.angle_tol;
    if (rep.completely_regular) rep.A = boundary_form_matrix(split, tol);
    return rep;
}

Eigen::MatrixXcd boundary_form_matrix(const SplitBC& split, const SubspaceTolerances& tol) {
    const Eigen::Index n = split.B.rows();
    const double scale = pair_scale(split);
    const auto s = preimage_of_image(split, tol, scale);
    const auto k = linalg::range_basis(split.C.adjoint(), tol.rank_cutoff, scale);
    bool complete = s.cols() == k.cols();
    if (complete) {
        const auto angles = linalg::principal_angles(s, k);
        complete = angles.empty() || angles.back() <= tol.angle_tol;
    }
    if (!complete) throw not_completely_regular_error("operator is not completely regular");
    if (s.cols() == 0) return Eigen::MatrixXcd::Zero(n, n);

    Eigen::MatrixXcd bc(n, 2 * n);
    bc << split.B, split.C;
    const auto w = linalg::null_basis(bc, tol.rank_cutoff, scale);
    const Eigen::MatrixXcd y1 = s.adjoint() * w.topRows(n);
    const Eigen::MatrixXcd y2 = s.adjoint() * w.bottomRows(n);
    // X y1 = y2 in least squares; X = y2 * pinv(y1).
    const Eigen::MatrixXcd x = y1.transpose().completeOrthogonalDecomposition().solve(y2.transpose()).transpose();
    return s * x * s.adjoint();
}

Eigen::VectorXcd wedge_vector(const OperatorSpec& spec, const Poly& y) {
    const int m = spec.order / 2;
    Eigen::VectorXcd v(2 * m);
    for (int i = 0; i < m; ++i) {
        const auto d = y.derivative(i);
        v(i) = d(0.0);
        v(m + i) = d(1.0);
    }
    return v;
}

Eigen::VectorXcd vee_vector(const OperatorSpec& spec, const Poly& y) {
    const int n = spec.order;
    const int m = n / 2;
    const auto qd = quasi_derivatives(spec.divergence());
    auto eval = [&](int k, double x) {
        cplx acc = 0.0;
        for (int s = 0; s < n; ++s) acc += qd[static_cast<size_t>(k)][static_cast<size_t>(s)](x) * y.derivative(s)(x);
        return acc;
    };
    Eigen::VectorXcd v(n);
    for (int i = 0; i < m; ++i) {
        v(i) = eval(n - 1 - i, 0.0);
        v(m + i) = -eval(n - 1 - i, 1.0);
    }
    return v;
}

Eigen::MatrixXcd admissible_polynomials(const OperatorSpec& spec, int degree) {
    const int n = spec.order;
    Eigen::MatrixXcd k(n, degree + 1);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i <= degree; ++i) k(j, i) = apply_row(spec.rows[static_cast<size_t>(j)], Poly::monomial(i));
        const double norm = k.row(j).norm();
        if (norm > 0.0) k.row(j) /= norm;
    }
    return linalg::null_basis(k, 1e-12);
}

cplx volume_form(const DivergenceForm& form, const Poly& y) {
    cplx acc = inner(form.p[0] * y, y);
    for (int k = 1; k <= form.m(); ++k) {
        const auto ku = static_cast<size_t>(k);
        const auto dk = y.derivative(k);
        const auto dk1 = y.derivative(k - 1);
        acc += inner(form.p[ku] * dk, dk) + inner(form.q[ku] * dk, dk1) - inner(form.r[ku] * dk1, dk);
    }
    return acc;
}

FormIdentityResult verify_form_identity(const OperatorSpec& spec, const Eigen::MatrixXcd& A, int trials,
                                        std::uint64_t seed) {
    const auto& form = spec.divergence();
    const int m = form.m();
    FormIdentityResult res;
    res.degree = 2 * m + 6;
    res.trials = trials;
    const auto basis = admissible_polynomials(spec, res.degree);
    if (basis.cols() == 0) throw discretization_error("no admissible polynomial of degree " + std::to_string(res.degree));
    const auto coeffs = classical_coefficients(spec);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXcd g(basis.cols());
        for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = cplx(normal(rng), normal(rng));
        const Eigen::VectorXcd c = basis * g;
        const Poly y(std::vector<cplx>(c.data(), c.data() + c.size()));
        const cplx lhs = inner(apply_operator(coeffs, y), y);
        const auto w = wedge_vector(spec, y);
        const cplx rhs = volume_form(form, y) + w.dot(A * w);
        const double denom = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
        res.max_residual = std::max(res.max_residual, std::abs(lhs - rhs) / denom);
    }
    return res;
}

}  // namespace birkreg
