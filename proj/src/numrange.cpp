#include "birkreg/numrange.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/Eigenvalues>

#include "birkreg/linalg.hpp"
#include "birkreg/parallel.hpp"
#include "birkreg/quadrature.hpp"
#include "birkreg/quasiform.hpp"

namespace birkreg {

namespace {

int max_degree(const std::vector<Poly>& ps) {
    int d = 0;
    for (const auto& p : ps) d = std::max(d, p.degree());
    return d;
}

}  // namespace

Discretization Discretization::pencil(Eigen::MatrixXcd S, Eigen::MatrixXcd M) {
    if (S.rows() != S.cols() || M.rows() != S.rows() || M.cols() != S.cols())
        throw argument_error("pencil matrices must be square and of equal size");
    Discretization d;
    d.dimension = static_cast<int>(S.rows());
    d.S = std::move(S);
    d.M = std::move(M);
    return d;
}

Eigen::MatrixXcd form_matrix(const DivergenceForm& form, int degree) {
    const int m = form.m();
    const int size = degree + 1;
    const int coeff_degree = std::max({max_degree(form.p), max_degree(form.q), max_degree(form.r)});
    const auto rule = gauss_legendre(degree + coeff_degree / 2 + 2);

    Eigen::MatrixXcd f = Eigen::MatrixXcd::Zero(size, size);
    for (size_t node = 0; node < rule.nodes.size(); ++node) {
        const double x = rule.nodes[node];
        const double w = rule.weights[node];
        const Eigen::MatrixXd jet = legendre_jet(degree, m, x);
        // (p_0 y, y)
        f += (w * form.p[0](x)) * (jet.row(0).transpose() * jet.row(0)).cast<cplx>();
        for (int k = 1; k <= m; ++k) {
            const auto ku = static_cast<size_t>(k);
            const Eigen::RowVectorXd dk = jet.row(k);
            const Eigen::RowVectorXd dk1 = jet.row(k - 1);
            // Entry (b, a) multiplies conj(c_b) c_a.
            f += (w * form.p[ku](x)) * (dk.transpose() * dk).cast<cplx>();
            f += (w * form.q[ku](x)) * (dk1.transpose() * dk).cast<cplx>();
            f -= (w * form.r[ku](x)) * (dk.transpose() * dk1).cast<cplx>();
        }
    }

    // (y^v, y^) = wedge^H vee.
    const int n = 2 * m;
    const auto qd = quasi_derivatives(form);
    Eigen::MatrixXcd wedge(n, size), vee(n, size);
    for (int end = 0; end < 2; ++end) {
        const double x = end;
        const Eigen::MatrixXd jet = legendre_jet(degree, n - 1, x);
        for (int i = 0; i < m; ++i) {
            wedge.row(end * m + i) = jet.row(i).cast<cplx>();
            Eigen::RowVectorXcd q = Eigen::RowVectorXcd::Zero(size);
            const auto& expr = qd[static_cast<size_t>(n - 1 - i)];
            for (int s = 0; s < n; ++s) q += expr[static_cast<size_t>(s)](x) * jet.row(s).cast<cplx>();
            vee.row(end * m + i) = end == 0 ? q : Eigen::RowVectorXcd(-q);
        }
    }
    f += wedge.adjoint() * vee;
    return f;
}

Eigen::MatrixXcd constraint_matrix(const OperatorSpec& spec, int degree) {
    const int n = spec.order;
    const Eigen::MatrixXd j0 = legendre_jet(degree, n - 1, 0.0);
    const Eigen::MatrixXd j1 = legendre_jet(degree, n - 1, 1.0);
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(n, degree + 1);
    for (int j = 0; j < n; ++j) {
        const auto& row = spec.rows[static_cast<size_t>(j)];
        for (int s = 0; s < n; ++s) {
            const auto su = static_cast<size_t>(s);
            c.row(j) += row.at_zero[su] * j0.row(s).cast<cplx>() + row.at_one[su] * j1.row(s).cast<cplx>();
        }
        const double norm = c.row(j).norm();
        if (norm > 0.0) c.row(j) /= norm;
    }
    return c;
}

Discretization discretize(const OperatorSpec& spec, int N) {
    if (!spec.is_divergence()) throw argument_error("numerical range needs a divergence-form operator");
    if (N < 4) throw argument_error("discretization dimension must be at least 4");
    const auto& form = spec.divergence();
    const int degree = N + spec.order - 1;
    const Eigen::MatrixXcd z = linalg::null_basis(constraint_matrix(spec, degree), 1e-12);
    if (z.cols() != N)
        throw discretization_error("constraint nullspace has dimension " + std::to_string(z.cols()) + ", expected " +
                                   std::to_string(N));
    Discretization d;
    d.dimension = N;
    d.degree = degree;
    d.S = z.adjoint() * form_matrix(form, degree) * z;
    d.M = z.adjoint() * z;
    d.basis = z;
    return d;
}

double RangeProfile::min_sigma() const {
    if (sigma.empty()) throw argument_error("empty range profile");
    return *std::min_element(sigma.begin(), sigma.end());
}

RangeProfile support_profile(const Discretization& disc, int angles) {
    if (angles < 1) throw argument_error("support profile needs at least one angle");
    Eigen::LLT<Eigen::MatrixXcd> llt(disc.M);
    if (llt.info() != Eigen::Success) throw discretization_error("mass matrix is not positive definite");
    const Eigen::MatrixXcd l_inv = llt.matrixL().solve(Eigen::MatrixXcd::Identity(disc.M.rows(), disc.M.cols()));
    const Eigen::MatrixXcd s = l_inv * disc.S * l_inv.adjoint();

    RangeProfile p;
    p.dimension = disc.dimension;
    for (int j = 0; j < angles; ++j) {
        const double theta = 2.0 * pi * j / angles;
        const Eigen::MatrixXcd rotated = std::polar(1.0, theta) * s;
        const Eigen::MatrixXcd herm = 0.5 * (rotated + rotated.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm, Eigen::EigenvaluesOnly);
        p.theta.push_back(theta);
        p.sigma.push_back(eig.eigenvalues().maxCoeff());
    }
    return p;
}

std::string to_string(RangeVerdict v) {
    switch (v) {
        case RangeVerdict::half_plane: return "half_plane";
        case RangeVerdict::whole_plane: return "whole_plane";
        case RangeVerdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

HalfPlaneVerdict half_plane_verdict(const std::vector<RangeProfile>& profiles, double growth_factor) {
    if (profiles.size() < 3) throw argument_error("half-plane verdict needs at least three dimensions");
    HalfPlaneVerdict v;
    v.growth_factor = growth_factor;
    for (const auto& p : profiles) v.evidence.emplace_back(p.dimension, p.min_sigma());

    // Rounding in sigma scales with the largest support value.
    double floor = 0.0;
    for (const auto& p : profiles)
        for (double s : p.sigma) floor = std::max(floor, v.noise_floor * std::abs(s));

    const double first = v.evidence.front().second;
    double largest = first;
    for (const auto& [n, s] : v.evidence) largest = std::max(largest, s);
    bool growing = true;
    for (size_t i = 0; i < v.evidence.size(); ++i) {
        const double s = v.evidence[i].second;
        if (!(s > floor)) growing = false;
        if (i > 0 && !(s >= growth_factor * v.evidence[i - 1].second)) growing = false;
    }
    if (largest <= first + v.bounded_slack * std::abs(first) + floor)
        v.verdict = RangeVerdict::half_plane;
    else if (growing)
        v.verdict = RangeVerdict::whole_plane;
    return v;
}

RangeAnalysis analyze_numerical_range(const OperatorSpec& spec, const RangeOptions& options) {
    if (options.dimensions.size() < 3) throw argument_error("numerical range needs at least three dimensions");
    std::vector<Discretization> discs(options.dimensions.size());
    parallel_for(discs.size(), options.jobs, [&](size_t i) { discs[i] = discretize(spec, options.dimensions[i]); });

    auto profiles_at = [&](int angles) {
        std::vector<RangeProfile> out(discs.size());
        parallel_for(discs.size(), options.jobs, [&](size_t i) { out[i] = support_profile(discs[i], angles); });
        return out;
    };

    RangeAnalysis result;
    result.angles = options.angles;
    result.profiles = profiles_at(result.angles);
    result.verdict = half_plane_verdict(result.profiles, options.growth_factor);
    for (int d = 0; d < options.max_angle_doublings; ++d) {
        auto finer = profiles_at(2 * result.angles);
        auto verdict = half_plane_verdict(finer, options.growth_factor);
        const bool stable = verdict.verdict == result.verdict.verdict;
        result.angles *= 2;
        result.profiles = std::move(finer);
        result.verdict = std::move(verdict);
        if (stable) break;
    }
    return result;
}

std::string profiles_csv(const std::vector<RangeProfile>& profiles) {
    std::string out = "N,theta,sigma\n";
    char buf[96];
    for (const auto& p : profiles)
        for (size_t i = 0; i < p.theta.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%d,%.12e,%.12e\n", p.dimension, p.theta[i], p.sigma[i]);
            out += buf;
        }
    return out;
}

nlohmann::json to_json(const RangeAnalysis& analysis) {
    nlohmann::json evidence = nlohmann::json::array();
    for (const auto& [n, s] : analysis.verdict.evidence) evidence.push_back({{"N", n}, {"min_sigma", s}});
    return {{"verdict", to_string(analysis.verdict.verdict)},
            {"evidence", evidence},
            {"angles", analysis.angles},
            {"thresholds", {{"growth_factor", analysis.verdict.growth_factor}, {"bounded_slack", analysis.verdict.bounded_slack},
                            {"noise_floor", analysis.verdict.noise_floor}}}};
}

}  // namespace birkreg
