#include "birkreg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "birkreg/birkhoff.hpp"
#include "birkreg/parallel.hpp"
#include "birkreg/quadrature.hpp"

namespace birkreg {

namespace {

constexpr cplx I{0.0, 1.0};

struct Exponents {
    std::vector<cplx> mu;
    std::vector<double> shift;
};

Exponents exponents(int n, cplx rho) {
    Exponents e;
    for (int k = 0; k < n; ++k) {
        const cplx mu = I * unit_root(k, n) * rho;
        e.mu.push_back(mu);
        e.shift.push_back(std::max(0.0, mu.real()));
    }
    return e;
}

std::vector<double> row_scales(const NormalizedBC& nbc, cplx rho) {
    std::vector<double> s;
    const double r = std::abs(rho);
    for (int k : nbc.orders) s.push_back(std::pow(r, -static_cast<double>(k)));
    return s;
}

// Scaled boundary matrix M(j, k) = U_j(e_k) |rho|^{-k_j} exp(-shift_k) and,
// optionally, its rho-derivative with the scale factors held fixed.
Eigen::MatrixXcd boundary_matrix(const NormalizedBC& nbc, cplx rho, Eigen::MatrixXcd* derivative = nullptr) {
    const int n = nbc.n();
    const auto ex = exponents(n, rho);
    const auto rs = row_scales(nbc, rho);
    Eigen::MatrixXcd m(n, n);
    if (derivative) derivative->resize(n, n);
    for (int k = 0; k < n; ++k) {
        const auto ku = static_cast<size_t>(k);
        const cplx mu = ex.mu[ku];
        const cplx dmu = I * unit_root(k, n);
        const cplx e0 = std::exp(-ex.shift[ku]);
        const cplx e1 = std::exp(mu - ex.shift[ku]);
        for (int j = 0; j < n; ++j) {
            const auto& row = nbc.rows[static_cast<size_t>(j)];
            cplx acc = 0.0, dacc = 0.0;
            cplx pw = 1.0, pw_prev = 0.0;  // mu^s and mu^{s-1}
            for (int s = 0; s < n; ++s) {
                const auto su = static_cast<size_t>(s);
                const cplx a = row.at_zero[su], b = row.at_one[su];
                const cplx both = a * e0 + b * e1;
                acc += both * pw;
                dacc += static_cast<double>(s) * pw_prev * both + b * e1 * pw;
                pw_prev = pw;
                pw *= mu;
            }
            m(j, k) = acc * rs[static_cast<size_t>(j)];
            if (derivative) (*derivative)(j, k) = dmu * dacc * rs[static_cast<size_t>(j)];
        }
    }
    return m;
}

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

struct ContourNearZero {};

struct PolarBox {
    double r0, r1, t0, t1;
    cplx center() const { return std::polar(0.5 * (r0 + r1), 0.5 * (t0 + t1)); }
    double diameter() const { return std::max(r1 - r0, r1 * (t1 - t0)); }
    bool contains(cplx z, double margin) const {
        const double r = std::abs(z);
        if (r < r0 - margin || r > r1 + margin) return false;
        const double tm = 0.5 * (t0 + t1);
        double t = std::arg(z);
        t = tm + std::remainder(t - tm, 2.0 * pi);
        const double angular_margin = margin / std::max(r, 1e-300);
        return t >= t0 - angular_margin && t <= t1 + angular_margin;
    }
};

class RootSearcher {
public:
    RootSearcher(const NormalizedBC& nbc, const RootOptions& options) : nbc_(nbc), options_(options) {}

    int winding(const PolarBox& b) const {
        const double dr = b.r1 - b.r0, dt = b.t1 - b.t0;
        double total = 0.0;
        total += edge([&](double t) { return std::polar(b.r0 + t * dr, b.t0); }, dr);
        total += edge([&](double t) { return std::polar(b.r1, b.t0 + t * dt); }, b.r1 * dt);
        total += edge([&](double t) { return std::polar(b.r1 - t * dr, b.t1); }, dr);
        total += edge([&](double t) { return std::polar(b.r0, b.t1 - t * dt); }, b.r0 * dt);
        const double w = total / (2.0 * pi);
        const double k = std::round(w);
        if (std::abs(w - k) > 0.1) throw ContourNearZero{};
        return static_cast<int>(k);
    }

    void process(const PolarBox& box, int depth, int count) {
        if (count <= 0) return;
        const cplx c = box.center();
        if (count == 1 || box.diameter() < 1e-3 * (1.0 + std::abs(c))) {
            if (auto root = refine(c, count); root && box.contains(root->rho, 1e-9 * (1.0 + std::abs(c)))) {
                record(*root);
                return;
            }
        }
        if (depth >= options_.max_depth || box.diameter() < 1e-10 * std::max(1.0, box.r1)) {
            if (auto root = refine(c, count)) {
                record(*root);
                return;
            }
            throw root_finding_error("could not isolate a root near " + std::to_string(c.real()) + "+" +
                                     std::to_string(c.imag()) + "i");
        }
        static constexpr double fractions[] = {0.4629, 0.5613, 0.4127, 0.6071, 0.3533};
        const bool radial = (box.r1 - box.r0) >= box.r1 * (box.t1 - box.t0);
        for (double f : fractions) {
            PolarBox a = box, b = box;
            if (radial) {
                a.r1 = b.r0 = box.r0 + f * (box.r1 - box.r0);
            } else {
                a.t1 = b.t0 = box.t0 + f * (box.t1 - box.t0);
            }
            try {
                const int wa = winding(a);
                const int wb = winding(b);
                if (wa + wb != count || wa < 0 || wb < 0) continue;
                process(a, depth + 1, wa);
                process(b, depth + 1, wb);
                return;
            } catch (const ContourNearZero&) {
            }
        }
        throw root_finding_error("contour repeatedly passes through a zero");
    }

    std::optional<EigenRoot> refine(cplx start, int multiplicity) const {
        cplx rho = start;
        cplx best = start;
        double best_residual = std::abs(scaled_char_det(nbc_, rho));
        for (int it = 0; it < options_.newton_max && best_residual > 0.0; ++it) {
            const cplx g = char_det_log_derivative(nbc_, rho);
            if (!finite(g) || g == cplx(0.0)) break;
            const cplx step = static_cast<double>(multiplicity) / g;
            rho -= step;
            if (!finite(rho)) break;
            const double residual = std::abs(scaled_char_det(nbc_, rho));
            if (residual < best_residual) {
                best = rho;
                best_residual = residual;
            }
            if (std::abs(step) <= 1e-14 * (1.0 + std::abs(rho))) break;
        }
        if (std::abs(best) == 0.0 || !(best_residual <= options_.residual_tol)) return std::nullopt;
        return EigenRoot{best, std::pow(best, nbc_.n()), multiplicity, best_residual};
    }

    std::vector<EigenRoot> roots;

private:
    struct Sample {
        cplx value;
        double rate;  // |Delta'/Delta|, bounds the phase speed along the path
    };

    template <typename Path>
    double edge(Path&& path, double length) const {
        const int pieces = std::max(2, static_cast<int>(std::ceil(length / 0.2)));
        double total = 0.0;
        double ta = 0.0;
        Sample sa = eval(path(0.0));
        for (int i = 1; i <= pieces; ++i) {
            const double tb = static_cast<double>(i) / pieces;
            const Sample sb = eval(path(tb));
            total += increment(path, ta, sa, tb, sb, length, 0);
            ta = tb;
            sa = sb;
        }
        return total;
    }

    template <typename Path>
    double increment(Path& path, double ta, const Sample& sa, double tb, const Sample& sb, double length, int depth) const {
        const double d = std::arg(sb.value / sa.value);
        const double h = (tb - ta) * length;
        if (std::abs(d) <= pi / 4 && h * std::max(sa.rate, sb.rate) <= 0.5) return d;
        if (depth > 60 || h < 1e-13 * (1.0 + std::abs(path(ta)))) throw ContourNearZero{};
        const double tm = 0.5 * (ta + tb);
        const Sample sm = eval(path(tm));
        return increment(path, ta, sa, tm, sm, length, depth + 1) + increment(path, tm, sm, tb, sb, length, depth + 1);
    }

    Sample eval(cplx rho) const {
        Eigen::MatrixXcd dm;
        const auto m = boundary_matrix(nbc_, rho, &dm);
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
        const cplx z = lu.determinant();
        if (!finite(z) || z == cplx(0.0)) throw ContourNearZero{};
        const cplx g = lu.solve(dm).trace();
        if (!finite(g)) throw ContourNearZero{};
        return {z, std::abs(g)};
    }

    void record(const EigenRoot& root) {
        for (const auto& r : roots)
            if (std::abs(r.rho - root.rho) <= 1e-8 * (1.0 + std::abs(root.rho))) return;
        roots.push_back(root);
    }

    const NormalizedBC& nbc_;
    RootOptions options_;
};

PolarBox region_box(const RootRegion& region) {
    if (!(region.r_min > 0.0) || !(region.r_max > region.r_min)) throw argument_error("root search needs 0 < r_min < r_max");
    PolarBox b{region.r_min, region.r_max, region.sector_begin, region.sector_end};
    if (b.t1 - b.t0 >= 2.0 * pi - 1e-12) {
        // Generic seam keeps the radial cut away from the critical rays.
        b.t0 = 0.0917;
        b.t1 = b.t0 + 2.0 * pi;
    }
    if (!(b.t1 > b.t0)) throw argument_error("empty angular sector");
    return b;
}

// Moves a region boundary slightly when it passes through a zero.
PolarBox jitter(PolarBox b) {
    const double dr = 1e-3 * (b.r1 - b.r0);
    b.r0 += dr * 0.37;
    b.r1 -= dr * 0.61;
    if (b.t1 - b.t0 < 2.0 * pi - 1e-12) {
        const double dt = 1e-3 * (b.t1 - b.t0);
        b.t0 += 0.53 * dt;
        b.t1 -= 0.29 * dt;
    } else {
        b.t0 += 0.011;
        b.t1 += 0.011;
    }
    return b;
}

}  // namespace

// ---------------------------------------------------------------- determinants

ScaledValue ScaledValue::make(cplx z, double log_scale) {
    if (z == cplx(0.0)) return {0.0, 0.0};
    int e = 0;
    std::frexp(std::abs(z), &e);
    return {std::ldexp(1.0, -e) * z * 2.0, log_scale + (e - 1) * std::log(2.0)};
}

cplx ScaledValue::value() const { return mantissa * std::exp(log_scale); }

cplx scaled_char_det(const NormalizedBC& nbc, cplx rho) { return determinant(boundary_matrix(nbc, rho)); }

ScaledValue char_det(const NormalizedBC& nbc, cplx rho) {
    if (std::abs(rho) == 0.0) throw argument_error("characteristic determinant needs rho != 0");
    const auto ex = exponents(nbc.n(), rho);
    double log_scale = std::accumulate(ex.shift.begin(), ex.shift.end(), 0.0);
    log_scale += nbc.total_order * std::log(std::abs(rho));
    return ScaledValue::make(scaled_char_det(nbc, rho), log_scale);
}

cplx char_det_log_derivative(const NormalizedBC& nbc, cplx rho) {
    Eigen::MatrixXcd dm;
    const auto m = boundary_matrix(nbc, rho, &dm);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
    return lu.solve(dm).trace();
}

// ---------------------------------------------------------------- roots

int count_zeros(const NormalizedBC& nbc, const RootRegion& region) {
    RootSearcher searcher(nbc, {});
    auto box = region_box(region);
    try {
        return searcher.winding(box);
    } catch (const ContourNearZero&) {
    }
    try {
        return searcher.winding(jitter(box));
    } catch (const ContourNearZero&) {
        throw root_finding_error("region boundary passes through a zero");
    }
}

std::vector<EigenRoot> find_roots(const NormalizedBC& nbc, const RootRegion& region, const RootOptions& options) {
    if (region.grid < 1) throw argument_error("root grid must be positive");
    const auto whole = region_box(region);
    auto attempt = [&](const PolarBox& outer) {
        RootSearcher searcher(nbc, options);
        const int g = region.grid;
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) {
                PolarBox b{outer.r0 + (outer.r1 - outer.r0) * i / g, outer.r0 + (outer.r1 - outer.r0) * (i + 1) / g,
                           outer.t0 + (outer.t1 - outer.t0) * j / g, outer.t0 + (outer.t1 - outer.t0) * (j + 1) / g};
                searcher.process(b, 0, searcher.winding(b));
            }
        return searcher.roots;
    };
    std::vector<EigenRoot> roots;
    try {
        roots = attempt(whole);
    } catch (const ContourNearZero&) {
        try {
            roots = attempt(jitter(whole));
        } catch (const ContourNearZero&) {
            throw root_finding_error("search grid passes through a zero");
        }
    }
    std::sort(roots.begin(), roots.end(), [](const EigenRoot& a, const EigenRoot& b) {
        const double ra = std::abs(a.rho), rb = std::abs(b.rho);
        if (std::abs(ra - rb) > 1e-9 * (1.0 + ra)) return ra < rb;
        return wrap_angle(std::arg(a.rho)) < wrap_angle(std::arg(b.rho));
    });
    return roots;
}

std::vector<EigenRoot> find_eigenvalues(const NormalizedBC& nbc, double r_min, double r_max, const RootOptions& options) {
    const int n = nbc.n();
    const double offset = 0.0137;
    RootRegion region{r_min, r_max, -pi / n + offset, pi / n + offset, 8};
    auto roots = find_roots(nbc, region, options);
    std::sort(roots.begin(), roots.end(), [](const EigenRoot& a, const EigenRoot& b) {
        const double la = std::abs(a.lambda), lb = std::abs(b.lambda);
        if (std::abs(la - lb) > 1e-9 * (1.0 + la)) return la < lb;
        return std::arg(a.lambda) < std::arg(b.lambda);
    });
    return roots;
}

// ---------------------------------------------------------------- Green kernel

GreenKernel::GreenKernel(const NormalizedBC& nbc, cplx rho, double rcond_min)
    : n_(nbc.n()), rho_(rho), rows_(nbc.rows) {
    if (std::abs(rho) == 0.0) throw argument_error("Green kernel needs rho != 0");
    const auto ex = exponents(n_, rho);
    mu_ = ex.mu;
    shift_ = ex.shift;
    const cplx rho_n = std::pow(rho, n_);
    for (int k = 0; k < n_; ++k) {
        const auto ku = static_cast<size_t>(k);
        weight_.push_back(mu_[ku] / (static_cast<double>(n_) * rho_n));
        forward_.push_back(mu_[ku].real() <= 0.0);
    }
    row_scale_ = row_scales(nbc, rho);
    const Eigen::MatrixXcd m = boundary_matrix(nbc, rho);

    Eigen::MatrixXcd eq = m;
    for (Eigen::Index j = 0; j < eq.rows(); ++j) {
        const double s = eq.row(j).cwiseAbs().maxCoeff();
        if (s > 0.0) eq.row(j) /= s;
    }
    for (Eigen::Index k = 0; k < eq.cols(); ++k) {
        const double s = eq.col(k).cwiseAbs().maxCoeff();
        if (s > 0.0) eq.col(k) /= s;
    }
    rcond_ = Eigen::PartialPivLU<Eigen::MatrixXcd>(eq).rcond();
    if (!(rcond_ >= rcond_min))
        throw conditioning_error("boundary matrix is singular to working precision at rho = " +
                                 std::to_string(rho.real()) + (rho.imag() < 0 ? "" : "+") + std::to_string(rho.imag()) + "i");
    lu_.compute(m);
}

bool GreenKernel::right_branch(double x, double xi) const {
    if (x != xi) return x > xi;
    return x > 0.0;
}

cplx GreenKernel::particular(double x, double xi, int order, bool right) const {
    cplx acc = 0.0;
    for (int k = 0; k < n_; ++k) {
        const auto ku = static_cast<size_t>(k);
        if (forward_[ku] != right) continue;
        acc += weight_[ku] * std::pow(mu_[ku], order) * std::exp(mu_[ku] * (x - xi));
    }
    return right ? acc : -acc;
}

Eigen::VectorXcd GreenKernel::correction(double xi) const {
    Eigen::VectorXcd rhs(n_);
    for (int j = 0; j < n_; ++j) {
        const auto& row = rows_[static_cast<size_t>(j)];
        cplx acc = 0.0;
        for (int s = 0; s < n_; ++s) {
            const auto su = static_cast<size_t>(s);
            if (row.at_zero[su] != cplx(0.0)) acc += row.at_zero[su] * particular(0.0, xi, s, false);
            if (row.at_one[su] != cplx(0.0)) acc += row.at_one[su] * particular(1.0, xi, s, true);
        }
        rhs(j) = acc * row_scale_[static_cast<size_t>(j)];
    }
    return lu_.solve(rhs);
}

cplx GreenKernel::evaluate(double x, double xi, const Eigen::VectorXcd& corr, int order, int side) const {
    const bool right = side > 0 ? true : (side < 0 ? false : right_branch(x, xi));
    cplx acc = particular(x, xi, order, right);
    for (int k = 0; k < n_; ++k) {
        const auto ku = static_cast<size_t>(k);
        acc -= corr(k) * std::pow(mu_[ku], order) * std::exp(mu_[ku] * x - shift_[ku]);
    }
    return acc;
}

cplx GreenKernel::derivative(double x, double xi, int order, int side) const {
    return evaluate(x, xi, correction(xi), order, side);
}

// ---------------------------------------------------------------- scans

void fit_decay(SpectralScan& scan) {
    const auto count = scan.samples.size();
    if (count < 2) throw argument_error("decay fit needs at least two samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& s : scan.samples) {
        const double x = std::log(std::abs(s.rho));
        const double y = std::log(s.quantity);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double nn = static_cast<double>(count);
    const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / nn;
    double ss = 0.0;
    for (const auto& s : scan.samples) {
        const double r = std::log(s.quantity) - (intercept + slope * std::log(std::abs(s.rho)));
        ss += r * r;
    }
    scan.fitted_exponent = slope;
    scan.prefactor = std::exp(intercept);
    scan.fit_residual = std::sqrt(ss / nn);
}

std::vector<double> geometric_radii(double r_min, double r_max, int count) {
    if (count < 2 || !(r_min > 0.0) || !(r_max > r_min)) throw argument_error("radii need count >= 2 and 0 < r_min < r_max");
    std::vector<double> out;
    for (int i = 0; i < count; ++i) out.push_back(r_min * std::pow(r_max / r_min, static_cast<double>(i) / (count - 1)));
    return out;
}

int resolvent_nodes(const ScanOptions& options, double abs_rho) {
    return std::max(options.quad_nodes, static_cast<int>(std::ceil(options.nodes_per_rho * abs_rho)));
}

Clearance check_ray(const NormalizedBC& nbc, double angle, double r_min, double r_max, double delta) {
    const double inner = std::max(0.05, r_min - delta);
    const double half_width = std::asin(std::min(1.0, delta / inner)) + 1e-3;
    RootRegion region{inner, r_max + delta, angle - half_width, angle + half_width, 4};
    const auto roots = find_roots(nbc, region);
    DiskSet disks;
    disks.radius = delta;
    for (const auto& r : roots) disks.centers.push_back(r.rho);
    const auto clearance = ray_clearance(angle, disks, r_max);
    if (clearance.radius > r_min)
        throw ray_blocked_error("ray at angle " + std::to_string(angle) + " meets a root disk at |rho| up to " +
                                std::to_string(clearance.radius));
    return clearance;
}

SpectralScan green_sup_scan(const NormalizedBC& nbc, double angle, std::span<const double> radii, const ScanOptions& options) {
    if (radii.empty()) throw argument_error("scan needs radii");
    if (options.grid < 2) throw argument_error("kernel lattice needs at least 2 points per side");
    std::vector<double> sorted(radii.begin(), radii.end());
    std::sort(sorted.begin(), sorted.end());
    if (options.check_clearance) check_ray(nbc, angle, sorted.front(), sorted.back(), options.disk_radius);

    SpectralScan scan;
    scan.kind = "green";
    scan.angle = angle;
    scan.samples.resize(sorted.size());
    const int g = options.grid;
    parallel_for(sorted.size(), options.jobs, [&](size_t i) {
        const cplx rho = std::polar(sorted[i], angle);
        const GreenKernel kernel(nbc, rho);
        double sup = 0.0;
        for (int b = 0; b < g; ++b) {
            const double xi = static_cast<double>(b) / (g - 1);
            const auto corr = kernel.correction(xi);
            for (int a = 0; a < g; ++a) {
                const double x = static_cast<double>(a) / (g - 1);
                sup = std::max(sup, std::abs(kernel.evaluate(x, xi, corr)));
            }
        }
        scan.samples[i] = {rho, sup};
    });
    fit_decay(scan);
    return scan;
}

double resolvent_norm(const NormalizedBC& nbc, cplx rho, int quad_nodes) {
    const auto rule = gauss_legendre(quad_nodes);
    const GreenKernel kernel(nbc, rho);
    const int q = quad_nodes;
    Eigen::MatrixXcd k(q, q);
    for (int b = 0; b < q; ++b) {
        const auto bu = static_cast<size_t>(b);
        const auto corr = kernel.correction(rule.nodes[bu]);
        for (int a = 0; a < q; ++a) {
            const auto au = static_cast<size_t>(a);
            k(a, b) = std::sqrt(rule.weights[au] * rule.weights[bu]) * kernel.evaluate(rule.nodes[au], rule.nodes[bu], corr);
        }
    }
    const Eigen::MatrixXcd h = k.adjoint() * k;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

SpectralScan resolvent_scan_points(const NormalizedBC& nbc, std::span<const cplx> points, const ScanOptions& options) {
    if (points.empty()) throw argument_error("scan needs sample points");
    std::vector<cplx> sorted(points.begin(), points.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
    SpectralScan scan;
    scan.kind = "resolvent";
    scan.angle = std::arg(sorted.back());
    scan.samples.resize(sorted.size());
    parallel_for(sorted.size(), options.jobs, [&](size_t i) {
        const cplx rho = sorted[i];
        scan.samples[i] = {rho, resolvent_norm(nbc, rho, resolvent_nodes(options, std::abs(rho)))};
    });
    if (scan.samples.size() >= 2) fit_decay(scan);
    return scan;
}

SpectralScan resolvent_scan(const NormalizedBC& nbc, double angle, std::span<const double> radii, const ScanOptions& options) {
    const int n = nbc.n();
    const double epsilon = options.epsilon.value_or(pi / (4.0 * n));
    if (!(epsilon > 0.0 && epsilon < pi / (2.0 * n))) throw argument_error("epsilon must lie in (0, pi/(2n))");
    if (distance_to_critical(angle, n) <= epsilon / 2)
        throw argument_error("ray at angle " + std::to_string(angle) + " is not inside Omega(epsilon)");
    if (radii.empty()) throw argument_error("scan needs radii");
    std::vector<cplx> points;
    for (double r : radii) points.push_back(std::polar(r, angle));
    if (options.check_clearance) {
        const auto [lo, hi] = std::minmax_element(radii.begin(), radii.end());
        check_ray(nbc, angle, *lo, *hi, options.disk_radius);
    }
    auto scan = resolvent_scan_points(nbc, points, options);
    scan.angle = angle;
    return scan;
}

// ---------------------------------------------------------------- eigenfunctions

cplx Eigenfunction::derivative(double x, int order) const {
    cplx acc = 0.0;
    for (size_t k = 0; k < exponents.size(); ++k)
        acc += coeffs(static_cast<Eigen::Index>(k)) * std::pow(exponents[k], order) * std::exp(exponents[k] * x - shifts[k]);
    return acc;
}

std::vector<Eigenfunction> eigenfunctions(const NormalizedBC& nbc, const EigenRoot& root) {
    if (root.multiplicity > 2) throw argument_error("eigenfunctions: multiplicity above 2 is not supported");
    const int n = nbc.n();
    const auto m = boundary_matrix(nbc, root.rho);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int null_dim = 0;
    for (Eigen::Index i = sv.size() - 1; i >= 0 && null_dim < root.multiplicity; --i)
        if (sv(i) <= 1e-6 * n) ++null_dim;
    null_dim = std::max(null_dim, 1);
    const auto ex = exponents(n, root.rho);
    std::vector<Eigenfunction> out;
    for (int i = 0; i < null_dim; ++i) {
        Eigenfunction f{root.rho, ex.mu, ex.shift, svd.matrixV().col(n - 1 - i)};
        out.push_back(std::move(f));
    }
    return out;
}

namespace {

// e^{-s} \int_0^1 e^{z x} dx, for Re z <= s.
cplx damped_exp_integral(cplx z, double s) {
    if (std::abs(z) < 0.5) {
        cplx term = 1.0, sum = 0.0;
        for (int k = 1; k <= 30; ++k) {
            term *= (k == 1) ? 1.0 : z / static_cast<double>(k);
            sum += term;
        }
        // sum = \sum_{k>=1} z^{k-1}/k!
        return std::exp(-s) * sum;
    }
    return (std::exp(z - s) - std::exp(-s)) / z;
}

}  // namespace

cplx inner(const Eigenfunction& f, const Eigenfunction& g) {
    cplx acc = 0.0;
    for (size_t k = 0; k < f.exponents.size(); ++k)
        for (size_t l = 0; l < g.exponents.size(); ++l) {
            const cplx z = f.exponents[k] + std::conj(g.exponents[l]);
            acc += f.coeffs(static_cast<Eigen::Index>(k)) * std::conj(g.coeffs(static_cast<Eigen::Index>(l))) *
                   damped_exp_integral(z, f.shifts[k] + g.shifts[l]);
        }
    return acc;
}

std::vector<BracketGroup> bracket_groups(std::span<const EigenRoot> roots, int n, double tau) {
    const auto count = roots.size();
    std::vector<size_t> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return std::abs(roots[a].lambda) < std::abs(roots[b].lambda); });
    std::vector<size_t> parent(count);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    const double power = 1.0 - 1.0 / n;
    for (size_t i = 0; i < count; ++i)
        for (size_t j = i + 1; j < count; ++j) {
            const auto& a = roots[order[i]];
            const auto& b = roots[order[j]];
            const double scale = std::max(std::abs(a.lambda), std::abs(b.lambda));
            if (std::abs(a.lambda - b.lambda) <= tau * (1.0 + std::pow(scale, power)))
                parent[find(i)] = find(j);
        }
    std::vector<BracketGroup> groups;
    std::vector<long> slot(count, -1);
    for (size_t i = 0; i < count; ++i) {
        const size_t r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<long>(groups.size());
            groups.emplace_back();
        }
        auto& g = groups[static_cast<size_t>(slot[r])];
        g.lambdas.push_back(roots[order[i]].lambda);
        g.size += roots[order[i]].multiplicity;
    }
    return groups;
}

std::vector<GramConditioning> gram_condition(const NormalizedBC& nbc, int count, const GramOptions& options) {
    if (count < 4) throw argument_error("gram_condition needs count >= 4");
    const int n = nbc.n();
    std::vector<EigenRoot> roots;
    std::vector<Eigenfunction> funcs;
    std::vector<size_t> owner;  // root index of each function
    for (double r_max = std::max(10.0, 1.5 * pi * count / n + 4.0);; r_max *= 1.6) {
        if (r_max > 5000.0) throw root_finding_error("not enough eigenvalues found for the Gram test");
        roots = find_eigenvalues(nbc, options.r_min, r_max);
        funcs.clear();
        owner.clear();
        for (size_t i = 0; i < roots.size(); ++i)
            for (auto& f : eigenfunctions(nbc, roots[i])) {
                funcs.push_back(std::move(f));
                owner.push_back(i);
            }
        // Roots near the outer radius may be missing partners; keep a margin.
        if (static_cast<int>(funcs.size()) >= count + 2) break;
    }
    funcs.resize(static_cast<size_t>(count));
    owner.resize(static_cast<size_t>(count));

    const auto groups = bracket_groups(roots, n, options.tau);
    std::vector<int> bracket(roots.size(), -1);
    for (size_t gi = 0; gi < groups.size(); ++gi)
        for (const auto& lambda : groups[gi].lambdas)
            for (size_t i = 0; i < roots.size(); ++i)
                if (roots[i].lambda == lambda) bracket[i] = static_cast<int>(gi);

    const auto total = static_cast<Eigen::Index>(count);
    Eigen::MatrixXcd gram(total, total);
    for (Eigen::Index i = 0; i < total; ++i)
        for (Eigen::Index j = 0; j < total; ++j) gram(i, j) = inner(funcs[static_cast<size_t>(j)], funcs[static_cast<size_t>(i)]);

    // Block transform: orthonormalize each bracket through its Cholesky factor.
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(total, total);
    std::vector<bool> done(static_cast<size_t>(count), false);
    for (Eigen::Index i = 0; i < total; ++i) {
        if (done[static_cast<size_t>(i)]) continue;
        std::vector<Eigen::Index> members;
        for (Eigen::Index j = i; j < total; ++j)
            if (bracket[owner[static_cast<size_t>(j)]] == bracket[owner[static_cast<size_t>(i)]]) members.push_back(j);
        const auto sz = static_cast<Eigen::Index>(members.size());
        Eigen::MatrixXcd block(sz, sz);
        for (Eigen::Index a = 0; a < sz; ++a)
            for (Eigen::Index b = 0; b < sz; ++b) block(a, b) = gram(members[static_cast<size_t>(a)], members[static_cast<size_t>(b)]);
        Eigen::LLT<Eigen::MatrixXcd> llt(block);
        const Eigen::MatrixXcd l_inv_h =
            llt.matrixL().solve(Eigen::MatrixXcd::Identity(sz, sz)).adjoint();
        for (Eigen::Index a = 0; a < sz; ++a)
            for (Eigen::Index b = 0; b < sz; ++b) t(members[static_cast<size_t>(a)], members[static_cast<size_t>(b)]) = l_inv_h(a, b);
        for (auto j : members) done[static_cast<size_t>(j)] = true;
    }
    const Eigen::MatrixXcd g2 = t.adjoint() * gram * t;

    std::vector<GramConditioning> out;
    for (int N = 4; N <= count; N += 4) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(g2.topLeftCorner(N, N), Eigen::EigenvaluesOnly);
        const auto& ev = eig.eigenvalues();
        out.push_back({N, ev.maxCoeff() / ev.minCoeff()});
    }
    return out;
}

}  // namespace birkreg
