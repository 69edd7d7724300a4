#include "birkreg/poly.hpp"

#include <algorithm>
#include <cmath>

namespace birkreg {

Poly::Poly(std::vector<cplx> coefficients) : coeffs_(std::move(coefficients)) { trim(); }

Poly::Poly(std::initializer_list<cplx> coefficients) : coeffs_(coefficients) { trim(); }

Poly Poly::constant(cplx c) { return Poly({c}); }

Poly Poly::monomial(int degree, cplx c) {
    if (degree < 0) throw argument_error("monomial degree must be non-negative");
    std::vector<cplx> v(static_cast<size_t>(degree) + 1, 0.0);
    v.back() = c;
    return Poly(std::move(v));
}

void Poly::trim() {
    while (!coeffs_.empty() && coeffs_.back() == cplx(0.0)) coeffs_.pop_back();
}

cplx Poly::coefficient(int k) const {
    if (k < 0 || k > degree()) return 0.0;
    return coeffs_[static_cast<size_t>(k)];
}

cplx Poly::operator()(double x) const { return (*this)(cplx(x)); }

cplx Poly::operator()(cplx x) const {
    cplx acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Poly Poly::derivative(int order) const {
    if (order < 0) throw argument_error("derivative order must be non-negative");
    if (order == 0) return *this;
    if (order > degree()) return {};
    std::vector<cplx> out(coeffs_.size() - static_cast<size_t>(order));
    for (size_t k = 0; k < out.size(); ++k) {
        double factor = 1.0;
        for (int t = 0; t < order; ++t) factor *= static_cast<double>(k + static_cast<size_t>(order) - static_cast<size_t>(t));
        out[k] = coeffs_[k + static_cast<size_t>(order)] * factor;
    }
    return Poly(std::move(out));
}

cplx Poly::integral() const {
    cplx acc = 0.0;
    for (size_t k = 0; k < coeffs_.size(); ++k) acc += coeffs_[k] / static_cast<double>(k + 1);
    return acc;
}

Poly& Poly::operator+=(const Poly& other) {
    if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), 0.0);
    for (size_t k = 0; k < other.coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
    trim();
    return *this;
}

Poly& Poly::operator-=(const Poly& other) {
    if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), 0.0);
    for (size_t k = 0; k < other.coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
    trim();
    return *this;
}

Poly& Poly::operator*=(cplx c) {
    for (auto& v : coeffs_) v *= c;
    trim();
    return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<cplx> out(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
    for (size_t i = 0; i < a.coeffs_.size(); ++i)
        for (size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Poly(std::move(out));
}

cplx inner(const Poly& f, const Poly& g) {
    cplx acc = 0.0;
    const auto& fc = f.coefficients();
    const auto& gc = g.coefficients();
    for (size_t i = 0; i < fc.size(); ++i)
        for (size_t j = 0; j < gc.size(); ++j) acc += fc[i] * std::conj(gc[j]) / static_cast<double>(i + j + 1);
    return acc;
}

double max_abs_coefficient(const Poly& p) {
    double m = 0.0;
    for (const auto& c : p.coefficients()) m = std::max(m, std::abs(c));
    return m;
}

}  // namespace birkreg
