#pragma once

#include <initializer_list>
#include <vector>

#include "birkreg/errors.hpp"

namespace birkreg {

/// Complex polynomial on [0, 1], coefficients in ascending powers of x.
/// Trailing zero coefficients are always trimmed, so the zero polynomial
/// has no coefficients and degree -1.
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<cplx> coefficients);
    Poly(std::initializer_list<cplx> coefficients);

    static Poly constant(cplx c);
    static Poly monomial(int degree, cplx c = 1.0);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    const std::vector<cplx>& coefficients() const { return coeffs_; }
    /// Coefficient of x^k (zero beyond the degree).
    cplx coefficient(int k) const;

    cplx operator()(double x) const;
    cplx operator()(cplx x) const;

    Poly derivative(int order = 1) const;
    /// Integral over [0, 1].
    cplx integral() const;

    Poly& operator+=(const Poly& other);
    Poly& operator-=(const Poly& other);
    Poly& operator*=(cplx c);

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator-(Poly a) { return a *= -1.0; }
    friend Poly operator*(cplx c, Poly a) { return a *= c; }
    friend Poly operator*(Poly a, cplx c) { return a *= c; }
    friend Poly operator*(const Poly& a, const Poly& b);
    friend bool operator==(const Poly& a, const Poly& b) = default;

private:
    void trim();
    std::vector<cplx> coeffs_;
};

/// L2(0,1) inner product (f, g) = \int_0^1 f(x) conj(g(x)) dx, exact.
cplx inner(const Poly& f, const Poly& g);

/// Largest coefficient magnitude (0 for the zero polynomial).
double max_abs_coefficient(const Poly& p);

}  // namespace birkreg
