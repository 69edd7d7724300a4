#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "birkreg/poly.hpp"

namespace birkreg {

/// One boundary form U(y) = sum_s a_s y^(s)(0) + b_s y^(s)(1).
/// Both coefficient vectors have length n (the operator order).
struct BoundaryRow {
    std::vector<cplx> at_zero;
    std::vector<cplx> at_one;

    BoundaryRow() = default;
    explicit BoundaryRow(int n) : at_zero(static_cast<size_t>(n), 0.0), at_one(static_cast<size_t>(n), 0.0) {}

    int size() const { return static_cast<int>(at_zero.size()); }
    bool is_zero() const;
    double max_abs() const;
    /// Highest s with |a_s| + |b_s| > tol, or -1 for the zero row.
    int order(double tol = 0.0) const;

    BoundaryRow& operator+=(const BoundaryRow& other);
    BoundaryRow& operator*=(cplx c);
    friend BoundaryRow operator*(cplx c, BoundaryRow r) { return r *= c; }
    friend BoundaryRow operator+(BoundaryRow a, const BoundaryRow& b) { return a += b; }
    friend bool operator==(const BoundaryRow&, const BoundaryRow&) = default;
};

/// l(y) = (-i)^n y^(n).
struct ModelForm {
    friend bool operator==(const ModelForm&, const ModelForm&) = default;
};

/// l(y) = (-i)^n y^(n) + p_2 y^(n-2) + ... + p_n y; key j holds p_j.
struct ClassicalForm {
    std::map<int, Poly> p;
    friend bool operator==(const ClassicalForm&, const ClassicalForm&) = default;
};

/// l(y) = sum_{k=0}^m (-1)^k { (p_k y^(k))^(k) - [ (q_k y^(k))^(k-1) + (r_k y^(k-1))^(k) ] }
/// with p_m = 1. Vectors have length m + 1; q[0] and r[0] are always zero.
struct DivergenceForm {
    std::vector<Poly> p;
    std::vector<Poly> q;
    std::vector<Poly> r;

    int m() const { return static_cast<int>(p.size()) - 1; }
    static DivergenceForm pure(int m);
    friend bool operator==(const DivergenceForm&, const DivergenceForm&) = default;
};

using OperatorForm = std::variant<ModelForm, ClassicalForm, DivergenceForm>;

struct OperatorSpec {
    int order = 0;
    OperatorForm form;
    std::vector<BoundaryRow> rows;

    bool is_divergence() const { return std::holds_alternative<DivergenceForm>(form); }
    const DivergenceForm& divergence() const;
    std::string form_name() const;
    friend bool operator==(const OperatorSpec&, const OperatorSpec&) = default;
};

/// Checks order/parity/row-count/rank invariants; throws schema_error or
/// rank_deficient_error.
void validate(const OperatorSpec& spec);

/// Numerical rank of the n x 2n matrix [a | b] built from the rows.
int boundary_rank(const std::vector<BoundaryRow>& rows);

OperatorSpec parse_spec(const nlohmann::json& document);
OperatorSpec parse_spec_text(const std::string& text);
OperatorSpec load_spec(const std::string& path);
nlohmann::json to_json(const OperatorSpec& spec);

nlohmann::json complex_to_json(cplx z);
nlohmann::json poly_to_json(const Poly& p);

/// Coefficients c_0..c_n with l(y) = sum_j c_j y^(j), obtained by expanding
/// every derivative of the divergence form with the Leibniz rule.
std::vector<Poly> expand_divergence(const DivergenceForm& form);

/// Same coefficient sequence for any form.
std::vector<Poly> classical_coefficients(const OperatorSpec& spec);

/// Applies sum_j c_j y^(j) to a polynomial y.
Poly apply_operator(const std::vector<Poly>& coefficients, const Poly& y);

/// Value of U(y) for a polynomial y.
cplx apply_row(const BoundaryRow& row, const Poly& y);

}  // namespace birkreg
