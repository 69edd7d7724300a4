#pragma once

#include <span>
#include <vector>

#include "birkreg/model.hpp"

namespace birkreg {

/// Leading form U_j^0(y) = a y^(k)(0) + b y^(k)(1) of a normalized row.
struct LeadingForm {
    int order = 0;
    cplx a;
    cplx b;
    friend bool operator==(const LeadingForm&, const LeadingForm&) = default;
};

/// Boundary rows recombined to minimal total order, sorted by descending
/// order (rows of equal order keep their input order).
struct NormalizedBC {
    std::vector<BoundaryRow> rows;
    std::vector<int> orders;
    int total_order = 0;
    std::vector<LeadingForm> leading;

    int n() const { return static_cast<int>(rows.size()); }
};

/// Row-echelon elimination on the leading pairs (a_j, b_j), from the top
/// derivative order down. At most two rows survive per order, so the result
/// has k_j > k_{j+2} and independent leading forms, hence minimal total order.
NormalizedBC reduce_total_order(std::span<const BoundaryRow> rows);

std::vector<LeadingForm> leading_forms(const NormalizedBC& nbc);

inline NormalizedBC normalize(const OperatorSpec& spec) { return reduce_total_order(spec.rows); }

}  // namespace birkreg
