#include "birkreg/normalize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace birkreg {

namespace {

struct WorkRow {
    BoundaryRow row;
    size_t input_index;
    int order;
    bool final = false;
};

cplx& pair_entry(WorkRow& w, int k, int component) {
    const auto s = static_cast<size_t>(k);
    return component == 0 ? w.row.at_zero[s] : w.row.at_one[s];
}

// row -= f * pivot, then clear the eliminated entry exactly.
void eliminate(WorkRow& target, const WorkRow& pivot, int k, int component) {
    const auto s = static_cast<size_t>(k);
    const cplx num = component == 0 ? target.row.at_zero[s] : target.row.at_one[s];
    const cplx den = component == 0 ? pivot.row.at_zero[s] : pivot.row.at_one[s];
    if (num == cplx(0.0)) return;
    const cplx f = num / den;
    for (size_t t = 0; t <= s; ++t) {
        target.row.at_zero[t] -= f * pivot.row.at_zero[t];
        target.row.at_one[t] -= f * pivot.row.at_one[t];
    }
    pair_entry(target, k, component) = 0.0;
}

int total(const std::vector<WorkRow>& work) {
    return std::accumulate(work.begin(), work.end(), 0, [](int acc, const WorkRow& w) { return acc + w.order; });
}

}  // namespace

NormalizedBC reduce_total_order(std::span<const BoundaryRow> rows) {
    const int n = static_cast<int>(rows.size());
    if (n == 0) throw argument_error("no boundary conditions");
    std::vector<BoundaryRow> copy(rows.begin(), rows.end());
    if (boundary_rank(copy) < n) throw rank_deficient_error("boundary conditions linearly dependent");

    double scale = 0.0;
    for (const auto& r : copy) scale = std::max(scale, r.max_abs());
    const double tol = 1e-12 * scale;

    std::vector<WorkRow> work;
    work.reserve(copy.size());
    for (size_t j = 0; j < copy.size(); ++j) work.push_back({copy[j], j, copy[j].order(tol)});

    int kappa = total(work);
    for (int k = n - 1; k >= 0; --k) {
        std::vector<size_t> level;
        for (size_t j = 0; j < work.size(); ++j)
            if (!work[j].final && work[j].order == k) level.push_back(j);
        if (level.empty()) continue;

        auto pair_norm = [&](size_t j) {
            return std::hypot(std::abs(pair_entry(work[j], k, 0)), std::abs(pair_entry(work[j], k, 1)));
        };
        size_t p1 = level.front();
        for (size_t j : level)
            if (pair_norm(j) > pair_norm(p1)) p1 = j;
        const int c1 = std::abs(pair_entry(work[p1], k, 0)) >= std::abs(pair_entry(work[p1], k, 1)) ? 0 : 1;
        const int c2 = 1 - c1;

        std::vector<size_t> rest;
        for (size_t j : level)
            if (j != p1) {
                eliminate(work[j], work[p1], k, c1);
                rest.push_back(j);
            }
        work[p1].final = true;

        if (!rest.empty()) {
            size_t p2 = rest.front();
            for (size_t j : rest)
                if (std::abs(pair_entry(work[j], k, c2)) > std::abs(pair_entry(work[p2], k, c2))) p2 = j;
            if (std::abs(pair_entry(work[p2], k, c2)) > tol) {
                for (size_t j : rest)
                    if (j != p2) eliminate(work[j], work[p2], k, c2);
                work[p2].final = true;
            }
            for (size_t j : rest) {
                if (work[j].final) continue;
                pair_entry(work[j], k, 0) = 0.0;
                pair_entry(work[j], k, 1) = 0.0;
                work[j].order = work[j].row.order(tol);
                if (work[j].order < 0) throw rank_deficient_error("boundary conditions linearly dependent");
            }
        }
        const int next = total(work);
        if (next > kappa) throw std::logic_error("total order increased during elimination");
        kappa = next;
    }

    std::stable_sort(work.begin(), work.end(), [](const WorkRow& x, const WorkRow& y) {
        if (x.order != y.order) return x.order > y.order;
        return x.input_index < y.input_index;
    });

    NormalizedBC out;
    for (auto& w : work) {
        // Entries above the row order are float residue from elimination.
        for (int s = w.order + 1; s < n; ++s) {
            w.row.at_zero[static_cast<size_t>(s)] = 0.0;
            w.row.at_one[static_cast<size_t>(s)] = 0.0;
        }
        out.rows.push_back(w.row);
        out.orders.push_back(w.order);
        out.total_order += w.order;
    }
    out.leading = leading_forms(out);
    return out;
}

std::vector<LeadingForm> leading_forms(const NormalizedBC& nbc) {
    std::vector<LeadingForm> out;
    out.reserve(nbc.rows.size());
    for (size_t j = 0; j < nbc.rows.size(); ++j) {
        const int k = nbc.orders[j];
        const auto s = static_cast<size_t>(k);
        out.push_back({k, nbc.rows[j].at_zero[s], nbc.rows[j].at_one[s]});
    }
    return out;
}

}  // namespace birkreg
