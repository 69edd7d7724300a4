#include <doctest.h>

#include <random>

#include "birkreg/model.hpp"
#include "support.hpp"

using namespace birkreg;

namespace {

const char* divergence_spec(const char* form, const char* rows, int order) {
    static std::string text;
    text = std::string(R"({"order": )") + std::to_string(order) + R"(, "form": )" + form +
           R"(, "boundary_conditions": )" + rows + "}";
    return text.c_str();
}

// l(y) straight from the divergence definition, every derivative taken on
// the full product.
Poly divergence_direct(const DivergenceForm& f, const Poly& y) {
    Poly out = f.p[0] * y;
    for (int k = 1; k <= f.m(); ++k) {
        const auto ku = static_cast<size_t>(k);
        Poly term = (f.p[ku] * y.derivative(k)).derivative(k);
        term -= (f.q[ku] * y.derivative(k)).derivative(k - 1);
        term -= (f.r[ku] * y.derivative(k - 1)).derivative(k);
        out += (k % 2 ? -1.0 : 1.0) * term;
    }
    return out;
}

Poly random_poly(std::mt19937_64& rng, int degree) {
    std::vector<cplx> c;
    for (int i = 0; i <= degree; ++i) c.push_back(support::random_complex(rng));
    return Poly(c);
}

}  // namespace

TEST_CASE("gallery example parses") {
    const auto spec = support::gallery("example4");
    CHECK(spec.order == 4);
    CHECK(spec.rows.size() == 4);
    CHECK(spec.is_divergence());
    CHECK(spec.rows[0].at_zero[3] == cplx(-1.0));
    CHECK(spec.rows[1].at_one[0] == cplx(1.0));
}

TEST_CASE("schema violations") {
    const char* two_rows = R"([{"a": {"0": [1, 0]}}, {"a": {"0": [1, 0]}}])";
    CHECK_THROWS_AS(parse_spec_text(divergence_spec(R"({"type": "model"})", two_rows, 2)), rank_deficient_error);

    const char* three_rows = R"([{"a": {"0": [1, 0]}}, {"b": {"0": [1, 0]}}, {"a": {"1": [1, 0]}}])";
    CHECK_THROWS_AS(parse_spec_text(divergence_spec(R"({"type": "divergence"})", three_rows, 3)), schema_error);

    const char* rows = R"([{"a": {"0": [1, 0]}}, {"b": {"0": [1, 0]}}])";
    CHECK_THROWS_AS(parse_spec_text(divergence_spec(R"({"type": "divergence", "p": {"1": [[2, 0]]}})", rows, 2)),
                    schema_error);
    CHECK_THROWS_AS(parse_spec_text(divergence_spec(R"({"type": "divergence", "r": {"0": [[1, 0]]}})", rows, 2)),
                    schema_error);
    CHECK_THROWS_AS(parse_spec_text(divergence_spec(R"({"type": "spline"})", rows, 2)), schema_error);
    CHECK_THROWS_AS(parse_spec_text(R"({"order": 2, "form": {"type": "model"}, "extra": 1,
                                       "boundary_conditions": [{"a": {"0": [1, 0]}}, {"b": {"0": [1, 0]}}]})"),
                    schema_error);
    CHECK_THROWS_AS(parse_spec_text(divergence_spec(R"({"type": "model"})", R"([{"a": {"2": [1, 0]}}, {"b": {"0": [1, 0]}}])", 2)),
                    schema_error);
    CHECK_THROWS_AS(parse_spec_text("{not json"), schema_error);
    CHECK_THROWS_AS(load_spec("/nonexistent/spec.json"), error);
}

TEST_CASE("expansion of small divergence forms") {
    auto f = DivergenceForm::pure(1);
    auto c = expand_divergence(f);
    REQUIRE(c.size() == 3);
    CHECK(c[2] == Poly::constant(-1.0));
    CHECK(c[1].is_zero());
    CHECK(c[0].is_zero());

    f.q[1] = Poly::constant(1.0);
    c = expand_divergence(f);
    CHECK(c[2] == Poly::constant(-1.0));
    CHECK(c[1] == Poly::constant(1.0));
    CHECK(c[0].is_zero());

    c = expand_divergence(DivergenceForm::pure(2));
    REQUIRE(c.size() == 5);
    CHECK(c[4] == Poly::constant(1.0));
    for (int j = 0; j < 4; ++j) CHECK(c[static_cast<size_t>(j)].is_zero());
}

TEST_CASE("expansion matches direct differentiation on random inputs") {
    std::mt19937_64 rng(7);
    for (int m = 1; m <= 3; ++m) {
        auto f = DivergenceForm::pure(m);
        f.p[0] = random_poly(rng, 2);
        for (int k = 1; k <= m; ++k) {
            if (k < m) f.p[static_cast<size_t>(k)] = random_poly(rng, 3);
            f.q[static_cast<size_t>(k)] = random_poly(rng, 2);
            f.r[static_cast<size_t>(k)] = random_poly(rng, 3);
        }
        const auto c = expand_divergence(f);
        CHECK(c.back() == Poly::constant(m % 2 ? -1.0 : 1.0));
        for (int trial = 0; trial < 30; ++trial) {
            const auto y = random_poly(rng, 2 * m + 5);
            const auto direct = divergence_direct(f, y);
            const auto expanded = apply_operator(c, y);
            const double scale = max_abs_coefficient(direct);
            CHECK(max_abs_coefficient(direct - expanded) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("classical coefficients carry (-i)^n") {
    const auto model = parse_spec_text(R"({"order": 3, "form": {"type": "model"}, "boundary_conditions": [
        {"a": {"0": [1, 0]}}, {"b": {"0": [1, 0]}}, {"a": {"1": [1, 0]}}]})");
    const auto c = classical_coefficients(model);
    REQUIRE(c.size() == 4);
    CHECK(c[3] == Poly::constant(cplx(0.0, 1.0)));

    const auto classical = parse_spec_text(R"({"order": 2, "form": {"type": "classical", "p": {"2": [[0, 0], [3, 0]]}},
        "boundary_conditions": [{"a": {"0": [1, 0]}}, {"b": {"0": [1, 0]}}]})");
    const auto cc = classical_coefficients(classical);
    CHECK(cc[2] == Poly::constant(-1.0));
    CHECK(cc[0] == Poly({0.0, 3.0}));
}

TEST_CASE("parse then serialize then parse is the identity") {
    for (const auto& name : support::gallery_names()) {
        const auto spec = support::gallery(name);
        CHECK(parse_spec(to_json(spec)) == spec);
    }
    const auto spec = parse_spec_text(R"({"order": 2, "form": {"type": "divergence", "p": {"0": [[1, 2], [0, -1]]},
        "q": {"1": [[0.5, 0]]}, "r": {"1": [[0, 0], [1, 1]]}},
        "boundary_conditions": [{"a": {"0": [1, 0], "1": [0, 2]}}, {"b": {"0": [1, 0]}}]})");
    CHECK(parse_spec(to_json(spec)) == spec);
}

TEST_CASE("boundary rows apply to polynomials") {
    const auto spec = support::gallery("example4");
    const Poly y{1.0, 2.0, 3.0, 4.0};  // y(0)=1, y''(0)=6, y'''=24, y(1)=10
    CHECK(apply_row(spec.rows[0], y) == cplx(-24.0 + 6.0 + 1.0));
    CHECK(apply_row(spec.rows[1], y) == cplx(24.0 + 10.0));
}
