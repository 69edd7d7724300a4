#include "birkreg/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Dense>

namespace birkreg {

using nlohmann::json;

// ---------------------------------------------------------------- BoundaryRow

bool BoundaryRow::is_zero() const { return order(0.0) < 0; }

double BoundaryRow::max_abs() const {
    double m = 0.0;
    for (const auto& v : at_zero) m = std::max(m, std::abs(v));
    for (const auto& v : at_one) m = std::max(m, std::abs(v));
    return m;
}

int BoundaryRow::order(double tol) const {
    for (int s = size() - 1; s >= 0; --s) {
        const auto i = static_cast<size_t>(s);
        if (std::abs(at_zero[i]) > tol || std::abs(at_one[i]) > tol) return s;
    }
    return -1;
}

BoundaryRow& BoundaryRow::operator+=(const BoundaryRow& other) {
    for (size_t s = 0; s < at_zero.size(); ++s) {
        at_zero[s] += other.at_zero[s];
        at_one[s] += other.at_one[s];
    }
    return *this;
}

BoundaryRow& BoundaryRow::operator*=(cplx c) {
    for (auto& v : at_zero) v *= c;
    for (auto& v : at_one) v *= c;
    return *this;
}

// ---------------------------------------------------------------- forms

DivergenceForm DivergenceForm::pure(int m) {
    DivergenceForm f;
    f.p.assign(static_cast<size_t>(m) + 1, Poly{});
    f.q.assign(static_cast<size_t>(m) + 1, Poly{});
    f.r.assign(static_cast<size_t>(m) + 1, Poly{});
    f.p.back() = Poly::constant(1.0);
    return f;
}

const DivergenceForm& OperatorSpec::divergence() const {
    if (const auto* d = std::get_if<DivergenceForm>(&form)) return *d;
    throw argument_error("operator is not given in divergence form");
}

std::string OperatorSpec::form_name() const {
    switch (form.index()) {
        case 0: return "model";
        case 1: return "classical";
        default: return "divergence";
    }
}

int boundary_rank(const std::vector<BoundaryRow>& rows) {
    if (rows.empty()) return 0;
    const int n = rows.front().size();
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows.size()), 2 * n);
    for (size_t j = 0; j < rows.size(); ++j)
        for (int s = 0; s < n; ++s) {
            m(static_cast<Eigen::Index>(j), s) = rows[j].at_zero[static_cast<size_t>(s)];
            m(static_cast<Eigen::Index>(j), n + s) = rows[j].at_one[static_cast<size_t>(s)];
        }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > 1e-12 * sv(0)) ++rank;
    return rank;
}

void validate(const OperatorSpec& spec) {
    const int n = spec.order;
    if (n < 1) throw schema_error("order must be a positive integer");
    if (static_cast<int>(spec.rows.size()) != n)
        throw schema_error("expected " + std::to_string(n) + " boundary conditions, got " +
                           std::to_string(spec.rows.size()));
    for (size_t j = 0; j < spec.rows.size(); ++j) {
        const auto& row = spec.rows[j];
        if (row.size() != n || static_cast<int>(row.at_one.size()) != n)
            throw schema_error("boundary condition " + std::to_string(j) + " has the wrong length");
        for (size_t s = 0; s < row.at_zero.size(); ++s)
            if (!std::isfinite(row.at_zero[s].real()) || !std::isfinite(row.at_zero[s].imag()) ||
                !std::isfinite(row.at_one[s].real()) || !std::isfinite(row.at_one[s].imag()))
                throw schema_error("non-finite boundary coefficient");
        if (row.is_zero()) throw schema_error("boundary condition " + std::to_string(j) + " is identically zero");
    }
    if (const auto* d = std::get_if<DivergenceForm>(&spec.form)) {
        if (n % 2 != 0) throw schema_error("divergence form requires even order");
        if (d->m() != n / 2 || d->q.size() != d->p.size() || d->r.size() != d->p.size())
            throw schema_error("divergence coefficient tables must have m + 1 entries");
        if (!(d->p.back() == Poly::constant(1.0))) throw schema_error("divergence form requires p_m = 1");
        if (!d->q.front().is_zero() || !d->r.front().is_zero())
            throw schema_error("divergence form has no q_0 or r_0 term");
    }
    if (const auto* c = std::get_if<ClassicalForm>(&spec.form)) {
        for (const auto& [j, poly] : c->p)
            if (j < 2 || j > n) throw schema_error("classical coefficient index p_" + std::to_string(j) + " out of range 2..n");
    }
    if (boundary_rank(spec.rows) < n) throw rank_deficient_error("boundary conditions linearly dependent");
}

// ---------------------------------------------------------------- JSON

namespace {

cplx parse_complex(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw schema_error(where + ": complex values are [re, im] pairs");
    const double re = v[0].get<double>();
    const double im = v[1].get<double>();
    if (!std::isfinite(re) || !std::isfinite(im)) throw schema_error(where + ": non-finite value");
    return {re, im};
}

Poly parse_poly(const json& v, const std::string& where) {
    if (!v.is_array()) throw schema_error(where + ": polynomial must be an array of [re, im] pairs");
    std::vector<cplx> c;
    c.reserve(v.size());
    for (const auto& item : v) c.push_back(parse_complex(item, where));
    return Poly(std::move(c));
}

int parse_index(const std::string& key, const std::string& where) {
    size_t pos = 0;
    int value = 0;
    try {
        value = std::stoi(key, &pos);
    } catch (const std::exception&) {
        throw schema_error(where + ": key '" + key + "' is not an integer");
    }
    if (pos != key.size() || value < 0) throw schema_error(where + ": key '" + key + "' is not a non-negative integer");
    return value;
}

std::map<int, Poly> parse_poly_table(const json& doc, const char* name) {
    std::map<int, Poly> out;
    if (!doc.contains(name)) return out;
    const auto& table = doc.at(name);
    if (!table.is_object()) throw schema_error(std::string("form.") + name + " must be an object");
    for (const auto& [key, value] : table.items()) {
        const std::string where = std::string("form.") + name + "." + key;
        out[parse_index(key, where)] = parse_poly(value, where);
    }
    return out;
}

BoundaryRow parse_row(const json& doc, int n, size_t index) {
    const std::string where = "boundary_conditions[" + std::to_string(index) + "]";
    if (!doc.is_object()) throw schema_error(where + " must be an object");
    for (const auto& [key, _] : doc.items())
        if (key != "a" && key != "b") throw schema_error(where + ": unknown key '" + key + "'");
    BoundaryRow row(n);
    for (const char* side : {"a", "b"}) {
        if (!doc.contains(side)) continue;
        const auto& table = doc.at(side);
        if (!table.is_object()) throw schema_error(where + "." + side + " must be an object");
        for (const auto& [key, value] : table.items()) {
            const int s = parse_index(key, where + "." + side);
            if (s >= n) throw schema_error(where + ": derivative order " + key + " must be below the operator order");
            auto& slot = side[0] == 'a' ? row.at_zero : row.at_one;
            slot[static_cast<size_t>(s)] = parse_complex(value, where + "." + side + "." + key);
        }
    }
    return row;
}

json poly_table_json(const std::vector<Poly>& polys, size_t first) {
    json out = json::object();
    for (size_t k = first; k < polys.size(); ++k)
        if (!polys[k].is_zero()) out[std::to_string(k)] = poly_to_json(polys[k]);
    return out;
}

}  // namespace

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json poly_to_json(const Poly& p) {
    json out = json::array();
    for (const auto& c : p.coefficients()) out.push_back(complex_to_json(c));
    return out;
}

OperatorSpec parse_spec(const json& doc) {
    if (!doc.is_object()) throw schema_error("operator spec must be a JSON object");
    for (const auto& [key, _] : doc.items())
        if (key != "order" && key != "form" && key != "boundary_conditions" && key != "name" && key != "description")
            throw schema_error("unknown top-level key '" + key + "'");
    if (!doc.contains("order") || !doc.at("order").is_number_integer())
        throw schema_error("'order' must be an integer");
    OperatorSpec spec;
    spec.order = doc.at("order").get<int>();
    if (spec.order < 1) throw schema_error("'order' must be at least 1");
    const int n = spec.order;

    if (!doc.contains("form") || !doc.at("form").is_object() || !doc.at("form").contains("type") ||
        !doc.at("form").at("type").is_string())
        throw schema_error("'form' must be an object with a string 'type'");
    const auto& form = doc.at("form");
    const auto type = form.at("type").get<std::string>();
    if (type == "model") {
        spec.form = ModelForm{};
    } else if (type == "classical") {
        ClassicalForm c;
        c.p = parse_poly_table(form, "p");
        for (const auto& [j, _] : c.p)
            if (j < 2 || j > n) throw schema_error("classical coefficient p_" + std::to_string(j) + " out of range 2..n");
        std::erase_if(c.p, [](const auto& kv) { return kv.second.is_zero(); });
        spec.form = std::move(c);
    } else if (type == "divergence") {
        if (n % 2 != 0) throw schema_error("divergence form requires even order, got " + std::to_string(n));
        const int m = n / 2;
        auto d = DivergenceForm::pure(m);
        for (const auto& [k, poly] : parse_poly_table(form, "p")) {
            if (k > m) throw schema_error("divergence coefficient p_" + std::to_string(k) + " exceeds m");
            if (k == m && !(poly == Poly::constant(1.0))) throw schema_error("divergence form requires p_m = 1");
            d.p[static_cast<size_t>(k)] = poly;
        }
        for (const char* name : {"q", "r"}) {
            auto& target = name[0] == 'q' ? d.q : d.r;
            for (const auto& [k, poly] : parse_poly_table(form, name)) {
                if (k == 0) throw schema_error(std::string("divergence form has no ") + name + "_0 term");
                if (k > m) throw schema_error(std::string("divergence coefficient ") + name + "_" + std::to_string(k) + " exceeds m");
                target[static_cast<size_t>(k)] = poly;
            }
        }
        spec.form = std::move(d);
    } else {
        throw schema_error("unknown form type '" + type + "'");
    }

    if (!doc.contains("boundary_conditions") || !doc.at("boundary_conditions").is_array())
        throw schema_error("'boundary_conditions' must be an array");
    const auto& rows = doc.at("boundary_conditions");
    for (size_t j = 0; j < rows.size(); ++j) spec.rows.push_back(parse_row(rows[j], n, j));
    validate(spec);
    return spec;
}

OperatorSpec parse_spec_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw schema_error(std::string("malformed JSON: ") + e.what());
    }
    return parse_spec(doc);
}

OperatorSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error("cannot open '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_spec_text(buffer.str());
}

json to_json(const OperatorSpec& spec) {
    json doc;
    doc["order"] = spec.order;
    json form;
    form["type"] = spec.form_name();
    if (const auto* c = std::get_if<ClassicalForm>(&spec.form)) {
        form["p"] = json::object();
        for (const auto& [j, poly] : c->p)
            if (!poly.is_zero()) form["p"][std::to_string(j)] = poly_to_json(poly);
    } else if (const auto* d = std::get_if<DivergenceForm>(&spec.form)) {
        form["p"] = poly_table_json(d->p, 0);
        form["q"] = poly_table_json(d->q, 1);
        form["r"] = poly_table_json(d->r, 1);
    }
    doc["form"] = form;
    json rows = json::array();
    for (const auto& row : spec.rows) {
        json a = json::object(), b = json::object();
        for (size_t s = 0; s < row.at_zero.size(); ++s) {
            if (row.at_zero[s] != cplx(0.0)) a[std::to_string(s)] = complex_to_json(row.at_zero[s]);
            if (row.at_one[s] != cplx(0.0)) b[std::to_string(s)] = complex_to_json(row.at_one[s]);
        }
        rows.push_back({{"a", a}, {"b", b}});
    }
    doc["boundary_conditions"] = rows;
    return doc;
}

// ---------------------------------------------------------------- expansion

namespace {

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Adds sign * (f y^(a))^(b) to the coefficient table by the Leibniz rule.
void add_leibniz(std::vector<Poly>& c, const Poly& f, int a, int b, double sign) {
    if (f.is_zero() || a < 0 || b < 0) return;
    for (int i = 0; i <= b; ++i) {
        const Poly term = (sign * binomial(b, i)) * f.derivative(b - i);
        c[static_cast<size_t>(a + i)] += term;
    }
}

}  // namespace

std::vector<Poly> expand_divergence(const DivergenceForm& form) {
    const int m = form.m();
    std::vector<Poly> c(static_cast<size_t>(2 * m) + 1);
    for (int k = 0; k <= m; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        const auto ku = static_cast<size_t>(k);
        add_leibniz(c, form.p[ku], k, k, sign);
        if (k >= 1) {
            add_leibniz(c, form.q[ku], k, k - 1, -sign);
            add_leibniz(c, form.r[ku], k - 1, k, -sign);
        }
    }
    return c;
}

std::vector<Poly> classical_coefficients(const OperatorSpec& spec) {
    const int n = spec.order;
    if (const auto* d = std::get_if<DivergenceForm>(&spec.form)) return expand_divergence(*d);
    std::vector<Poly> c(static_cast<size_t>(n) + 1);
    cplx lead = 1.0;
    for (int k = 0; k < n; ++k) lead *= cplx(0.0, -1.0);
    c[static_cast<size_t>(n)] = Poly::constant(lead);
    if (const auto* cl = std::get_if<ClassicalForm>(&spec.form))
        for (const auto& [j, poly] : cl->p) c[static_cast<size_t>(n - j)] += poly;
    return c;
}

Poly apply_operator(const std::vector<Poly>& coefficients, const Poly& y) {
    Poly out;
    for (size_t j = 0; j < coefficients.size(); ++j)
        if (!coefficients[j].is_zero()) out += coefficients[j] * y.derivative(static_cast<int>(j));
    return out;
}

cplx apply_row(const BoundaryRow& row, const Poly& y) {
    cplx acc = 0.0;
    for (int s = 0; s < row.size(); ++s) {
        const auto ds = y.derivative(s);
        acc += row.at_zero[static_cast<size_t>(s)] * ds(0.0) + row.at_one[static_cast<size_t>(s)] * ds(1.0);
    }
    return acc;
}

}  // namespace birkreg
