#include "sparsedep/linear_system.hpp"

#include <stdexcept>

namespace sparsedep {

BigInt big_floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    BigInt r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

BigInt big_ceil_div(const BigInt& a, const BigInt& b) { return -big_floor_div(-a, b); }

bool LinearRow::is_constant() const {
    for (const auto& c : coef)
        if (c != 0) return false;
    return true;
}

size_t LinearRow::nonzeros() const {
    size_t n = 0;
    for (const auto& c : coef)
        if (c != 0) ++n;
    return n;
}

bool LinearRow::operator==(const LinearRow& other) const {
    if (constant != other.constant) return false;
    size_t n = std::max(coef.size(), other.coef.size());
    for (size_t k = 0; k < n; ++k)
        if (at(k) != other.at(k)) return false;
    return true;
}

LinearSystem::LinearSystem(std::vector<std::string> vars) {
    for (auto& v : vars) add_var(v);
}

size_t LinearSystem::add_var(const std::string& name) {
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    size_t k = vars_.size();
    vars_.push_back(name);
    index_[name] = k;
    return k;
}

std::optional<size_t> LinearSystem::index(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void LinearSystem::add_eq(LinearRow row) {
    row.coef.resize(std::max(row.coef.size(), vars_.size()));
    eqs_.push_back(std::move(row));
}

void LinearSystem::add_geq(LinearRow row) {
    row.coef.resize(std::max(row.coef.size(), vars_.size()));
    ineqs_.push_back(std::move(row));
}

LinearRow LinearSystem::row(const AffineExpr& e) {
    for (const auto& t : e.terms()) {
        if (t.atom.is_call()) throw std::invalid_argument("call atom '" + t.atom.key() + "' in linear system");
        add_var(t.atom.name());
    }
    LinearRow r;
    r.coef.assign(vars_.size(), 0);
    for (const auto& t : e.terms()) r.coef[index_.at(t.atom.name())] += t.coef;
    r.constant = e.constant();
    return r;
}

void LinearSystem::add(const Constraint& c) {
    LinearRow r = row(c.expr);
    if (c.is_eq())
        add_eq(std::move(r));
    else
        add_geq(std::move(r));
}

Constraint LinearSystem::to_constraint(const LinearRow& row, bool eq) const {
    AffineExpr e;
    for (size_t k = 0; k < row.coef.size() && k < vars_.size(); ++k)
        if (row.coef[k] != 0) e.add_term(Atom::iterator(vars_[k]), static_cast<Int>(row.coef[k]));
    e.set_constant(static_cast<Int>(row.constant));
    return eq ? Constraint::eq(e) : Constraint::geq(e);
}

std::vector<Constraint> LinearSystem::constraints() const {
    std::vector<Constraint> out;
    for (const auto& r : eqs_) out.push_back(to_constraint(r, true));
    for (const auto& r : ineqs_) out.push_back(to_constraint(r, false));
    return out;
}

std::string LinearSystem::to_string() const {
    std::string out;
    for (const auto& c : constraints()) {
        if (!out.empty()) out += " && ";
        out += c.to_string();
    }
    return out.empty() ? "true" : out;
}

bool LinearSystem::satisfied_by(const std::map<std::string, BigInt>& point) const {
    auto eval = [&](const LinearRow& r) {
        BigInt v = r.constant;
        for (size_t k = 0; k < r.coef.size() && k < vars_.size(); ++k) {
            if (r.coef[k] == 0) continue;
            auto it = point.find(vars_[k]);
            if (it != point.end()) v += r.coef[k] * it->second;
        }
        return v;
    };
    for (const auto& r : eqs_)
        if (eval(r) != 0) return false;
    for (const auto& r : ineqs_)
        if (eval(r) < 0) return false;
    return true;
}

}  // namespace sparsedep
