#pragma once

#include "sparsedep/relation.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sparsedep {

using BigInt = boost::multiprecision::cpp_int;

// sum(coef[k] * var[k]) + constant, compared against zero
struct LinearRow {
    std::vector<BigInt> coef;
    BigInt constant = 0;

    BigInt at(size_t k) const { return k < coef.size() ? coef[k] : BigInt(0); }
    bool is_constant() const;
    size_t nonzeros() const;
    bool operator==(const LinearRow& other) const;
};

class LinearSystem {
public:
    LinearSystem() = default;
    explicit LinearSystem(std::vector<std::string> vars);

    size_t add_var(const std::string& name);
    std::optional<size_t> index(const std::string& name) const;
    const std::vector<std::string>& vars() const { return vars_; }
    size_t size() const { return vars_.size(); }

    void add_eq(LinearRow row);
    void add_geq(LinearRow row);
    // Constraint over iterator / symbolic atoms; unknown names become vars.
    // Throws std::invalid_argument on call atoms.
    void add(const Constraint& c);
    LinearRow row(const AffineExpr& e);

    const std::vector<LinearRow>& eqs() const { return eqs_; }
    const std::vector<LinearRow>& ineqs() const { return ineqs_; }

    Constraint to_constraint(const LinearRow& row, bool eq) const;
    std::vector<Constraint> constraints() const;
    std::string to_string() const;

    // true when every constraint holds at the point (missing vars read as 0)
    bool satisfied_by(const std::map<std::string, BigInt>& point) const;

private:
    std::vector<std::string> vars_;
    std::map<std::string, size_t> index_;
    std::vector<LinearRow> eqs_;
    std::vector<LinearRow> ineqs_;
};

BigInt big_floor_div(const BigInt& a, const BigInt& b);
BigInt big_ceil_div(const BigInt& a, const BigInt& b);

}  // namespace sparsedep
