#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sparsedep {

using Int = std::int64_t;

enum class AtomKind { Iterator = 0, Symbolic = 1, Call = 2 };

class AffineExpr;

// An opaque integer-valued atom: a plain variable, a symbolic constant, or an
// uninterpreted function applied to affine arguments.
class Atom {
public:
    static Atom iterator(std::string name);
    static Atom symbolic(std::string name);
    static Atom call(std::string symbol, std::vector<AffineExpr> args);

    AtomKind kind() const { return kind_; }
    bool is_call() const { return kind_ == AtomKind::Call; }
    const std::string& name() const { return name_; }
    const std::vector<AffineExpr>& args() const;
    // canonical text, also the identity of the atom
    const std::string& key() const { return key_; }
    int depth() const { return depth_; }

    bool operator==(const Atom& other) const { return kind_ == other.kind_ && key_ == other.key_; }
    std::strong_ordering operator<=>(const Atom& other) const;

private:
    Atom() = default;
    AtomKind kind_ = AtomKind::Iterator;
    std::string name_;
    std::shared_ptr<const std::vector<AffineExpr>> args_;
    std::string key_;
    int depth_ = 0;
};

struct Term {
    Atom atom;
    Int coef;
};

class AffineExpr {
public:
    AffineExpr() = default;
    explicit AffineExpr(Int constant) : constant_(constant) {}
    explicit AffineExpr(const Atom& atom, Int coef = 1);

    Int constant() const { return constant_; }
    const std::vector<Term>& terms() const { return terms_; }
    bool is_constant() const { return terms_.empty(); }
    Int coefficient(const Atom& atom) const;
    bool mentions(const Atom& atom) const { return coefficient(atom) != 0; }

    AffineExpr& operator+=(const AffineExpr& other);
    AffineExpr& operator-=(const AffineExpr& other);
    AffineExpr& operator*=(Int factor);
    AffineExpr& operator+=(Int value) { constant_ += value; return *this; }
    AffineExpr& operator-=(Int value) { constant_ -= value; return *this; }
    friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
    friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
    friend AffineExpr operator*(AffineExpr a, Int f) { return a *= f; }
    friend AffineExpr operator+(AffineExpr a, Int v) { return a += v; }
    friend AffineExpr operator-(AffineExpr a, Int v) { return a -= v; }
    AffineExpr operator-() const { AffineExpr r = *this; r *= -1; return r; }

    void set_constant(Int c) { constant_ = c; }
    void add_term(const Atom& atom, Int coef);

    // Replace atoms bottom-up. The callback sees atoms whose arguments were
    // already rewritten and returns the replacement expression (or nullopt to
    // keep the atom).
    AffineExpr rewrite(const std::function<std::optional<AffineExpr>(const Atom&)>& fn) const;
    AffineExpr substitute(const Atom& atom, const AffineExpr& replacement) const;

    // Atoms at the top level (not inside call arguments).
    std::vector<Atom> atoms() const;
    // All call atoms including nested ones, innermost first.
    void collect_calls(std::vector<Atom>& out) const;
    // Every iterator name appearing anywhere, including inside call arguments.
    void collect_iterators(std::set<std::string>& out) const;
    // Iterators appearing inside call arguments only.
    void collect_call_arg_iterators(std::set<std::string>& out) const;

    std::string to_string() const;
    std::string compact() const;

    bool operator==(const AffineExpr& other) const;
    std::strong_ordering operator<=>(const AffineExpr& other) const;

private:
    std::vector<Term> terms_;  // sorted by atom, no zero coefficients
    Int constant_ = 0;
};

Int gcd_int(Int a, Int b);
Int floor_div(Int a, Int b);
Int ceil_div(Int a, Int b);

}  // namespace sparsedep
