#include "sparsedep/expr.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace sparsedep {

Int gcd_int(Int a, Int b) {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b != 0) {
        Int t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Int floor_div(Int a, Int b) {
    Int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

Int ceil_div(Int a, Int b) { return -floor_div(-a, b); }

Atom Atom::iterator(std::string name) {
    Atom a;
    a.kind_ = AtomKind::Iterator;
    a.key_ = name;
    a.name_ = std::move(name);
    return a;
}

Atom Atom::symbolic(std::string name) {
    Atom a;
    a.kind_ = AtomKind::Symbolic;
    a.key_ = name;
    a.name_ = std::move(name);
    return a;
}

Atom Atom::call(std::string symbol, std::vector<AffineExpr> args) {
    Atom a;
    a.kind_ = AtomKind::Call;
    std::string key = symbol + "(";
    int depth = 0;
    for (size_t k = 0; k < args.size(); ++k) {
        if (k) key += ",";
        key += args[k].compact();
        for (const auto& t : args[k].terms())
            depth = std::max(depth, t.atom.depth());
    }
    key += ")";
    a.depth_ = depth + 1;
    a.key_ = std::move(key);
    a.name_ = std::move(symbol);
    a.args_ = std::make_shared<const std::vector<AffineExpr>>(std::move(args));
    return a;
}

const std::vector<AffineExpr>& Atom::args() const {
    static const std::vector<AffineExpr> none;
    return args_ ? *args_ : none;
}

std::strong_ordering Atom::operator<=>(const Atom& other) const {
    if (kind_ != other.kind_) return static_cast<int>(kind_) <=> static_cast<int>(other.kind_);
    return key_ <=> other.key_;
}

AffineExpr::AffineExpr(const Atom& atom, Int coef) {
    if (coef != 0) terms_.push_back({atom, coef});
}

Int AffineExpr::coefficient(const Atom& atom) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), atom,
                               [](const Term& t, const Atom& a) { return t.atom < a; });
    if (it != terms_.end() && it->atom == atom) return it->coef;
    return 0;
}

void AffineExpr::add_term(const Atom& atom, Int coef) {
    if (coef == 0) return;
    auto it = std::lower_bound(terms_.begin(), terms_.end(), atom,
                               [](const Term& t, const Atom& a) { return t.atom < a; });
    if (it != terms_.end() && it->atom == atom) {
        it->coef += coef;
        if (it->coef == 0) terms_.erase(it);
    } else {
        terms_.insert(it, Term{atom, coef});
    }
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& other) {
    for (const auto& t : other.terms_) add_term(t.atom, t.coef);
    constant_ += other.constant_;
    return *this;
}

AffineExpr& AffineExpr::operator-=(const AffineExpr& other) {
    for (const auto& t : other.terms_) add_term(t.atom, -t.coef);
    constant_ -= other.constant_;
    return *this;
}

AffineExpr& AffineExpr::operator*=(Int factor) {
    if (factor == 0) {
        terms_.clear();
        constant_ = 0;
        return *this;
    }
    for (auto& t : terms_) t.coef *= factor;
    constant_ *= factor;
    return *this;
}

AffineExpr AffineExpr::rewrite(const std::function<std::optional<AffineExpr>(const Atom&)>& fn) const {
    AffineExpr out(constant_);
    for (const auto& t : terms_) {
        Atom atom = t.atom;
        if (atom.is_call()) {
            std::vector<AffineExpr> args;
            args.reserve(atom.args().size());
            for (const auto& a : atom.args()) args.push_back(a.rewrite(fn));
            atom = Atom::call(atom.name(), std::move(args));
        }
        if (auto repl = fn(atom)) {
            out += (*repl) * t.coef;
        } else {
            out.add_term(atom, t.coef);
        }
    }
    return out;
}

AffineExpr AffineExpr::substitute(const Atom& target, const AffineExpr& replacement) const {
    return rewrite([&](const Atom& a) -> std::optional<AffineExpr> {
        if (a == target) return replacement;
        return std::nullopt;
    });
}

std::vector<Atom> AffineExpr::atoms() const {
    std::vector<Atom> out;
    out.reserve(terms_.size());
    for (const auto& t : terms_) out.push_back(t.atom);
    return out;
}

void AffineExpr::collect_calls(std::vector<Atom>& out) const {
    for (const auto& t : terms_) {
        if (!t.atom.is_call()) continue;
        for (const auto& a : t.atom.args()) a.collect_calls(out);
        if (std::find(out.begin(), out.end(), t.atom) == out.end()) out.push_back(t.atom);
    }
}

void AffineExpr::collect_iterators(std::set<std::string>& out) const {
    for (const auto& t : terms_) {
        if (t.atom.kind() == AtomKind::Iterator) out.insert(t.atom.name());
        for (const auto& a : t.atom.args()) a.collect_iterators(out);
    }
}

void AffineExpr::collect_call_arg_iterators(std::set<std::string>& out) const {
    for (const auto& t : terms_)
        for (const auto& a : t.atom.args()) a.collect_iterators(out);
}

namespace {

std::string render(const AffineExpr& e, bool spaced) {
    std::string out;
    const std::string plus = spaced ? " + " : "+";
    const std::string minus = spaced ? " - " : "-";
    bool first = true;
    for (const auto& t : e.terms()) {
        Int c = t.coef;
        if (first) {
            if (c < 0) out += "-";
        } else {
            out += c < 0 ? minus : plus;
        }
        Int mag = c < 0 ? -c : c;
        if (mag != 1) out += std::to_string(mag) + "*";
        out += t.atom.key();
        first = false;
    }
    Int k = e.constant();
    if (first) return std::to_string(k);
    if (k > 0) out += plus + std::to_string(k);
    if (k < 0) out += minus + std::to_string(-k);
    return out;
}

}  // namespace

std::string AffineExpr::to_string() const { return render(*this, true); }
std::string AffineExpr::compact() const { return render(*this, false); }

bool AffineExpr::operator==(const AffineExpr& other) const {
    if (constant_ != other.constant_ || terms_.size() != other.terms_.size()) return false;
    for (size_t k = 0; k < terms_.size(); ++k)
        if (!(terms_[k].atom == other.terms_[k].atom) || terms_[k].coef != other.terms_[k].coef) return false;
    return true;
}

std::strong_ordering AffineExpr::operator<=>(const AffineExpr& other) const {
    size_t n = std::min(terms_.size(), other.terms_.size());
    for (size_t k = 0; k < n; ++k) {
        if (auto c = terms_[k].atom <=> other.terms_[k].atom; c != 0) return c;
        if (auto c = terms_[k].coef <=> other.terms_[k].coef; c != 0) return c;
    }
    if (auto c = terms_.size() <=> other.terms_.size(); c != 0) return c;
    return constant_ <=> other.constant_;
}

}  // namespace sparsedep
