#include "sparsedep/assertion.hpp"

#include <algorithm>
#include <stdexcept>

namespace sparsedep {

namespace {

AffineExpr var(const std::string& name) { return AffineExpr(Atom::iterator(name)); }
AffineExpr apply(const std::string& f, const AffineExpr& arg) { return AffineExpr(Atom::call(f, {arg})); }

Assertion make(std::string name, std::string category, Constraint ante, Constraint cons) {
    Assertion a;
    a.name = std::move(name);
    a.category = std::move(category);
    a.vars = {"x1", "x2"};
    a.antecedent.add(ante);
    a.consequent.add(cons);
    classify_form(a);
    return a;
}

// Matches e as  atom2 - atom1 - c  with c in {0,1}.
bool match_difference(const AffineExpr& e, AffineExpr& plus, AffineExpr& minus, int& c) {
    if (e.terms().size() != 2) return false;
    const Term& a = e.terms()[0];
    const Term& b = e.terms()[1];
    if (a.coef == 1 && b.coef == -1) {
        plus = AffineExpr(a.atom);
        minus = AffineExpr(b.atom);
    } else if (a.coef == -1 && b.coef == 1) {
        plus = AffineExpr(b.atom);
        minus = AffineExpr(a.atom);
    } else {
        return false;
    }
    Int k = -e.constant();
    if (k != 0 && k != 1) return false;
    c = static_cast<int>(k);
    return true;
}

bool is_var(const AffineExpr& e, const std::string& name) {
    return e.terms().size() == 1 && e.constant() == 0 && e.terms()[0].coef == 1 &&
           e.terms()[0].atom.kind() == AtomKind::Iterator && e.terms()[0].atom.name() == name;
}

// f(name) for some f: returns f's name or empty
std::string call_on(const AffineExpr& e, const std::string& name) {
    if (e.terms().size() != 1 || e.constant() != 0 || e.terms()[0].coef != 1) return {};
    const Atom& a = e.terms()[0].atom;
    if (!a.is_call() || a.args().size() != 1 || !is_var(a.args()[0], name)) return {};
    return a.name();
}

}  // namespace

void classify_form(Assertion& a) {
    a.form = AssertionForm::General;
    a.c1 = a.c2 = 0;
    if (a.vars.size() != 2 || a.antecedent.size() != 1 || a.consequent.size() != 1) return;
    const Constraint& ante = a.antecedent.constraints()[0];
    const Constraint& cons = a.consequent.constraints()[0];
    if (ante.is_eq() || cons.is_eq()) return;
    AffineExpr ap, am, cp, cm;
    int c1 = 0, c2 = 0;
    if (!match_difference(ante.expr, ap, am, c1) || !match_difference(cons.expr, cp, cm, c2)) return;
    const std::string& x1 = a.vars[0];
    const std::string& x2 = a.vars[1];
    if (is_var(am, x1) && is_var(ap, x2)) {
        std::string f = call_on(cm, x1);
        std::string g = call_on(cp, x2);
        if (f.empty() || g.empty()) return;
        a.form = f == g ? AssertionForm::Form1 : AssertionForm::Form2;
    } else if (is_var(am, x1) && !call_on(ap, x2).empty()) {
        if (!is_var(cp, x2) || call_on(cm, x1).empty()) return;
        a.form = AssertionForm::Form3;
    } else {
        return;
    }
    a.c1 = c1;
    a.c2 = c2;
}

std::string Assertion::to_string() const {
    std::string out = "forall ";
    for (size_t k = 0; k < vars.size(); ++k) out += (k ? "," : "") + vars[k];
    out += " : ";
    out += antecedent.empty() ? "true" : antecedent.to_string();
    out += " -> " + consequent.to_string();
    return out;
}

std::vector<std::string> Assertion::symbols() const {
    std::vector<Atom> calls;
    for (const auto& c : antecedent.constraints()) c.expr.collect_calls(calls);
    for (const auto& c : consequent.constraints()) c.expr.collect_calls(calls);
    std::vector<std::string> out;
    for (const auto& c : calls)
        if (std::find(out.begin(), out.end(), c.name()) == out.end()) out.push_back(c.name());
    return out;
}

std::string builtin_category(const std::string& name) {
    if (name == "strict_monotone" || name == "monotone") return "monotonicity";
    if (name == "correlated_bound" || name == "strict_antitone_pair") return "correlated_monotonicity";
    if (name == "triangular" || name == "triangular_converse") return "triangular";
    return {};
}

std::vector<Assertion> builtin(const std::string& name, const std::vector<std::string>& symbols) {
    const std::string category = builtin_category(name);
    if (category.empty()) throw std::invalid_argument("unknown builtin assertion '" + name + "'");
    const size_t want = (name == "strict_monotone" || name == "monotone") ? 1 : 2;
    if (symbols.size() != want)
        throw std::invalid_argument(name + " expects " + std::to_string(want) + " function symbol(s)");
    const AffineExpr x1 = var("x1");
    const AffineExpr x2 = var("x2");
    const std::string& f = symbols[0];
    std::string label = name + "(" + f;
    if (want == 2) label += "," + symbols[1];
    label += ")";

    std::vector<Assertion> out;
    if (name == "strict_monotone") {
        out.push_back(make(label, category, Constraint::lt(x1, x2), Constraint::lt(apply(f, x1), apply(f, x2))));
        out.push_back(make(label + "#converse", category, Constraint::lt(apply(f, x1), apply(f, x2)),
                           Constraint::lt(x1, x2)));
    } else if (name == "monotone") {
        out.push_back(make(label, category, Constraint::le(x1, x2), Constraint::le(apply(f, x1), apply(f, x2))));
        out.push_back(make(label + "#converse", category, Constraint::lt(apply(f, x1), apply(f, x2)),
                           Constraint::lt(x1, x2)));
    } else if (name == "strict_antitone_pair") {
        const std::string& g = symbols[1];
        out.push_back(make(label, category, Constraint::lt(x1, x2), Constraint::lt(apply(g, x2), apply(f, x1))));
    } else if (name == "correlated_bound") {
        const std::string& g = symbols[1];
        out.push_back(make(label, category, Constraint::equal(x1, x2), Constraint::le(apply(f, x1), apply(g, x2))));
        out.push_back(make(label + "#next", category, Constraint::lt(x1, x2), Constraint::lt(apply(g, x1), apply(f, x2))));
    } else if (name == "triangular") {
        const std::string& g = symbols[1];
        out.push_back(make(label, category, Constraint::lt(x1, apply(f, x2)), Constraint::lt(apply(g, x1), x2)));
    } else {
        const std::string& g = symbols[1];
        out.push_back(make(label, category, Constraint::lt(apply(f, x1), x2), Constraint::lt(x1, apply(g, x2))));
    }
    return out;
}

std::string Instance::to_string() const {
    std::string out = "(";
    out += antecedent.empty() ? "true" : antecedent.to_string();
    out += ") -> (" + consequent.to_string() + ")";
    return out;
}

namespace {

Conjunction bind_vars(const Conjunction& tmpl, const std::vector<std::string>& vars, const std::vector<AffineExpr>& values) {
    Conjunction out;
    for (const auto& c : tmpl.constraints()) {
        AffineExpr e = c.expr.rewrite([&](const Atom& a) -> std::optional<AffineExpr> {
            if (a.kind() != AtomKind::Iterator) return std::nullopt;
            for (size_t k = 0; k < vars.size(); ++k)
                if (vars[k] == a.name()) return values[k];
            return std::nullopt;
        });
        out.add(Constraint{c.kind, e, c.tag});
    }
    return out;
}

}  // namespace

Instantiation instantiate(const Assertion& a, const std::vector<AffineExpr>& ground_terms,
                          const InstanceBudget& budget) {
    Instantiation result;
    const size_t arity = a.vars.size();
    if (ground_terms.empty() || arity == 0) return result;
    std::vector<AffineExpr> terms = ground_terms;
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    std::vector<size_t> idx(arity, 0);
    while (true) {
        if (result.instances.size() >= budget.max_instances) {
            result.truncated = true;
            break;
        }
        Instance inst;
        inst.assertion = a.name;
        for (size_t k = 0; k < arity; ++k) inst.binding.push_back(terms[idx[k]]);
        inst.antecedent = bind_vars(a.antecedent, a.vars, inst.binding);
        inst.consequent = bind_vars(a.consequent, a.vars, inst.binding);
        result.instances.push_back(std::move(inst));
        size_t pos = arity;
        while (pos > 0) {
            --pos;
            if (++idx[pos] < terms.size()) break;
            idx[pos] = 0;
            if (pos == 0) return result;
        }
    }
    return result;
}

}  // namespace sparsedep
