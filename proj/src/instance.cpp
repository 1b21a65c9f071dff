#include "sparsedep/instance.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>
#include <stdexcept>

namespace sparsedep {

nlohmann::json ConcreteInstance::to_json() const {
    nlohmann::json j;
    j["preset"] = preset;
    j["seed"] = seed;
    j["constants"] = constants;
    j["arrays"] = arrays;
    return j;
}

ConcreteInstance ConcreteInstance::from_json(const nlohmann::json& j) {
    ConcreteInstance inst;
    inst.preset = j.value("preset", "");
    inst.seed = j.value("seed", std::uint64_t{0});
    inst.constants = j.at("constants").get<std::map<std::string, Int>>();
    inst.arrays = j.at("arrays").get<std::map<std::string, std::vector<Int>>>();
    return inst;
}

bool CompiledExpr::eval(const Int* slots, Int& out) const {
    Int v = constant_;
    for (const auto& p : parts_) {
        Int x;
        if (p.slot >= 0) {
            x = slots[p.slot];
        } else {
            Int idx;
            if (!p.arg->eval(slots, idx)) return false;
            if (idx < 0 || idx >= static_cast<Int>(p.array->size())) return false;
            x = (*p.array)[static_cast<size_t>(idx)];
        }
        v += p.coef * x;
    }
    out = v;
    return true;
}

Int CompiledExpr::coefficient(int slot) const {
    Int c = 0;
    for (const auto& p : parts_)
        if (p.slot == slot) c += p.coef;
    return c;
}

bool CompiledExpr::in_args(int slot) const {
    for (const auto& p : parts_)
        if (p.arg && std::binary_search(p.arg->reads_.begin(), p.arg->reads_.end(), slot)) return true;
    return false;
}

Binder::Binder(const ConcreteInstance& inst, const std::vector<UFSymbol>& ufs, std::vector<std::string> slots)
    : inst_(inst), slots_(std::move(slots)) {
    for (const auto& u : ufs) array_of_[u.name] = u.array.empty() ? u.name : u.array;
}

int Binder::slot(const std::string& name) const {
    auto it = std::find(slots_.begin(), slots_.end(), name);
    return it == slots_.end() ? -1 : static_cast<int>(it - slots_.begin());
}

CompiledExpr Binder::compile(const AffineExpr& e) const {
    CompiledExpr out;
    out.constant_ = e.constant();
    std::set<int> reads;
    for (const auto& t : e.terms()) {
        const Atom& a = t.atom;
        if (a.kind() == AtomKind::Symbolic) {
            auto it = inst_.constants.find(a.name());
            if (it == inst_.constants.end()) throw std::invalid_argument("instance has no value for '" + a.name() + "'");
            out.constant_ += t.coef * it->second;
            continue;
        }
        CompiledExpr::Part p;
        p.coef = t.coef;
        if (a.kind() == AtomKind::Iterator) {
            p.slot = slot(a.name());
            if (p.slot < 0) {
                // a free name the parser took for an iterator may be a constant
                auto it = inst_.constants.find(a.name());
                if (it == inst_.constants.end()) throw std::invalid_argument("unbound iterator '" + a.name() + "'");
                out.constant_ += t.coef * it->second;
                continue;
            }
            reads.insert(p.slot);
        } else {
            if (a.args().size() != 1) throw std::invalid_argument("'" + a.name() + "': only arity-1 functions have arrays");
            auto m = array_of_.find(a.name());
            const std::string array = m == array_of_.end() ? a.name() : m->second;
            auto it = inst_.arrays.find(array);
            if (it == inst_.arrays.end()) throw std::invalid_argument("instance has no array '" + array + "'");
            p.array = &it->second;
            p.arg = std::make_shared<CompiledExpr>(compile(a.args()[0]));
            reads.insert(p.arg->reads_.begin(), p.arg->reads_.end());
        }
        out.parts_.push_back(std::move(p));
    }
    out.reads_.assign(reads.begin(), reads.end());
    return out;
}

CompiledConstraint Binder::compile(const Constraint& c) const {
    CompiledConstraint out;
    out.eq = c.is_eq();
    out.may = c.tag == Tag::May;
    out.expr = compile(c.expr);
    out.source = c;
    return out;
}

std::vector<std::string> validate(const ConcreteInstance& inst, const std::vector<Assertion>& assertions,
                                  const std::vector<UFSymbol>& ufs, size_t max_reports) {
    std::vector<std::string> out;
    Int range = 0;
    for (const auto& [name, arr] : inst.arrays) range = std::max<Int>(range, static_cast<Int>(arr.size()));
    for (const auto& a : assertions) {
        Binder b(inst, ufs, a.vars);
        std::vector<CompiledConstraint> ante, cons;
        for (const auto& c : a.antecedent.constraints()) ante.push_back(b.compile(c));
        for (const auto& c : a.consequent.constraints()) cons.push_back(b.compile(c));
        const size_t k = a.vars.size();
        std::vector<Int> vals(k, 0);
        // odometer over [0, range]^k
        while (true) {
            bool defined = true, holds_a = true, holds_c = true;
            auto test = [&](const std::vector<CompiledConstraint>& cs, bool& holds) {
                for (const auto& c : cs) {
                    Int v;
                    if (!c.expr.eval(vals.data(), v)) {
                        defined = false;
                        return;
                    }
                    if (c.eq ? v != 0 : v < 0) holds = false;
                }
            };
            test(ante, holds_a);
            if (defined) test(cons, holds_c);
            if (defined && holds_a && !holds_c) {
                std::string where;
                for (size_t q = 0; q < k; ++q) where += (q ? ", " : "") + a.vars[q] + "=" + std::to_string(vals[q]);
                out.push_back(a.name + " fails at " + where);
                if (out.size() >= max_reports) return out;
                break;
            }
            size_t pos = k;
            while (pos > 0) {
                --pos;
                if (++vals[pos] <= range) break;
                vals[pos] = 0;
                if (pos == 0) {
                    pos = k + 1;
                    break;
                }
            }
            if (pos == k + 1 || k == 0) break;
        }
    }
    return out;
}

}  // namespace sparsedep
