#pragma once

#include "sparsedep/assertion.hpp"
#include "sparsedep/relation.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace sparsedep {

// Concrete index arrays and symbolic constants for one matrix.
struct ConcreteInstance {
    std::string preset;
    std::uint64_t seed = 0;
    std::map<std::string, Int> constants;            // n, nnz
    std::map<std::string, std::vector<Int>> arrays;  // by array name

    nlohmann::json to_json() const;
    static ConcreteInstance from_json(const nlohmann::json& j);
};

// An AffineExpr bound to an instance: iterators become slots, symbolic
// constants are folded in, calls index the bound arrays.
class CompiledExpr {
public:
    // false when some call indexes outside its array
    bool eval(const Int* slots, Int& out) const;
    // slots read, nested ones included
    const std::vector<int>& reads() const { return reads_; }
    // top-level coefficient of a slot
    Int coefficient(int slot) const;
    // slot read inside some call argument
    bool in_args(int slot) const;

private:
    friend class Binder;
    struct Part {
        Int coef = 1;
        int slot = -1;
        const std::vector<Int>* array = nullptr;
        std::shared_ptr<CompiledExpr> arg;
    };
    Int constant_ = 0;
    std::vector<Part> parts_;
    std::vector<int> reads_;
};

struct CompiledConstraint {
    bool eq = false;
    bool may = false;
    CompiledExpr expr;
    Constraint source;
};

// Compiles expressions of one relation against one instance. UF symbols are
// resolved to arrays through the declarations (same name when undeclared).
class Binder {
public:
    Binder(const ConcreteInstance& inst, const std::vector<UFSymbol>& ufs, std::vector<std::string> slots);

    const std::vector<std::string>& slots() const { return slots_; }
    int slot(const std::string& name) const;  // -1 if unknown
    // Throws std::invalid_argument on unknown symbols, arrays or arity > 1.
    CompiledExpr compile(const AffineExpr& e) const;
    CompiledConstraint compile(const Constraint& c) const;

private:
    const ConcreteInstance& inst_;
    std::map<std::string, std::string> array_of_;
    std::vector<std::string> slots_;
};

// Point violations of the declared assertions: every quantified variable
// ranges over [0, longest array], pairs that leave some array's domain are
// skipped. Empty when the instance is valid.
std::vector<std::string> validate(const ConcreteInstance& inst, const std::vector<Assertion>& assertions,
                                  const std::vector<UFSymbol>& ufs, size_t max_reports = 10);

}  // namespace sparsedep
