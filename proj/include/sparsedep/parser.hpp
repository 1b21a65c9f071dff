#pragma once

#include "sparsedep/assertion.hpp"
#include "sparsedep/relation.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace sparsedep {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& file, int line, int column, const std::string& message);
    int line() const { return line_; }
    int column() const { return column_; }
    const std::string& message() const { return message_; }

private:
    int line_;
    int column_;
    std::string message_;
};

struct Problem {
    std::string path;
    std::string preset;  // default generator preset for the oracle
    std::vector<SymbolicConst> symbolics;
    std::vector<UFSymbol> ufs;
    std::vector<Assertion> assertions;
    std::vector<Relation> relations;

    const UFSymbol* find_uf(const std::string& name) const;
    const SymbolicConst* find_symbolic(const std::string& name) const;
};

Problem parse_problem(const std::string& text, const std::string& path = "<input>");
Problem parse_problem_file(const std::string& path);

// A bare relation body "{ [..] -> [..] : ... }". Identifiers used as calls
// become UF symbols and other free identifiers become symbolic constants.
Relation parse_relation(const std::string& text);
// Same, resolving names against the declarations of a problem.
Relation parse_relation(const std::string& text, const Problem& scope);

// A single constraint list over the given iterators ("i <= j && ...").
Conjunction parse_conjunction(const std::string& text, const std::vector<std::string>& iterators);

SymbolRole default_role(const std::string& name);

}  // namespace sparsedep
