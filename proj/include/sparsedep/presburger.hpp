#pragma once

#include "sparsedep/linear_system.hpp"

#include <map>
#include <string>
#include <vector>

namespace sparsedep {

enum class SatStatus { IntegerUnsat, RationalSatUnknownInteger, IntegerSatWitness, Unknown };

std::string to_string(SatStatus s);

struct CheckOptions {
    size_t max_derived = 1000000;     // derived inequalities before giving up
    size_t max_coefficient_bits = 4096;
    size_t witness_nodes = 20000;     // backtracking budget of the witness search
    bool certificate = false;         // record elimination steps
};

struct CheckResult {
    SatStatus status = SatStatus::Unknown;
    std::map<std::string, BigInt> witness;
    std::vector<std::string> certificate;
    std::string diagnostic;

    bool unsat() const { return status == SatStatus::IntegerUnsat; }
};

CheckResult check(const LinearSystem& ls, const CheckOptions& opts = {});

// Sound: true only if every integer point of ls satisfies c.
bool entails(const LinearSystem& ls, const Constraint& c, const CheckOptions& opts = {});

struct ImpliedEqualityOptions {
    bool exhaustive = false;  // all variable pairs instead of co-occurring ones
    int degree = 2;           // co-occurrence distance for candidate pairs
};

// Equalities x = c and x - y = c entailed by ls and not already explicit.
std::vector<Constraint> implied_equalities(const LinearSystem& ls, const ImpliedEqualityOptions& opts = {},
                                           const CheckOptions& check_opts = {});

struct Elimination {
    LinearSystem system;
    bool exact = true;
};

// Rational shadow of projecting out v.
Elimination eliminate(const LinearSystem& ls, const std::string& v);

}  // namespace sparsedep
