#pragma once

#include "sparsedep/instance.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sparsedep {

// Nonzero structure of a square matrix; rows[i] holds sorted column indices.
struct Pattern {
    Int n = 0;
    std::vector<std::vector<Int>> rows;

    Int nnz() const;
};

inline constexpr Int kMaxInstanceSize = 64;

// csr_lower_triangular, csr_general, csc_lower_triangular, csr_with_diagptr,
// cholesky_prune_sets
const std::vector<std::string>& preset_names();
bool is_preset(const std::string& name);

// Arrays of the preset built from a pattern. Lower-triangular presets keep the
// lower triangle. Throws std::invalid_argument when a diagonal entry is
// missing, n is out of range or the preset is unknown.
ConcreteInstance instance_from_pattern(const std::string& preset, const Pattern& p);

// Random pattern with the diagonal and each other admissible entry present
// with probability density.
Pattern random_pattern(Int n, double density, bool lower, std::uint64_t seed);

ConcreteInstance generate(const std::string& preset, Int n, double density, std::uint64_t seed);

struct SampleParams {
    Int n_min = 3;
    Int n_max = 12;
    double density_min = 0.1;
    double density_max = 0.5;
};

// count instances, sizes and densities drawn per trial; trial t uses seed + t.
std::vector<ConcreteInstance> sample(const std::string& preset, size_t count, std::uint64_t seed,
                                     const SampleParams& params = {});

}  // namespace sparsedep
