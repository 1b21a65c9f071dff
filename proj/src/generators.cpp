#include "sparsedep/generators.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <stdexcept>

namespace sparsedep {

Int Pattern::nnz() const {
    Int k = 0;
    for (const auto& r : rows) k += static_cast<Int>(r.size());
    return k;
}

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"csr_lower_triangular", "csr_general", "csc_lower_triangular",
                                                   "csr_with_diagptr", "cholesky_prune_sets"};
    return names;
}

bool is_preset(const std::string& name) {
    const auto& n = preset_names();
    return std::find(n.begin(), n.end(), name) != n.end();
}

namespace {

void check_size(Int n) {
    if (n <= 0) throw std::invalid_argument("matrix size must be positive");
    if (n > kMaxInstanceSize) throw std::invalid_argument("matrix size above " + std::to_string(kMaxInstanceSize));
}

std::vector<std::vector<Int>> lower_rows(const Pattern& p) {
    std::vector<std::vector<Int>> rows(static_cast<size_t>(p.n));
    for (Int i = 0; i < p.n; ++i)
        for (Int j : p.rows[static_cast<size_t>(i)])
            if (j <= i) rows[static_cast<size_t>(i)].push_back(j);
    return rows;
}

void check_diagonal(const std::vector<std::vector<Int>>& rows) {
    for (size_t i = 0; i < rows.size(); ++i)
        if (!std::binary_search(rows[i].begin(), rows[i].end(), static_cast<Int>(i)))
            throw std::invalid_argument("missing diagonal entry in row " + std::to_string(i));
}

void csr(ConcreteInstance& inst, const std::vector<std::vector<Int>>& rows) {
    auto& rowptr = inst.arrays["rowptr"];
    auto& col = inst.arrays["col"];
    rowptr.push_back(0);
    for (const auto& r : rows) {
        col.insert(col.end(), r.begin(), r.end());
        rowptr.push_back(static_cast<Int>(col.size()));
    }
    inst.constants["nnz"] = static_cast<Int>(col.size());
}

// columns of a lower pattern given by rows
std::vector<std::vector<Int>> transpose(const std::vector<std::vector<Int>>& rows) {
    std::vector<std::vector<Int>> cols(rows.size());
    for (size_t i = 0; i < rows.size(); ++i)
        for (Int j : rows[i]) cols[static_cast<size_t>(j)].push_back(static_cast<Int>(i));
    return cols;
}

void csc(ConcreteInstance& inst, const std::vector<std::vector<Int>>& cols, const std::string& ptr,
         const std::string& idx) {
    auto& p = inst.arrays[ptr];
    auto& r = inst.arrays[idx];
    p.push_back(0);
    for (const auto& c : cols) {
        r.insert(r.end(), c.begin(), c.end());
        p.push_back(static_cast<Int>(r.size()));
    }
    inst.constants["nnz"] = static_cast<Int>(r.size());
}

}  // namespace

ConcreteInstance instance_from_pattern(const std::string& preset, const Pattern& p) {
    check_size(p.n);
    if (static_cast<Int>(p.rows.size()) != p.n) throw std::invalid_argument("pattern row count differs from n");
    ConcreteInstance inst;
    inst.preset = preset;
    inst.constants["n"] = p.n;
    if (preset == "csr_general") {
        check_diagonal(p.rows);
        csr(inst, p.rows);
    } else if (preset == "csr_lower_triangular") {
        auto rows = lower_rows(p);
        check_diagonal(rows);
        csr(inst, rows);
    } else if (preset == "csr_with_diagptr") {
        check_diagonal(p.rows);
        csr(inst, p.rows);
        auto& diag = inst.arrays["diag"];
        for (Int i = 0; i < p.n; ++i) {
            const auto& r = p.rows[static_cast<size_t>(i)];
            Int at = static_cast<Int>(std::lower_bound(r.begin(), r.end(), i) - r.begin());
            diag.push_back(inst.arrays["rowptr"][static_cast<size_t>(i)] + at);
        }
    } else if (preset == "csc_lower_triangular") {
        auto rows = lower_rows(p);
        check_diagonal(rows);
        csc(inst, transpose(rows), "colptr", "row");
    } else if (preset == "cholesky_prune_sets") {
        auto rows = lower_rows(p);
        check_diagonal(rows);
        // symbolic factorization: column j of L gets the rows of every
        // earlier column k with L(j,k) != 0 that lie below j
        const size_t n = rows.size();
        std::vector<std::set<Int>> lcols(n);
        for (size_t i = 0; i < n; ++i)
            for (Int j : rows[i]) lcols[static_cast<size_t>(j)].insert(static_cast<Int>(i));
        std::vector<std::vector<Int>> prune(n);  // prune[j]: k < j with L(j,k) != 0
        for (size_t j = 0; j < n; ++j) {
            for (size_t k = 0; k < j; ++k) {
                if (!lcols[k].count(static_cast<Int>(j))) continue;
                prune[j].push_back(static_cast<Int>(k));
                for (Int r : lcols[k])
                    if (r >= static_cast<Int>(j)) lcols[j].insert(r);
            }
        }
        std::vector<std::vector<Int>> cols(n);
        for (size_t j = 0; j < n; ++j) cols[j].assign(lcols[j].begin(), lcols[j].end());
        csc(inst, cols, "lcolptr", "lrow");
        auto& pp = inst.arrays["pruneptr"];
        auto& ps = inst.arrays["pruneset"];
        pp.push_back(0);
        for (const auto& s : prune) {
            ps.insert(ps.end(), s.begin(), s.end());
            pp.push_back(static_cast<Int>(ps.size()));
        }
    } else {
        throw std::invalid_argument("unknown preset '" + preset + "'");
    }
    return inst;
}

Pattern random_pattern(Int n, double density, bool lower, std::uint64_t seed) {
    check_size(n);
    if (!(density >= 0.0 && density <= 1.0)) throw std::invalid_argument("density must lie in [0, 1]");
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(density);
    Pattern p;
    p.n = n;
    p.rows.resize(static_cast<size_t>(n));
    for (Int i = 0; i < n; ++i) {
        const Int hi = lower ? i + 1 : n;
        for (Int j = 0; j < hi; ++j)
            if (j == i || coin(rng)) p.rows[static_cast<size_t>(i)].push_back(j);
    }
    return p;
}

ConcreteInstance generate(const std::string& preset, Int n, double density, std::uint64_t seed) {
    if (!is_preset(preset)) throw std::invalid_argument("unknown preset '" + preset + "'");
    const bool lower = preset != "csr_general" && preset != "csr_with_diagptr";
    ConcreteInstance inst = instance_from_pattern(preset, random_pattern(n, density, lower, seed));
    inst.seed = seed;
    return inst;
}

std::vector<ConcreteInstance> sample(const std::string& preset, size_t count, std::uint64_t seed,
                                     const SampleParams& params) {
    if (params.n_min <= 0 || params.n_max < params.n_min) throw std::invalid_argument("bad size range");
    check_size(params.n_max);
    std::vector<ConcreteInstance> out;
    for (size_t t = 0; t < count; ++t) {
        const std::uint64_t s = seed + t;
        std::mt19937_64 rng(s ^ 0x9e3779b97f4a7c15ULL);
        std::uniform_int_distribution<Int> size(params.n_min, params.n_max);
        std::uniform_real_distribution<double> dens(params.density_min, params.density_max);
        const Int n = size(rng);
        const double d = dens(rng);
        out.push_back(generate(preset, n, d, s));
    }
    return out;
}

}  // namespace sparsedep
