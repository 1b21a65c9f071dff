#include "sparsedep/corpus.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <stdexcept>

namespace sparsedep {

namespace fs = std::filesystem;

std::vector<size_t> Corpus::unique() const {
    std::vector<size_t> out;
    for (size_t k = 0; k < entries.size(); ++k)
        if (!entries[k].duplicate_of) out.push_back(k);
    return out;
}

Corpus load_corpus(const std::vector<std::string>& paths) {
    std::vector<std::string> files;
    for (const auto& p : paths) {
        if (fs::is_directory(p)) {
            std::vector<std::string> found;
            for (const auto& e : fs::directory_iterator(p))
                if (e.is_regular_file() && e.path().extension() == ".deps") found.push_back(e.path().string());
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else if (fs::is_regular_file(p)) {
            files.push_back(p);
        } else {
            throw std::runtime_error("no such file or directory: " + p);
        }
    }
    Corpus c;
    std::map<std::pair<std::string, std::string>, size_t> first;  // (kernel, key) -> entry
    for (const auto& f : files) {
        c.problems.push_back(parse_problem_file(f));
        const size_t pi = c.problems.size() - 1;
        const Problem& p = c.problems.back();
        const std::string stem = fs::path(f).stem().string();
        for (size_t ri = 0; ri < p.relations.size(); ++ri) {
            const Relation& r = p.relations[ri];
            CorpusEntry e;
            e.problem = pi;
            e.relation = ri;
            e.kernel = r.kernel().empty() ? stem : r.kernel();
            e.key = canonical_key(r);
            e.mirror_key = canonical_key(mirror(r));
            auto [it, fresh] = first.emplace(std::make_pair(e.kernel, e.key), c.entries.size());
            if (!fresh) e.duplicate_of = it->second;
            if (std::find(c.kernels.begin(), c.kernels.end(), e.kernel) == c.kernels.end())
                c.kernels.push_back(e.kernel);
            c.entries.push_back(std::move(e));
        }
    }
    return c;
}

std::vector<Verdict> analyze_corpus(const Corpus& c, const PropertyConfig& cfg, const AnalysisOptions& opts) {
    std::vector<Verdict> out(c.entries.size());
    const auto uniq = c.unique();
    parallel_for(uniq.size(), [&](size_t k) {
        const CorpusEntry& e = c.entries[uniq[k]];
        const Relation& r = c.relation(e);
        try {
            out[uniq[k]] = analyze(r, c.problem(e).assertions, cfg, opts);
        } catch (const std::exception& ex) {
            throw std::runtime_error(r.name + ": " + ex.what());
        }
        out[uniq[k]].kernel = e.kernel;
    });
    for (size_t k = 0; k < c.entries.size(); ++k) {
        const CorpusEntry& e = c.entries[k];
        if (!e.duplicate_of) continue;
        out[k] = out[*e.duplicate_of];
        out[k].relation = c.relation(e).name;
    }
    return out;
}

nlohmann::json StatusCounts::to_json() const {
    return {{"relations", relations},         {"unique", unique}, {"affine_unsat", affine_unsat},
            {"property_unsat", property_unsat}, {"maybe", maybe},   {"capped", capped}};
}

nlohmann::json CorpusSummary::to_json() const {
    nlohmann::json j;
    j["total"] = total.to_json();
    j["per_kernel"] = nlohmann::json::object();
    for (const auto& [k, s] : per_kernel) j["per_kernel"][k] = s.to_json();
    return j;
}

std::string CorpusSummary::line() const {
    if (total.relations == 0) return "0 relations";
    return "unsat=" + std::to_string(total.unsat()) + " (" + std::to_string(total.affine_unsat) + " affine + " +
           std::to_string(total.property_unsat) + " properties), maybe=" + std::to_string(total.maybe);
}

CorpusSummary summarize(const Corpus& c, const std::vector<Verdict>& verdicts) {
    CorpusSummary s;
    for (size_t k = 0; k < c.entries.size(); ++k) {
        const CorpusEntry& e = c.entries[k];
        for (StatusCounts* t : {&s.total, &s.per_kernel[e.kernel]}) {
            ++t->relations;
            if (e.duplicate_of) continue;
            ++t->unique;
            switch (verdicts[k].status) {
                case VerdictStatus::UnsatAffine: ++t->affine_unsat; break;
                case VerdictStatus::UnsatWithProperties: ++t->property_unsat; break;
                case VerdictStatus::MaybeSat: ++t->maybe; break;
                case VerdictStatus::UnknownCapped:
                    ++t->maybe;
                    ++t->capped;
                    break;
            }
        }
    }
    return s;
}

}  // namespace sparsedep
