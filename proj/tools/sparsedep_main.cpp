// sparsedep: command-line front end.
// Exit codes: 0 ok, 1 report mismatch, 2 input or parse error, 3 oracle counterexample.

#include "sparsedep/corpus.hpp"
#include "sparsedep/generators.hpp"
#include "sparsedep/inspector.hpp"
#include "sparsedep/matrix_market.hpp"
#include "sparsedep/oracle.hpp"
#include "sparsedep/report.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>

using namespace sparsedep;
namespace fs = std::filesystem;

namespace {

constexpr int kMismatch = 1;
constexpr int kInputError = 2;
constexpr int kCounterexample = 3;

std::string complexity_class(const Relation& r) {
    ComplexityExpr e = estimate(r);
    Monomial best;
    bool first = true;
    for (const auto& [m, c] : e.terms)
        if (first || compare(m, best) > 0) {
            best = m;
            first = false;
        }
    return best.to_string();
}

std::string join(const std::set<std::string>& xs) {
    std::string out;
    for (const auto& x : xs) out += (out.empty() ? "" : ",") + x;
    return out.empty() ? "-" : out;
}

int cmd_check(const std::vector<std::string>& files, const std::string& properties, bool json) {
    Corpus c = load_corpus(files);
    auto verdicts = analyze_corpus(c, PropertyConfig::parse(properties));
    auto summary = summarize(c, verdicts);
    if (json) {
        nlohmann::json j;
        j["version"] = 1;
        j["properties"] = properties;
        j["verdicts"] = nlohmann::json::array();
        for (size_t k = 0; k < c.entries.size(); ++k) {
            nlohmann::json v = to_json(verdicts[k]);
            v.erase("millis");
            if (c.entries[k].duplicate_of) v["duplicate_of"] = c.relation(c.entries[*c.entries[k].duplicate_of]).name;
            v["class"] = complexity_class(c.relation(c.entries[k]));
            j["verdicts"].push_back(std::move(v));
        }
        j["summary"] = summary.to_json();
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    if (!c.entries.empty()) {
        std::cout << std::left << std::setw(28) << "relation" << std::setw(15) << "kernel" << std::setw(24)
                  << "status" << std::setw(40) << "properties" << "class\n";
        for (size_t k = 0; k < c.entries.size(); ++k) {
            const auto& e = c.entries[k];
            std::string status = to_string(verdicts[k].status);
            if (e.duplicate_of) status += "*";
            std::cout << std::setw(28) << c.relation(e).name << std::setw(15) << e.kernel << std::setw(24) << status
                      << std::setw(40) << join(verdicts[k].properties_used) << complexity_class(c.relation(e))
                      << "\n";
        }
        if (summary.total.unique < summary.total.relations) std::cout << "(* duplicate, counted once)\n";
        std::cout << summary.total.relations << " relations, " << summary.total.unique << " unique\n";
    }
    std::cout << summary.line() << "\n";
    return 0;
}

int cmd_simplify(const std::vector<std::string>& files) {
    Corpus c = load_corpus(files);
    auto verdicts = analyze_corpus(c, PropertyConfig::parse("all"));
    for (size_t k : c.unique()) {
        if (verdicts[k].unsat()) continue;
        const Relation& r = c.relation(c.entries[k]);
        std::cout << r.name << "\n";
        for (const auto& e : verdicts[k].equalities) std::cout << "  " << e.to_string() << "\n";
        ComplexityExpr before = estimate(r);
        std::vector<std::vector<Constraint>> per;
        for (const auto& cv : verdicts[k].clauses) per.push_back(cv.equalities);
        ComplexityExpr after = estimate(r, per);
        std::cout << "  " << before.to_string() << " -> " << after.to_string() << "\n";
    }
    return 0;
}

int cmd_superset(const std::vector<std::string>& files, bool json) {
    Corpus c = load_corpus(files);
    auto verdicts = analyze_corpus(c, PropertyConfig::parse("all"));
    nlohmann::json out = nlohmann::json::array();
    for (const auto& kernel : c.kernels) {
        KernelRow row = kernel_row(c, kernel, verdicts, verdicts, ComplexityExpr{}, kDefaultDensity);
        if (json) {
            nlohmann::json j = {{"kernel", kernel}, {"kept", row.minimized.kept},
                                {"discarded", row.minimized.discarded}, {"claims", nlohmann::json::array()}};
            for (const auto& cl : row.minimized.claims) j["claims"].push_back(to_json(cl));
            out.push_back(std::move(j));
            continue;
        }
        std::cout << kernel << "\n";
        for (const auto& cl : row.minimized.claims)
            std::cout << "  " << cl.superset << " contains " << cl.subset << " (" << to_string(cl.rule)
                      << (cl.mirrored ? ", mirrored" : "") << ")\n";
        for (const auto& k : row.minimized.kept) std::cout << "  check " << k << "\n";
        for (const auto& [d, by] : row.minimized.discarded) std::cout << "  drop " << d << " (covered by " << by << ")\n";
    }
    if (json) std::cout << out.dump(2) << "\n";
    return 0;
}

std::string default_manifest(const std::vector<std::string>& files) {
    for (const auto& f : files) {
        fs::path p = fs::is_directory(f) ? fs::path(f) : fs::path(f).parent_path();
        if (fs::is_regular_file(p / "manifest.json")) return (p / "manifest.json").string();
    }
    return "";
}

int cmd_report(const std::vector<std::string>& files, std::string manifest_path, const std::string& json_out,
               const std::string& csv_out) {
    if (manifest_path.empty()) manifest_path = default_manifest(files);
    if (manifest_path.empty()) throw std::runtime_error("no manifest.json next to the corpus; pass --manifest");
    Manifest m = Manifest::load(manifest_path);
    Corpus c = load_corpus(files);
    Report rep = build_report(c, m);
    std::cout << rep.to_text();
    if (!json_out.empty()) {
        std::ofstream out(json_out);
        out << rep.to_json().dump(2) << "\n";
    }
    if (!csv_out.empty()) {
        std::ofstream out(csv_out);
        out << rep.class_csv();
    }
    return rep.ok() ? 0 : kMismatch;
}

// verdicts and claims of one problem, sliced out of the corpus run
struct ProblemChecks {
    std::vector<Verdict> verdicts;
    std::vector<SupersetClaim> claims;
};

std::vector<ProblemChecks> corpus_checks(const Corpus& c, const std::vector<Verdict>& verdicts) {
    std::vector<ProblemChecks> out(c.problems.size());
    for (size_t k = 0; k < c.entries.size(); ++k) out[c.entries[k].problem].verdicts.push_back(verdicts[k]);
    for (const auto& kernel : c.kernels) {
        KernelRow row = kernel_row(c, kernel, verdicts, verdicts, ComplexityExpr{}, kDefaultDensity);
        for (const auto& cl : row.minimized.claims) {
            for (size_t p = 0; p < c.problems.size(); ++p) {
                const auto& rs = c.problems[p].relations;
                if (std::any_of(rs.begin(), rs.end(), [&](const Relation& r) { return r.name == cl.subset; }))
                    out[p].claims.push_back(cl);
            }
        }
    }
    return out;
}

int cmd_oracle(const std::vector<std::string>& files, const std::string& preset, size_t trials, std::uint64_t seed,
               const std::string& dump, bool self_test, bool json) {
    if (preset != "auto" && !is_preset(preset)) throw std::invalid_argument("unknown preset '" + preset + "'");
    Corpus c = load_corpus(files);
    auto verdicts = analyze_corpus(c, PropertyConfig::parse("all"));
    auto checks = corpus_checks(c, verdicts);
    size_t total = 0, missed_total = 0;
    nlohmann::json reports = nlohmann::json::array();
    nlohmann::json dumps = nlohmann::json::array();
    std::map<std::string, size_t> per_preset;
    for (size_t p = 0; p < c.problems.size(); ++p) {
        const Problem& prob = c.problems[p];
        const std::string use = preset == "auto" ? prob.preset : preset;
        if (use.empty()) {
            std::cerr << prob.path << ": no preset declared, skipped\n";
            continue;
        }
        auto instances = sample(use, trials, seed);
        OracleReport rep;
        try {
            rep = falsify(prob, checks[p].verdicts, checks[p].claims, instances);
        } catch (const std::invalid_argument& e) {
            std::cerr << prob.path << ": preset " << use << " does not fit: " << e.what() << "\n";
            continue;
        }
        per_preset[use] += rep.instances;
        total += rep.counterexamples.size();
        std::string line = prob.path + " [" + use + "]: " + std::to_string(rep.instances) + " instances, " +
                           std::to_string(rep.checks) + " checks, " + std::to_string(rep.counterexamples.size()) +
                           " counterexamples";
        if (self_test) {
            std::vector<std::string> skipped;
            std::vector<ConcreteInstance> few(instances.begin(), instances.begin() + std::min<size_t>(instances.size(), 10));
            auto missed = oracle_self_test(prob, few, &skipped);
            missed_total += missed.size();
            if (skipped.size() == 3) line += ", self-test not applicable";
            else line += ", self-test " + std::string(missed.empty() ? "ok" : "FAILED");
            if (!skipped.empty() && skipped.size() < 3) line += " (" + std::to_string(skipped.size()) + " skipped)";
            for (const auto& m : missed) std::cerr << "  self-test: " << m << "\n";
        }
        if (!json) std::cout << line << "\n";
        for (const auto& w : rep.warnings) std::cerr << "  warning: " << w << "\n";
        for (const auto& cx : rep.counterexamples)
            dumps.push_back({{"problem", prob.path}, {"kind", cx.kind}, {"relation", cx.relation},
                             {"detail", cx.detail}, {"instance", cx.instance}});
        reports.push_back(rep.to_json());
    }
    if (json) {
        std::cout << nlohmann::json({{"reports", reports}, {"counterexamples", total}}).dump(2) << "\n";
    } else {
        for (const auto& [pr, n] : per_preset) std::cout << pr << ": " << n << " instances\n";
        std::cout << total << " counterexamples\n";
    }
    if (total) {
        std::ofstream out(dump);
        out << dumps.dump(2) << "\n";
        std::cerr << "counterexample dump written to " << dump << "\n";
        return kCounterexample;
    }
    if (missed_total) {
        std::cerr << missed_total << " corrupted claims went unnoticed\n";
        return kCounterexample;
    }
    return 0;
}

int cmd_inspect(const std::vector<std::string>& files, const std::string& matrix, const std::string& only,
                bool pseudo, bool dot, bool json, bool baseline) {
    Pattern pat = read_matrix_market(resolve_matrix_path(matrix));
    Corpus c = load_corpus(files);
    auto verdicts = analyze_corpus(c, PropertyConfig::parse("all"));
    DependenceGraph g;
    g.n = pat.n;
    std::vector<std::string> lines;
    for (const auto& kernel : c.kernels) {
        KernelRow row = kernel_row(c, kernel, verdicts, verdicts, ComplexityExpr{}, kDefaultDensity);
        std::set<std::string> kept(row.minimized.kept.begin(), row.minimized.kept.end());
        for (size_t k : c.unique()) {
            const CorpusEntry& e = c.entries[k];
            const Relation& r = c.relation(e);
            if (e.kernel != kernel || verdicts[k].unsat()) continue;
            if (!only.empty() ? r.name != only : !kept.count(r.name)) continue;
            const Problem& prob = c.problem(e);
            ConcreteInstance inst = instance_from_pattern(prob.preset, pat);
            for (const auto& plan : plan_inspector(r, verdicts[k], !baseline)) {
                if (pseudo) std::cout << emit_pseudo(plan, r) << "\n";
                EdgeSet edges = run_plan(plan, r, inst, prob.ufs);
                g.add(r.name, edges);
                lines.push_back(r.name + ": " + std::to_string(edges.size()) + " pairs");
            }
        }
    }
    if (!only.empty() && lines.empty()) throw std::invalid_argument("no MAYBE relation named '" + only + "'");
    auto levels = wavefronts(g);
    if (json) {
        std::cout << g.to_json(levels).dump(2) << "\n";
        return 0;
    }
    if (dot) std::cout << g.to_dot(levels);
    for (const auto& l : lines) std::cout << l << "\n";
    std::cout << g.edges.size() << " edges, " << levels.size() << " wavefronts\n";
    for (size_t l = 0; l < levels.size(); ++l) {
        std::cout << "level " << l << ":";
        for (Int v : levels[l]) std::cout << " " << v;
        std::cout << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Index-array property reasoning for sparse dependence relations"};
    app.require_subcommand(1);

    std::vector<std::string> files;
    std::string properties = "all";
    bool json = false, table = false;
    auto* check = app.add_subcommand("check", "classify relations as UNSAT or MAYBE");
    check->add_option("files", files, "problem files or directories")->required();
    check->add_option("--properties", properties, "none | single:<category> | all");
    auto* jflag = check->add_flag("--json", json, "JSON verdicts");
    check->add_flag("--table", table, "table output (default)")->excludes(jflag);

    auto* simplify = app.add_subcommand("simplify", "equalities and complexity before/after");
    simplify->add_option("files", files)->required();

    bool sjson = false;
    auto* superset = app.add_subcommand("superset", "superset claims and the minimized check set");
    superset->add_option("files", files)->required();
    superset->add_flag("--json", sjson);

    std::string manifest, json_out, csv_out;
    auto* report = app.add_subcommand("report", "runtime-check counts and inspector costs against the manifest");
    report->add_option("files", files)->required();
    report->add_option("--manifest", manifest, "default: manifest.json next to the corpus");
    report->add_option("--json", json_out, "write the report JSON here");
    report->add_option("--csv", csv_out, "write the complexity-class counts here");

    std::string preset = "auto", dump = "oracle_counterexamples.json";
    size_t trials = 50;
    std::uint64_t seed = 1;
    bool self_test = false, ojson = false;
    auto* oracle = app.add_subcommand("oracle", "brute-force falsification on sampled instances");
    oracle->add_option("files", files)->required();
    oracle->add_option("--preset", preset, "auto | generator preset");
    oracle->add_option("--trials", trials)->check(CLI::PositiveNumber);
    oracle->add_option("--seed", seed);
    oracle->add_option("--dump", dump, "counterexample dump path");
    oracle->add_flag("--self-test", self_test, "also check that corrupted claims are refuted");
    oracle->add_flag("--json", ojson);

    std::string matrix, relation;
    bool pseudo = false, dot = false, ijson = false, baseline = false;
    auto* inspect = app.add_subcommand("inspect", "run inspectors on a matrix and list wavefronts");
    inspect->add_option("files", files)->required();
    inspect->add_option("--matrix", matrix, "Matrix Market file or fixture name")->required();
    inspect->add_option("--relation", relation, "one MAYBE relation instead of the minimized set");
    inspect->add_flag("--emit-pseudo", pseudo);
    inspect->add_flag("--dot", dot);
    inspect->add_flag("--json", ijson);
    inspect->add_flag("--baseline", baseline, "plans without the certified equalities");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }

    try {
        if (*check) return cmd_check(files, properties, json);
        if (*simplify) return cmd_simplify(files);
        if (*superset) return cmd_superset(files, sjson);
        if (*report) return cmd_report(files, manifest, json_out, csv_out);
        if (*oracle) return cmd_oracle(files, preset, trials, seed, dump, self_test, ojson);
        if (*inspect) return cmd_inspect(files, matrix, relation, pseudo, dot, ijson, baseline);
    } catch (const ParseError& e) {
        std::cerr << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return 0;
}
