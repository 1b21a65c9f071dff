#include "sparsedep/report.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sparsedep {

const KernelExpectation* Manifest::find(const std::string& kernel) const {
    for (const auto& k : kernels)
        if (k.kernel == kernel) return &k;
    return nullptr;
}

Manifest Manifest::from_json(const nlohmann::json& j) {
    Manifest m;
    m.version = j.value("version", 1);
    m.density = j.value("density", kDefaultDensity);
    for (const auto& k : j.at("kernels")) {
        KernelExpectation e;
        e.kernel = k.at("kernel").get<std::string>();
        e.title = k.value("title", e.kernel);
        e.complexity = k.at("complexity").get<std::string>();
        e.source = k.value("source", "");
        if (k.contains("checks")) {
            std::array<CountPair, 3> t{};
            const char* cols[] = {"remaining", "equality", "superset"};
            for (size_t c = 0; c < 3; ++c) {
                const auto& v = k["checks"].at(cols[c]);
                t[c] = {v.at(0).get<size_t>(), v.at(1).get<size_t>()};
            }
            e.checks = t;
        }
        if (k.contains("baseline")) e.baseline = k["baseline"].get<std::string>();
        if (k.contains("simplified")) e.simplified = k["simplified"].get<std::string>();
        if (k.contains("deviations")) e.deviations = k["deviations"].get<std::map<std::string, std::string>>();
        m.kernels.push_back(std::move(e));
    }
    if (j.contains("aggregates")) m.aggregates = j["aggregates"].get<std::map<std::string, size_t>>();
    if (j.contains("ablation")) m.triangular_min = j["ablation"].value("triangular_min", size_t{0});
    if (j.contains("deviations")) m.deviations = j["deviations"].get<std::map<std::string, std::string>>();
    return m;
}

Manifest Manifest::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest '" + path + "'");
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

namespace {

// cost of the clauses that may hold, with their certified equalities
ComplexityExpr simplified_cost(const Relation& r, const Verdict& v) {
    ComplexityExpr out;
    for (size_t c = 0; c < r.clauses.size(); ++c) {
        const ClauseVerdict* cv = c < v.clauses.size() ? &v.clauses[c] : nullptr;
        if (cv && cv->unsat) continue;
        LoopNestModel m = model_loops(r, c, cv ? cv->equalities : std::vector<Constraint>{});
        if (!m.bounded) throw std::runtime_error(r.name + ": " + m.diagnostic);
        out += ComplexityExpr::single(m.cost());
    }
    return out;
}

Monomial leading(const ComplexityExpr& e, Int density) {
    Monomial best;
    bool first = true;
    for (const auto& [m, c] : e.terms)
        if (first || compare(m, best, density) > 0) {
            best = m;
            first = false;
        }
    return best;
}

std::string pair_text(const CountPair& p) { return std::to_string(p.first) + "/" + std::to_string(p.second); }

}  // namespace

KernelRow kernel_row(const Corpus& c, const std::string& kernel, const std::vector<Verdict>& affine,
                     const std::vector<Verdict>& combined, const ComplexityExpr& complexity, Int density) {
    KernelRow row;
    row.kernel = kernel;
    row.title = kernel;
    row.complexity = complexity;
    std::vector<SupersetInput> inputs;
    std::vector<ComplexityExpr> costs;
    std::set<std::string> affine_keys;
    for (size_t k : c.unique()) {
        const CorpusEntry& e = c.entries[k];
        if (e.kernel != kernel) continue;
        const Relation& r = c.relation(e);
        RelationCost rc;
        rc.name = r.name;
        rc.status = combined[k].status;
        rc.baseline = estimate(r);
        // one inspector serves an affine-UNSAT relation and its mirror image
        const bool affine_unsat = affine[k].status == VerdictStatus::UnsatAffine;
        if (!affine_unsat || !affine_keys.count(e.mirror_key)) row.baseline += rc.baseline;
        if (affine_unsat) affine_keys.insert(e.key);
        if (combined[k].maybe()) {
            rc.simplified = simplified_cost(r, combined[k]);
            for (const auto& q : combined[k].equalities) rc.equalities.push_back(q.to_string());
            SupersetInput in{&r, {}};
            for (const auto& cv : combined[k].clauses) in.equalities.push_back(cv.equalities);
            inputs.push_back(std::move(in));
            costs.push_back(rc.simplified);
            ++row.checks[0].second;
            ++row.checks[1].second;
            if (within(rc.baseline, complexity, density)) ++row.checks[0].first;
            if (within(rc.simplified, complexity, density)) ++row.checks[1].first;
        }
        row.relations.push_back(std::move(rc));
    }
    row.minimized = minimize(inputs, costs);
    for (const auto& name : row.minimized.kept) {
        auto it = std::find_if(row.relations.begin(), row.relations.end(),
                               [&](const RelationCost& rc) { return rc.name == name; });
        row.simplified += it->simplified;
        ++row.checks[2].second;
        if (within(it->simplified, complexity, density)) ++row.checks[2].first;
    }
    return row;
}

Report build_report(const Corpus& c, const Manifest& m, const AnalysisOptions& opts) {
    Report rep;
    AnalysisOptions quick = opts;
    quick.equalities = false;
    std::map<std::string, std::vector<Verdict>> runs;
    for (const auto& cfg : ablation_configs())
        runs[cfg] = analyze_corpus(c, PropertyConfig::parse(cfg), cfg == "all" ? opts : quick);
    const auto& affine = runs["none"];
    const auto& combined = runs["all"];
    rep.affine = summarize(c, affine);
    rep.combined = summarize(c, combined);

    for (const auto& cfg : ablation_configs()) {
        const std::string name = cfg.rfind("single:", 0) == 0 ? cfg.substr(7) : cfg;
        size_t n = 0;
        for (size_t k : c.unique())
            if (affine[k].maybe() && runs[cfg][k].unsat()) ++n;
        rep.ablation[name] = n;
    }
    for (size_t k : c.unique()) {
        if (affine[k].unsat()) continue;
        auto& cls = rep.classes[leading(estimate(c.relation(c.entries[k])), m.density)];
        ++cls["baseline"];
        for (const auto& cfg : ablation_configs()) {
            if (cfg == "none") continue;
            const std::string name = cfg.rfind("single:", 0) == 0 ? cfg.substr(7) : cfg;
            if (runs[cfg][k].maybe()) ++cls[name];
            else cls.try_emplace(name, 0);
        }
    }

    // manifest order first, then kernels it does not know
    std::vector<std::string> order;
    for (const auto& k : m.kernels)
        if (std::find(c.kernels.begin(), c.kernels.end(), k.kernel) != c.kernels.end()) order.push_back(k.kernel);
    for (const auto& k : c.kernels)
        if (std::find(order.begin(), order.end(), k) == order.end()) order.push_back(k);

    auto cell = [&](std::string name, std::string expected, std::string actual, bool pass, std::string deviation) {
        rep.cells.push_back({std::move(name), std::move(expected), std::move(actual), pass, std::move(deviation)});
    };
    auto note = [](const std::map<std::string, std::string>& d, const std::string& key) {
        auto it = d.find(key);
        return it == d.end() ? std::string() : it->second;
    };

    for (const auto& k : order) {
        const KernelExpectation* e = m.find(k);
        ComplexityExpr cx = e ? ComplexityExpr::parse(e->complexity) : ComplexityExpr{};
        KernelRow row = kernel_row(c, k, affine, combined, cx, m.density);
        if (e) row.title = e->title;
        if (e && e->checks) {
            const char* cols[] = {"remaining", "equality", "superset"};
            for (size_t i = 0; i < 3; ++i) {
                const std::string key = std::string("checks.") + cols[i];
                cell(k + "." + key, pair_text((*e->checks)[i]), pair_text(row.checks[i]),
                     (*e->checks)[i] == row.checks[i], note(e->deviations, key));
            }
        }
        if (e && e->baseline) {
            ComplexityExpr want = ComplexityExpr::parse(*e->baseline);
            cell(k + ".cost.baseline", want.to_string(), row.baseline.to_string(), want == row.baseline,
                 note(e->deviations, "cost.baseline"));
        }
        if (e && e->simplified) {
            ComplexityExpr want = ComplexityExpr::parse(*e->simplified);
            cell(k + ".cost.simplified", want.to_string(), row.simplified.to_string(), want == row.simplified,
                 note(e->deviations, "cost.simplified"));
        }
        rep.rows.push_back(std::move(row));
    }

    std::map<std::string, size_t> actual = {
        {"relations", rep.combined.total.relations},
        {"unique", rep.combined.total.unique},
        {"affine_unsat", rep.affine.total.affine_unsat},
        {"baseline", rep.affine.total.unique - rep.affine.total.affine_unsat},
        {"property_unsat", rep.combined.total.unsat() - rep.affine.total.affine_unsat},
        {"maybe", rep.combined.total.maybe},
    };
    for (const auto& [name, want] : m.aggregates) {
        auto it = actual.find(name);
        if (it == actual.end()) throw std::runtime_error("manifest: unknown aggregate '" + name + "'");
        cell("aggregate." + name, std::to_string(want), std::to_string(it->second), want == it->second,
             note(m.deviations, name));
    }

    size_t best_single = 0;
    std::string best_name;
    for (const auto& [name, n] : rep.ablation) {
        if (name == "none" || name == "all") continue;
        if (n > best_single || best_name.empty()) {
            best_single = n;
            best_name = name;
        }
    }
    const size_t mono = rep.ablation["monotonicity"];
    cell("ablation.monotonicity_highest", ">= " + std::to_string(best_single), std::to_string(mono),
         mono >= best_single, note(m.deviations, "monotonicity_highest"));
    cell("ablation.combined", ">= " + std::to_string(best_single), std::to_string(rep.ablation["all"]),
         rep.ablation["all"] >= best_single, note(m.deviations, "combined"));
    if (m.triangular_min)
        cell("ablation.triangular", ">= " + std::to_string(m.triangular_min), std::to_string(rep.ablation["triangular"]),
             rep.ablation["triangular"] >= m.triangular_min, note(m.deviations, "triangular"));
    return rep;
}

bool Report::ok() const {
    return std::all_of(cells.begin(), cells.end(), [](const ReportCell& c) { return c.pass; });
}

nlohmann::json Report::to_json() const {
    nlohmann::json j;
    j["version"] = 1;
    j["ok"] = ok();
    j["summary"] = {{"affine", affine.to_json()}, {"combined", combined.to_json()}};
    j["ablation"] = ablation;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row;
        row["kernel"] = r.kernel;
        row["title"] = r.title;
        row["complexity"] = r.complexity.to_string();
        const char* cols[] = {"remaining", "equality", "superset"};
        for (size_t i = 0; i < 3; ++i) row["checks"][cols[i]] = {r.checks[i].first, r.checks[i].second};
        row["baseline"] = r.baseline.to_string();
        row["simplified"] = r.simplified.to_string();
        row["kept"] = r.minimized.kept;
        row["discarded"] = r.minimized.discarded;
        row["claims"] = nlohmann::json::array();
        for (const auto& c : r.minimized.claims) row["claims"].push_back(sparsedep::to_json(c));
        row["relations"] = nlohmann::json::array();
        for (const auto& rc : r.relations) {
            nlohmann::json x = {{"name", rc.name}, {"status", to_string(rc.status)}, {"baseline", rc.baseline.to_string()}};
            if (rc.status == VerdictStatus::MaybeSat || rc.status == VerdictStatus::UnknownCapped) {
                x["simplified"] = rc.simplified.to_string();
                x["equalities"] = rc.equalities;
            }
            row["relations"].push_back(std::move(x));
        }
        j["rows"].push_back(std::move(row));
    }
    j["classes"] = nlohmann::json::array();
    for (const auto& [mono, counts] : classes) j["classes"].push_back({{"class", mono.to_string()}, {"counts", counts}});
    j["cells"] = nlohmann::json::array();
    for (const auto& c : cells) {
        nlohmann::json x = {{"name", c.name}, {"expected", c.expected}, {"actual", c.actual}, {"pass", c.pass}};
        if (!c.deviation.empty()) x["deviation"] = c.deviation;
        j["cells"].push_back(std::move(x));
    }
    return j;
}

std::string Report::to_text() const {
    std::map<std::string, const ReportCell*> by_name;
    for (const auto& c : cells) by_name[c.name] = &c;
    auto status = [&](std::initializer_list<std::string> names) -> std::string {
        bool any = false, pass = true, flagged = false;
        for (const auto& n : names) {
            auto it = by_name.find(n);
            if (it == by_name.end()) continue;
            any = true;
            pass = pass && it->second->pass;
            flagged = flagged || (!it->second->pass && !it->second->deviation.empty());
        }
        if (!any) return "-";
        return pass ? "PASS" : flagged ? "FAIL (flagged deviation)" : "FAIL";
    };
    auto expected = [&](const std::string& n) {
        auto it = by_name.find(n);
        return it == by_name.end() ? std::string("?") : it->second->expected;
    };
    std::ostringstream os;
    os << "Relations checked at runtime (<= kernel / total)\n";
    os << std::left << std::setw(24) << "kernel" << std::setw(34) << "remaining | equality | superset"
       << std::setw(30) << "expected" << "\n";
    for (const auto& r : rows) {
        std::ostringstream got, want;
        got << pair_text(r.checks[0]) << " | " << pair_text(r.checks[1]) << " | " << pair_text(r.checks[2]);
        want << expected(r.kernel + ".checks.remaining") << " | " << expected(r.kernel + ".checks.equality") << " | "
             << expected(r.kernel + ".checks.superset");
        os << std::setw(24) << r.title << std::setw(34) << got.str() << std::setw(30) << want.str()
           << status({r.kernel + ".checks.remaining", r.kernel + ".checks.equality", r.kernel + ".checks.superset"})
           << "\n";
    }
    os << "\nInspector complexity\n";
    for (const auto& r : rows) {
        os << r.title << "\n";
        os << "  baseline    " << r.baseline.to_string() << "\n";
        os << "    expected  " << expected(r.kernel + ".cost.baseline") << "  "
           << status({r.kernel + ".cost.baseline"}) << "\n";
        os << "  simplified  " << r.simplified.to_string() << "\n";
        os << "    expected  " << expected(r.kernel + ".cost.simplified") << "  "
           << status({r.kernel + ".cost.simplified"}) << "\n";
    }
    os << "\nAggregates\n";
    os << "  affine:   " << affine.line() << "\n";
    os << "  combined: " << combined.line() << "\n";
    for (const auto& c : cells) {
        if (c.name.rfind("aggregate.", 0) != 0 && c.name.rfind("ablation.", 0) != 0) continue;
        os << "  " << std::setw(30) << c.name << std::setw(8) << c.actual << "expected " << std::setw(8) << c.expected
           << status({c.name}) << "\n";
    }
    os << "\nAblation (UNSAT among the affine baseline)\n";
    for (const auto& [name, n] : ablation) os << "  " << std::setw(26) << name << n << "\n";
    for (const auto& c : cells)
        if (!c.pass && !c.deviation.empty()) os << "\nflagged " << c.name << ": " << c.deviation;
    if (std::any_of(cells.begin(), cells.end(), [](const ReportCell& c) { return !c.pass && !c.deviation.empty(); }))
        os << "\n";
    size_t failed = std::count_if(cells.begin(), cells.end(), [](const ReportCell& c) { return !c.pass; });
    os << "\n" << cells.size() - failed << "/" << cells.size() << " cells match\n";
    return os.str();
}

std::string Report::class_csv() const {
    std::vector<Monomial> order;
    for (const auto& [m, counts] : classes) order.push_back(m);
    std::sort(order.begin(), order.end(), [](const Monomial& a, const Monomial& b) { return compare(a, b) < 0; });
    std::vector<std::string> cols = {"baseline"};
    for (const auto& cfg : ablation_configs())
        if (cfg != "none") cols.push_back(cfg.rfind("single:", 0) == 0 ? cfg.substr(7) : cfg);
    std::ostringstream os;
    os << "class";
    for (const auto& c : cols) os << "," << c;
    os << "\n";
    for (const auto& m : order) {
        os << m.to_string();
        const auto& counts = classes.at(m);
        for (const auto& c : cols) {
            auto it = counts.find(c);
            os << "," << (it == counts.end() ? 0 : it->second);
        }
        os << "\n";
    }
    return os.str();
}

}  // namespace sparsedep
