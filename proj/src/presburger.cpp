#include "sparsedep/presburger.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace sparsedep {

std::string to_string(SatStatus s) {
    switch (s) {
        case SatStatus::IntegerUnsat: return "INTEGER_UNSAT";
        case SatStatus::RationalSatUnknownInteger: return "RATIONAL_SAT_UNKNOWN_INTEGER";
        case SatStatus::IntegerSatWitness: return "INTEGER_SAT_WITNESS";
        case SatStatus::Unknown: return "UNKNOWN";
    }
    return "UNKNOWN";
}

namespace {

using Coefs = std::vector<BigInt>;

struct Row {
    Coefs c;
    BigInt k = 0;
};

enum class RowState { Ok, Trivial, Contradiction };

BigInt abs_big(const BigInt& v) { return v < 0 ? BigInt(-v) : v; }

BigInt row_gcd(const Row& r) {
    BigInt g = 0;
    for (const auto& v : r.c)
        if (v != 0) g = boost::multiprecision::gcd(g, abs_big(v));
    return g;
}

RowState normalize_geq(Row& r) {
    BigInt g = row_gcd(r);
    if (g == 0) return r.k >= 0 ? RowState::Trivial : RowState::Contradiction;
    if (g != 1) {
        for (auto& v : r.c) v /= g;
        r.k = big_floor_div(r.k, g);
    }
    return RowState::Ok;
}

RowState normalize_eq(Row& r) {
    BigInt g = row_gcd(r);
    if (g == 0) return r.k == 0 ? RowState::Trivial : RowState::Contradiction;
    if (r.k % g != 0) return RowState::Contradiction;
    if (g != 1) {
        for (auto& v : r.c) v /= g;
        r.k /= g;
    }
    for (const auto& v : r.c) {
        if (v == 0) continue;
        if (v < 0) {
            for (auto& w : r.c) w = -w;
            r.k = -r.k;
        }
        break;
    }
    return RowState::Ok;
}

size_t bits(const BigInt& v) {
    if (v == 0) return 0;
    return boost::multiprecision::msb(abs_big(v)) + 1;
}

struct Event {
    bool substitute = false;
    size_t var = 0;
    Row def;                // substitute: value = def.c . x + def.k
    std::vector<Row> rows;  // eliminate: rows mentioning var at that point
};

class Engine {
public:
    Engine(const LinearSystem& ls, const CheckOptions& opts) : ls_(ls), opts_(opts), n_(ls.size()) {
        for (const auto& r : ls.eqs()) eqs_.push_back(load(r));
        for (const auto& r : ls.ineqs()) ineqs_.push_back(load(r));
    }

    CheckResult run() {
        CheckResult res;
        SatStatus st = solve();
        res.certificate = std::move(cert_);
        res.diagnostic = diagnostic_;
        if (st != SatStatus::RationalSatUnknownInteger) {
            res.status = st;
            return res;
        }
        std::vector<BigInt> values(n_, 0);
        size_t budget = opts_.witness_nodes;
        bool found = search(static_cast<long>(history_.size()) - 1, values, budget);
        if (!found && complete_ && budget > 0) {
            // every integer point projects into the bounds that were enumerated
            res.status = SatStatus::IntegerUnsat;
            if (opts_.certificate) res.certificate.push_back("bounded enumeration of the shadow found no integer point");
            return res;
        }
        if (found) {
            std::map<std::string, BigInt> point;
            for (size_t k = 0; k < n_; ++k) point[ls_.vars()[k]] = values[k];
            if (ls_.satisfied_by(point)) {
                res.status = SatStatus::IntegerSatWitness;
                res.witness = std::move(point);
                return res;
            }
        }
        res.status = SatStatus::RationalSatUnknownInteger;
        return res;
    }

private:
    Row load(const LinearRow& r) const {
        Row out;
        out.c.assign(n_, 0);
        for (size_t k = 0; k < r.coef.size() && k < n_; ++k) out.c[k] = r.coef[k];
        out.k = r.constant;
        return out;
    }

    std::string show(const Row& r, const char* rel) const {
        if (!opts_.certificate) return {};
        std::string out;
        for (size_t k = 0; k < n_; ++k) {
            if (r.c[k] == 0) continue;
            BigInt v = r.c[k];
            if (!out.empty()) out += v < 0 ? " - " : " + ";
            else if (v < 0) out += "-";
            BigInt mag = abs_big(v);
            if (mag != 1) out += mag.str() + "*";
            out += ls_.vars()[k];
        }
        if (out.empty()) out = r.k.str();
        else if (r.k > 0) out += " + " + r.k.str();
        else if (r.k < 0) out += " - " + BigInt(-r.k).str();
        return out + " " + rel + " 0";
    }

    void note(std::string s) {
        if (opts_.certificate) cert_.push_back(std::move(s));
    }

    bool over_size(const Row& r) const {
        if (bits(r.k) > opts_.max_coefficient_bits) return true;
        for (const auto& v : r.c)
            if (bits(v) > opts_.max_coefficient_bits) return true;
        return false;
    }

    // Substitute var := def in every row.
    RowState apply_substitution(size_t var, const Row& def) {
        auto subst = [&](Row& r) {
            if (r.c[var] == 0) return;
            BigInt a = r.c[var];
            r.c[var] = 0;
            for (size_t k = 0; k < n_; ++k)
                if (def.c[k] != 0) r.c[k] += a * def.c[k];
            r.k += a * def.k;
        };
        for (auto& r : eqs_) subst(r);
        for (auto& r : ineqs_) subst(r);
        std::vector<Row> keep;
        for (auto& r : eqs_) {
            RowState s = normalize_eq(r);
            if (s == RowState::Contradiction) {
                note("gcd test fails: " + show(r, "="));
                return s;
            }
            if (s == RowState::Ok) keep.push_back(std::move(r));
        }
        eqs_ = std::move(keep);
        keep.clear();
        for (auto& r : ineqs_) {
            RowState s = normalize_geq(r);
            if (s == RowState::Contradiction) {
                note("contradiction: " + show(r, ">="));
                return s;
            }
            if (s == RowState::Ok) keep.push_back(std::move(r));
        }
        ineqs_ = std::move(keep);
        return RowState::Ok;
    }

    // Solve equalities with a unit coefficient by substitution; split the
    // rest into inequality pairs.
    RowState process_equalities() {
        while (true) {
            std::vector<Row> keep;
            for (auto& r : eqs_) {
                RowState s = normalize_eq(r);
                if (s == RowState::Contradiction) {
                    note("gcd test fails: " + show(r, "="));
                    return s;
                }
                if (s == RowState::Ok) keep.push_back(std::move(r));
            }
            eqs_ = std::move(keep);
            bool progress = false;
            for (size_t e = 0; e < eqs_.size() && !progress; ++e) {
                for (size_t v = 0; v < n_; ++v) {
                    const BigInt& a = eqs_[e].c[v];
                    if (a != 1 && a != -1) continue;
                    Row def;
                    def.c.assign(n_, 0);
                    for (size_t k = 0; k < n_; ++k)
                        if (k != v) def.c[k] = -a * eqs_[e].c[k];
                    def.k = -a * eqs_[e].k;
                    note("substitute " + ls_.vars()[v] + " from " + show(eqs_[e], "="));
                    eqs_.erase(eqs_.begin() + static_cast<long>(e));
                    Event ev;
                    ev.substitute = true;
                    ev.var = v;
                    ev.def = def;
                    history_.push_back(std::move(ev));
                    if (apply_substitution(v, def) == RowState::Contradiction) return RowState::Contradiction;
                    progress = true;
                    break;
                }
            }
            if (!progress) break;
        }
        for (auto& r : eqs_) {
            Row neg = r;
            for (auto& v : neg.c) v = -v;
            neg.k = -neg.k;
            ineqs_.push_back(r);
            ineqs_.push_back(std::move(neg));
        }
        eqs_.clear();
        return RowState::Ok;
    }

    // Deduplicate parallel rows, detect opposite pairs. Returns Contradiction,
    // or Trivial when new equalities were found (caller re-runs equalities).
    RowState tighten() {
        std::map<Coefs, BigInt> best;
        for (auto& r : ineqs_) {
            RowState s = normalize_geq(r);
            if (s == RowState::Contradiction) {
                note("contradiction: " + show(r, ">="));
                return s;
            }
            if (s == RowState::Trivial) continue;
            auto it = best.find(r.c);
            if (it == best.end())
                best.emplace(r.c, r.k);
            else if (r.k < it->second)
                it->second = r.k;
        }
        ineqs_.clear();
        bool found_eq = false;
        for (const auto& [c, k] : best) {
            Coefs neg = c;
            for (auto& v : neg) v = -v;
            auto it = best.find(neg);
            if (it != best.end()) {
                if (k + it->second < 0) {
                    Row r{c, k};
                    note("opposite bounds conflict: " + show(r, ">=") + " and " + show(Row{neg, it->second}, ">="));
                    return RowState::Contradiction;
                }
                if (k + it->second == 0 && c < neg) {
                    eqs_.push_back(Row{c, k});
                    found_eq = true;
                }
            }
            ineqs_.push_back(Row{c, k});
        }
        return found_eq ? RowState::Trivial : RowState::Ok;
    }

    SatStatus solve() {
        for (auto& r : ineqs_) {
            if (over_size(r)) {
                diagnostic_ = "coefficient size cap";
                return SatStatus::Unknown;
            }
        }
        if (process_equalities() == RowState::Contradiction) return SatStatus::IntegerUnsat;
        size_t derived = 0;
        while (true) {
            RowState t = tighten();
            if (t == RowState::Contradiction) return SatStatus::IntegerUnsat;
            if (t == RowState::Trivial) {
                size_t before = history_.size();
                if (process_equalities() == RowState::Contradiction) return SatStatus::IntegerUnsat;
                if (history_.size() != before) continue;
            }
            // choose a variable
            long pick = -1;
            long best_cost = 0;
            for (size_t v = 0; v < n_; ++v) {
                long lo = 0, hi = 0;
                for (const auto& r : ineqs_) {
                    if (r.c[v] > 0) ++lo;
                    if (r.c[v] < 0) ++hi;
                }
                if (lo == 0 && hi == 0) continue;
                long cost = lo * hi - lo - hi;
                if (pick < 0 || cost < best_cost) {
                    pick = static_cast<long>(v);
                    best_cost = cost;
                }
            }
            if (pick < 0) return SatStatus::RationalSatUnknownInteger;
            size_t v = static_cast<size_t>(pick);
            Event ev;
            ev.var = v;
            std::vector<Row> lower, upper, rest;
            for (auto& r : ineqs_) {
                if (r.c[v] > 0)
                    lower.push_back(r);
                else if (r.c[v] < 0)
                    upper.push_back(r);
                else
                    rest.push_back(std::move(r));
            }
            ev.rows = lower;
            ev.rows.insert(ev.rows.end(), upper.begin(), upper.end());
            history_.push_back(std::move(ev));
            note("eliminate " + ls_.vars()[v] + " (" + std::to_string(lower.size()) + " lower x " +
                 std::to_string(upper.size()) + " upper)");
            for (const auto& l : lower) {
                for (const auto& u : upper) {
                    BigInt a = l.c[v];
                    BigInt b = -u.c[v];
                    Row r;
                    r.c.assign(n_, 0);
                    for (size_t k = 0; k < n_; ++k) r.c[k] = b * l.c[k] + a * u.c[k];
                    r.k = b * l.k + a * u.k;
                    RowState s = normalize_geq(r);
                    if (s == RowState::Contradiction) {
                        note("contradiction: " + show(r, ">="));
                        return SatStatus::IntegerUnsat;
                    }
                    if (s == RowState::Trivial) continue;
                    if (over_size(r)) {
                        diagnostic_ = "coefficient size cap";
                        return SatStatus::Unknown;
                    }
                    rest.push_back(std::move(r));
                    if (++derived > opts_.max_derived) {
                        diagnostic_ = "derived inequality cap";
                        return SatStatus::Unknown;
                    }
                }
            }
            ineqs_ = std::move(rest);
        }
    }

    bool search(long idx, std::vector<BigInt>& values, size_t& budget) {
        if (idx < 0) return true;
        if (budget == 0) return false;
        --budget;
        const Event& ev = history_[static_cast<size_t>(idx)];
        if (ev.substitute) {
            BigInt v = ev.def.k;
            for (size_t k = 0; k < n_; ++k)
                if (ev.def.c[k] != 0) v += ev.def.c[k] * values[k];
            values[ev.var] = v;
            return search(idx - 1, values, budget);
        }
        std::optional<BigInt> lo, hi;
        for (const auto& r : ev.rows) {
            BigInt rest = r.k;
            for (size_t k = 0; k < n_; ++k)
                if (k != ev.var && r.c[k] != 0) rest += r.c[k] * values[k];
            BigInt a = r.c[ev.var];
            if (a > 0) {
                BigInt b = big_ceil_div(-rest, a);
                if (!lo || b > *lo) lo = b;
            } else {
                BigInt b = big_floor_div(rest, -a);
                if (!hi || b < *hi) hi = b;
            }
        }
        if (lo && hi && *lo > *hi) return false;
        std::vector<BigInt> cand;
        if (lo && hi && *hi - *lo < 64) {
            for (BigInt c = *lo; c <= *hi; ++c) cand.push_back(c);
        } else if (lo && hi) {
            complete_ = false;
            for (BigInt c = *lo; cand.size() < 6; ++c) cand.push_back(c);
            for (BigInt c = *hi; cand.size() < 12; --c) cand.push_back(c);
        } else if (lo) {
            complete_ = false;
            for (int d = 0; d < 6; ++d) cand.push_back(*lo + d);
        } else if (hi) {
            complete_ = false;
            for (int d = 0; d < 6; ++d) cand.push_back(*hi - d);
        } else {
            complete_ = false;
            cand = {0, 1, -1, 2, -2};
        }
        for (const auto& c : cand) {
            values[ev.var] = c;
            if (search(idx - 1, values, budget)) return true;
            if (budget == 0) return false;
        }
        return false;
    }

    const LinearSystem& ls_;
    const CheckOptions& opts_;
    size_t n_;
    std::vector<Row> eqs_;
    std::vector<Row> ineqs_;
    std::vector<Event> history_;
    std::vector<std::string> cert_;
    std::string diagnostic_;
    bool complete_ = true;  // witness search covered every candidate value
};

LinearSystem with_row(const LinearSystem& ls, const AffineExpr& e, bool eq) {
    LinearSystem out = ls;
    LinearRow r = out.row(e);
    if (eq)
        out.add_eq(std::move(r));
    else
        out.add_geq(std::move(r));
    return out;
}

}  // namespace

CheckResult check(const LinearSystem& ls, const CheckOptions& opts) {
    Engine engine(ls, opts);
    return engine.run();
}

bool entails(const LinearSystem& ls, const Constraint& c, const CheckOptions& opts) {
    Constraint n = normalize(c);
    if (auto t = n.truth()) {
        if (*t) return true;
        return check(ls, opts).unsat();
    }
    if (n.is_eq()) {
        // e = 0 fails iff e >= 1 or e <= -1
        return check(with_row(ls, n.expr - 1, false), opts).unsat() &&
               check(with_row(ls, -n.expr - 1, false), opts).unsat();
    }
    return check(with_row(ls, -n.expr - 1, false), opts).unsat();
}

std::vector<Constraint> implied_equalities(const LinearSystem& ls, const ImpliedEqualityOptions& opts,
                                           const CheckOptions& check_opts) {
    std::vector<Constraint> out;
    CheckResult base = check(ls, check_opts);
    if (base.status != SatStatus::IntegerSatWitness) return out;
    const size_t n = ls.size();
    const auto& vars = ls.vars();

    // co-occurrence graph
    std::vector<std::set<size_t>> adj(n);
    auto link_row = [&](const LinearRow& r) {
        std::vector<size_t> nz;
        for (size_t k = 0; k < r.coef.size() && k < n; ++k)
            if (r.coef[k] != 0) nz.push_back(k);
        for (size_t a : nz)
            for (size_t b : nz)
                if (a != b) adj[a].insert(b);
    };
    for (const auto& r : ls.eqs()) link_row(r);
    for (const auto& r : ls.ineqs()) link_row(r);

    std::set<std::pair<size_t, size_t>> pairs;
    for (size_t a = 0; a < n; ++a) {
        if (opts.exhaustive) {
            for (size_t b = a + 1; b < n; ++b) pairs.insert({a, b});
            continue;
        }
        std::map<size_t, int> dist{{a, 0}};
        std::vector<size_t> frontier{a};
        for (int d = 1; d <= opts.degree; ++d) {
            std::vector<size_t> next;
            for (size_t u : frontier)
                for (size_t w : adj[u])
                    if (!dist.count(w)) {
                        dist[w] = d;
                        next.push_back(w);
                    }
            frontier = std::move(next);
        }
        for (const auto& [b, d] : dist)
            if (b > a) pairs.insert({a, b});
    }

    std::set<Constraint> explicit_eqs;
    for (const auto& r : ls.eqs()) explicit_eqs.insert(normalize(ls.to_constraint(r, true)));

    // union-find with offsets; node n is the constant zero
    std::vector<size_t> parent(n + 1);
    std::vector<BigInt> offset(n + 1, 0);  // value(x) = value(parent) + offset
    std::iota(parent.begin(), parent.end(), 0);
    auto root_offset = [&](size_t x) {
        BigInt off = 0;
        while (parent[x] != x) {
            off += offset[x];
            x = parent[x];
        }
        return std::make_pair(x, off);
    };
    auto implied = [&](size_t x, size_t y, const BigInt& diff) {  // x - y = diff ?
        auto [rx, ox] = root_offset(x);
        auto [ry, oy] = root_offset(y);
        return rx == ry && ox - oy == diff;
    };
    auto unite = [&](size_t x, size_t y, const BigInt& diff) {
        auto [rx, ox] = root_offset(x);
        auto [ry, oy] = root_offset(y);
        if (rx == ry) return;
        // value(rx) = value(ry) + oy + diff - ox
        parent[rx] = ry;
        offset[rx] = oy + diff - ox;
    };
    for (const auto& r : ls.eqs()) {
        std::vector<size_t> nz;
        for (size_t k = 0; k < r.coef.size() && k < n; ++k)
            if (r.coef[k] != 0) nz.push_back(k);
        if (nz.size() == 1 && abs_big(r.coef[nz[0]]) == 1) {
            unite(nz[0], n, -r.constant * r.coef[nz[0]]);
        } else if (nz.size() == 2 && r.coef[nz[0]] == -r.coef[nz[1]] && abs_big(r.coef[nz[0]]) == 1) {
            size_t x = r.coef[nz[0]] == 1 ? nz[0] : nz[1];
            size_t y = x == nz[0] ? nz[1] : nz[0];
            unite(x, y, -r.constant);
        }
    }

    auto value = [&](size_t k) {
        auto it = base.witness.find(vars[k]);
        return it == base.witness.end() ? BigInt(0) : it->second;
    };
    auto test = [&](const AffineExpr& e) {
        return entails(ls, Constraint::geq(e), check_opts) && entails(ls, Constraint::geq(-e), check_opts);
    };
    for (size_t a = 0; a < n; ++a) {
        BigInt c = value(a);
        if (implied(a, n, c)) continue;
        AffineExpr e(Atom::iterator(vars[a]));
        e -= static_cast<Int>(c);
        if (!test(e)) continue;
        unite(a, n, c);
        Constraint eq = normalize(Constraint::eq(e));
        if (!explicit_eqs.count(eq)) out.push_back(eq);
    }
    for (const auto& [a, b] : pairs) {
        BigInt c = value(a) - value(b);
        if (implied(a, b, c)) continue;
        AffineExpr e(Atom::iterator(vars[a]));
        e -= AffineExpr(Atom::iterator(vars[b]));
        e -= static_cast<Int>(c);
        if (!test(e)) continue;
        unite(a, b, c);
        Constraint eq = normalize(Constraint::eq(e));
        if (!explicit_eqs.count(eq)) out.push_back(eq);
    }
    return out;
}

Elimination eliminate(const LinearSystem& ls, const std::string& v) {
    Elimination out;
    auto idx = ls.index(v);
    std::vector<std::string> keep_vars;
    for (const auto& name : ls.vars())
        if (name != v) keep_vars.push_back(name);
    out.system = LinearSystem(keep_vars);
    auto remap = [&](const LinearRow& r) {
        LinearRow o;
        o.coef.assign(keep_vars.size(), 0);
        for (size_t k = 0, j = 0; k < ls.size(); ++k) {
            if (idx && k == *idx) continue;
            o.coef[j++] = r.at(k);
        }
        o.constant = r.constant;
        return o;
    };
    if (!idx) {
        for (const auto& r : ls.eqs()) out.system.add_eq(remap(r));
        for (const auto& r : ls.ineqs()) out.system.add_geq(remap(r));
        return out;
    }
    const size_t x = *idx;
    std::vector<LinearRow> eqs = ls.eqs();
    std::vector<LinearRow> ineqs = ls.ineqs();
    // unit-coefficient equality: exact substitution
    for (size_t e = 0; e < eqs.size(); ++e) {
        BigInt a = eqs[e].at(x);
        if (a != 1 && a != -1) continue;
        LinearRow def = eqs[e];
        auto subst = [&](LinearRow& r) {
            BigInt c = r.at(x);
            if (c == 0) return;
            r.coef.resize(std::max(r.coef.size(), def.coef.size()));
            // r - c*a*def removes x since a*a == 1
            for (size_t k = 0; k < def.coef.size(); ++k) r.coef[k] -= c * a * def.coef[k];
            r.constant -= c * a * def.constant;
        };
        for (size_t k = 0; k < eqs.size(); ++k)
            if (k != e) {
                subst(eqs[k]);
                out.system.add_eq(remap(eqs[k]));
            }
        for (auto& r : ineqs) {
            subst(r);
            out.system.add_geq(remap(r));
        }
        return out;
    }
    std::vector<LinearRow> lower, upper;
    for (const auto& r : eqs) {
        if (r.at(x) == 0) {
            out.system.add_eq(remap(r));
            continue;
        }
        out.exact = false;
        LinearRow neg = r;
        for (auto& c : neg.coef) c = -c;
        neg.constant = -neg.constant;
        ineqs.push_back(r);
        ineqs.push_back(neg);
    }
    for (const auto& r : ineqs) {
        BigInt a = r.at(x);
        if (a == 0)
            out.system.add_geq(remap(r));
        else if (a > 0)
            lower.push_back(r);
        else
            upper.push_back(r);
        if (a != 0 && a != 1 && a != -1) out.exact = false;
    }
    for (const auto& l : lower) {
        for (const auto& u : upper) {
            BigInt a = l.at(x);
            BigInt b = -u.at(x);
            LinearRow r;
            size_t width = std::max(l.coef.size(), u.coef.size());
            r.coef.assign(width, 0);
            for (size_t k = 0; k < width; ++k) r.coef[k] = b * l.at(k) + a * u.at(k);
            r.constant = b * l.constant + a * u.constant;
            BigInt g = 0;
            for (const auto& c : r.coef)
                if (c != 0) g = boost::multiprecision::gcd(g, abs_big(c));
            if (g == 0) {
                if (r.constant >= 0) continue;
                out.system.add_geq(remap(r));
                continue;
            }
            if (g != 1) {
                for (auto& c : r.coef) c /= g;
                r.constant = big_floor_div(r.constant, g);
            }
            out.system.add_geq(remap(r));
        }
    }
    return out;
}

}  // namespace sparsedep
