#include "sparsedep/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace sparsedep {

ParseError::ParseError(const std::string& file, int line, int column, const std::string& message)
    : std::runtime_error(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line), column_(column), message_(message) {}

const UFSymbol* Problem::find_uf(const std::string& name) const {
    for (const auto& u : ufs)
        if (u.name == name) return &u;
    return nullptr;
}

const SymbolicConst* Problem::find_symbolic(const std::string& name) const {
    for (const auto& s : symbolics)
        if (s.name == name) return &s;
    return nullptr;
}

SymbolRole default_role(const std::string& name) {
    if (name == "nnz" || name == "NNZ" || name == "nnzL") return SymbolRole::NonzeroCount;
    if (name == "n" || name == "N" || name == "m") return SymbolRole::Size;
    return SymbolRole::Other;
}

namespace {

enum class Tok { Ident, Number, String, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    Lexer(const std::string& text, std::string file) : src_(text), file_(std::move(file)) { tokenize(); }
    const std::vector<Token>& tokens() const { return toks_; }
    const std::string& file() const { return file_; }

private:
    void tokenize() {
        size_t p = 0;
        int line = 1, col = 1;
        auto advance = [&](size_t count) {
            for (size_t k = 0; k < count; ++k) {
                if (src_[p] == '\n') {
                    ++line;
                    col = 1;
                } else {
                    ++col;
                }
                ++p;
            }
        };
        while (p < src_.size()) {
            char ch = src_[p];
            if (ch == '#') {
                while (p < src_.size() && src_[p] != '\n') advance(1);
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(ch))) {
                advance(1);
                continue;
            }
            Token t;
            t.line = line;
            t.column = col;
            if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
                size_t q = p;
                while (q < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[q])) || src_[q] == '_' || src_[q] == '\''))
                    ++q;
                t.kind = Tok::Ident;
                t.text = src_.substr(p, q - p);
                advance(q - p);
            } else if (std::isdigit(static_cast<unsigned char>(ch))) {
                size_t q = p;
                while (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q]))) ++q;
                t.kind = Tok::Number;
                t.text = src_.substr(p, q - p);
                advance(q - p);
            } else if (ch == '"') {
                size_t q = p + 1;
                while (q < src_.size() && src_[q] != '"' && src_[q] != '\n') ++q;
                if (q >= src_.size() || src_[q] != '"') throw ParseError(file_, line, col, "unterminated string");
                t.kind = Tok::String;
                t.text = src_.substr(p + 1, q - p - 1);
                advance(q - p + 1);
            } else {
                static const char* two[] = {"->", "&&", "||", "<=", ">=", "==", "!="};
                t.kind = Tok::Punct;
                bool matched = false;
                for (const char* op : two) {
                    if (src_.compare(p, 2, op) == 0) {
                        t.text = op;
                        advance(2);
                        matched = true;
                        break;
                    }
                }
                if (!matched) {
                    static const std::string singles = "{}[](),;:=<>+-*";
                    if (singles.find(ch) == std::string::npos)
                        throw ParseError(file_, line, col, std::string("unexpected character '") + ch + "'");
                    t.text = std::string(1, ch);
                    advance(1);
                }
            }
            toks_.push_back(std::move(t));
        }
        Token end;
        end.kind = Tok::End;
        end.line = line;
        end.column = col;
        toks_.push_back(end);
    }

    const std::string& src_;
    std::string file_;
    std::vector<Token> toks_;
};

// Name resolution for expressions.
struct Scope {
    std::vector<std::string> iterators;
    const Problem* problem = nullptr;  // strict mode when set
    std::vector<SymbolicConst>* auto_symbolics = nullptr;
    std::vector<UFSymbol>* auto_ufs = nullptr;
};

class Parser {
public:
    Parser(const std::string& text, const std::string& file) : lex_(text, file), toks_(lex_.tokens()) {}

    Problem problem() {
        Problem prob;
        prob.path = lex_.file();
        while (!at_end()) {
            const Token& t = peek();
            if (t.kind != Tok::Ident) fail(t, "expected a declaration");
            if (t.text == "symbolic") {
                parse_symbolic(prob);
            } else if (t.text == "uf") {
                parse_uf(prob);
            } else if (t.text == "assert") {
                parse_assert(prob);
            } else if (t.text == "relation") {
                prob.relations.push_back(parse_named_relation(prob));
            } else if (t.text == "preset") {
                next();
                prob.preset = expect_ident("preset name").text;
                expect(";");
            } else {
                fail(t, "unknown declaration '" + t.text + "'");
            }
        }
        return prob;
    }

    Relation bare_relation(const Problem* scope_problem) {
        std::vector<SymbolicConst> syms;
        std::vector<UFSymbol> ufs;
        Scope scope;
        scope.problem = scope_problem;
        if (!scope_problem) {
            scope.auto_symbolics = &syms;
            scope.auto_ufs = &ufs;
        }
        Relation r = relation_body(scope);
        if (!scope_problem) r.symconsts = syms;
        if (!at_end()) fail(peek(), "trailing input after relation");
        return r;
    }

    Conjunction conjunction_only(const std::vector<std::string>& iterators) {
        std::vector<SymbolicConst> syms;
        std::vector<UFSymbol> ufs;
        Scope scope;
        scope.iterators = iterators;
        scope.auto_symbolics = &syms;
        scope.auto_ufs = &ufs;
        Conjunction c = conjunction(scope, Tag::Exact);
        if (!at_end()) fail(peek(), "trailing input after constraints");
        return c;
    }

private:
    const Token& peek(size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
    bool at_end() const { return peek().kind == Tok::End; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool is(const std::string& punct) const { return peek().kind == Tok::Punct && peek().text == punct; }
    bool is_word(const std::string& word) const { return peek().kind == Tok::Ident && peek().text == word; }
    bool accept(const std::string& punct) {
        if (!is(punct)) return false;
        next();
        return true;
    }
    [[noreturn]] void fail(const Token& t, const std::string& msg) const {
        throw ParseError(lex_.file(), t.line, t.column, msg);
    }
    void expect(const std::string& punct) {
        if (!is(punct)) {
            std::string got = peek().kind == Tok::End ? "end of input" : "'" + peek().text + "'";
            fail(peek(), "expected '" + punct + "' but found " + got);
        }
        next();
    }
    const Token& expect_ident(const std::string& what) {
        if (peek().kind != Tok::Ident) fail(peek(), "expected " + what);
        return next();
    }
    Int expect_int() {
        bool neg = accept("-");
        if (peek().kind != Tok::Number) fail(peek(), "expected integer");
        Int v = std::stoll(next().text);
        return neg ? -v : v;
    }

    void check_fresh_name(const Problem& prob, const Token& t) {
        if (prob.find_uf(t.text) || prob.find_symbolic(t.text)) fail(t, "duplicate declaration of '" + t.text + "'");
    }

    void parse_symbolic(Problem& prob) {
        next();
        do {
            const Token& t = expect_ident("symbolic constant name");
            check_fresh_name(prob, t);
            SymbolicConst s;
            s.name = t.text;
            s.role = default_role(s.name);
            if (accept(":")) {
                const Token& role = expect_ident("role (size, nnz or other)");
                if (role.text == "size")
                    s.role = SymbolRole::Size;
                else if (role.text == "nnz")
                    s.role = SymbolRole::NonzeroCount;
                else if (role.text == "other")
                    s.role = SymbolRole::Other;
                else
                    fail(role, "unknown role '" + role.text + "'");
            }
            if (accept(">=")) s.lower_hint = expect_int();
            prob.symbolics.push_back(s);
        } while (accept(","));
        expect(";");
    }

    void parse_uf(Problem& prob) {
        next();
        const Token& t = expect_ident("function name");
        check_fresh_name(prob, t);
        UFSymbol u;
        u.name = t.text;
        u.array = t.text;
        expect(":");
        Int arity = expect_int();
        if (arity < 1) fail(t, "arity must be positive");
        u.arity = static_cast<int>(arity);
        if (accept("->")) u.array = expect_ident("array name").text;
        expect(";");
        prob.ufs.push_back(u);
    }

    void parse_assert(Problem& prob) {
        const Token& start = next();
        std::string name;
        std::string category = "general";
        if (peek().kind == Tok::String) {
            name = next().text;
            if (accept(":")) category = expect_ident("category").text;
            expect(":");
        }
        if (is_word("forall")) {
            next();
            Assertion a;
            a.name = name.empty() ? "assert_" + std::to_string(prob.assertions.size() + 1) : name;
            a.category = category;
            do {
                a.vars.push_back(expect_ident("quantified variable").text);
            } while (accept(","));
            expect(":");
            Scope scope;
            scope.iterators = a.vars;
            scope.problem = &prob;
            if (is_word("true")) {
                next();
            } else {
                a.antecedent = conjunction(scope, Tag::Exact);
            }
            expect("->");
            a.consequent = conjunction(scope, Tag::Exact);
            expect(";");
            classify_form(a);
            prob.assertions.push_back(a);
            return;
        }
        const Token& b = expect_ident("builtin assertion or 'forall'");
        std::vector<std::string> args;
        expect("(");
        do {
            const Token& s = expect_ident("function name");
            const UFSymbol* u = prob.find_uf(s.text);
            if (!u) fail(s, "undeclared function '" + s.text + "'");
            if (u->arity != 1) fail(s, "builtin assertions need arity-1 functions");
            args.push_back(s.text);
        } while (accept(","));
        expect(")");
        expect(";");
        std::vector<Assertion> made;
        try {
            made = builtin(b.text, args);
        } catch (const std::invalid_argument& e) {
            fail(b, e.what());
        }
        if (!name.empty()) {
            for (size_t k = 0; k < made.size(); ++k) made[k].name = k == 0 ? name : name + "/" + std::to_string(k + 1);
        }
        if (category != "general")
            for (auto& m : made) m.category = category;
        (void)start;
        for (auto& m : made) prob.assertions.push_back(std::move(m));
    }

    Relation parse_named_relation(const Problem& prob) {
        const Token& kw = next();
        if (peek().kind != Tok::String) fail(peek(), "expected relation name string");
        std::string name = next().text;
        std::map<std::string, std::string> meta;
        while (peek().kind == Tok::Ident) {
            const Token& key = next();
            expect("=");
            if (peek().kind != Tok::String) fail(peek(), "expected string value for '" + key.text + "'");
            meta[key.text] = next().text;
        }
        Scope scope;
        scope.problem = &prob;
        Relation r = relation_body(scope);
        accept(";");
        r.name = name;
        for (auto& [k, v] : meta) r.source[k] = v;
        r.source["file"] = lex_.file();
        r.source["line"] = std::to_string(kw.line);
        // symbolic constants referenced by the relation
        std::set<std::string> used;
        for (const auto& cl : r.clauses)
            for (const auto& c : cl.constraints()) collect_symbolics(c.expr, used);
        for (const auto& s : prob.symbolics)
            if (used.count(s.name)) r.symconsts.push_back(s);
        return r;
    }

    static void collect_symbolics(const AffineExpr& e, std::set<std::string>& out) {
        for (const auto& t : e.terms()) {
            if (t.atom.kind() == AtomKind::Symbolic) out.insert(t.atom.name());
            for (const auto& a : t.atom.args()) collect_symbolics(a, out);
        }
    }

    std::vector<std::string> tuple() {
        std::vector<std::string> out;
        expect("[");
        if (!is("]")) {
            do {
                out.push_back(expect_ident("iterator name").text);
            } while (accept(","));
        }
        expect("]");
        return out;
    }

    Relation relation_body(Scope& scope) {
        Relation r;
        expect("{");
        const Token& in_tok = peek();
        r.in_tuple = tuple();
        expect("->");
        r.out_tuple = tuple();
        if (r.in_tuple.empty() || r.out_tuple.empty()) fail(in_tok, "iteration tuples must be nonempty");
        expect(":");
        if (is_word("exists")) {
            next();
            expect("(");
            do {
                r.existentials.push_back(expect_ident("existential iterator").text);
            } while (accept(","));
            expect(")");
            expect(":");
        }
        std::set<std::string> seen;
        for (const auto& it : r.iterators()) {
            if (!seen.insert(it).second) fail(in_tok, "iterator '" + it + "' declared twice");
            if (scope.problem && (scope.problem->find_uf(it) || scope.problem->find_symbolic(it)))
                fail(in_tok, "iterator '" + it + "' shadows a declared symbol");
        }
        scope.iterators = r.iterators();
        if (is("}")) fail(peek(), "empty constraint list");
        r.clauses.push_back(conjunction(scope, Tag::Exact));
        while (accept("||")) r.clauses.push_back(conjunction(scope, Tag::Exact));
        expect("}");
        return r;
    }

    Conjunction conjunction(Scope& scope, Tag tag) {
        Conjunction c;
        do {
            if (is_word("may") && peek(1).kind == Tok::Punct && peek(1).text == "(") {
                next();
                next();
                Conjunction inner = conjunction(scope, Tag::May);
                expect(")");
                for (const auto& con : inner.constraints()) c.add(con);
            } else {
                chain(scope, tag, c);
            }
        } while (accept("&&"));
        return c;
    }

    void chain(Scope& scope, Tag tag, Conjunction& out) {
        AffineExpr lhs = expr(scope);
        bool any = false;
        while (peek().kind == Tok::Punct) {
            std::string op = peek().text;
            if (op != "=" && op != "==" && op != "<=" && op != "<" && op != ">=" && op != ">" && op != "!=") break;
            const Token& op_tok = next();
            if (op == "!=") fail(op_tok, "'!=' is not supported; split the relation into two clauses");
            AffineExpr rhs = expr(scope);
            Constraint c;
            if (op == "=" || op == "==")
                c = Constraint::equal(lhs, rhs, tag);
            else if (op == "<=")
                c = Constraint::le(lhs, rhs, tag);
            else if (op == "<")
                c = Constraint::lt(lhs, rhs, tag);
            else if (op == ">=")
                c = Constraint::le(rhs, lhs, tag);
            else
                c = Constraint::lt(rhs, lhs, tag);
            out.add(c);
            lhs = rhs;
            any = true;
        }
        if (!any) fail(peek(), "expected a comparison operator");
    }

    AffineExpr expr(Scope& scope) {
        AffineExpr e;
        if (accept("-"))
            e = -term(scope);
        else
            e = term(scope);
        while (true) {
            if (accept("+"))
                e += term(scope);
            else if (accept("-"))
                e -= term(scope);
            else
                break;
        }
        return e;
    }

    AffineExpr term(Scope& scope) {
        const Token& start = peek();
        AffineExpr e = factor(scope);
        while (is("*")) {
            const Token& star = next();
            AffineExpr rhs = factor(scope);
            if (e.is_constant())
                e = rhs * e.constant();
            else if (rhs.is_constant())
                e *= rhs.constant();
            else
                fail(star, "nonlinear term: product of two non-constant expressions");
        }
        (void)start;
        return e;
    }

    AffineExpr factor(Scope& scope) {
        const Token& t = peek();
        if (t.kind == Tok::Number) {
            next();
            return AffineExpr(std::stoll(t.text));
        }
        if (accept("(")) {
            AffineExpr e = expr(scope);
            expect(")");
            return e;
        }
        if (accept("-")) return -factor(scope);
        if (t.kind != Tok::Ident) fail(t, t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'");
        next();
        if (accept("(")) {
            std::vector<AffineExpr> args;
            if (!is(")")) {
                do {
                    args.push_back(expr(scope));
                } while (accept(","));
            }
            expect(")");
            resolve_call(scope, t, static_cast<int>(args.size()));
            return AffineExpr(Atom::call(t.text, std::move(args)));
        }
        const auto& its = scope.iterators;
        if (std::find(its.begin(), its.end(), t.text) != its.end()) return AffineExpr(Atom::iterator(t.text));
        if (scope.problem) {
            if (scope.problem->find_symbolic(t.text)) return AffineExpr(Atom::symbolic(t.text));
            if (scope.problem->find_uf(t.text)) fail(t, "function '" + t.text + "' used without arguments");
            fail(t, "undeclared symbol '" + t.text + "'");
        }
        if (scope.auto_symbolics) {
            auto& syms = *scope.auto_symbolics;
            if (std::none_of(syms.begin(), syms.end(), [&](const SymbolicConst& s) { return s.name == t.text; }))
                syms.push_back(SymbolicConst{t.text, std::nullopt, default_role(t.text)});
            return AffineExpr(Atom::symbolic(t.text));
        }
        fail(t, "undeclared symbol '" + t.text + "'");
    }

    void resolve_call(Scope& scope, const Token& t, int arity) {
        if (scope.problem) {
            const UFSymbol* u = scope.problem->find_uf(t.text);
            if (!u) fail(t, "undeclared function '" + t.text + "'");
            if (u->arity != arity)
                fail(t, "arity mismatch for '" + t.text + "': declared " + std::to_string(u->arity) + ", used with " +
                            std::to_string(arity));
            return;
        }
        if (!scope.auto_ufs) fail(t, "undeclared function '" + t.text + "'");
        auto& ufs = *scope.auto_ufs;
        for (const auto& u : ufs) {
            if (u.name == t.text) {
                if (u.arity != arity) fail(t, "arity mismatch for '" + t.text + "'");
                return;
            }
        }
        ufs.push_back(UFSymbol{t.text, arity, t.text});
    }

    Lexer lex_;
    const std::vector<Token>& toks_;
    size_t pos_ = 0;
};

}  // namespace

Problem parse_problem(const std::string& text, const std::string& path) {
    Parser p(text, path);
    return p.problem();
}

Problem parse_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str(), path);
}

Relation parse_relation(const std::string& text) {
    Parser p(text, "<relation>");
    return p.bare_relation(nullptr);
}

Relation parse_relation(const std::string& text, const Problem& scope) {
    Parser p(text, "<relation>");
    return p.bare_relation(&scope);
}

Conjunction parse_conjunction(const std::string& text, const std::vector<std::string>& iterators) {
    Parser p(text, "<constraints>");
    return p.conjunction_only(iterators);
}

}  // namespace sparsedep
