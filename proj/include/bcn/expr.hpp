#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bcn/errors.hpp"
#include "bcn/logical_matrix.hpp"

// Lexer, parser, evaluator and DNF synthesizer for the small Boolean
// expression language used to write update and output equations.
//
// Grammar (precedence high to low, -> and <-> right-associative):
//   primary  := identifier | '0' | '1' | 'true' | 'false' | '(' iff ')'
//   unary    := '!' unary | primary
//   and      := unary ('&' unary)*
//   xor      := and ('^' and)*
//   or       := xor ('|' xor)*
//   implies  := or ('->' implies)?
//   iff      := implies ('<->' iff)?
// Identifiers match [A-Za-z_][A-Za-z0-9_]*.  The Unicode connectives
// NOT SIGN, LOGICAL AND, LOGICAL OR, CIRCLED PLUS, RIGHTWARDS ARROW and
// LEFT RIGHT ARROW are accepted as synonyms of ! & | ^ -> <->.

namespace bcn {

enum class ExprOp { Const, Var, Not, And, Or, Xor, Implies, Iff };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprOp op;
    bool value = false;  // Const
    std::string name;    // Var
    ExprPtr lhs, rhs;    // Not uses lhs only
};

inline ExprPtr make_const(bool v) {
    auto e = std::make_shared<Expr>();
    e->op = ExprOp::Const;
    e->value = v;
    return e;
}

inline ExprPtr make_var(std::string name) {
    auto e = std::make_shared<Expr>();
    e->op = ExprOp::Var;
    e->name = std::move(name);
    return e;
}

inline ExprPtr make_unary(ExprOp op, ExprPtr x) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->lhs = std::move(x);
    return e;
}

inline ExprPtr make_binary(ExprOp op, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

inline ExprPtr make_not(ExprPtr x) { return make_unary(ExprOp::Not, std::move(x)); }
inline ExprPtr make_and(ExprPtr a, ExprPtr b) { return make_binary(ExprOp::And, std::move(a), std::move(b)); }
inline ExprPtr make_or(ExprPtr a, ExprPtr b) { return make_binary(ExprOp::Or, std::move(a), std::move(b)); }
inline ExprPtr make_xor(ExprPtr a, ExprPtr b) { return make_binary(ExprOp::Xor, std::move(a), std::move(b)); }
inline ExprPtr make_implies(ExprPtr a, ExprPtr b) { return make_binary(ExprOp::Implies, std::move(a), std::move(b)); }
inline ExprPtr make_iff(ExprPtr a, ExprPtr b) { return make_binary(ExprOp::Iff, std::move(a), std::move(b)); }

using Assignment = std::unordered_map<std::string, bool>;

inline bool eval(const ExprPtr& e, const Assignment& env) {
    switch (e->op) {
        case ExprOp::Const: return e->value;
        case ExprOp::Var: {
            auto it = env.find(e->name);
            if (it == env.end())
                throw ValidationError("unbound variable '" + e->name + "'");
            return it->second;
        }
        case ExprOp::Not: return !eval(e->lhs, env);
        case ExprOp::And: return eval(e->lhs, env) && eval(e->rhs, env);
        case ExprOp::Or: return eval(e->lhs, env) || eval(e->rhs, env);
        case ExprOp::Xor: return eval(e->lhs, env) != eval(e->rhs, env);
        case ExprOp::Implies: return !eval(e->lhs, env) || eval(e->rhs, env);
        case ExprOp::Iff: return eval(e->lhs, env) == eval(e->rhs, env);
    }
    throw InternalError("eval: unreachable");
}

inline void collect_vars(const ExprPtr& e, std::set<std::string>& out) {
    switch (e->op) {
        case ExprOp::Const: return;
        case ExprOp::Var: out.insert(e->name); return;
        case ExprOp::Not: collect_vars(e->lhs, out); return;
        default:
            collect_vars(e->lhs, out);
            collect_vars(e->rhs, out);
            return;
    }
}

inline std::set<std::string> free_vars(const ExprPtr& e) {
    std::set<std::string> out;
    collect_vars(e, out);
    return out;
}

// ---------------------------------------------------------------------------
// Lexing and parsing
// ---------------------------------------------------------------------------

namespace detail {

enum class Tok { End, Ident, Const, Not, And, Or, Xor, Implies, Iff, LParen, RParen };

struct Token {
    Tok kind;
    std::string text;
    bool value = false;   // for Const
    std::size_t pos = 0;  // byte offset
};

inline bool ident_start(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}
inline bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

inline std::vector<Token> lex(std::string_view text) {
    std::vector<Token> toks;
    std::size_t i = 0;
    auto starts_with = [&](std::string_view s) {
        return text.substr(i, s.size()) == s;
    };
    while (i < text.size()) {
        const char c = text[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') { ++i; continue; }
        const std::size_t pos = i;
        if (c == '(') { toks.push_back({Tok::LParen, "(", false, pos}); ++i; continue; }
        if (c == ')') { toks.push_back({Tok::RParen, ")", false, pos}); ++i; continue; }
        if (c == '!') { toks.push_back({Tok::Not, "!", false, pos}); ++i; continue; }
        if (c == '&') { toks.push_back({Tok::And, "&", false, pos}); ++i; continue; }
        if (c == '|') { toks.push_back({Tok::Or, "|", false, pos}); ++i; continue; }
        if (c == '^') { toks.push_back({Tok::Xor, "^", false, pos}); ++i; continue; }
        if (starts_with("<->")) { toks.push_back({Tok::Iff, "<->", false, pos}); i += 3; continue; }
        if (starts_with("->")) { toks.push_back({Tok::Implies, "->", false, pos}); i += 2; continue; }
        // Unicode synonyms (UTF-8 byte sequences).
        if (starts_with("\xc2\xac")) { toks.push_back({Tok::Not, "!", false, pos}); i += 2; continue; }
        if (starts_with("\xe2\x88\xa7")) { toks.push_back({Tok::And, "&", false, pos}); i += 3; continue; }
        if (starts_with("\xe2\x88\xa8")) { toks.push_back({Tok::Or, "|", false, pos}); i += 3; continue; }
        if (starts_with("\xe2\x8a\x95")) { toks.push_back({Tok::Xor, "^", false, pos}); i += 3; continue; }
        if (starts_with("\xe2\x86\x92")) { toks.push_back({Tok::Implies, "->", false, pos}); i += 3; continue; }
        if (starts_with("\xe2\x86\x94")) { toks.push_back({Tok::Iff, "<->", false, pos}); i += 3; continue; }
        if (c == '0' || c == '1') {
            toks.push_back({Tok::Const, std::string(1, c), c == '1', pos});
            ++i;
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i + 1;
            while (j < text.size() && ident_char(text[j])) ++j;
            std::string word(text.substr(i, j - i));
            if (word == "true")
                toks.push_back({Tok::Const, word, true, pos});
            else if (word == "false")
                toks.push_back({Tok::Const, word, false, pos});
            else
                toks.push_back({Tok::Ident, word, false, pos});
            i = j;
            continue;
        }
        throw ParseError("unexpected character '" + std::string(1, c) + "' at position " +
                             std::to_string(pos),
                         pos);
    }
    toks.push_back({Tok::End, "", false, text.size()});
    return toks;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    ExprPtr run() {
        ExprPtr e = iff();
        if (peek().kind != Tok::End)
            fail("end of input or operator");
        return e;
    }

private:
    const Token& peek() const { return toks_[i_]; }
    Token take() { return toks_[i_++]; }

    [[noreturn]] void fail(const std::string& expected) const {
        const Token& t = peek();
        const std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw ParseError("expected " + expected + " at position " + std::to_string(t.pos) +
                             ", got " + got,
                         t.pos);
    }

    ExprPtr iff() {
        ExprPtr lhs = implies();
        if (peek().kind == Tok::Iff) {
            take();
            return make_iff(std::move(lhs), iff());
        }
        return lhs;
    }

    ExprPtr implies() {
        ExprPtr lhs = or_chain();
        if (peek().kind == Tok::Implies) {
            take();
            return make_implies(std::move(lhs), implies());
        }
        return lhs;
    }

    ExprPtr or_chain() {
        ExprPtr e = xor_chain();
        while (peek().kind == Tok::Or) {
            take();
            e = make_or(std::move(e), xor_chain());
        }
        return e;
    }

    ExprPtr xor_chain() {
        ExprPtr e = and_chain();
        while (peek().kind == Tok::Xor) {
            take();
            e = make_xor(std::move(e), and_chain());
        }
        return e;
    }

    ExprPtr and_chain() {
        ExprPtr e = unary();
        while (peek().kind == Tok::And) {
            take();
            e = make_and(std::move(e), unary());
        }
        return e;
    }

    ExprPtr unary() {
        if (peek().kind == Tok::Not) {
            take();
            return make_not(unary());
        }
        return primary();
    }

    ExprPtr primary() {
        switch (peek().kind) {
            case Tok::Ident: return make_var(take().text);
            case Tok::Const: return make_const(take().value);
            case Tok::LParen: {
                take();
                ExprPtr e = iff();
                if (peek().kind != Tok::RParen)
                    fail("')'");
                take();
                return e;
            }
            default: fail("operand");
        }
    }

    std::vector<Token> toks_;
    std::size_t i_ = 0;
};

}  // namespace detail

inline ExprPtr parse(std::string_view text) {
    return detail::Parser(detail::lex(text)).run();
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace detail {

inline int precedence(ExprOp op) {
    switch (op) {
        case ExprOp::Iff: return 1;
        case ExprOp::Implies: return 2;
        case ExprOp::Or: return 3;
        case ExprOp::Xor: return 4;
        case ExprOp::And: return 5;
        case ExprOp::Not: return 6;
        default: return 7;
    }
}

inline void print_rec(const ExprPtr& e, std::string& out) {
    const int prec = precedence(e->op);
    auto child = [&](const ExprPtr& c, bool needs_paren) {
        if (needs_paren) {
            out += '(';
            print_rec(c, out);
            out += ')';
        } else {
            print_rec(c, out);
        }
    };
    switch (e->op) {
        case ExprOp::Const: out += e->value ? "1" : "0"; return;
        case ExprOp::Var: out += e->name; return;
        case ExprOp::Not:
            out += '!';
            child(e->lhs, precedence(e->lhs->op) < prec);
            return;
        case ExprOp::And:
        case ExprOp::Or:
        case ExprOp::Xor: {
            // left-associative
            child(e->lhs, precedence(e->lhs->op) < prec);
            out += e->op == ExprOp::And ? " & " : e->op == ExprOp::Or ? " | " : " ^ ";
            child(e->rhs, precedence(e->rhs->op) <= prec);
            return;
        }
        case ExprOp::Implies:
        case ExprOp::Iff: {
            // right-associative
            child(e->lhs, precedence(e->lhs->op) <= prec);
            out += e->op == ExprOp::Implies ? " -> " : " <-> ";
            child(e->rhs, precedence(e->rhs->op) < prec);
            return;
        }
    }
}

}  // namespace detail

inline std::string to_string(const ExprPtr& e) {
    std::string out;
    detail::print_rec(e, out);
    return out;
}

// ---------------------------------------------------------------------------
// Truth tables and DNF synthesis
// ---------------------------------------------------------------------------

/// values[k-1] is the expression's value at the assignment packed at delta
/// index k (vars[0] outermost, true first), matching state_to_index.
struct TruthTable {
    std::vector<std::string> vars;
    std::vector<bool> values;
};

inline TruthTable to_truth_table(const ExprPtr& e, std::vector<std::string> vars) {
    for (const std::string& v : free_vars(e)) {
        bool found = false;
        for (const std::string& name : vars)
            if (name == v) { found = true; break; }
        if (!found)
            throw ValidationError("expression uses variable '" + v +
                                  "' not in the given variable list");
    }
    const int k = static_cast<int>(vars.size());
    if (k > 20)
        throw ValidationError("to_truth_table: too many variables");
    TruthTable t;
    t.vars = std::move(vars);
    const int size = 1 << k;
    t.values.resize(static_cast<std::size_t>(size));
    Assignment env;
    for (int idx = 1; idx <= size; ++idx) {
        for (int i = 1; i <= k; ++i)
            env[t.vars[static_cast<std::size_t>(i - 1)]] = state_bit(idx, k, i);
        t.values[static_cast<std::size_t>(idx - 1)] = eval(e, env);
    }
    return t;
}

/// Disjunction of minterms over the true rows.  All-false tables become 0,
/// all-true become 1, and a table equal to a single variable's own table
/// collapses to that variable; no other minimization.
inline ExprPtr table_to_dnf(const TruthTable& t) {
    const int k = static_cast<int>(t.vars.size());
    const std::size_t size = std::size_t{1} << k;
    if (t.values.size() != size)
        throw ValidationError("truth table has wrong number of rows");

    bool any_true = false, all_true = true;
    for (bool v : t.values) {
        any_true = any_true || v;
        all_true = all_true && v;
    }
    if (!any_true) return make_const(false);
    if (all_true) return make_const(true);

    for (int i = 1; i <= k; ++i) {
        bool matches = true;
        for (int idx = 1; idx <= static_cast<int>(size); ++idx)
            if (t.values[static_cast<std::size_t>(idx - 1)] != state_bit(idx, k, i)) {
                matches = false;
                break;
            }
        if (matches) return make_var(t.vars[static_cast<std::size_t>(i - 1)]);
    }

    ExprPtr dnf;
    for (int idx = 1; idx <= static_cast<int>(size); ++idx) {
        if (!t.values[static_cast<std::size_t>(idx - 1)]) continue;
        ExprPtr minterm;
        for (int i = 1; i <= k; ++i) {
            ExprPtr lit = make_var(t.vars[static_cast<std::size_t>(i - 1)]);
            if (!state_bit(idx, k, i)) lit = make_not(std::move(lit));
            minterm = minterm ? make_and(std::move(minterm), std::move(lit)) : std::move(lit);
        }
        dnf = dnf ? make_or(std::move(dnf), std::move(minterm)) : std::move(minterm);
    }
    return dnf;
}

}  // namespace bcn
