#pragma once

#include <cctype>
#include <string>

#include "fgg/tl.hpp"

namespace fgg {

// S-expression serialization of TL programs, one top-level form per line:
//
//   (let <name> <value>)
//   ...
//   (main <expr>)
//
// with expr ::= atom | (ctor K) | (lam X E) | (app E E)
//            | (case E ((K X..) E)..) | (lit L) | (prim OP E..)
//
// Printing is deterministic and the parser accepts exactly what the printer
// emits (plus arbitrary whitespace), so programs round-trip bit-exactly.

inline const char* tl_prim_name(TLPrimOp op) {
    switch (op) {
        case TLPrimOp::EqInt: return "eqInt";
        case TLPrimOp::AddInt: return "addInt";
        case TLPrimOp::Concat: return "concat";
        case TLPrimOp::IntToStr: return "intToString";
    }
    return "?";
}

inline std::string tl_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += "\"";
    return out;
}

inline std::string print_tl(const TLPtr& e) {
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, TLVar>) {
                return n.name.str();
            } else if constexpr (std::is_same_v<T, TLCtor>) {
                return "(ctor " + n.name.str() + ")";
            } else if constexpr (std::is_same_v<T, TLApp>) {
                return "(app " + print_tl(n.fn) + " " + print_tl(n.arg) + ")";
            } else if constexpr (std::is_same_v<T, TLLam>) {
                return "(lam " + n.var.str() + " " + print_tl(n.body) + ")";
            } else if constexpr (std::is_same_v<T, TLCase>) {
                std::string s = "(case " + print_tl(n.scrutinee);
                for (const auto& cl : n.clauses) {
                    s += " ((" + cl.ctor.str();
                    for (Name v : cl.vars) s += " " + v.str();
                    s += ") " + print_tl(cl.body) + ")";
                }
                return s + ")";
            } else if constexpr (std::is_same_v<T, TLLit>) {
                if (const auto* i = std::get_if<std::int64_t>(&n.v)) return "(lit " + std::to_string(*i) + ")";
                if (const auto* b = std::get_if<bool>(&n.v)) return std::string("(lit ") + (*b ? "true" : "false") + ")";
                return "(lit " + tl_quote(std::get<std::string>(n.v)) + ")";
            } else {
                static_assert(std::is_same_v<T, TLPrim>);
                std::string s = std::string("(prim ") + tl_prim_name(n.op);
                for (const auto& a : n.args) s += " " + print_tl(a);
                return s + ")";
            }
        },
        e->node);
}

inline std::string print_tl_program(const TLProgram& p) {
    std::string out;
    for (const auto& [x, v] : p.bindings) out += "(let " + x.str() + " " + print_tl(v) + ")\n";
    out += "(main " + print_tl(p.main) + ")\n";
    return out;
}

// ---------------------------------------------------------------------------
// Parser.

namespace detail {

class TLLexer {
public:
    explicit TLLexer(std::string_view text) : text_(text) {}

    struct Token {
        enum class Kind { LParen, RParen, Atom, Int, Str, Bool, End } kind;
        std::string text;
        std::int64_t int_val = 0;
        bool bool_val = false;
        int line = 1, col = 1;
    };

    const Token& peek() {
        if (!lookahead_) lookahead_ = lex();
        return *lookahead_;
    }
    Token next() {
        Token t = peek();
        lookahead_.reset();
        return t;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw TypeError(Diag{Code::SyntaxError, msg, Pos{line_, col_}});
    }

    Token lex() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= text_.size()) {
            t.kind = Token::Kind::End;
            return t;
        }
        char c = text_[pos_];
        if (c == '(') {
            advance();
            t.kind = Token::Kind::LParen;
            return t;
        }
        if (c == ')') {
            advance();
            t.kind = Token::Kind::RParen;
            return t;
        }
        if (c == '"') {
            advance();
            std::string s;
            while (pos_ < text_.size() && text_[pos_] != '"') {
                char d = text_[pos_];
                if (d == '\\') {
                    advance();
                    if (pos_ >= text_.size()) fail("unterminated string escape");
                    char esc = text_[pos_];
                    if (esc == 'n') s += '\n';
                    else if (esc == 't') s += '\t';
                    else if (esc == '"') s += '"';
                    else if (esc == '\\') s += '\\';
                    else fail("unknown string escape");
                    advance();
                } else {
                    s += d;
                    advance();
                }
            }
            if (pos_ >= text_.size()) fail("unterminated string literal");
            advance(); // closing quote
            t.kind = Token::Kind::Str;
            t.text = std::move(s);
            return t;
        }
        std::string atom;
        while (pos_ < text_.size()) {
            char d = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == '"') break;
            atom += d;
            advance();
        }
        if (atom.empty()) fail("unexpected character");
        if (atom == "true" || atom == "false") {
            t.kind = Token::Kind::Bool;
            t.bool_val = atom == "true";
            return t;
        }
        bool numeric = atom.size() > (atom[0] == '-' ? 1u : 0u);
        for (std::size_t i = atom[0] == '-' ? 1 : 0; i < atom.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(atom[i]))) numeric = false;
        if (numeric) {
            t.kind = Token::Kind::Int;
            try {
                t.int_val = std::stoll(atom);
            } catch (const std::out_of_range&) {
                fail("integer literal out of range");
            }
            return t;
        }
        t.kind = Token::Kind::Atom;
        t.text = std::move(atom);
        return t;
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    std::optional<Token> lookahead_;
};

class TLParser {
public:
    explicit TLParser(std::string_view text) : lex_(text) {}

    TLProgram parse_program() {
        TLProgram p;
        for (;;) {
            expect_lparen();
            auto head = expect_atom();
            if (head == "let") {
                Name x = Name::of(expect_atom());
                TLPtr v = parse_expr();
                expect_rparen();
                p.bindings.emplace_back(x, v);
            } else if (head == "main") {
                p.main = parse_expr();
                expect_rparen();
                break;
            } else {
                fail("expected let or main, got " + head);
            }
        }
        if (lex_.peek().kind != TLLexer::Token::Kind::End) fail("trailing input after (main ...)");
        return p;
    }

    TLPtr parse_expr() {
        const auto& t = lex_.peek();
        using K = TLLexer::Token::Kind;
        if (t.kind == K::Atom) return tl_var(Name::of(lex_.next().text));
        if (t.kind != K::LParen) fail("expected expression");
        lex_.next();
        std::string head = expect_atom();
        TLPtr out;
        if (head == "ctor") {
            out = tl_ctor(Name::of(expect_atom()));
        } else if (head == "lam") {
            Name v = Name::of(expect_atom());
            out = tl_lam(v, parse_expr());
        } else if (head == "app") {
            TLPtr f = parse_expr();
            TLPtr a = parse_expr();
            out = tl_app(std::move(f), std::move(a));
        } else if (head == "case") {
            TLPtr scrut = parse_expr();
            std::vector<TLClause> clauses;
            while (lex_.peek().kind == K::LParen) {
                lex_.next();
                expect_lparen();
                TLClause cl;
                cl.ctor = Name::of(expect_atom());
                while (lex_.peek().kind == K::Atom) cl.vars.push_back(Name::of(lex_.next().text));
                expect_rparen();
                cl.body = parse_expr();
                expect_rparen();
                for (const auto& prev : clauses)
                    if (prev.ctor == cl.ctor) fail("duplicate constructor " + cl.ctor.str() + " in case");
                clauses.push_back(std::move(cl));
            }
            out = tl_case(std::move(scrut), std::move(clauses));
        } else if (head == "lit") {
            const auto& lt = lex_.peek();
            if (lt.kind == K::Int) out = tl_int(lex_.next().int_val);
            else if (lt.kind == K::Bool) out = tl_bool(lex_.next().bool_val);
            else if (lt.kind == K::Str) out = tl_str(lex_.next().text);
            else fail("expected literal");
        } else if (head == "prim") {
            std::string op = expect_atom();
            TLPrimOp p;
            if (op == "eqInt") p = TLPrimOp::EqInt;
            else if (op == "addInt") p = TLPrimOp::AddInt;
            else if (op == "concat") p = TLPrimOp::Concat;
            else if (op == "intToString") p = TLPrimOp::IntToStr;
            else fail("unknown primitive " + op);
            std::vector<TLPtr> args;
            while (lex_.peek().kind != K::RParen) args.push_back(parse_expr());
            out = tl_prim(p, std::move(args));
        } else {
            fail("unknown form " + head);
        }
        expect_rparen();
        return out;
    }

private:
    [[noreturn]] void fail(const std::string& msg) {
        auto t = lex_.peek();
        throw TypeError(Diag{Code::SyntaxError, msg, Pos{t.line, t.col}});
    }
    void expect_lparen() {
        if (lex_.peek().kind != TLLexer::Token::Kind::LParen) fail("expected (");
        lex_.next();
    }
    void expect_rparen() {
        if (lex_.peek().kind != TLLexer::Token::Kind::RParen) fail("expected )");
        lex_.next();
    }
    std::string expect_atom() {
        if (lex_.peek().kind != TLLexer::Token::Kind::Atom) fail("expected atom");
        return lex_.next().text;
    }

    TLLexer lex_;
};

} // namespace detail

inline TLProgram parse_tl_program(std::string_view text) {
    return detail::TLParser(text).parse_program();
}

inline TLPtr parse_tl_expr(std::string_view text) {
    return detail::TLParser(text).parse_expr();
}

} // namespace fgg
