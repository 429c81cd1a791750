#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "fgg/ast.hpp"
#include "fgg/diag.hpp"

namespace fgg {

// Parser for the Go-flavored concrete syntax of FGG-minus: square-bracket
// type parameters, no package header, method bodies with a single return,
// main of the form `func main() { _ = e }`, line comments `//`. Items in
// struct and interface bodies are separated by `;` or newline. The grammar
// is frozen in docs/grammar.ebnf.

namespace parse_detail {

enum class Tok {
    End,
    Newline,
    Ident,
    IntLit,
    StrLit,
    KwType,
    KwFunc,
    KwReturn,
    KwStruct,
    KwInterface,
    KwTrue,
    KwFalse,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Dot,
    Assign,
    EqEq,
    Plus,
    PlusPlus,
};

struct Token {
    Tok kind;
    std::string text;
    std::int64_t int_val = 0;
    Pos pos;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) { tokens_ = lex_all(); }
    const std::vector<Token>& tokens() const { return tokens_; }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw TypeError(Diag{Code::SyntaxError, msg, Pos{line_, col_}});
    }

    std::vector<Token> lex_all() {
        std::vector<Token> out;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '\n') {
                out.push_back(tok(Tok::Newline));
                advance();
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
                continue;
            }
            if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                Token t = tok(Tok::Ident);
                while (pos_ < text_.size() &&
                       (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                    t.text += text_[pos_];
                    advance();
                }
                if (t.text == "type") t.kind = Tok::KwType;
                else if (t.text == "func") t.kind = Tok::KwFunc;
                else if (t.text == "return") t.kind = Tok::KwReturn;
                else if (t.text == "struct") t.kind = Tok::KwStruct;
                else if (t.text == "interface") t.kind = Tok::KwInterface;
                else if (t.text == "true") t.kind = Tok::KwTrue;
                else if (t.text == "false") t.kind = Tok::KwFalse;
                out.push_back(std::move(t));
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                Token t = tok(Tok::IntLit);
                std::string digits;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    digits += text_[pos_];
                    advance();
                }
                try {
                    t.int_val = std::stoll(digits);
                } catch (const std::out_of_range&) {
                    fail("integer literal out of range");
                }
                out.push_back(std::move(t));
                continue;
            }
            if (c == '"') {
                Token t = tok(Tok::StrLit);
                advance();
                while (pos_ < text_.size() && text_[pos_] != '"') {
                    char d = text_[pos_];
                    if (d == '\n') fail("unterminated string literal");
                    if (d == '\\') {
                        advance();
                        if (pos_ >= text_.size()) fail("unterminated string escape");
                        char esc = text_[pos_];
                        if (esc == 'n') t.text += '\n';
                        else if (esc == 't') t.text += '\t';
                        else if (esc == '"') t.text += '"';
                        else if (esc == '\\') t.text += '\\';
                        else fail("unknown string escape");
                        advance();
                    } else {
                        t.text += d;
                        advance();
                    }
                }
                if (pos_ >= text_.size()) fail("unterminated string literal");
                advance();
                out.push_back(std::move(t));
                continue;
            }
            switch (c) {
                case '(': out.push_back(tok(Tok::LParen)); advance(); continue;
                case ')': out.push_back(tok(Tok::RParen)); advance(); continue;
                case '[': out.push_back(tok(Tok::LBracket)); advance(); continue;
                case ']': out.push_back(tok(Tok::RBracket)); advance(); continue;
                case '{': out.push_back(tok(Tok::LBrace)); advance(); continue;
                case '}': out.push_back(tok(Tok::RBrace)); advance(); continue;
                case ',': out.push_back(tok(Tok::Comma)); advance(); continue;
                case ';': out.push_back(tok(Tok::Semi)); advance(); continue;
                case '.': out.push_back(tok(Tok::Dot)); advance(); continue;
                case '=':
                    if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '=') {
                        out.push_back(tok(Tok::EqEq));
                        advance();
                        advance();
                    } else {
                        out.push_back(tok(Tok::Assign));
                        advance();
                    }
                    continue;
                case '+':
                    if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '+') {
                        out.push_back(tok(Tok::PlusPlus));
                        advance();
                        advance();
                    } else {
                        out.push_back(tok(Tok::Plus));
                        advance();
                    }
                    continue;
                default: fail(std::string("unexpected character '") + c + "'");
            }
        }
        out.push_back(tok(Tok::End));
        return out;
    }

    Token tok(Tok kind) const {
        Token t;
        t.kind = kind;
        t.pos = Pos{line_, col_};
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
    std::vector<Token> tokens_;
};

class Parser {
public:
    explicit Parser(std::string_view text) : lexer_(text) {}

    Program parse_program() {
        Program p;
        skip_newlines();
        for (;;) {
            if (at(Tok::KwType)) {
                p.decls.push_back(parse_type_decl());
                skip_newlines();
                continue;
            }
            if (at(Tok::KwFunc)) {
                if (peek(1).kind == Tok::LParen) {
                    p.decls.push_back(parse_method_decl());
                    skip_newlines();
                    continue;
                }
                p.main = parse_main();
                break;
            }
            fail("expected declaration or main function");
        }
        skip_newlines();
        expect(Tok::End, "input after main function");
        return p;
    }

    ExprPtr parse_expr_only() {
        ExprPtr e = parse_expr();
        skip_newlines();
        expect(Tok::End, "input after expression");
        return e;
    }

    TypePtr parse_type_only() {
        TypePtr t = parse_type();
        skip_newlines();
        expect(Tok::End, "input after type");
        return t;
    }

private:
    // --- token plumbing ---------------------------------------------------

    const Token& raw(std::size_t i) const { return lexer_.tokens()[std::min(i, lexer_.tokens().size() - 1)]; }

    // Peeks past newlines; most positions in the grammar allow line breaks.
    const Token& peek(std::size_t ahead = 0) {
        std::size_t i = cursor_;
        std::size_t skipped = 0;
        for (;;) {
            if (raw(i).kind == Tok::Newline) {
                ++i;
                continue;
            }
            if (skipped == ahead) return raw(i);
            ++skipped;
            ++i;
        }
    }

    bool at(Tok k) { return peek().kind == k; }

    Token next() {
        while (raw(cursor_).kind == Tok::Newline) ++cursor_;
        return raw(cursor_++);
    }

    void skip_newlines() {
        while (raw(cursor_).kind == Tok::Newline) ++cursor_;
    }

    Token expect(Tok k, const std::string& what) {
        if (!at(k)) fail("expected " + what);
        return next();
    }

    // True when the next raw token ends the current item: `;`, newline, or
    // a closing brace (which needs no separator).
    void expect_item_sep() {
        for (;;) {
            const Token& t = raw(cursor_);
            if (t.kind == Tok::Semi || t.kind == Tok::Newline) {
                ++cursor_;
                while (raw(cursor_).kind == Tok::Semi || raw(cursor_).kind == Tok::Newline) ++cursor_;
                return;
            }
            if (t.kind == Tok::RBrace) return;
            fail("expected ';', newline or '}'");
        }
    }

    [[noreturn]] void fail(const std::string& msg) {
        const Token& t = raw(cursor_);
        throw TypeError(Diag{Code::SyntaxError, msg, t.pos});
    }

    Name ident(const std::string& what) {
        if (!at(Tok::Ident)) fail("expected " + what);
        return Name::of(next().text);
    }

    // --- types ------------------------------------------------------------

    bool is_base_name(const std::string& s) const { return s == "int" || s == "bool" || s == "string"; }

    TypePtr parse_type() {
        if (!at(Tok::Ident)) fail("expected type");
        Token t = next();
        if (is_base_name(t.text)) {
            if (at(Tok::LBracket)) fail("base type cannot take type arguments");
            BaseKind k = t.text == "int" ? BaseKind::Int : t.text == "bool" ? BaseKind::Bool : BaseKind::Str;
            return ty_base(k);
        }
        Name name = Name::of(t.text);
        if (in_tyvar_scope(name)) {
            if (at(Tok::LBracket)) fail("type variable cannot take type arguments");
            return ty_var(name);
        }
        std::vector<TypePtr> args;
        if (at(Tok::LBracket)) {
            next();
            if (!at(Tok::RBracket)) {
                args.push_back(parse_type());
                while (at(Tok::Comma)) {
                    next();
                    args.push_back(parse_type());
                }
            }
            expect(Tok::RBracket, "']'");
        }
        return ty_named(name, std::move(args));
    }

    // Bounded type parameter lists are F-scoped: every variable of the list
    // is visible in all bounds, so variable names are collected up front.
    std::vector<TypeParam> parse_typarams() {
        expect(Tok::LBracket, "'['");
        std::vector<TypeParam> out;
        if (at(Tok::RBracket)) {
            next();
            return out;
        }
        // Pre-scan the variable names at bracket depth 1.
        std::vector<Name> vars;
        {
            std::size_t i = cursor_;
            int depth = 1;
            bool at_group_start = true;
            while (depth > 0) {
                const Token& t = raw(i);
                if (t.kind == Tok::End) fail("unterminated type parameter list");
                if (t.kind == Tok::Newline) {
                    ++i;
                    continue;
                }
                if (t.kind == Tok::LBracket) ++depth;
                else if (t.kind == Tok::RBracket) --depth;
                else if (depth == 1 && t.kind == Tok::Comma) at_group_start = true;
                else if (depth == 1 && at_group_start) {
                    if (t.kind != Tok::Ident) fail("expected type parameter name");
                    vars.push_back(Name::of(t.text));
                    at_group_start = false;
                }
                ++i;
            }
        }
        for (Name v : vars) enter_tyvar(v);
        for (;;) {
            Name v = ident("type parameter name");
            TypePtr bound = parse_type();
            out.push_back(TypeParam{v, std::move(bound)});
            if (at(Tok::Comma)) {
                next();
                continue;
            }
            break;
        }
        expect(Tok::RBracket, "']'");
        // The scope stays open for the caller (signature, fields, body).
        scoped_.push_back(vars);
        return out;
    }

    void pop_typaram_scope() {
        if (scoped_.empty()) return;
        for (Name v : scoped_.back()) leave_tyvar(v);
        scoped_.pop_back();
    }

    bool in_tyvar_scope(Name n) const {
        auto it = tyvars_.find(n);
        return it != tyvars_.end() && it->second > 0;
    }
    void enter_tyvar(Name n) { ++tyvars_[n]; }
    void leave_tyvar(Name n) {
        auto it = tyvars_.find(n);
        if (it != tyvars_.end() && --it->second == 0) tyvars_.erase(it);
    }

    // --- declarations -------------------------------------------------------

    Decl parse_type_decl() {
        expect(Tok::KwType, "'type'");
        Token nameTok = next();
        if (nameTok.kind != Tok::Ident) fail("expected type name");
        if (is_base_name(nameTok.text)) fail("cannot redeclare base type " + nameTok.text);
        Name name = Name::of(nameTok.text);
        std::vector<TypeParam> typarams;
        bool scoped = false;
        if (at(Tok::LBracket)) {
            typarams = parse_typarams();
            scoped = true;
        }
        Decl d;
        if (at(Tok::KwStruct)) {
            next();
            expect(Tok::LBrace, "'{'");
            std::vector<Field> fields;
            skip_newlines();
            while (!at(Tok::RBrace)) {
                Name f = ident("field name");
                TypePtr t = parse_type();
                fields.push_back(Field{f, std::move(t)});
                expect_item_sep();
            }
            expect(Tok::RBrace, "'}'");
            d.node = StructDecl{name, std::move(typarams), std::move(fields)};
        } else if (at(Tok::KwInterface)) {
            next();
            expect(Tok::LBrace, "'{'");
            std::vector<MethodSig> specs;
            skip_newlines();
            while (!at(Tok::RBrace)) {
                specs.push_back(parse_sig());
                expect_item_sep();
            }
            expect(Tok::RBrace, "'}'");
            d.node = IfaceDecl{name, std::move(typarams), std::move(specs)};
        } else {
            fail("expected 'struct' or 'interface'");
        }
        if (scoped) pop_typaram_scope();
        return d;
    }

    MethodSig parse_sig() {
        Name m = ident("method name");
        std::vector<TypeParam> typarams;
        bool scoped = false;
        if (at(Tok::LBracket)) {
            typarams = parse_typarams();
            scoped = true;
        }
        expect(Tok::LParen, "'('");
        std::vector<Param> params;
        if (!at(Tok::RParen)) {
            for (;;) {
                Name x = ident("parameter name");
                TypePtr t = parse_type();
                params.push_back(Param{x, std::move(t)});
                if (at(Tok::Comma)) {
                    next();
                    continue;
                }
                break;
            }
        }
        expect(Tok::RParen, "')'");
        TypePtr ret = parse_type();
        if (scoped) pop_typaram_scope();
        return MethodSig{m, std::move(typarams), std::move(params), std::move(ret)};
    }

    Decl parse_method_decl() {
        expect(Tok::KwFunc, "'func'");
        expect(Tok::LParen, "'('");
        Name recv_var = ident("receiver name");
        Name recv_struct = ident("receiver struct");
        std::vector<TypeParam> recv_typarams;
        bool scoped = false;
        if (at(Tok::LBracket)) {
            recv_typarams = parse_typarams();
            scoped = true;
        }
        expect(Tok::RParen, "')'");
        MethodSig sig = parse_sig(); // method-local typarams use a nested scope
        // parse_sig closed its scope; the body still binds those typarams.
        for (const auto& tp : sig.typarams) enter_tyvar(tp.var);
        expect(Tok::LBrace, "'{'");
        expect(Tok::KwReturn, "'return'");
        ExprPtr body = parse_expr();
        expect(Tok::RBrace, "'}'");
        for (const auto& tp : sig.typarams) leave_tyvar(tp.var);
        if (scoped) pop_typaram_scope();
        Decl d;
        d.node = MethodDecl{recv_var, recv_struct, std::move(recv_typarams), std::move(sig), std::move(body)};
        return d;
    }

    ExprPtr parse_main() {
        expect(Tok::KwFunc, "'func'");
        Token m = next();
        if (m.kind != Tok::Ident || m.text != "main") fail("expected 'main'");
        expect(Tok::LParen, "'('");
        expect(Tok::RParen, "')'");
        expect(Tok::LBrace, "'{'");
        Token underscore = next();
        if (underscore.kind != Tok::Ident || underscore.text != "_") fail("expected '_'");
        expect(Tok::Assign, "'='");
        ExprPtr e = parse_expr();
        expect(Tok::RBrace, "'}'");
        return e;
    }

    // --- expressions --------------------------------------------------------

    ExprPtr parse_expr() { return parse_cmp(); }

    ExprPtr parse_cmp() {
        ExprPtr lhs = parse_add();
        if (at(Tok::EqEq)) {
            next();
            ExprPtr rhs = parse_add();
            return expr_binop(BinOpKind::EqInt, std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    ExprPtr parse_add() {
        ExprPtr acc = parse_postfix();
        for (;;) {
            if (at(Tok::Plus)) {
                next();
                acc = expr_binop(BinOpKind::AddInt, std::move(acc), parse_postfix());
            } else if (at(Tok::PlusPlus)) {
                next();
                acc = expr_binop(BinOpKind::ConcatStr, std::move(acc), parse_postfix());
            } else {
                return acc;
            }
        }
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_primary();
        while (at(Tok::Dot)) {
            next();
            Name m = ident("field or method name");
            if (at(Tok::LBracket)) {
                next();
                std::vector<TypePtr> tyargs;
                if (!at(Tok::RBracket)) {
                    tyargs.push_back(parse_type());
                    while (at(Tok::Comma)) {
                        next();
                        tyargs.push_back(parse_type());
                    }
                }
                expect(Tok::RBracket, "']'");
                e = expr_call(std::move(e), m, std::move(tyargs), parse_call_args());
            } else if (at(Tok::LParen)) {
                e = expr_call(std::move(e), m, {}, parse_call_args());
            } else {
                e = expr_field(std::move(e), m);
            }
        }
        return e;
    }

    std::vector<ExprPtr> parse_call_args() {
        expect(Tok::LParen, "'('");
        std::vector<ExprPtr> args;
        if (!at(Tok::RParen)) {
            args.push_back(parse_expr());
            while (at(Tok::Comma)) {
                next();
                args.push_back(parse_expr());
            }
        }
        expect(Tok::RParen, "')'");
        return args;
    }

    ExprPtr parse_primary() {
        if (at(Tok::IntLit)) return expr_int(next().int_val);
        if (at(Tok::StrLit)) return expr_str(next().text);
        if (at(Tok::KwTrue)) {
            next();
            return expr_bool(true);
        }
        if (at(Tok::KwFalse)) {
            next();
            return expr_bool(false);
        }
        if (at(Tok::LParen)) {
            next();
            ExprPtr e = parse_expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        if (!at(Tok::Ident)) fail("expected expression");
        Token t = next();
        if (t.text == "intToString" && at(Tok::LParen)) {
            next();
            ExprPtr arg = parse_expr();
            expect(Tok::RParen, "')'");
            return expr_builtin(BuiltinKind::IntToString, std::move(arg));
        }
        if (is_base_name(t.text)) fail("base type used as expression");
        Name name = Name::of(t.text);
        if (at(Tok::LBracket) && !in_tyvar_scope(name)) {
            // struct literal with explicit type arguments
            next();
            std::vector<TypePtr> tyargs;
            if (!at(Tok::RBracket)) {
                tyargs.push_back(parse_type());
                while (at(Tok::Comma)) {
                    next();
                    tyargs.push_back(parse_type());
                }
            }
            expect(Tok::RBracket, "']'");
            return expr_struct(ty_named(name, std::move(tyargs)), parse_lit_args());
        }
        if (at(Tok::LBrace)) return expr_struct(ty_named(name, {}), parse_lit_args());
        return expr_var(name);
    }

    std::vector<ExprPtr> parse_lit_args() {
        expect(Tok::LBrace, "'{'");
        std::vector<ExprPtr> args;
        if (!at(Tok::RBrace)) {
            args.push_back(parse_expr());
            while (at(Tok::Comma)) {
                next();
                args.push_back(parse_expr());
            }
        }
        expect(Tok::RBrace, "'}'");
        return args;
    }

    Lexer lexer_;
    std::size_t cursor_ = 0;
    std::unordered_map<Name, int, NameHash> tyvars_; // scope nesting counts
    std::vector<std::vector<Name>> scoped_;
};

} // namespace parse_detail

inline Program parse_program(std::string_view text, bool base_types = true) {
    Program p = parse_detail::Parser(text).parse_program();
    p.base_types = base_types;
    return p;
}

inline ExprPtr parse_expr_text(std::string_view text) {
    return parse_detail::Parser(text).parse_expr_only();
}

inline TypePtr parse_type_text(std::string_view text) {
    return parse_detail::Parser(text).parse_type_only();
}

} // namespace fgg
