#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "fgg/names.hpp"

namespace fgg {

// ---------------------------------------------------------------------------
// Types: tau, sigma ::= alpha | t[tau...] plus the gated base types.

struct TypeExpr;
using TypePtr = std::shared_ptr<const TypeExpr>;

struct TyVarT {
    Name name;
};

struct NamedT {
    Name name;
    std::vector<TypePtr> args;
};

enum class BaseKind { Int, Bool, Str };

struct BaseT {
    BaseKind kind;
};

struct TypeExpr {
    std::variant<TyVarT, NamedT, BaseT> node;
};

inline TypePtr ty_var(Name n) { return std::make_shared<TypeExpr>(TypeExpr{TyVarT{n}}); }
inline TypePtr ty_named(Name n, std::vector<TypePtr> args = {}) {
    return std::make_shared<TypeExpr>(TypeExpr{NamedT{n, std::move(args)}});
}
inline TypePtr ty_base(BaseKind k) { return std::make_shared<TypeExpr>(TypeExpr{BaseT{k}}); }

inline const TyVarT* as_tyvar(const TypePtr& t) { return std::get_if<TyVarT>(&t->node); }
inline const NamedT* as_named(const TypePtr& t) { return std::get_if<NamedT>(&t->node); }
inline const BaseT* as_base(const TypePtr& t) { return std::get_if<BaseT>(&t->node); }

inline bool type_equal(const TypePtr& a, const TypePtr& b) {
    if (a.get() == b.get()) return true;
    if (a->node.index() != b->node.index()) return false;
    if (const auto* va = std::get_if<TyVarT>(&a->node))
        return va->name == std::get<TyVarT>(b->node).name;
    if (const auto* ba = std::get_if<BaseT>(&a->node))
        return ba->kind == std::get<BaseT>(b->node).kind;
    const auto& na = std::get<NamedT>(a->node);
    const auto& nb = std::get<NamedT>(b->node);
    if (na.name != nb.name || na.args.size() != nb.args.size()) return false;
    for (std::size_t i = 0; i < na.args.size(); ++i)
        if (!type_equal(na.args[i], nb.args[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Signatures and declarations.

struct TypeParam {
    Name var;
    TypePtr bound; // always an interface type once well-formed
};

struct Param {
    Name var;
    TypePtr type;
};

using Field = Param; // (field name, type)

// R ::= m[alpha tauI...](x tau...) tau. Binds typarams over params, ret and
// the bounds themselves (F-bounds).
struct MethodSig {
    Name name;
    std::vector<TypeParam> typarams;
    std::vector<Param> params;
    TypePtr ret;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct VarE {
    Name name;
};

struct StructLit {
    TypePtr type; // a NamedT naming a struct
    std::vector<ExprPtr> args;
};

struct FieldAccess {
    ExprPtr recv;
    Name field;
};

struct MethodCall {
    ExprPtr recv;
    Name method;
    std::vector<TypePtr> tyargs;
    std::vector<ExprPtr> args;
};

struct IntLit {
    std::int64_t value;
};

struct BoolLit {
    bool value;
};

struct StrLit {
    std::string value;
};

enum class BinOpKind { EqInt, AddInt, ConcatStr };

struct BinOp {
    BinOpKind op;
    ExprPtr lhs, rhs;
};

enum class BuiltinKind { IntToString };

struct Builtin {
    BuiltinKind op;
    ExprPtr arg;
};

struct Expr {
    using Node = std::variant<VarE, StructLit, FieldAccess, MethodCall, IntLit, BoolLit, StrLit, BinOp, Builtin>;
    Node node;
    // Value-ness cache (-1 unknown, 0 no, 1 yes). Subterms are shared, so
    // the cache keeps decomposition linear in the redex depth.
    mutable std::atomic<signed char> value_memo{-1};

    Expr() = default;
    explicit Expr(Node n) : node(std::move(n)) {}
    Expr(const Expr& o) : node(o.node) {}
    Expr(Expr&& o) noexcept : node(std::move(o.node)) {}
    Expr& operator=(const Expr& o) {
        node = o.node;
        value_memo.store(-1, std::memory_order_relaxed);
        return *this;
    }
};

inline ExprPtr expr_var(Name n) { return std::make_shared<Expr>(Expr{VarE{n}}); }
inline ExprPtr expr_struct(TypePtr t, std::vector<ExprPtr> args) {
    return std::make_shared<Expr>(Expr{StructLit{std::move(t), std::move(args)}});
}
inline ExprPtr expr_field(ExprPtr recv, Name f) {
    return std::make_shared<Expr>(Expr{FieldAccess{std::move(recv), f}});
}
inline ExprPtr expr_call(ExprPtr recv, Name m, std::vector<TypePtr> tyargs, std::vector<ExprPtr> args) {
    return std::make_shared<Expr>(Expr{MethodCall{std::move(recv), m, std::move(tyargs), std::move(args)}});
}
inline ExprPtr expr_int(std::int64_t v) { return std::make_shared<Expr>(Expr{IntLit{v}}); }
inline ExprPtr expr_bool(bool v) { return std::make_shared<Expr>(Expr{BoolLit{v}}); }
inline ExprPtr expr_str(std::string v) { return std::make_shared<Expr>(Expr{StrLit{std::move(v)}}); }
inline ExprPtr expr_binop(BinOpKind op, ExprPtr l, ExprPtr r) {
    return std::make_shared<Expr>(Expr{BinOp{op, std::move(l), std::move(r)}});
}
inline ExprPtr expr_builtin(BuiltinKind op, ExprPtr a) {
    return std::make_shared<Expr>(Expr{Builtin{op, std::move(a)}});
}

struct StructDecl {
    Name name;
    std::vector<TypeParam> typarams;
    std::vector<Field> fields;
};

struct IfaceDecl {
    Name name;
    std::vector<TypeParam> typarams;
    std::vector<MethodSig> specs;
};

struct MethodDecl {
    Name recv_var;
    Name recv_struct;
    std::vector<TypeParam> recv_typarams;
    MethodSig sig;
    ExprPtr body;
};

struct Decl {
    std::variant<StructDecl, IfaceDecl, MethodDecl> node;
};

struct Program {
    std::vector<Decl> decls;
    ExprPtr main;
    bool base_types = true; // base-type extension gate
};

// ---------------------------------------------------------------------------
// Substitutions and environments.

// eta = <alpha := tau ...>, ordered, distinct domain.
class TypeSubst {
public:
    TypeSubst() = default;
    explicit TypeSubst(std::vector<std::pair<Name, TypePtr>> entries) : entries_(std::move(entries)) {}

    const TypePtr* lookup(Name n) const {
        for (const auto& [k, v] : entries_)
            if (k == n) return &v;
        return nullptr;
    }
    bool empty() const { return entries_.empty(); }
    const std::vector<std::pair<Name, TypePtr>>& entries() const { return entries_; }
    void add(Name n, TypePtr t) { entries_.emplace_back(n, std::move(t)); }

private:
    std::vector<std::pair<Name, TypePtr>> entries_;
};

// theta = <x := v ...>; values are exprs satisfying is_value.
class ValueSubst {
public:
    ValueSubst() = default;
    const ExprPtr* lookup(Name n) const {
        for (const auto& [k, v] : entries_)
            if (k == n) return &v;
        return nullptr;
    }
    void add(Name n, ExprPtr e) { entries_.emplace_back(n, std::move(e)); }
    const std::vector<std::pair<Name, ExprPtr>>& entries() const { return entries_; }

private:
    std::vector<std::pair<Name, ExprPtr>> entries_;
};

// Delta: type variables to their (interface) upper bounds, at most one
// binding per variable, insertion-ordered.
class TypeEnv {
public:
    TypeEnv() = default;
    const TypePtr* lookup(Name n) const {
        for (const auto& [k, v] : entries_)
            if (k == n) return &v;
        return nullptr;
    }
    bool contains(Name n) const { return lookup(n) != nullptr; }
    void bind(Name n, TypePtr t) { entries_.emplace_back(n, std::move(t)); }
    TypeEnv extended(const std::vector<TypeParam>& formals) const {
        TypeEnv e = *this;
        for (const auto& tp : formals) e.bind(tp.var, tp.bound);
        return e;
    }
    const std::vector<std::pair<Name, TypePtr>>& entries() const { return entries_; }

private:
    std::vector<std::pair<Name, TypePtr>> entries_;
};

// Gamma: expression variables to their types.
class ValueEnv {
public:
    ValueEnv() = default;
    const TypePtr* lookup(Name n) const {
        for (const auto& [k, v] : entries_)
            if (k == n) return &v;
        return nullptr;
    }
    void bind(Name n, TypePtr t) { entries_.emplace_back(n, std::move(t)); }
    const std::vector<std::pair<Name, TypePtr>>& entries() const { return entries_; }

private:
    std::vector<std::pair<Name, TypePtr>> entries_;
};

// ---------------------------------------------------------------------------
// Structural equality on expressions, signatures, declarations, programs.

inline bool expr_equal(const ExprPtr& a, const ExprPtr& b);

inline bool sig_equal(const MethodSig& a, const MethodSig& b) {
    if (a.name != b.name || a.typarams.size() != b.typarams.size() || a.params.size() != b.params.size())
        return false;
    for (std::size_t i = 0; i < a.typarams.size(); ++i) {
        if (a.typarams[i].var != b.typarams[i].var) return false;
        if (!type_equal(a.typarams[i].bound, b.typarams[i].bound)) return false;
    }
    for (std::size_t i = 0; i < a.params.size(); ++i) {
        if (a.params[i].var != b.params[i].var) return false;
        if (!type_equal(a.params[i].type, b.params[i].type)) return false;
    }
    return type_equal(a.ret, b.ret);
}

inline bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a.get() == b.get()) return true;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        [&](const auto& na) -> bool {
            using T = std::decay_t<decltype(na)>;
            const auto& nb = std::get<T>(b->node);
            if constexpr (std::is_same_v<T, VarE>) {
                return na.name == nb.name;
            } else if constexpr (std::is_same_v<T, StructLit>) {
                if (!type_equal(na.type, nb.type) || na.args.size() != nb.args.size()) return false;
                for (std::size_t i = 0; i < na.args.size(); ++i)
                    if (!expr_equal(na.args[i], nb.args[i])) return false;
                return true;
            } else if constexpr (std::is_same_v<T, FieldAccess>) {
                return na.field == nb.field && expr_equal(na.recv, nb.recv);
            } else if constexpr (std::is_same_v<T, MethodCall>) {
                if (na.method != nb.method || na.tyargs.size() != nb.tyargs.size() ||
                    na.args.size() != nb.args.size() || !expr_equal(na.recv, nb.recv))
                    return false;
                for (std::size_t i = 0; i < na.tyargs.size(); ++i)
                    if (!type_equal(na.tyargs[i], nb.tyargs[i])) return false;
                for (std::size_t i = 0; i < na.args.size(); ++i)
                    if (!expr_equal(na.args[i], nb.args[i])) return false;
                return true;
            } else if constexpr (std::is_same_v<T, IntLit>) {
                return na.value == nb.value;
            } else if constexpr (std::is_same_v<T, BoolLit>) {
                return na.value == nb.value;
            } else if constexpr (std::is_same_v<T, StrLit>) {
                return na.value == nb.value;
            } else if constexpr (std::is_same_v<T, BinOp>) {
                return na.op == nb.op && expr_equal(na.lhs, nb.lhs) && expr_equal(na.rhs, nb.rhs);
            } else {
                static_assert(std::is_same_v<T, Builtin>);
                return na.op == nb.op && expr_equal(na.arg, nb.arg);
            }
        },
        a->node);
}

inline bool typarams_equal(const std::vector<TypeParam>& a, const std::vector<TypeParam>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].var != b[i].var || !type_equal(a[i].bound, b[i].bound)) return false;
    return true;
}

inline bool decl_equal(const Decl& a, const Decl& b) {
    if (a.node.index() != b.node.index()) return false;
    if (const auto* sa = std::get_if<StructDecl>(&a.node)) {
        const auto& sb = std::get<StructDecl>(b.node);
        if (sa->name != sb.name || !typarams_equal(sa->typarams, sb.typarams) ||
            sa->fields.size() != sb.fields.size())
            return false;
        for (std::size_t i = 0; i < sa->fields.size(); ++i)
            if (sa->fields[i].var != sb.fields[i].var || !type_equal(sa->fields[i].type, sb.fields[i].type))
                return false;
        return true;
    }
    if (const auto* ia = std::get_if<IfaceDecl>(&a.node)) {
        const auto& ib = std::get<IfaceDecl>(b.node);
        if (ia->name != ib.name || !typarams_equal(ia->typarams, ib.typarams) ||
            ia->specs.size() != ib.specs.size())
            return false;
        for (std::size_t i = 0; i < ia->specs.size(); ++i)
            if (!sig_equal(ia->specs[i], ib.specs[i])) return false;
        return true;
    }
    const auto& ma = std::get<MethodDecl>(a.node);
    const auto& mb = std::get<MethodDecl>(b.node);
    return ma.recv_var == mb.recv_var && ma.recv_struct == mb.recv_struct &&
           typarams_equal(ma.recv_typarams, mb.recv_typarams) && sig_equal(ma.sig, mb.sig) &&
           expr_equal(ma.body, mb.body);
}

inline bool program_equal(const Program& a, const Program& b) {
    if (a.decls.size() != b.decls.size()) return false;
    for (std::size_t i = 0; i < a.decls.size(); ++i)
        if (!decl_equal(a.decls[i], b.decls[i])) return false;
    return expr_equal(a.main, b.main);
}

} // namespace fgg
