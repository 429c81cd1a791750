#pragma once

#include <algorithm>
#include <unordered_map>

#include "fgg/ast.hpp"
#include "fgg/diag.hpp"

namespace fgg {

// ---------------------------------------------------------------------------
// Free type variables.

inline void collect_free_type_vars(const TypePtr& t, NameSet& out) {
    if (const auto* tv = as_tyvar(t)) {
        out.insert(tv->name);
    } else if (const auto* n = as_named(t)) {
        for (const auto& a : n->args) collect_free_type_vars(a, out);
    }
}

inline NameSet free_type_vars(const TypePtr& t) {
    NameSet s;
    collect_free_type_vars(t, s);
    return s;
}

// Typarams of a signature bind over params, return type and the bounds
// themselves (F-bounds may mention any typaram of the same list).
inline NameSet free_type_vars(const MethodSig& sig) {
    NameSet s;
    for (const auto& tp : sig.typarams) collect_free_type_vars(tp.bound, s);
    for (const auto& p : sig.params) collect_free_type_vars(p.type, s);
    collect_free_type_vars(sig.ret, s);
    for (const auto& tp : sig.typarams) s.erase(tp.var);
    return s;
}

// ---------------------------------------------------------------------------
// Type substitution application.

inline TypePtr apply_type_subst(const TypeSubst& s, const TypePtr& t) {
    if (s.empty()) return t;
    if (const auto* tv = as_tyvar(t)) {
        if (const TypePtr* hit = s.lookup(tv->name)) return *hit;
        return t;
    }
    if (const auto* n = as_named(t)) {
        std::vector<TypePtr> args;
        args.reserve(n->args.size());
        for (const auto& a : n->args) args.push_back(apply_type_subst(s, a));
        return ty_named(n->name, std::move(args));
    }
    return t;
}

namespace detail {

inline Name fresh_tyvar(Name base, const NameSet& avoid) {
    for (int i = 1;; ++i) {
        Name candidate = Name::of(base.str() + "#" + std::to_string(i));
        if (avoid.find(candidate) == avoid.end()) return candidate;
    }
}

} // namespace detail

// Binders of the signature shadow the substitution; binders that would
// capture a variable free in the substitution range are alpha-renamed.
inline MethodSig apply_type_subst(const TypeSubst& s, const MethodSig& sig) {
    TypeSubst active;
    for (const auto& [k, v] : s.entries()) {
        Name key = k;
        bool shadowed = std::any_of(sig.typarams.begin(), sig.typarams.end(),
                                    [&](const TypeParam& tp) { return tp.var == key; });
        if (!shadowed) active.add(key, v);
    }
    if (active.empty()) return sig;

    NameSet range_fv;
    for (const auto& [k, v] : active.entries()) collect_free_type_vars(v, range_fv);

    MethodSig out = sig;
    TypeSubst rename;
    for (auto& tp : out.typarams) {
        if (range_fv.count(tp.var)) {
            NameSet avoid = range_fv;
            avoid.merge(NameSet(free_type_vars(sig)));
            for (const auto& other : out.typarams) avoid.insert(other.var);
            for (const auto& [k, v] : active.entries()) avoid.insert(k);
            Name nv = detail::fresh_tyvar(tp.var, avoid);
            rename.add(tp.var, ty_var(nv));
            tp.var = nv;
        }
    }
    auto rewrite = [&](const TypePtr& t) {
        return apply_type_subst(active, rename.empty() ? t : apply_type_subst(rename, t));
    };
    for (auto& tp : out.typarams) tp.bound = rewrite(tp.bound);
    for (auto& p : out.params) p.type = rewrite(p.type);
    out.ret = rewrite(out.ret);
    return out;
}

// Expressions contain no type binders, so this is plain structural recursion.
inline ExprPtr apply_type_subst(const TypeSubst& s, const ExprPtr& e) {
    if (s.empty()) return e;
    return std::visit(
        [&](const auto& n) -> ExprPtr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, VarE> || std::is_same_v<T, IntLit> ||
                          std::is_same_v<T, BoolLit> || std::is_same_v<T, StrLit>) {
                return e;
            } else if constexpr (std::is_same_v<T, StructLit>) {
                std::vector<ExprPtr> args;
                args.reserve(n.args.size());
                for (const auto& a : n.args) args.push_back(apply_type_subst(s, a));
                return expr_struct(apply_type_subst(s, n.type), std::move(args));
            } else if constexpr (std::is_same_v<T, FieldAccess>) {
                return expr_field(apply_type_subst(s, n.recv), n.field);
            } else if constexpr (std::is_same_v<T, MethodCall>) {
                std::vector<TypePtr> tyargs;
                tyargs.reserve(n.tyargs.size());
                for (const auto& t : n.tyargs) tyargs.push_back(apply_type_subst(s, t));
                std::vector<ExprPtr> args;
                args.reserve(n.args.size());
                for (const auto& a : n.args) args.push_back(apply_type_subst(s, a));
                return expr_call(apply_type_subst(s, n.recv), n.method, std::move(tyargs), std::move(args));
            } else if constexpr (std::is_same_v<T, BinOp>) {
                return expr_binop(n.op, apply_type_subst(s, n.lhs), apply_type_subst(s, n.rhs));
            } else {
                static_assert(std::is_same_v<T, Builtin>);
                return expr_builtin(n.op, apply_type_subst(s, n.arg));
            }
        },
        e->node);
}

// Positional pairing of formals and actuals; no bound checking here.
inline TypeSubst make_type_subst(const std::vector<TypeParam>& formals, const std::vector<TypePtr>& actuals) {
    if (formals.size() != actuals.size())
        throw TypeError(Code::ArityMismatch, "expected " + std::to_string(formals.size()) +
                                                 " type arguments, got " + std::to_string(actuals.size()));
    TypeSubst s;
    for (std::size_t i = 0; i < formals.size(); ++i) s.add(formals[i].var, actuals[i]);
    return s;
}

// (s2 . s1): applying the result equals applying s1 then s2.
inline TypeSubst compose(const TypeSubst& s2, const TypeSubst& s1) {
    TypeSubst out;
    for (const auto& [k, v] : s1.entries()) out.add(k, apply_type_subst(s2, v));
    for (const auto& [k, v] : s2.entries())
        if (!s1.lookup(k)) out.add(k, v);
    return out;
}

// ---------------------------------------------------------------------------
// Value substitution and free expression variables.

inline void collect_free_vars(const ExprPtr& e, NameSet& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, VarE>) {
                out.insert(n.name);
            } else if constexpr (std::is_same_v<T, StructLit>) {
                for (const auto& a : n.args) collect_free_vars(a, out);
            } else if constexpr (std::is_same_v<T, FieldAccess>) {
                collect_free_vars(n.recv, out);
            } else if constexpr (std::is_same_v<T, MethodCall>) {
                collect_free_vars(n.recv, out);
                for (const auto& a : n.args) collect_free_vars(a, out);
            } else if constexpr (std::is_same_v<T, BinOp>) {
                collect_free_vars(n.lhs, out);
                collect_free_vars(n.rhs, out);
            } else if constexpr (std::is_same_v<T, Builtin>) {
                collect_free_vars(n.arg, out);
            }
        },
        e->node);
}

inline NameSet free_vars(const ExprPtr& e) {
    NameSet s;
    collect_free_vars(e, s);
    return s;
}

// Expressions have no value binders, so substitution is structural.
inline ExprPtr apply_value_subst(const ValueSubst& s, const ExprPtr& e) {
    return std::visit(
        [&](const auto& n) -> ExprPtr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, VarE>) {
                if (const ExprPtr* hit = s.lookup(n.name)) return *hit;
                return e;
            } else if constexpr (std::is_same_v<T, StructLit>) {
                std::vector<ExprPtr> args;
                args.reserve(n.args.size());
                for (const auto& a : n.args) args.push_back(apply_value_subst(s, a));
                return expr_struct(n.type, std::move(args));
            } else if constexpr (std::is_same_v<T, FieldAccess>) {
                return expr_field(apply_value_subst(s, n.recv), n.field);
            } else if constexpr (std::is_same_v<T, MethodCall>) {
                std::vector<ExprPtr> args;
                args.reserve(n.args.size());
                for (const auto& a : n.args) args.push_back(apply_value_subst(s, a));
                return expr_call(apply_value_subst(s, n.recv), n.method, n.tyargs, std::move(args));
            } else if constexpr (std::is_same_v<T, BinOp>) {
                return expr_binop(n.op, apply_value_subst(s, n.lhs), apply_value_subst(s, n.rhs));
            } else if constexpr (std::is_same_v<T, Builtin>) {
                return expr_builtin(n.op, apply_value_subst(s, n.arg));
            } else {
                return e;
            }
        },
        e->node);
}

// ---------------------------------------------------------------------------
// Program restrictions and declaration index.

// Checks fgg-unique-structs, fgg-unique-fields, fgg-unique-receiver, plus
// duplicate interface names and duplicate method names inside an interface.
// Violations are data, not exceptions.
inline std::vector<Diag> validate_restrictions(const Program& p) {
    std::vector<Diag> out;
    NameSet type_names;
    std::unordered_map<Name, NameSet, NameHash> receivers;
    for (const auto& d : p.decls) {
        if (const auto* s = std::get_if<StructDecl>(&d.node)) {
            if (!type_names.insert(s->name).second)
                out.push_back({Code::DuplicateStruct, s->name.str(), std::nullopt});
            NameSet fields;
            for (const auto& f : s->fields)
                if (!fields.insert(f.var).second)
                    out.push_back({Code::DuplicateField, s->name.str() + "." + f.var.str(), std::nullopt});
        } else if (const auto* i = std::get_if<IfaceDecl>(&d.node)) {
            if (!type_names.insert(i->name).second)
                out.push_back({Code::DuplicateIface, i->name.str(), std::nullopt});
            NameSet methods;
            for (const auto& r : i->specs)
                if (!methods.insert(r.name).second)
                    out.push_back({Code::DuplicateIfaceMethod, i->name.str() + "." + r.name.str(), std::nullopt});
        } else {
            const auto& m = std::get<MethodDecl>(d.node);
            if (!receivers[m.recv_struct].insert(m.sig.name).second)
                out.push_back({Code::DuplicateReceiver,
                               "(" + m.recv_struct.str() + ", " + m.sig.name.str() + ")", std::nullopt});
        }
    }
    return out;
}

// Lookup index over a validated program; declaration order is preserved for
// per-struct method lists.
class DeclTable {
public:
    explicit DeclTable(const Program& p) : prog_(&p) {
        for (const auto& d : p.decls) {
            if (const auto* s = std::get_if<StructDecl>(&d.node)) {
                structs_.emplace(s->name, s);
            } else if (const auto* i = std::get_if<IfaceDecl>(&d.node)) {
                ifaces_.emplace(i->name, i);
            } else {
                const auto& m = std::get<MethodDecl>(d.node);
                methods_by_struct_[m.recv_struct].push_back(&m);
            }
        }
    }

    const Program& program() const { return *prog_; }

    const StructDecl* struct_decl(Name n) const {
        auto it = structs_.find(n);
        return it == structs_.end() ? nullptr : it->second;
    }
    const IfaceDecl* iface_decl(Name n) const {
        auto it = ifaces_.find(n);
        return it == ifaces_.end() ? nullptr : it->second;
    }
    const MethodDecl* method(Name recv_struct, Name m) const {
        auto it = methods_by_struct_.find(recv_struct);
        if (it == methods_by_struct_.end()) return nullptr;
        for (const MethodDecl* d : it->second)
            if (d->sig.name == m) return d;
        return nullptr;
    }
    std::vector<const MethodDecl*> methods_of(Name recv_struct) const {
        auto it = methods_by_struct_.find(recv_struct);
        return it == methods_by_struct_.end() ? std::vector<const MethodDecl*>{} : it->second;
    }

private:
    const Program* prog_;
    std::unordered_map<Name, const StructDecl*, NameHash> structs_;
    std::unordered_map<Name, const IfaceDecl*, NameHash> ifaces_;
    std::unordered_map<Name, std::vector<const MethodDecl*>, NameHash> methods_by_struct_;
};

// Scan for base-extension forms; used to reject them in pure-calculus mode.
inline bool expr_uses_base_forms(const ExprPtr& e);

inline bool program_uses_base_expr_forms(const Program& p) {
    if (expr_uses_base_forms(p.main)) return true;
    for (const auto& d : p.decls)
        if (const auto* m = std::get_if<MethodDecl>(&d.node))
            if (expr_uses_base_forms(m->body)) return true;
    return false;
}

inline bool expr_uses_base_forms(const ExprPtr& e) {
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IntLit> || std::is_same_v<T, BoolLit> ||
                          std::is_same_v<T, StrLit> || std::is_same_v<T, BinOp> ||
                          std::is_same_v<T, Builtin>) {
                return true;
            } else if constexpr (std::is_same_v<T, StructLit>) {
                for (const auto& a : n.args)
                    if (expr_uses_base_forms(a)) return true;
                return false;
            } else if constexpr (std::is_same_v<T, FieldAccess>) {
                return expr_uses_base_forms(n.recv);
            } else if constexpr (std::is_same_v<T, MethodCall>) {
                if (expr_uses_base_forms(n.recv)) return true;
                for (const auto& a : n.args)
                    if (expr_uses_base_forms(a)) return true;
                return false;
            } else {
                return false;
            }
        },
        e->node);
}

} // namespace fgg
