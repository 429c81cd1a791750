#pragma once

#include "fgg/source_eval.hpp"
#include "fgg/tl.hpp"

namespace fgg {

// ---------------------------------------------------------------------------
// Erasure of dictionaries: every lambda inside a TL value becomes the
// distinguished nullary constructor ErasedLam; constructors and literals
// are preserved homomorphically.

struct ErasedValue;
using EVPtr = std::shared_ptr<const ErasedValue>;

struct EVCtor {
    Name ctor;
    std::vector<EVPtr> args;
};
struct EVLam {};
struct EVLit {
    TLLitVal v;
};

struct ErasedValue {
    std::variant<EVCtor, EVLam, EVLit> node;
};

inline EVPtr ev_ctor(Name c, std::vector<EVPtr> args = {}) {
    return std::make_shared<ErasedValue>(ErasedValue{EVCtor{c, std::move(args)}});
}
inline EVPtr ev_lam() { return std::make_shared<ErasedValue>(ErasedValue{EVLam{}}); }
inline EVPtr ev_lit(TLLitVal v) { return std::make_shared<ErasedValue>(ErasedValue{EVLit{std::move(v)}}); }

inline bool erased_equal(const EVPtr& a, const EVPtr& b) {
    if (a->node.index() != b->node.index()) return false;
    if (std::holds_alternative<EVLam>(a->node)) return true;
    if (const auto* la = std::get_if<EVLit>(&a->node)) return la->v == std::get<EVLit>(b->node).v;
    const auto& ca = std::get<EVCtor>(a->node);
    const auto& cb = std::get<EVCtor>(b->node);
    if (ca.ctor != cb.ctor || ca.args.size() != cb.args.size()) return false;
    for (std::size_t i = 0; i < ca.args.size(); ++i)
        if (!erased_equal(ca.args[i], cb.args[i])) return false;
    return true;
}

inline std::string print_erased(const EVPtr& e) {
    if (std::holds_alternative<EVLam>(e->node)) return "ErasedLam";
    if (const auto* l = std::get_if<EVLit>(&e->node)) {
        if (const auto* i = std::get_if<std::int64_t>(&l->v)) return std::to_string(*i);
        if (const auto* b = std::get_if<bool>(&l->v)) return *b ? "true" : "false";
        return "\"" + std::get<std::string>(l->v) + "\"";
    }
    const auto& c = std::get<EVCtor>(e->node);
    if (c.args.empty()) return c.ctor.str();
    std::string s = "(" + c.ctor.str();
    for (const auto& a : c.args) s += " " + print_erased(a);
    return s + ")";
}

inline EVPtr erase_value(const TLPtr& v) {
    if (std::holds_alternative<TLLam>(v->node)) return ev_lam();
    if (const auto* l = std::get_if<TLLit>(&v->node)) return ev_lit(l->v);
    Name ctor;
    std::vector<TLPtr> args;
    if (!ctor_spine(v, &ctor, &args))
        throw TypeError(Code::ShapeError, "erase_value applied to a non-value");
    std::vector<EVPtr> erased;
    erased.reserve(args.size());
    for (const auto& a : args) erased.push_back(erase_value(a));
    return ev_ctor(ctor, std::move(erased));
}

// Removes all dictionaries from V viewed at a type: at an interface type
// the value must be a pair and the dictionary component is dropped.
inline EVPtr erase_at_type(const TypePtr& t, const TLPtr& v, const DeclTable& table) {
    const auto* n = as_named(t);
    if (n && table.iface_decl(n->name)) {
        Name ctor;
        std::vector<TLPtr> args;
        if (!ctor_spine(v, &ctor, &args) || ctor != tuple_ctor(2) || args.size() != 2)
            throw TypeError(Code::ShapeError,
                            "value at interface type " + print_type(t) + " is not a pair");
        return erase_value(args[0]);
    }
    return erase_value(v);
}

// ---------------------------------------------------------------------------
// Shape-level correspondence between a source value and a TL value at a
// closed type. The behavioral (step-indexed) content of the logical
// relation is deliberately not checked.

inline bool value_correspondence(const ExprPtr& v, const TLPtr& V, const TypePtr& t, const DeclTable& table) {
    if (const auto* b = as_base(t)) {
        const auto* lit = std::get_if<TLLit>(&V->node);
        if (!lit) return false;
        switch (b->kind) {
            case BaseKind::Int: {
                const auto* iv = std::get_if<IntLit>(&v->node);
                const auto* tv = std::get_if<std::int64_t>(&lit->v);
                return iv && tv && iv->value == *tv;
            }
            case BaseKind::Bool: {
                const auto* bv = std::get_if<BoolLit>(&v->node);
                const auto* tv = std::get_if<bool>(&lit->v);
                return bv && tv && bv->value == *tv;
            }
            case BaseKind::Str: {
                const auto* sv = std::get_if<StrLit>(&v->node);
                const auto* tv = std::get_if<std::string>(&lit->v);
                return sv && tv && sv->value == *tv;
            }
        }
        return false;
    }
    const auto* named = as_named(t);
    if (!named) return false;
    if (const StructDecl* sd = table.struct_decl(named->name)) {
        const auto* lit = std::get_if<StructLit>(&v->node);
        if (!lit || !type_equal(lit->type, t)) return false;
        Name ctor;
        std::vector<TLPtr> args;
        if (!ctor_spine(V, &ctor, &args)) return false;
        if (ctor != tuple_ctor(sd->fields.size()) || args.size() != sd->fields.size()) return false;
        if (lit->args.size() != sd->fields.size()) return false;
        TypeSubst eta = make_type_subst(sd->typarams, named->args);
        for (std::size_t i = 0; i < sd->fields.size(); ++i) {
            TypePtr field_ty = apply_type_subst(eta, sd->fields[i].type);
            if (!value_correspondence(lit->args[i], args[i], field_ty, table)) return false;
        }
        return true;
    }
    if (const IfaceDecl* id = table.iface_decl(named->name)) {
        Name ctor;
        std::vector<TLPtr> args;
        if (!ctor_spine(V, &ctor, &args)) return false;
        if (ctor != tuple_ctor(2) || args.size() != 2) return false;
        Name dict_ctor;
        std::vector<TLPtr> entries;
        if (!ctor_spine(args[1], &dict_ctor, &entries)) return false;
        if (dict_ctor != tuple_ctor(id->specs.size()) || entries.size() != id->specs.size()) return false;
        for (const auto& w : entries)
            if (!std::holds_alternative<TLLam>(w->node)) return false;
        // The existential struct type is taken from the source value, which
        // uniquely determines it.
        const auto* lit = std::get_if<StructLit>(&v->node);
        if (!lit) return false;
        return value_correspondence(v, args[0], lit->type, table);
    }
    return false;
}

} // namespace fgg
