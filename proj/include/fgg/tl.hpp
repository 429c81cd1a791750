#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "fgg/diag.hpp"
#include "fgg/names.hpp"

namespace fgg {

// ---------------------------------------------------------------------------
// Core target language: E ::= X | K | E E | \X.E | case E of K X.. -> E, ..
// extended with literals and primitive operators mirroring the source base
// extension.

struct TLExpr;
using TLPtr = std::shared_ptr<const TLExpr>;

struct TLVar {
    Name name;
};

struct TLCtor {
    Name name;
};

struct TLApp {
    TLPtr fn, arg;
};

struct TLLam {
    Name var;
    TLPtr body;
};

struct TLClause {
    Name ctor;
    std::vector<Name> vars;
    TLPtr body;
};

struct TLCase {
    TLPtr scrutinee;
    std::vector<TLClause> clauses; // pairwise distinct constructors
};

using TLLitVal = std::variant<std::int64_t, bool, std::string>;

struct TLLit {
    TLLitVal v;
};

enum class TLPrimOp { EqInt, AddInt, Concat, IntToStr };

struct TLPrim {
    TLPrimOp op;
    std::vector<TLPtr> args; // 2 for the binary ops, 1 for IntToStr
};

struct TLExpr {
    using Node = std::variant<TLVar, TLCtor, TLApp, TLLam, TLCase, TLLit, TLPrim>;
    Node node;
    // Value-ness cache (-1 unknown, 0 no, 1 yes); subterms are shared.
    mutable std::atomic<signed char> value_memo{-1};

    TLExpr() = default;
    explicit TLExpr(Node n) : node(std::move(n)) {}
    TLExpr(const TLExpr& o) : node(o.node) {}
    TLExpr(TLExpr&& o) noexcept : node(std::move(o.node)) {}
    TLExpr& operator=(const TLExpr& o) {
        node = o.node;
        value_memo.store(-1, std::memory_order_relaxed);
        return *this;
    }
};

inline TLPtr tl_var(Name n) { return std::make_shared<TLExpr>(TLExpr{TLVar{n}}); }
inline TLPtr tl_ctor(Name n) { return std::make_shared<TLExpr>(TLExpr{TLCtor{n}}); }
inline TLPtr tl_app(TLPtr f, TLPtr a) { return std::make_shared<TLExpr>(TLExpr{TLApp{std::move(f), std::move(a)}}); }
inline TLPtr tl_lam(Name v, TLPtr b) { return std::make_shared<TLExpr>(TLExpr{TLLam{v, std::move(b)}}); }
inline TLPtr tl_case(TLPtr s, std::vector<TLClause> cls) {
    return std::make_shared<TLExpr>(TLExpr{TLCase{std::move(s), std::move(cls)}});
}
inline TLPtr tl_lit(TLLitVal v) { return std::make_shared<TLExpr>(TLExpr{TLLit{std::move(v)}}); }
inline TLPtr tl_int(std::int64_t v) { return tl_lit(TLLitVal{v}); }
inline TLPtr tl_bool(bool v) { return tl_lit(TLLitVal{v}); }
inline TLPtr tl_str(std::string v) { return tl_lit(TLLitVal{std::move(v)}); }
inline TLPtr tl_prim(TLPrimOp op, std::vector<TLPtr> args) {
    return std::make_shared<TLExpr>(TLExpr{TLPrim{op, std::move(args)}});
}

// Prog ::= let X = V ... in E; binding variables must be pairwise distinct
// and every right-hand side a value.
struct TLProgram {
    std::vector<std::pair<Name, TLPtr>> bindings;
    TLPtr main;
};

using MethodSubst = std::unordered_map<Name, TLPtr, NameHash>;

// Reserved constructor family for tuples, plus the erasure marker. The
// translation never emits user-visible constructors, so these cannot clash.
inline Name tuple_ctor(std::size_t n) { return Name::of("Tup" + std::to_string(n)); }
inline Name erased_lam_ctor() { return Name::of("ErasedLam"); }

// ---------------------------------------------------------------------------
// Values and constructor spines.

inline bool is_tl_value(const TLPtr& e);

// K V1 .. Vn is represented as nested applications; this walks the spine.
inline bool ctor_spine(const TLPtr& e, Name* ctor, std::vector<TLPtr>* args) {
    if (const auto* k = std::get_if<TLCtor>(&e->node)) {
        if (ctor) *ctor = k->name;
        return true;
    }
    if (const auto* app = std::get_if<TLApp>(&e->node)) {
        if (!is_tl_value(app->arg)) return false;
        if (!ctor_spine(app->fn, ctor, args)) return false;
        if (args) args->push_back(app->arg);
        return true;
    }
    return false;
}

inline bool is_tl_value(const TLPtr& e) {
    signed char memo = e->value_memo.load(std::memory_order_relaxed);
    if (memo >= 0) return memo != 0;
    bool v;
    if (std::holds_alternative<TLLam>(e->node) || std::holds_alternative<TLLit>(e->node) ||
        std::holds_alternative<TLCtor>(e->node))
        v = true;
    else if (std::holds_alternative<TLApp>(e->node))
        v = ctor_spine(e, nullptr, nullptr);
    else
        v = false;
    e->value_memo.store(v ? 1 : 0, std::memory_order_relaxed);
    return v;
}

// ---------------------------------------------------------------------------
// Free variables and capture-avoiding substitution.

inline void collect_tl_free_vars(const TLPtr& e, NameSet& bound, NameSet& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, TLVar>) {
                if (!bound.count(n.name)) out.insert(n.name);
            } else if constexpr (std::is_same_v<T, TLApp>) {
                collect_tl_free_vars(n.fn, bound, out);
                collect_tl_free_vars(n.arg, bound, out);
            } else if constexpr (std::is_same_v<T, TLLam>) {
                bool added = bound.insert(n.var).second;
                collect_tl_free_vars(n.body, bound, out);
                if (added) bound.erase(n.var);
            } else if constexpr (std::is_same_v<T, TLCase>) {
                collect_tl_free_vars(n.scrutinee, bound, out);
                for (const auto& cl : n.clauses) {
                    std::vector<Name> added;
                    for (Name v : cl.vars)
                        if (bound.insert(v).second) added.push_back(v);
                    collect_tl_free_vars(cl.body, bound, out);
                    for (Name v : added) bound.erase(v);
                }
            } else if constexpr (std::is_same_v<T, TLPrim>) {
                for (const auto& a : n.args) collect_tl_free_vars(a, bound, out);
            }
        },
        e->node);
}

inline NameSet tl_free_vars(const TLPtr& e) {
    NameSet bound, out;
    collect_tl_free_vars(e, bound, out);
    return out;
}

namespace detail {

using TLMap = std::vector<std::pair<Name, TLPtr>>;

inline const TLPtr* tl_map_lookup(const TLMap& m, Name n) {
    for (const auto& [k, v] : m)
        if (k == n) return &v;
    return nullptr;
}

// Picks a binder name avoiding the given conflicts; used when substitution
// would capture.
inline Name tl_fresh_binder(const NameSet& avoid) {
    for (std::uint64_t i = 0;; ++i) {
        Name candidate = Name::of("%r" + std::to_string(i));
        if (!avoid.count(candidate)) return candidate;
    }
}

inline TLPtr tl_subst(const TLMap& map, const TLPtr& e);

// Renames clause/lambda binders when the substitution range mentions them.
template <typename Rebind>
inline void tl_subst_binders(const TLMap& map, std::vector<Name>& binders, TLPtr& body, Rebind&& range_fv) {
    TLMap active;
    for (const auto& [k, v] : map) {
        bool shadowed = false;
        for (Name b : binders)
            if (b == k) shadowed = true;
        if (!shadowed) active.emplace_back(k, v);
    }
    if (active.empty()) return;
    NameSet fv = range_fv(active);
    TLMap rename;
    for (Name& b : binders) {
        if (fv.count(b)) {
            NameSet avoid = fv;
            NameSet body_fv = tl_free_vars(body);
            avoid.insert(body_fv.begin(), body_fv.end());
            for (const auto& [k, v] : active) avoid.insert(k);
            for (Name other : binders) avoid.insert(other);
            Name nb = tl_fresh_binder(avoid);
            rename.emplace_back(b, tl_var(nb));
            b = nb;
        }
    }
    if (!rename.empty()) body = tl_subst(rename, body);
    body = tl_subst(active, body);
}

inline TLPtr tl_subst(const TLMap& map, const TLPtr& e) {
    if (map.empty()) return e;
    return std::visit(
        [&](const auto& n) -> TLPtr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, TLVar>) {
                if (const TLPtr* hit = tl_map_lookup(map, n.name)) return *hit;
                return e;
            } else if constexpr (std::is_same_v<T, TLCtor> || std::is_same_v<T, TLLit>) {
                return e;
            } else if constexpr (std::is_same_v<T, TLApp>) {
                return tl_app(tl_subst(map, n.fn), tl_subst(map, n.arg));
            } else if constexpr (std::is_same_v<T, TLPrim>) {
                std::vector<TLPtr> args;
                args.reserve(n.args.size());
                for (const auto& a : n.args) args.push_back(tl_subst(map, a));
                return tl_prim(n.op, std::move(args));
            } else if constexpr (std::is_same_v<T, TLLam>) {
                std::vector<Name> binders{n.var};
                TLPtr body = n.body;
                tl_subst_binders(map, binders, body, [](const TLMap& active) {
                    NameSet fv;
                    for (const auto& [k, v] : active) {
                        NameSet vf = tl_free_vars(v);
                        fv.insert(vf.begin(), vf.end());
                    }
                    return fv;
                });
                return tl_lam(binders[0], body);
            } else {
                static_assert(std::is_same_v<T, TLCase>);
                std::vector<TLClause> clauses;
                clauses.reserve(n.clauses.size());
                for (const auto& cl : n.clauses) {
                    std::vector<Name> binders = cl.vars;
                    TLPtr body = cl.body;
                    tl_subst_binders(map, binders, body, [](const TLMap& active) {
                        NameSet fv;
                        for (const auto& [k, v] : active) {
                            NameSet vf = tl_free_vars(v);
                            fv.insert(vf.begin(), vf.end());
                        }
                        return fv;
                    });
                    clauses.push_back(TLClause{cl.ctor, std::move(binders), std::move(body)});
                }
                return tl_case(tl_subst(map, n.scrutinee), std::move(clauses));
            }
        },
        e->node);
}

} // namespace detail

// Capture-avoiding substitution of values for variables.
inline TLPtr apply_subst_tl(const std::vector<std::pair<Name, TLPtr>>& s, const TLPtr& e) {
    return detail::tl_subst(s, e);
}

inline TLPtr apply_subst_tl(Name var, const TLPtr& value, const TLPtr& e) {
    return detail::tl_subst({{var, value}}, e);
}

// ---------------------------------------------------------------------------
// Structural and alpha equality.

inline bool tl_equal(const TLPtr& a, const TLPtr& b) {
    if (a.get() == b.get()) return true;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        [&](const auto& na) -> bool {
            using T = std::decay_t<decltype(na)>;
            const auto& nb = std::get<T>(b->node);
            if constexpr (std::is_same_v<T, TLVar> || std::is_same_v<T, TLCtor>) {
                return na.name == nb.name;
            } else if constexpr (std::is_same_v<T, TLApp>) {
                return tl_equal(na.fn, nb.fn) && tl_equal(na.arg, nb.arg);
            } else if constexpr (std::is_same_v<T, TLLam>) {
                return na.var == nb.var && tl_equal(na.body, nb.body);
            } else if constexpr (std::is_same_v<T, TLCase>) {
                if (!tl_equal(na.scrutinee, nb.scrutinee) || na.clauses.size() != nb.clauses.size())
                    return false;
                for (std::size_t i = 0; i < na.clauses.size(); ++i) {
                    if (na.clauses[i].ctor != nb.clauses[i].ctor) return false;
                    if (na.clauses[i].vars != nb.clauses[i].vars) return false;
                    if (!tl_equal(na.clauses[i].body, nb.clauses[i].body)) return false;
                }
                return true;
            } else if constexpr (std::is_same_v<T, TLLit>) {
                return na.v == nb.v;
            } else {
                static_assert(std::is_same_v<T, TLPrim>);
                if (na.op != nb.op || na.args.size() != nb.args.size()) return false;
                for (std::size_t i = 0; i < na.args.size(); ++i)
                    if (!tl_equal(na.args[i], nb.args[i])) return false;
                return true;
            }
        },
        a->node);
}

namespace detail {

struct AlphaEnv {
    std::unordered_map<Name, int, NameHash> left, right;
    int next = 0;
};

inline bool tl_alpha(const TLPtr& a, const TLPtr& b, AlphaEnv env) {
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        [&](const auto& na) -> bool {
            using T = std::decay_t<decltype(na)>;
            const auto& nb = std::get<T>(b->node);
            if constexpr (std::is_same_v<T, TLVar>) {
                auto la = env.left.find(na.name);
                auto rb = env.right.find(nb.name);
                if (la != env.left.end() || rb != env.right.end())
                    return la != env.left.end() && rb != env.right.end() && la->second == rb->second;
                return na.name == nb.name; // both free
            } else if constexpr (std::is_same_v<T, TLCtor>) {
                return na.name == nb.name;
            } else if constexpr (std::is_same_v<T, TLApp>) {
                return tl_alpha(na.fn, nb.fn, env) && tl_alpha(na.arg, nb.arg, env);
            } else if constexpr (std::is_same_v<T, TLLam>) {
                AlphaEnv e2 = env;
                e2.left[na.var] = e2.next;
                e2.right[nb.var] = e2.next;
                ++e2.next;
                return tl_alpha(na.body, nb.body, e2);
            } else if constexpr (std::is_same_v<T, TLCase>) {
                if (!tl_alpha(na.scrutinee, nb.scrutinee, env) || na.clauses.size() != nb.clauses.size())
                    return false;
                for (std::size_t i = 0; i < na.clauses.size(); ++i) {
                    const auto& ca = na.clauses[i];
                    const auto& cb = nb.clauses[i];
                    if (ca.ctor != cb.ctor || ca.vars.size() != cb.vars.size()) return false;
                    AlphaEnv e2 = env;
                    for (std::size_t k = 0; k < ca.vars.size(); ++k) {
                        e2.left[ca.vars[k]] = e2.next;
                        e2.right[cb.vars[k]] = e2.next;
                        ++e2.next;
                    }
                    if (!tl_alpha(ca.body, cb.body, e2)) return false;
                }
                return true;
            } else if constexpr (std::is_same_v<T, TLLit>) {
                return na.v == nb.v;
            } else {
                static_assert(std::is_same_v<T, TLPrim>);
                if (na.op != nb.op || na.args.size() != nb.args.size()) return false;
                for (std::size_t i = 0; i < na.args.size(); ++i)
                    if (!tl_alpha(na.args[i], nb.args[i], env)) return false;
                return true;
            }
        },
        a->node);
}

} // namespace detail

inline bool tl_alpha_equal(const TLPtr& a, const TLPtr& b) {
    return detail::tl_alpha(a, b, detail::AlphaEnv{});
}

inline bool tl_program_alpha_equal(const TLProgram& a, const TLProgram& b) {
    if (a.bindings.size() != b.bindings.size()) return false;
    for (std::size_t i = 0; i < a.bindings.size(); ++i) {
        if (a.bindings[i].first != b.bindings[i].first) return false;
        if (!tl_alpha_equal(a.bindings[i].second, b.bindings[i].second)) return false;
    }
    return tl_alpha_equal(a.main, b.main);
}

// ---------------------------------------------------------------------------
// Sugared layer: tuples, pattern lambdas, and nested patterns. Eliminated
// entirely by desugar.

struct SPat;

struct SPatCtor {
    Name ctor;
    std::vector<SPat> args;
};

struct SPat {
    std::variant<Name, SPatCtor> node;
};

inline SPat spat_var(Name n) { return SPat{n}; }
inline SPat spat_ctor(Name ctor, std::vector<SPat> args) { return SPat{SPatCtor{ctor, std::move(args)}}; }
inline SPat spat_tuple(std::vector<SPat> args) {
    std::size_t n = args.size();
    return spat_ctor(tuple_ctor(n), std::move(args));
}

struct STL;
using STLPtr = std::shared_ptr<const STL>;

struct SVar {
    Name name;
};
struct SCtor {
    Name name;
};
struct SApp {
    STLPtr fn, arg;
};
struct SLam {
    Name var;
    STLPtr body;
};
struct SPatLam {
    SPat pat;
    STLPtr body;
};
struct STuple {
    std::vector<STLPtr> elems;
};
struct SCaseClause {
    SPat pat;
    STLPtr body;
};
struct SCase {
    STLPtr scrutinee;
    std::vector<SCaseClause> clauses;
};
struct SLit {
    TLLitVal v;
};
struct SPrim {
    TLPrimOp op;
    std::vector<STLPtr> args;
};

struct STL {
    std::variant<SVar, SCtor, SApp, SLam, SPatLam, STuple, SCase, SLit, SPrim> node;
};

inline STLPtr s_var(Name n) { return std::make_shared<STL>(STL{SVar{n}}); }
inline STLPtr s_ctor(Name n) { return std::make_shared<STL>(STL{SCtor{n}}); }
inline STLPtr s_app(STLPtr f, STLPtr a) { return std::make_shared<STL>(STL{SApp{std::move(f), std::move(a)}}); }
inline STLPtr s_lam(Name v, STLPtr b) { return std::make_shared<STL>(STL{SLam{v, std::move(b)}}); }
inline STLPtr s_patlam(SPat p, STLPtr b) { return std::make_shared<STL>(STL{SPatLam{std::move(p), std::move(b)}}); }
inline STLPtr s_tuple(std::vector<STLPtr> elems) { return std::make_shared<STL>(STL{STuple{std::move(elems)}}); }
inline STLPtr s_case(STLPtr scrut, std::vector<SCaseClause> cls) {
    return std::make_shared<STL>(STL{SCase{std::move(scrut), std::move(cls)}});
}
inline STLPtr s_lit(TLLitVal v) { return std::make_shared<STL>(STL{SLit{std::move(v)}}); }
inline STLPtr s_prim(TLPrimOp op, std::vector<STLPtr> args) {
    return std::make_shared<STL>(STL{SPrim{op, std::move(args)}});
}

inline void collect_spat_vars(const SPat& p, NameSet& out) {
    if (const auto* v = std::get_if<Name>(&p.node)) {
        out.insert(*v);
    } else {
        for (const auto& sub : std::get<SPatCtor>(p.node).args) collect_spat_vars(sub, out);
    }
}

// Free variables of a sugared term; pattern variables bind in clause bodies.
inline void collect_s_free_vars(const STLPtr& e, NameSet& bound, NameSet& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, SVar>) {
                if (!bound.count(n.name)) out.insert(n.name);
            } else if constexpr (std::is_same_v<T, SApp>) {
                collect_s_free_vars(n.fn, bound, out);
                collect_s_free_vars(n.arg, bound, out);
            } else if constexpr (std::is_same_v<T, SLam>) {
                bool added = bound.insert(n.var).second;
                collect_s_free_vars(n.body, bound, out);
                if (added) bound.erase(n.var);
            } else if constexpr (std::is_same_v<T, SPatLam>) {
                NameSet pv;
                collect_spat_vars(n.pat, pv);
                std::vector<Name> added;
                for (Name v : pv)
                    if (bound.insert(v).second) added.push_back(v);
                collect_s_free_vars(n.body, bound, out);
                for (Name v : added) bound.erase(v);
            } else if constexpr (std::is_same_v<T, STuple>) {
                for (const auto& el : n.elems) collect_s_free_vars(el, bound, out);
            } else if constexpr (std::is_same_v<T, SCase>) {
                collect_s_free_vars(n.scrutinee, bound, out);
                for (const auto& cl : n.clauses) {
                    NameSet pv;
                    collect_spat_vars(cl.pat, pv);
                    std::vector<Name> added;
                    for (Name v : pv)
                        if (bound.insert(v).second) added.push_back(v);
                    collect_s_free_vars(cl.body, bound, out);
                    for (Name v : added) bound.erase(v);
                }
            } else if constexpr (std::is_same_v<T, SPrim>) {
                for (const auto& a : n.args) collect_s_free_vars(a, bound, out);
            }
        },
        e->node);
}

inline NameSet s_free_vars(const STLPtr& e) {
    NameSet bound, out;
    collect_s_free_vars(e, bound, out);
    return out;
}

// Every variable name occurring in the term, bound or free; fresh-name
// generation must avoid all of them.
inline void collect_s_all_names(const STLPtr& e, NameSet& out) {
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, SVar>) {
                out.insert(n.name);
            } else if constexpr (std::is_same_v<T, SApp>) {
                collect_s_all_names(n.fn, out);
                collect_s_all_names(n.arg, out);
            } else if constexpr (std::is_same_v<T, SLam>) {
                out.insert(n.var);
                collect_s_all_names(n.body, out);
            } else if constexpr (std::is_same_v<T, SPatLam>) {
                collect_spat_vars(n.pat, out);
                collect_s_all_names(n.body, out);
            } else if constexpr (std::is_same_v<T, STuple>) {
                for (const auto& el : n.elems) collect_s_all_names(el, out);
            } else if constexpr (std::is_same_v<T, SCase>) {
                collect_s_all_names(n.scrutinee, out);
                for (const auto& cl : n.clauses) {
                    collect_spat_vars(cl.pat, out);
                    collect_s_all_names(cl.body, out);
                }
            } else if constexpr (std::is_same_v<T, SPrim>) {
                for (const auto& a : n.args) collect_s_all_names(a, out);
            }
        },
        e->node);
}

// ---------------------------------------------------------------------------
// Desugaring. Tuples become Tup<n> constructor spines; pattern lambdas
// expand to \X. case X of ...; nested patterns expand to cascaded cases
// with fresh variables.

constexpr std::size_t kDefaultMaxTupleArity = 8;

namespace detail {

inline TLPtr desugar_rec(const STLPtr& e, FreshGen& fresh, std::size_t max_tuple);

inline TLPtr expand_match(const TLPtr& scrut, const SPat& pat, const TLPtr& body, FreshGen& fresh,
                          std::size_t max_tuple);

// One flat clause for a constructor pattern; nested sub-patterns expand to
// cascaded cases in the body, left to right.
inline TLClause make_clause(const SPatCtor& pc, const TLPtr& body, FreshGen& fresh, std::size_t max_tuple) {
    if (pc.ctor == tuple_ctor(pc.args.size()) && pc.args.size() > max_tuple)
        throw TypeError(Code::TupleArityExceeded,
                        "tuple pattern of arity " + std::to_string(pc.args.size()));
    std::vector<Name> vars;
    vars.reserve(pc.args.size());
    for (const auto& sub : pc.args) {
        if (const auto* sv = std::get_if<Name>(&sub.node))
            vars.push_back(*sv);
        else
            vars.push_back(fresh.fresh());
    }
    TLPtr inner = body;
    for (std::size_t i = pc.args.size(); i-- > 0;) {
        if (std::holds_alternative<SPatCtor>(pc.args[i].node))
            inner = expand_match(tl_var(vars[i]), pc.args[i], inner, fresh, max_tuple);
    }
    return TLClause{pc.ctor, std::move(vars), std::move(inner)};
}

// case scrut of <pat> -> body.
inline TLPtr expand_match(const TLPtr& scrut, const SPat& pat, const TLPtr& body, FreshGen& fresh,
                          std::size_t max_tuple) {
    if (const auto* v = std::get_if<Name>(&pat.node)) return apply_subst_tl(*v, scrut, body);
    return tl_case(scrut, {make_clause(std::get<SPatCtor>(pat.node), body, fresh, max_tuple)});
}

inline TLPtr desugar_rec(const STLPtr& e, FreshGen& fresh, std::size_t max_tuple) {
    return std::visit(
        [&](const auto& n) -> TLPtr {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, SVar>) {
                return tl_var(n.name);
            } else if constexpr (std::is_same_v<T, SCtor>) {
                return tl_ctor(n.name);
            } else if constexpr (std::is_same_v<T, SApp>) {
                return tl_app(desugar_rec(n.fn, fresh, max_tuple), desugar_rec(n.arg, fresh, max_tuple));
            } else if constexpr (std::is_same_v<T, SLam>) {
                return tl_lam(n.var, desugar_rec(n.body, fresh, max_tuple));
            } else if constexpr (std::is_same_v<T, SPatLam>) {
                TLPtr body = desugar_rec(n.body, fresh, max_tuple);
                if (const auto* v = std::get_if<Name>(&n.pat.node)) return tl_lam(*v, body);
                Name x = fresh.fresh();
                return tl_lam(x, expand_match(tl_var(x), n.pat, body, fresh, max_tuple));
            } else if constexpr (std::is_same_v<T, STuple>) {
                if (n.elems.size() > max_tuple)
                    throw TypeError(Code::TupleArityExceeded,
                                    "tuple of arity " + std::to_string(n.elems.size()));
                TLPtr acc = tl_ctor(tuple_ctor(n.elems.size()));
                for (const auto& el : n.elems) acc = tl_app(acc, desugar_rec(el, fresh, max_tuple));
                return acc;
            } else if constexpr (std::is_same_v<T, SCase>) {
                TLPtr scrut = desugar_rec(n.scrutinee, fresh, max_tuple);
                std::vector<TLClause> clauses;
                for (const auto& cl : n.clauses) {
                    const auto* pc = std::get_if<SPatCtor>(&cl.pat.node);
                    if (!pc)
                        throw TypeError(Code::ShapeError, "case clause pattern must be a constructor pattern");
                    clauses.push_back(make_clause(*pc, desugar_rec(cl.body, fresh, max_tuple), fresh, max_tuple));
                }
                return tl_case(std::move(scrut), std::move(clauses));
            } else if constexpr (std::is_same_v<T, SLit>) {
                return tl_lit(n.v);
            } else {
                static_assert(std::is_same_v<T, SPrim>);
                std::vector<TLPtr> args;
                args.reserve(n.args.size());
                for (const auto& a : n.args) args.push_back(desugar_rec(a, fresh, max_tuple));
                return tl_prim(n.op, std::move(args));
            }
        },
        e->node);
}

} // namespace detail

inline TLPtr desugar(const STLPtr& e, FreshGen& fresh, std::size_t max_tuple = kDefaultMaxTupleArity) {
    return detail::desugar_rec(e, fresh, max_tuple);
}

inline TLPtr desugar(const STLPtr& e, std::size_t max_tuple = kDefaultMaxTupleArity) {
    FreshGen fresh;
    NameSet used;
    collect_s_all_names(e, used);
    fresh.avoid_all(used);
    return detail::desugar_rec(e, fresh, max_tuple);
}

} // namespace fgg
