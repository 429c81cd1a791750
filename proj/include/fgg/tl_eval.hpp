#pragma once

#include <optional>

#include "fgg/outcome.hpp"
#include "fgg/tl.hpp"

namespace fgg {

// ---------------------------------------------------------------------------
// Call-by-value evaluation contexts: case scrutinee, function position, and
// argument position once the function is a value. Prim arguments evaluate
// left to right, mirroring the source extension.

struct TLCtxCaseScrut {
    std::vector<TLClause> clauses;
};
struct TLCtxAppFn {
    TLPtr arg;
};
struct TLCtxAppArg {
    TLPtr fn; // value
};
struct TLCtxPrimArg {
    TLPrimOp op;
    std::vector<TLPtr> before; // values
    std::vector<TLPtr> after;
};

using TLCtxFrame = std::variant<TLCtxCaseScrut, TLCtxAppFn, TLCtxAppArg, TLCtxPrimArg>;

struct TLEvalCtx {
    std::vector<TLCtxFrame> frames;
};

inline TLPtr tl_plug(const TLEvalCtx& ctx, TLPtr e) {
    for (auto it = ctx.frames.rbegin(); it != ctx.frames.rend(); ++it) {
        e = std::visit(
            [&](const auto& f) -> TLPtr {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, TLCtxCaseScrut>) {
                    return tl_case(e, f.clauses);
                } else if constexpr (std::is_same_v<T, TLCtxAppFn>) {
                    return tl_app(e, f.arg);
                } else if constexpr (std::is_same_v<T, TLCtxAppArg>) {
                    return tl_app(f.fn, e);
                } else {
                    std::vector<TLPtr> args = f.before;
                    args.push_back(e);
                    args.insert(args.end(), f.after.begin(), f.after.end());
                    return tl_prim(f.op, std::move(args));
                }
            },
            *it);
    }
    return e;
}

// ---------------------------------------------------------------------------
// Directly reducible redexes: beta, case on a matching constructor value,
// a let-bound variable (tl-method), and prim delta rules.

inline const TLClause* matching_clause(const TLCase& c, Name ctor, std::size_t arity) {
    for (const auto& cl : c.clauses)
        if (cl.ctor == ctor && cl.vars.size() == arity) return &cl;
    return nullptr;
}

inline bool tl_directly_reducible(const TLPtr& e, const MethodSubst& msubst) {
    if (const auto* v = std::get_if<TLVar>(&e->node)) return msubst.count(v->name) > 0;
    if (const auto* app = std::get_if<TLApp>(&e->node))
        return std::holds_alternative<TLLam>(app->fn->node) && is_tl_value(app->arg);
    if (const auto* c = std::get_if<TLCase>(&e->node)) {
        Name ctor;
        std::vector<TLPtr> args;
        if (!is_tl_value(c->scrutinee) || !ctor_spine(c->scrutinee, &ctor, &args)) return false;
        return matching_clause(*c, ctor, args.size()) != nullptr;
    }
    if (const auto* p = std::get_if<TLPrim>(&e->node)) {
        for (const auto& a : p->args)
            if (!std::holds_alternative<TLLit>(a->node)) return false;
        auto lit_is_int = [](const TLPtr& a) {
            return std::holds_alternative<std::int64_t>(std::get<TLLit>(a->node).v);
        };
        auto lit_is_str = [](const TLPtr& a) {
            return std::holds_alternative<std::string>(std::get<TLLit>(a->node).v);
        };
        switch (p->op) {
            case TLPrimOp::EqInt:
            case TLPrimOp::AddInt:
                return p->args.size() == 2 && lit_is_int(p->args[0]) && lit_is_int(p->args[1]);
            case TLPrimOp::Concat:
                return p->args.size() == 2 && lit_is_str(p->args[0]) && lit_is_str(p->args[1]);
            case TLPrimOp::IntToStr:
                return p->args.size() == 1 && lit_is_int(p->args[0]);
        }
    }
    return false;
}

inline TLPtr tl_reduce_redex(const TLPtr& e, const MethodSubst& msubst) {
    if (const auto* v = std::get_if<TLVar>(&e->node)) return msubst.at(v->name);
    if (const auto* app = std::get_if<TLApp>(&e->node)) {
        const auto& lam = std::get<TLLam>(app->fn->node);
        return apply_subst_tl(lam.var, app->arg, lam.body);
    }
    if (const auto* c = std::get_if<TLCase>(&e->node)) {
        Name ctor;
        std::vector<TLPtr> args;
        ctor_spine(c->scrutinee, &ctor, &args);
        const TLClause* cl = matching_clause(*c, ctor, args.size());
        std::vector<std::pair<Name, TLPtr>> map;
        for (std::size_t i = 0; i < args.size(); ++i) map.emplace_back(cl->vars[i], args[i]);
        return apply_subst_tl(map, cl->body);
    }
    const auto& p = std::get<TLPrim>(e->node);
    auto as_int = [](const TLPtr& a) { return std::get<std::int64_t>(std::get<TLLit>(a->node).v); };
    auto as_str = [](const TLPtr& a) { return std::get<std::string>(std::get<TLLit>(a->node).v); };
    switch (p.op) {
        case TLPrimOp::EqInt: return tl_bool(as_int(p.args[0]) == as_int(p.args[1]));
        case TLPrimOp::AddInt: return tl_int(as_int(p.args[0]) + as_int(p.args[1]));
        case TLPrimOp::Concat: return tl_str(as_str(p.args[0]) + as_str(p.args[1]));
        case TLPrimOp::IntToStr: return tl_str(std::to_string(as_int(p.args[0])));
    }
    return e;
}

// ---------------------------------------------------------------------------
// Decomposition and single steps.

struct TLDecomposition {
    TLEvalCtx ctx;
    TLPtr redex;
};

namespace detail {

inline bool tl_decompose_into(const TLPtr& e, const MethodSubst& msubst, TLEvalCtx& ctx, TLPtr& redex) {
    if (is_tl_value(e)) return false;
    if (tl_directly_reducible(e, msubst)) {
        redex = e;
        return true;
    }
    if (const auto* app = std::get_if<TLApp>(&e->node)) {
        if (!is_tl_value(app->fn)) {
            ctx.frames.push_back(TLCtxAppFn{app->arg});
            return tl_decompose_into(app->fn, msubst, ctx, redex);
        }
        if (!is_tl_value(app->arg)) {
            ctx.frames.push_back(TLCtxAppArg{app->fn});
            return tl_decompose_into(app->arg, msubst, ctx, redex);
        }
        return false; // e.g. literal applied to a value
    }
    if (const auto* c = std::get_if<TLCase>(&e->node)) {
        if (!is_tl_value(c->scrutinee)) {
            ctx.frames.push_back(TLCtxCaseScrut{c->clauses});
            return tl_decompose_into(c->scrutinee, msubst, ctx, redex);
        }
        return false; // scrutinee value but no matching clause
    }
    if (const auto* p = std::get_if<TLPrim>(&e->node)) {
        for (std::size_t i = 0; i < p->args.size(); ++i) {
            if (is_tl_value(p->args[i])) continue;
            ctx.frames.push_back(TLCtxPrimArg{
                p->op,
                {p->args.begin(), p->args.begin() + static_cast<std::ptrdiff_t>(i)},
                {p->args.begin() + static_cast<std::ptrdiff_t>(i) + 1, p->args.end()}});
            return tl_decompose_into(p->args[i], msubst, ctx, redex);
        }
        return false;
    }
    return false; // free variable outside the method substitution
}

} // namespace detail

inline std::optional<TLDecomposition> decompose_tl(const TLPtr& e, const MethodSubst& msubst) {
    TLDecomposition d;
    if (!detail::tl_decompose_into(e, msubst, d.ctx, d.redex)) return std::nullopt;
    return d;
}

inline std::optional<TLPtr> step_tl(const MethodSubst& msubst, const TLPtr& e) {
    auto d = decompose_tl(e, msubst);
    if (!d) return std::nullopt;
    return tl_plug(d->ctx, tl_reduce_redex(d->redex, msubst));
}

inline std::string tl_stuck_reason(const TLPtr& e, const MethodSubst& msubst);

inline MethodSubst method_subst_of(const TLProgram& p) {
    MethodSubst mu;
    for (const auto& [x, v] : p.bindings) {
        if (!is_tl_value(v))
            throw TypeError(Code::ShapeError, "top-level binding " + x.str() + " is not a value");
        if (!mu.emplace(x, v).second)
            throw TypeError(Code::DuplicateReceiver, "duplicate top-level binding " + x.str());
    }
    return mu;
}

// Forms the method substitution from the top-level bindings, then iterates
// expression reduction on the main expression.
inline Outcome<TLPtr> eval_tl(const TLProgram& p, std::uint64_t max_steps = kDefaultMaxSteps) {
    MethodSubst mu = method_subst_of(p);
    TLPtr e = p.main;
    for (std::uint64_t n = 0; n < max_steps; ++n) {
        if (is_tl_value(e)) return Outcome<TLPtr>::make_value(e, n);
        auto next = step_tl(mu, e);
        if (!next) return Outcome<TLPtr>::make_stuck(tl_stuck_reason(e, mu), n);
        e = *next;
    }
    if (is_tl_value(e)) return Outcome<TLPtr>::make_value(e, max_steps);
    return Outcome<TLPtr>::make_step_limit(max_steps);
}

inline std::string tl_stuck_reason(const TLPtr& e, const MethodSubst& msubst) {
    if (const auto* v = std::get_if<TLVar>(&e->node)) return "unbound variable " + v->name.str();
    if (const auto* app = std::get_if<TLApp>(&e->node)) {
        if (!is_tl_value(app->fn)) return tl_stuck_reason(app->fn, msubst);
        if (!is_tl_value(app->arg)) return tl_stuck_reason(app->arg, msubst);
        return "application of a non-function value";
    }
    if (const auto* c = std::get_if<TLCase>(&e->node)) {
        if (!is_tl_value(c->scrutinee)) return tl_stuck_reason(c->scrutinee, msubst);
        Name ctor;
        std::vector<TLPtr> args;
        if (!ctor_spine(c->scrutinee, &ctor, &args)) return "case on a non-constructor value";
        return "no clause matches constructor " + ctor.str() + "/" + std::to_string(args.size());
    }
    if (const auto* p = std::get_if<TLPrim>(&e->node)) {
        for (const auto& a : p->args)
            if (!is_tl_value(a)) return tl_stuck_reason(a, msubst);
        return "bad operands for primitive operator";
    }
    return "irreducible expression";
}

} // namespace fgg
