#pragma once

#include <functional>
#include <optional>

#include "fgg/outcome.hpp"
#include "fgg/printer.hpp"
#include "fgg/subst.hpp"

namespace fgg {

// A value is a struct literal with all fields being values, or (under the
// base extension) a literal.
inline bool is_value(const ExprPtr& e) {
    signed char memo = e->value_memo.load(std::memory_order_relaxed);
    if (memo >= 0) return memo != 0;
    bool v;
    if (const auto* s = std::get_if<StructLit>(&e->node)) {
        v = true;
        for (const auto& a : s->args)
            if (!is_value(a)) {
                v = false;
                break;
            }
    } else {
        v = std::holds_alternative<IntLit>(e->node) || std::holds_alternative<BoolLit>(e->node) ||
            std::holds_alternative<StrLit>(e->node);
    }
    e->value_memo.store(v ? 1 : 0, std::memory_order_relaxed);
    return v;
}

// ---------------------------------------------------------------------------
// Evaluation contexts. A context is a path of one-hole frames, outermost
// first; values sit strictly left of the hole, unevaluated expressions right.

struct CtxStructArg {
    TypePtr type;
    std::vector<ExprPtr> before; // values
    std::vector<ExprPtr> after;
};
struct CtxField {
    Name field;
};
struct CtxCallRecv {
    Name method;
    std::vector<TypePtr> tyargs;
    std::vector<ExprPtr> args;
};
struct CtxCallArg {
    ExprPtr recv; // value
    Name method;
    std::vector<TypePtr> tyargs;
    std::vector<ExprPtr> before; // values
    std::vector<ExprPtr> after;
};
struct CtxBinOpL {
    BinOpKind op;
    ExprPtr rhs;
};
struct CtxBinOpR {
    BinOpKind op;
    ExprPtr lhs; // value
};
struct CtxBuiltinArg {
    BuiltinKind op;
};

using CtxFrame = std::variant<CtxStructArg, CtxField, CtxCallRecv, CtxCallArg, CtxBinOpL, CtxBinOpR, CtxBuiltinArg>;

struct EvalCtx {
    std::vector<CtxFrame> frames;
};

inline ExprPtr plug(const EvalCtx& ctx, ExprPtr e) {
    for (auto it = ctx.frames.rbegin(); it != ctx.frames.rend(); ++it) {
        e = std::visit(
            [&](const auto& f) -> ExprPtr {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, CtxStructArg>) {
                    std::vector<ExprPtr> args = f.before;
                    args.push_back(e);
                    args.insert(args.end(), f.after.begin(), f.after.end());
                    return expr_struct(f.type, std::move(args));
                } else if constexpr (std::is_same_v<T, CtxField>) {
                    return expr_field(e, f.field);
                } else if constexpr (std::is_same_v<T, CtxCallRecv>) {
                    return expr_call(e, f.method, f.tyargs, f.args);
                } else if constexpr (std::is_same_v<T, CtxCallArg>) {
                    std::vector<ExprPtr> args = f.before;
                    args.push_back(e);
                    args.insert(args.end(), f.after.begin(), f.after.end());
                    return expr_call(f.recv, f.method, f.tyargs, std::move(args));
                } else if constexpr (std::is_same_v<T, CtxBinOpL>) {
                    return expr_binop(f.op, e, f.rhs);
                } else if constexpr (std::is_same_v<T, CtxBinOpR>) {
                    return expr_binop(f.op, f.lhs, e);
                } else {
                    static_assert(std::is_same_v<T, CtxBuiltinArg>);
                    return expr_builtin(f.op, e);
                }
            },
            *it);
    }
    return e;
}

// ---------------------------------------------------------------------------
// Directly reducible redexes (reduce by fg-field, fg-call or a delta rule).

inline bool directly_reducible(const ExprPtr& e, const DeclTable& table) {
    if (const auto* fa = std::get_if<FieldAccess>(&e->node)) {
        if (!is_value(fa->recv)) return false;
        const auto* lit = std::get_if<StructLit>(&fa->recv->node);
        if (!lit) return false;
        const auto* named = as_named(lit->type);
        if (!named) return false;
        const StructDecl* sd = table.struct_decl(named->name);
        if (!sd || sd->fields.size() != lit->args.size()) return false;
        for (std::size_t i = 0; i < sd->fields.size(); ++i)
            if (sd->fields[i].var == fa->field) return true;
        return false;
    }
    if (const auto* mc = std::get_if<MethodCall>(&e->node)) {
        if (!is_value(mc->recv)) return false;
        for (const auto& a : mc->args)
            if (!is_value(a)) return false;
        const auto* lit = std::get_if<StructLit>(&mc->recv->node);
        if (!lit) return false;
        const auto* named = as_named(lit->type);
        if (!named) return false;
        const MethodDecl* md = table.method(named->name, mc->method);
        if (!md) return false;
        return md->recv_typarams.size() == named->args.size() &&
               md->sig.typarams.size() == mc->tyargs.size() && md->sig.params.size() == mc->args.size();
    }
    if (const auto* b = std::get_if<BinOp>(&e->node)) {
        if (!is_value(b->lhs) || !is_value(b->rhs)) return false;
        switch (b->op) {
            case BinOpKind::EqInt:
            case BinOpKind::AddInt:
                return std::holds_alternative<IntLit>(b->lhs->node) &&
                       std::holds_alternative<IntLit>(b->rhs->node);
            case BinOpKind::ConcatStr:
                return std::holds_alternative<StrLit>(b->lhs->node) &&
                       std::holds_alternative<StrLit>(b->rhs->node);
        }
        return false;
    }
    if (const auto* bi = std::get_if<Builtin>(&e->node))
        return is_value(bi->arg) && std::holds_alternative<IntLit>(bi->arg->node);
    return false;
}

// Applies the matching non-context rule to a directly reducible redex.
inline ExprPtr reduce_redex(const ExprPtr& e, const DeclTable& table) {
    if (const auto* fa = std::get_if<FieldAccess>(&e->node)) {
        const auto& lit = std::get<StructLit>(fa->recv->node);
        const StructDecl* sd = table.struct_decl(as_named(lit.type)->name);
        for (std::size_t i = 0; i < sd->fields.size(); ++i)
            if (sd->fields[i].var == fa->field) return lit.args[i];
    }
    if (const auto* mc = std::get_if<MethodCall>(&e->node)) {
        const auto& lit = std::get<StructLit>(mc->recv->node);
        const auto* named = as_named(lit.type);
        const MethodDecl* md = table.method(named->name, mc->method);
        // <alpha := phi, alpha' := tau'> over receiver and method typarams.
        TypeSubst tysub = make_type_subst(md->recv_typarams, named->args);
        TypeSubst msub = make_type_subst(md->sig.typarams, mc->tyargs);
        for (const auto& [k, v] : msub.entries()) tysub.add(k, v);
        ValueSubst vsub;
        vsub.add(md->recv_var, mc->recv);
        for (std::size_t i = 0; i < md->sig.params.size(); ++i) vsub.add(md->sig.params[i].var, mc->args[i]);
        return apply_value_subst(vsub, apply_type_subst(tysub, md->body));
    }
    if (const auto* b = std::get_if<BinOp>(&e->node)) {
        switch (b->op) {
            case BinOpKind::EqInt:
                return expr_bool(std::get<IntLit>(b->lhs->node).value == std::get<IntLit>(b->rhs->node).value);
            case BinOpKind::AddInt:
                return expr_int(std::get<IntLit>(b->lhs->node).value + std::get<IntLit>(b->rhs->node).value);
            case BinOpKind::ConcatStr:
                return expr_str(std::get<StrLit>(b->lhs->node).value + std::get<StrLit>(b->rhs->node).value);
        }
    }
    const auto& bi = std::get<Builtin>(e->node);
    return expr_str(std::to_string(std::get<IntLit>(bi.arg->node).value));
}

// ---------------------------------------------------------------------------
// Decomposition into the unique (context, redex) pair.

struct Decomposition {
    EvalCtx ctx;
    ExprPtr redex;
};

namespace detail {

inline bool decompose_into(const ExprPtr& e, const DeclTable& table, EvalCtx& ctx, ExprPtr& redex) {
    if (is_value(e)) return false;
    if (directly_reducible(e, table)) {
        redex = e;
        return true;
    }
    if (const auto* s = std::get_if<StructLit>(&e->node)) {
        for (std::size_t i = 0; i < s->args.size(); ++i) {
            if (is_value(s->args[i])) continue;
            ctx.frames.push_back(CtxStructArg{
                s->type,
                {s->args.begin(), s->args.begin() + static_cast<std::ptrdiff_t>(i)},
                {s->args.begin() + static_cast<std::ptrdiff_t>(i) + 1, s->args.end()}});
            return decompose_into(s->args[i], table, ctx, redex);
        }
        return false;
    }
    if (const auto* fa = std::get_if<FieldAccess>(&e->node)) {
        if (is_value(fa->recv)) return false; // value but not reducible: stuck
        ctx.frames.push_back(CtxField{fa->field});
        return decompose_into(fa->recv, table, ctx, redex);
    }
    if (const auto* mc = std::get_if<MethodCall>(&e->node)) {
        if (!is_value(mc->recv)) {
            ctx.frames.push_back(CtxCallRecv{mc->method, mc->tyargs, mc->args});
            return decompose_into(mc->recv, table, ctx, redex);
        }
        for (std::size_t i = 0; i < mc->args.size(); ++i) {
            if (is_value(mc->args[i])) continue;
            ctx.frames.push_back(CtxCallArg{
                mc->recv, mc->method, mc->tyargs,
                {mc->args.begin(), mc->args.begin() + static_cast<std::ptrdiff_t>(i)},
                {mc->args.begin() + static_cast<std::ptrdiff_t>(i) + 1, mc->args.end()}});
            return decompose_into(mc->args[i], table, ctx, redex);
        }
        return false;
    }
    if (const auto* b = std::get_if<BinOp>(&e->node)) {
        if (!is_value(b->lhs)) {
            ctx.frames.push_back(CtxBinOpL{b->op, b->rhs});
            return decompose_into(b->lhs, table, ctx, redex);
        }
        if (!is_value(b->rhs)) {
            ctx.frames.push_back(CtxBinOpR{b->op, b->lhs});
            return decompose_into(b->rhs, table, ctx, redex);
        }
        return false;
    }
    if (const auto* bi = std::get_if<Builtin>(&e->node)) {
        if (!is_value(bi->arg)) {
            ctx.frames.push_back(CtxBuiltinArg{bi->op});
            return decompose_into(bi->arg, table, ctx, redex);
        }
        return false;
    }
    return false; // Var: open terms are stuck
}

} // namespace detail

inline std::optional<Decomposition> decompose(const ExprPtr& e, const DeclTable& table) {
    Decomposition d;
    if (!detail::decompose_into(e, table, d.ctx, d.redex)) return std::nullopt;
    return d;
}

inline std::optional<ExprPtr> step(const ExprPtr& e, const DeclTable& table) {
    auto d = decompose(e, table);
    if (!d) return std::nullopt;
    return plug(d->ctx, reduce_redex(d->redex, table));
}

// Finds the innermost non-value subterm whose children are all evaluated and
// explains why no rule applies to it.
inline std::string stuck_reason(const ExprPtr& e, const DeclTable& table) {
    if (const auto* s = std::get_if<StructLit>(&e->node)) {
        for (const auto& a : s->args)
            if (!is_value(a)) return stuck_reason(a, table);
    } else if (const auto* fa = std::get_if<FieldAccess>(&e->node)) {
        if (!is_value(fa->recv)) return stuck_reason(fa->recv, table);
        if (!std::holds_alternative<StructLit>(fa->recv->node))
            return "field access on non-struct value: " + print_expr(e);
        return "no field " + fa->field.str() + " in " + print_expr(fa->recv);
    } else if (const auto* mc = std::get_if<MethodCall>(&e->node)) {
        if (!is_value(mc->recv)) return stuck_reason(mc->recv, table);
        for (const auto& a : mc->args)
            if (!is_value(a)) return stuck_reason(a, table);
        const auto* lit = std::get_if<StructLit>(&mc->recv->node);
        if (!lit) return "method call on non-struct value: " + print_expr(e);
        const auto* named = as_named(lit->type);
        const MethodDecl* md = named ? table.method(named->name, mc->method) : nullptr;
        if (!md) return "no method " + mc->method.str() + " for " + print_type(lit->type);
        return "arity mismatch calling " + mc->method.str() + " on " + print_type(lit->type);
    } else if (const auto* b = std::get_if<BinOp>(&e->node)) {
        if (!is_value(b->lhs)) return stuck_reason(b->lhs, table);
        if (!is_value(b->rhs)) return stuck_reason(b->rhs, table);
        return "bad operands for operator: " + print_expr(e);
    } else if (const auto* bi = std::get_if<Builtin>(&e->node)) {
        if (!is_value(bi->arg)) return stuck_reason(bi->arg, table);
        return "bad operand for intToString: " + print_expr(e);
    } else if (std::holds_alternative<VarE>(e->node)) {
        return "unbound variable " + print_expr(e);
    }
    return "irreducible expression: " + print_expr(e);
}

using TraceFn = std::function<void(std::uint64_t, const ExprPtr&)>;

// Iterates the reduction relation on the main expression. One step per
// fg-field/fg-call/delta application; context wrapping is not counted.
inline Outcome<ExprPtr> eval_source(const Program& p, std::uint64_t max_steps = kDefaultMaxSteps,
                                    const TraceFn& trace = nullptr) {
    DeclTable table(p);
    ExprPtr e = p.main;
    for (std::uint64_t n = 0; n < max_steps; ++n) {
        if (is_value(e)) return Outcome<ExprPtr>::make_value(e, n);
        auto next = step(e, table);
        if (!next) return Outcome<ExprPtr>::make_stuck(stuck_reason(e, table), n);
        e = *next;
        if (trace) trace(n + 1, e);
    }
    if (is_value(e)) return Outcome<ExprPtr>::make_value(e, max_steps);
    return Outcome<ExprPtr>::make_step_limit(max_steps);
}

} // namespace fgg
