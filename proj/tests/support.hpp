#pragma once

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "fgg/diff.hpp"
#include "fgg/parser.hpp"
#include "fgg/printer.hpp"
#include "fgg/source_eval.hpp"
#include "fgg/tl_eval.hpp"
#include "fgg/tl_text.hpp"
#include "fgg/translate.hpp"

namespace testsup {

inline std::string repo_path(const std::string& rel) { return std::string(FGG_SOURCE_DIR) + "/" + rel; }

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline fgg::Program load_corpus(const std::string& rel) {
    return fgg::parse_program(read_file(repo_path("corpus/" + rel)));
}

// Positive corpus programs that evaluate to a value or hit the budget.
inline const std::vector<std::string>& positive_corpus() {
    static std::vector<std::string> files = {
        "box_eq.fgg",        "format_pretty.fgg",  "format_main.fgg", "pair_format.fgg",
        "format_sep.fgg",    "fpair_factory.fgg",  "nested_generic.fgg", "diverge.fgg",
        "base_ops.fgg",      "struct_tree.fgg",    "iface_field.fgg", "generic_self_call.fgg"};
    return files;
}

inline const std::vector<std::pair<std::string, fgg::Code>>& negative_corpus() {
    static std::vector<std::pair<std::string, fgg::Code>> files = {
        {"neg/dup_struct.fgg", fgg::Code::DuplicateStruct},
        {"neg/dup_field.fgg", fgg::Code::DuplicateField},
        {"neg/dup_receiver.fgg", fgg::Code::DuplicateReceiver},
        {"neg/bound_violation.fgg", fgg::Code::BoundViolation},
        {"neg/recv_not_covariant.fgg", fgg::Code::ReceiverBoundsNotCovariant},
    };
    return files;
}

// ---------------------------------------------------------------------------
// Independent enumeration of grammar-permitted redex positions. Used as the
// oracle for the unique-decomposition determinism properties: it walks every
// context position the evaluation-context grammar allows and records each
// directly reducible subterm found there.

inline void enum_source_redexes(const fgg::ExprPtr& e, const fgg::DeclTable& table,
                                std::vector<fgg::ExprPtr>& out) {
    using namespace fgg;
    if (is_value(e)) return;
    if (directly_reducible(e, table)) out.push_back(e);
    if (const auto* s = std::get_if<StructLit>(&e->node)) {
        for (std::size_t i = 0; i < s->args.size(); ++i) {
            bool left_values = true;
            for (std::size_t k = 0; k < i; ++k)
                if (!is_value(s->args[k])) left_values = false;
            if (left_values) enum_source_redexes(s->args[i], table, out);
        }
    } else if (const auto* fa = std::get_if<FieldAccess>(&e->node)) {
        enum_source_redexes(fa->recv, table, out);
    } else if (const auto* mc = std::get_if<MethodCall>(&e->node)) {
        enum_source_redexes(mc->recv, table, out);
        if (is_value(mc->recv)) {
            for (std::size_t i = 0; i < mc->args.size(); ++i) {
                bool left_values = true;
                for (std::size_t k = 0; k < i; ++k)
                    if (!is_value(mc->args[k])) left_values = false;
                if (left_values) enum_source_redexes(mc->args[i], table, out);
            }
        }
    } else if (const auto* b = std::get_if<BinOp>(&e->node)) {
        enum_source_redexes(b->lhs, table, out);
        if (is_value(b->lhs)) enum_source_redexes(b->rhs, table, out);
    } else if (const auto* bi = std::get_if<Builtin>(&e->node)) {
        enum_source_redexes(bi->arg, table, out);
    }
}

inline void enum_tl_redexes(const fgg::TLPtr& e, const fgg::MethodSubst& mu,
                            std::vector<fgg::TLPtr>& out) {
    using namespace fgg;
    if (is_tl_value(e)) return;
    if (tl_directly_reducible(e, mu)) out.push_back(e);
    if (const auto* app = std::get_if<TLApp>(&e->node)) {
        enum_tl_redexes(app->fn, mu, out);
        if (is_tl_value(app->fn)) enum_tl_redexes(app->arg, mu, out);
    } else if (const auto* c = std::get_if<TLCase>(&e->node)) {
        enum_tl_redexes(c->scrutinee, mu, out);
    } else if (const auto* p = std::get_if<TLPrim>(&e->node)) {
        for (std::size_t i = 0; i < p->args.size(); ++i) {
            bool left_values = true;
            for (std::size_t k = 0; k < i; ++k)
                if (!is_tl_value(p->args[k])) left_values = false;
            if (left_values) enum_tl_redexes(p->args[i], mu, out);
        }
    }
}

// ---------------------------------------------------------------------------
// Random term generators (hand-rolled; seeded and reproducible).

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    std::uint64_t below(std::uint64_t n) { return gen() % n; }
    bool chance(int pct) { return below(100) < static_cast<std::uint64_t>(pct); }
};

// Fixture declarations shared by the generators.
inline const fgg::Program& gen_fixture() {
    static fgg::Program p = fgg::parse_program(R"(
type Any interface {}
type Num struct { val int }
type Box[a Any] struct { content a }
type Eq[a Any] interface { eq(that a) bool }
type Leaf struct { n int }
type Node struct { l Leaf; r Leaf }
func (this Num) eq(that Num) bool { return this.val == that.val }
func (this Box[a Eq[a]]) eq(that Box[a]) bool { return this.content.eq(that.content) }
func (this Node) sum() int { return this.l.n + this.r.n }
func main() { _ = 0 }
)");
    return p;
}

// Random source expressions over the fixture: a mix of values, reducible
// terms and deliberately stuck ones (open variables, missing fields).
inline fgg::ExprPtr gen_source_expr(Rng& rng, int depth) {
    using namespace fgg;
    if (depth <= 0) {
        switch (rng.below(4)) {
            case 0: return expr_int(static_cast<std::int64_t>(rng.below(5)));
            case 1: return expr_bool(rng.below(2) == 0);
            case 2: return expr_struct(ty_named(Name::of("Num")), {expr_int(static_cast<std::int64_t>(rng.below(5)))});
            default: return expr_var(Name::of("free"));
        }
    }
    switch (rng.below(10)) {
        case 0:
            return expr_struct(ty_named(Name::of("Num")), {gen_source_expr(rng, depth - 1)});
        case 1:
            return expr_struct(ty_named(Name::of("Box"), {ty_named(Name::of("Num"))}),
                               {gen_source_expr(rng, depth - 1)});
        case 2:
            return expr_struct(ty_named(Name::of("Node")),
                               {gen_source_expr(rng, depth - 1), gen_source_expr(rng, depth - 1)});
        case 3:
            return expr_field(gen_source_expr(rng, depth - 1), Name::of(rng.chance(70) ? "val" : "bogus"));
        case 4:
            return expr_field(gen_source_expr(rng, depth - 1), Name::of("content"));
        case 5:
            return expr_call(gen_source_expr(rng, depth - 1), Name::of("eq"), {},
                             {gen_source_expr(rng, depth - 1)});
        case 6:
            return expr_call(gen_source_expr(rng, depth - 1), Name::of("sum"), {}, {});
        case 7:
            return expr_binop(rng.chance(50) ? BinOpKind::EqInt : BinOpKind::AddInt,
                              gen_source_expr(rng, depth - 1), gen_source_expr(rng, depth - 1));
        case 8:
            return expr_builtin(BuiltinKind::IntToString, gen_source_expr(rng, depth - 1));
        default:
            return gen_source_expr(rng, 0);
    }
}

// Random TL terms over a small variable pool; `loop` is bound in the
// accompanying method substitution.
inline fgg::TLPtr gen_tl_expr(Rng& rng, int depth) {
    using namespace fgg;
    static const Name x = Name::of("x"), y = Name::of("y"), loop = Name::of("loop"),
                      freev = Name::of("freevar");
    if (depth <= 0) {
        switch (rng.below(5)) {
            case 0: return tl_int(static_cast<std::int64_t>(rng.below(5)));
            case 1: return tl_ctor(tuple_ctor(0));
            case 2: return tl_var(rng.chance(50) ? x : freev);
            case 3: return tl_var(loop);
            default: return tl_lam(x, tl_var(x));
        }
    }
    switch (rng.below(8)) {
        case 0: return tl_app(gen_tl_expr(rng, depth - 1), gen_tl_expr(rng, depth - 1));
        case 1: return tl_lam(rng.chance(50) ? x : y, gen_tl_expr(rng, depth - 1));
        case 2: {
            std::size_t arity = rng.below(3);
            TLPtr acc = tl_ctor(tuple_ctor(arity));
            for (std::size_t i = 0; i < arity; ++i) acc = tl_app(acc, gen_tl_expr(rng, depth - 1));
            return acc;
        }
        case 3: {
            std::size_t arity = rng.below(3);
            std::vector<Name> vars;
            for (std::size_t i = 0; i < arity; ++i) vars.push_back(i == 0 ? x : y);
            std::vector<TLClause> cls{TLClause{tuple_ctor(arity), vars, gen_tl_expr(rng, depth - 1)}};
            if (rng.chance(30)) cls.push_back(TLClause{tuple_ctor(arity + 1), {}, tl_int(0)});
            return tl_case(gen_tl_expr(rng, depth - 1), std::move(cls));
        }
        case 4:
            return tl_prim(TLPrimOp::AddInt, {gen_tl_expr(rng, depth - 1), gen_tl_expr(rng, depth - 1)});
        case 5:
            return tl_prim(TLPrimOp::EqInt, {gen_tl_expr(rng, depth - 1), gen_tl_expr(rng, depth - 1)});
        default:
            return gen_tl_expr(rng, 0);
    }
}

inline fgg::MethodSubst gen_tl_subst() {
    using namespace fgg;
    MethodSubst mu;
    mu.emplace(Name::of("loop"), tl_lam(Name::of("z"), tl_app(tl_var(Name::of("loop")), tl_var(Name::of("z")))));
    return mu;
}

} // namespace testsup
