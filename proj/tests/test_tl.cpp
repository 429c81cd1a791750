#include "support.hpp"

using namespace fgg;

namespace {

Name n(const char* s) { return Name::of(s); }

TLPtr tuple_of(std::vector<TLPtr> elems) {
    TLPtr acc = tl_ctor(tuple_ctor(elems.size()));
    for (auto& e : elems) acc = tl_app(acc, std::move(e));
    return acc;
}

} // namespace

TEST_CASE("desugar: pattern lambda over a flat tuple") {
    // \<y1,y2,y3>.E  ==  \x. case x of Tup3 y1 y2 y3 -> E
    STLPtr sug = s_patlam(spat_tuple({spat_var(n("y1")), spat_var(n("y2")), spat_var(n("y3"))}),
                          s_var(n("y2")));
    TLPtr got = desugar(sug);
    TLPtr want = tl_lam(n("x"), tl_case(tl_var(n("x")), {TLClause{tuple_ctor(3),
                                                                  {n("y1"), n("y2"), n("y3")},
                                                                  tl_var(n("y2"))}}));
    CHECK(tl_alpha_equal(got, want));
}

TEST_CASE("desugar: empty tuple and nested patterns") {
    CHECK(tl_equal(desugar(s_tuple({})), tl_ctor(tuple_ctor(0))));

    // case E of <y,<x1>> -> x1 expands to cascaded cases on Tup2, then Tup1
    STLPtr sug = s_case(s_tuple({s_lit(TLLitVal{std::int64_t{1}}), s_tuple({s_lit(TLLitVal{std::int64_t{2}})})}),
                        {SCaseClause{spat_tuple({spat_var(n("y")), spat_tuple({spat_var(n("x1"))})}),
                                     s_var(n("x1"))}});
    TLPtr got = desugar(sug);
    const auto* outer = std::get_if<TLCase>(&got->node);
    REQUIRE(outer);
    REQUIRE(outer->clauses.size() == 1);
    CHECK(outer->clauses[0].ctor == tuple_ctor(2));
    const auto* inner = std::get_if<TLCase>(&outer->clauses[0].body->node);
    REQUIRE(inner);
    CHECK(inner->clauses[0].ctor == tuple_ctor(1));
    auto out = eval_tl(TLProgram{{}, got});
    REQUIRE(out.is_value());
    CHECK(tl_equal(out.value, tl_int(2)));
}

TEST_CASE("desugar: tuple arity limit") {
    std::vector<STLPtr> big(9, s_lit(TLLitVal{std::int64_t{0}}));
    CHECK_THROWS_MATCHES(desugar(s_tuple(big)), TypeError,
                         Catch::Matchers::Predicate<TypeError>([](const TypeError& e) {
                             return e.diag.code == Code::TupleArityExceeded;
                         }));
}

TEST_CASE("is_tl_value") {
    CHECK(is_tl_value(tl_lam(n("x"), tl_var(n("x")))));
    CHECK_FALSE(is_tl_value(tl_app(tl_lam(n("x"), tl_var(n("x"))), tl_ctor(n("K")))));
    CHECK(is_tl_value(tuple_of({tl_int(1), tl_int(2)})));
    CHECK_FALSE(is_tl_value(tl_var(n("x"))));
}

TEST_CASE("step_tl: beta, case, method substitution") {
    MethodSubst mu;
    auto next = step_tl(mu, tl_app(tl_lam(n("x"), tl_var(n("x"))), tl_ctor(n("K"))));
    REQUIRE(next);
    CHECK(tl_equal(*next, tl_ctor(n("K"))));

    // case Tup1 <1> of Tup1 x -> x reduces to the field value
    TLPtr scrut = tuple_of({tuple_of({tl_int(1)})});
    next = step_tl(mu, tl_case(scrut, {TLClause{tuple_ctor(1), {n("x")}, tl_var(n("x"))}}));
    REQUIRE(next);
    CHECK(tl_equal(*next, tuple_of({tl_int(1)})));

    mu.emplace(n("eq.Num"), tl_lam(n("z"), tl_var(n("z"))));
    next = step_tl(mu, tl_var(n("eq.Num")));
    REQUIRE(next);
    CHECK(tl_equal(*next, tl_lam(n("z"), tl_var(n("z")))));
}

TEST_CASE("eval_tl outcomes") {
    TLProgram id_app{{}, tl_app(tl_lam(n("x"), tl_var(n("x"))), tl_ctor(tuple_ctor(0)))};
    auto out = eval_tl(id_app);
    REQUIRE(out.is_value());
    CHECK(out.steps == 1);
    CHECK(tl_equal(out.value, tl_ctor(tuple_ctor(0))));

    // recursion through the method substitution diverges
    TLProgram loop;
    loop.bindings.emplace_back(n("f"), tl_lam(n("x"), tl_app(tl_var(n("f")), tl_var(n("x")))));
    loop.main = tl_app(tl_var(n("f")), tl_ctor(tuple_ctor(0)));
    out = eval_tl(loop, 500);
    CHECK(out.is_step_limit());

    TLProgram stuck{{}, tl_app(tl_int(1), tl_int(2))};
    out = eval_tl(stuck, 100);
    CHECK(out.is_stuck());
}

TEST_CASE("top-level bindings may be mutually recursive") {
    // even/odd on Peano-style numbers Z, S n
    Name even = n("even"), odd = n("odd"), x = n("x");
    auto clause = [&](Name other, bool base) {
        return tl_lam(x, tl_case(tl_var(x), {TLClause{n("Z"), {}, tl_lit(TLLitVal{base})},
                                             TLClause{n("S"), {n("p")}, tl_app(tl_var(other), tl_var(n("p")))}}));
    };
    TLProgram p;
    p.bindings.emplace_back(even, clause(odd, true));
    p.bindings.emplace_back(odd, clause(even, false));
    TLPtr succ = tl_ctor(n("S"));
    TLPtr three = tl_app(succ, tl_app(succ, tl_app(succ, tl_ctor(n("Z")))));
    p.main = tl_app(tl_var(even), three);
    auto out = eval_tl(p);
    REQUIRE(out.is_value());
    CHECK(tl_equal(out.value, tl_bool(false)));
}

TEST_CASE("apply_subst_tl is capture-avoiding") {
    // <x := K> x  ==  K
    CHECK(tl_equal(apply_subst_tl(n("x"), tl_ctor(n("K")), tl_var(n("x"))), tl_ctor(n("K"))));
    // <x := K> \x.x  ==  \x.x (shadowing)
    TLPtr lam = tl_lam(n("x"), tl_var(n("x")));
    CHECK(tl_equal(apply_subst_tl(n("x"), tl_ctor(n("K")), lam), lam));
    // <x := \z.y> \y.x renames the binder before substituting
    TLPtr val = tl_lam(n("z"), tl_var(n("y")));
    TLPtr got = apply_subst_tl(n("x"), val, tl_lam(n("y"), tl_var(n("x"))));
    const auto* g = std::get_if<TLLam>(&got->node);
    REQUIRE(g);
    CHECK(g->var != n("y"));
    CHECK(tl_alpha_equal(got, tl_lam(n("w"), val)));
    NameSet fv = tl_free_vars(got);
    CHECK(fv == NameSet{n("y")});
}

TEST_CASE("property: TL values are fixpoints and decomposition is unique") {
    MethodSubst mu = testsup::gen_tl_subst();
    testsup::Rng rng(77);
    for (int i = 0; i < 300; ++i) {
        TLPtr e = testsup::gen_tl_expr(rng, 4);
        for (int hop = 0; hop < 10; ++hop) {
            std::vector<TLPtr> redexes;
            testsup::enum_tl_redexes(e, mu, redexes);
            CHECK(redexes.size() <= 1);
            auto next = step_tl(mu, e);
            if (is_tl_value(e)) {
                CHECK_FALSE(next.has_value());
                break;
            }
            CHECK(next.has_value() == (redexes.size() == 1));
            if (!next) break;
            e = *next;
        }
    }
}

namespace {

// Independent oracle for desugar adequacy: a direct structural interpreter
// for the sugared language, with native tuples and pattern matching. Only
// handles the closed first-order terms the generator produces.
using Binding = std::pair<Name, STLPtr>;

bool s_is_value(const STLPtr& e) {
    if (std::holds_alternative<SLit>(e->node)) return true;
    if (const auto* t = std::get_if<STuple>(&e->node)) {
        for (const auto& el : t->elems)
            if (!s_is_value(el)) return false;
        return true;
    }
    return false;
}

bool s_match(const SPat& pat, const STLPtr& value, std::vector<Binding>& out) {
    if (const auto* v = std::get_if<Name>(&pat.node)) {
        out.emplace_back(*v, value);
        return true;
    }
    const auto& pc = std::get<SPatCtor>(pat.node);
    const auto* tup = std::get_if<STuple>(&value->node);
    if (!tup || pc.ctor != tuple_ctor(tup->elems.size()) || pc.args.size() != tup->elems.size())
        return false;
    for (std::size_t i = 0; i < pc.args.size(); ++i)
        if (!s_match(pc.args[i], tup->elems[i], out)) return false;
    return true;
}

STLPtr s_lookup(const std::vector<Binding>& env, Name x) {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
        if (it->first == x) return it->second;
    return nullptr;
}

STLPtr s_eval(const STLPtr& e, std::vector<Binding> env) {
    if (const auto* v = std::get_if<SVar>(&e->node)) return s_lookup(env, v->name);
    if (std::holds_alternative<SLit>(e->node)) return e;
    if (const auto* t = std::get_if<STuple>(&e->node)) {
        std::vector<STLPtr> elems;
        for (const auto& el : t->elems) {
            STLPtr v = s_eval(el, env);
            if (!v) return nullptr;
            elems.push_back(v);
        }
        return s_tuple(std::move(elems));
    }
    if (const auto* app = std::get_if<SApp>(&e->node)) {
        const auto* pl = std::get_if<SPatLam>(&app->fn->node);
        if (!pl) return nullptr;
        STLPtr arg = s_eval(app->arg, env);
        if (!arg) return nullptr;
        std::vector<Binding> inner = env;
        if (!s_match(pl->pat, arg, inner)) return nullptr;
        return s_eval(pl->body, std::move(inner));
    }
    if (const auto* c = std::get_if<SCase>(&e->node)) {
        STLPtr scrut = s_eval(c->scrutinee, env);
        if (!scrut) return nullptr;
        for (const auto& cl : c->clauses) {
            std::vector<Binding> inner = env;
            if (s_match(cl.pat, scrut, inner)) return s_eval(cl.body, std::move(inner));
        }
        return nullptr;
    }
    return nullptr;
}

// Random closed value made of literals and tuples.
STLPtr gen_s_value(testsup::Rng& rng, int depth) {
    if (depth <= 0 || rng.chance(40))
        return s_lit(TLLitVal{static_cast<std::int64_t>(rng.below(10))});
    std::size_t k = rng.below(3);
    std::vector<STLPtr> elems;
    for (std::size_t i = 0; i < k; ++i) elems.push_back(gen_s_value(rng, depth - 1));
    return s_tuple(std::move(elems));
}

// A pattern guaranteed to match the given value, binding some leaves.
SPat gen_s_pattern(testsup::Rng& rng, const STLPtr& value, std::vector<Name>& bound, int next_var) {
    if (rng.chance(35)) {
        Name v = Name::of("v" + std::to_string(next_var * 131 + static_cast<int>(rng.below(97))));
        bound.push_back(v);
        return spat_var(v);
    }
    if (const auto* t = std::get_if<STuple>(&value->node)) {
        std::vector<SPat> subs;
        for (std::size_t i = 0; i < t->elems.size(); ++i)
            subs.push_back(gen_s_pattern(rng, t->elems[i], bound, next_var * 7 + static_cast<int>(i) + 1));
        return spat_tuple(std::move(subs));
    }
    Name v = Name::of("w" + std::to_string(next_var));
    bound.push_back(v);
    return spat_var(v);
}

} // namespace

TEST_CASE("property: desugared sugared terms agree with a direct interpreter") {
    testsup::Rng rng(99);
    for (int i = 0; i < 300; ++i) {
        STLPtr value = gen_s_value(rng, 3);
        std::vector<Name> bound;
        SPat pat = gen_s_pattern(rng, value, bound, 1);
        STLPtr body;
        if (bound.empty() || rng.chance(20)) {
            body = s_lit(TLLitVal{std::int64_t{5}});
        } else if (rng.chance(50)) {
            body = s_var(bound[rng.below(bound.size())]);
        } else {
            std::vector<STLPtr> elems;
            for (std::size_t k = 0; k < std::min<std::size_t>(bound.size(), 3); ++k)
                elems.push_back(s_var(bound[k]));
            body = s_tuple(std::move(elems));
        }
        // case clauses require a constructor pattern at the top
        bool can_case = std::holds_alternative<SPatCtor>(pat.node);
        STLPtr term = (!can_case || rng.chance(50)) ? s_app(s_patlam(pat, body), value)
                                                    : s_case(value, {SCaseClause{pat, body}});

        STLPtr oracle = s_eval(term, {});
        REQUIRE(oracle != nullptr);
        REQUIRE(s_is_value(oracle));

        auto out = eval_tl(TLProgram{{}, desugar(term)}, 10'000);
        REQUIRE(out.is_value());
        CHECK(tl_equal(out.value, desugar(oracle)));
    }
}

TEST_CASE("substitution respects case-clause binders") {
    // <x := K> leaves a clause that rebinds x untouched
    TLPtr c = tl_case(tl_var(n("y")), {TLClause{n("C"), {n("x")}, tl_var(n("x"))}});
    TLPtr got = apply_subst_tl(n("x"), tl_ctor(n("K")), c);
    CHECK(tl_equal(got, c));

    // a clause binder capturing a substituted free variable is renamed
    TLPtr c2 = tl_case(tl_var(n("y")), {TLClause{n("C"), {n("w")}, tl_var(n("x"))}});
    TLPtr got2 = apply_subst_tl(n("x"), tl_lam(n("z"), tl_var(n("w"))), c2);
    const auto* k = std::get_if<TLCase>(&got2->node);
    REQUIRE(k);
    CHECK(k->clauses[0].vars[0] != n("w"));
    CHECK(tl_free_vars(got2) == NameSet{n("y"), n("w")});
}

TEST_CASE("hand-written target programs parse and run") {
    TLProgram p = parse_tl_program("(let id (lam x x))\n(main (app id (lit 42)))\n");
    auto out = eval_tl(p);
    REQUIRE(out.is_value());
    CHECK(tl_equal(out.value, tl_int(42)));

    CHECK_THROWS_MATCHES(parse_tl_program("(main (case (ctor A) ((K x) x) ((K y) y)))\n"), TypeError,
                         Catch::Matchers::Predicate<TypeError>([](const TypeError& e) {
                             return e.diag.code == Code::SyntaxError;
                         }));

    // a binding whose right-hand side is not a value is rejected
    TLProgram bad;
    bad.bindings.emplace_back(n("b"), tl_app(tl_lam(n("x"), tl_var(n("x"))), tl_int(1)));
    bad.main = tl_int(0);
    CHECK_THROWS_MATCHES(eval_tl(bad), TypeError,
                         Catch::Matchers::Predicate<TypeError>([](const TypeError& e) {
                             return e.diag.code == Code::ShapeError;
                         }));
}

TEST_CASE("serialization round-trips") {
    Program p = testsup::load_corpus("box_eq.fgg");
    TranslateResult tr = translate_program(p);
    REQUIRE(tr.ok());
    std::string text = print_tl_program(tr.translation->program);
    TLProgram parsed = parse_tl_program(text);
    REQUIRE(parsed.bindings.size() == tr.translation->program.bindings.size());
    for (std::size_t i = 0; i < parsed.bindings.size(); ++i) {
        CHECK(parsed.bindings[i].first == tr.translation->program.bindings[i].first);
        CHECK(tl_equal(parsed.bindings[i].second, tr.translation->program.bindings[i].second));
    }
    CHECK(tl_equal(parsed.main, tr.translation->program.main));
    CHECK(print_tl_program(parsed) == text); // bit-exact reprint
}

TEST_CASE("property: random terms survive print/parse round-trips") {
    testsup::Rng rng(555);
    for (int i = 0; i < 200; ++i) {
        TLPtr e = testsup::gen_tl_expr(rng, 4);
        std::string text = print_tl(e);
        TLPtr again = parse_tl_expr(text);
        CHECK(tl_equal(e, again));
        CHECK(print_tl(again) == text);
    }
}
