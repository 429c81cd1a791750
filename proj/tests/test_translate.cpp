#include "support.hpp"

using namespace fgg;

namespace {

Name n(const char* s) { return Name::of(s); }

TypePtr t_num() { return ty_named(n("Num")); }
TypePtr t_eq(TypePtr a) { return ty_named(n("Eq"), {std::move(a)}); }

// Desugar with a private fresh counter so hand-built expectations never
// collide with translator-produced names.
TLPtr ds(const STLPtr& e) { return desugar(e); }

Code code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const TypeError& err) {
        return err.diag.code;
    }
    FAIL("expected a TypeError");
    return Code::SyntaxError;
}

struct Fix {
    Program prog;
    DeclTable table;
    Translator tr;
    explicit Fix(const std::string& src, Strategy strat = {}, Sabotage sab = Sabotage::None)
        : prog(parse_program(src)), table(prog), tr(table, strat, sab) {}
};

const char* kBoxEq = R"(
type Any interface {}
type Num struct { val int }
type Box[a Any] struct { content a }
type Eq[a Any] interface { eq(that a) bool }
func (this Num) eq(that Num) bool { return this.val == that.val }
func (this Box[a Eq[a]]) eq(that Box[a]) bool { return this.content.eq(that.content) }
func main() { _ = Box[Num]{Num{1}}.eq(Box[Num]{Num{2}}) }
)";

const char* kFormatPretty = R"(
type Format interface { format() string }
type Pretty interface { format() string; pretty() string }
type Num struct { val int }
func (this Num) format() string { return intToString(this.val) }
func (this Num) pretty() string { return "*" ++ intToString(this.val) ++ "*" }
func main() { _ = Num{1} }
)";

// V3 = \x.(x, (\(y1,y2,y3). eq.Num ((), y1, y2, y3)))
STLPtr expected_v3() {
    STLPtr entry = s_patlam(spat_tuple({spat_var(n("y1")), spat_var(n("y2")), spat_var(n("y3"))}),
                            s_app(s_var(n("eq.Num")),
                                  s_tuple({s_tuple({}), s_var(n("y1")), s_var(n("y2")), s_var(n("y3"))})));
    return s_lam(n("x"), s_tuple({s_var(n("x")), s_tuple({entry})}));
}

// V2 = \(y,(x1)).(y,(x1))
STLPtr expected_v2() {
    return s_patlam(spat_tuple({spat_var(n("y")), spat_tuple({spat_var(n("x1"))})}),
                    s_tuple({s_var(n("y")), s_tuple({s_var(n("x1"))})}));
}

// V1 = \y. V2 (xa y), with xa the coercion parameter for the bound tyvar
STLPtr expected_v1() {
    return s_lam(n("y"), s_app(expected_v2(), s_app(s_var(n("$a")), s_var(n("y")))));
}

} // namespace

TEST_CASE("wf_type accepts and rejects per the rules") {
    Fix f(kBoxEq);
    f.tr.wf_type(TypeEnv{}, t_num());

    TypeEnv env;
    env.bind(n("a"), t_eq(ty_var(n("a"))));
    f.tr.wf_type(env, ty_var(n("a"))); // ok-tyvar

    CHECK(code_of([&] { f.tr.wf_type(TypeEnv{}, ty_var(n("zz"))); }) == Code::UnboundTypeVar);
    CHECK(code_of([&] { f.tr.wf_type(TypeEnv{}, ty_named(n("Nope"))); }) == Code::UnknownTypeName);
    CHECK(code_of([&] { f.tr.wf_type(TypeEnv{}, ty_named(n("Box"), {t_num(), t_num()})); }) ==
          Code::ArityMismatch);

    // Box's wf succeeds exactly when the argument's method set covers the
    // instantiated bound; cross-check by brute force on the method sets.
    Fix g(R"(
type Any interface {}
type Eq[a Any] interface { eq(that a) bool }
type EqBox[a Eq[a]] struct { content a }
type Plain struct {}
type Num struct { val int }
func (this Num) eq(that Num) bool { return true }
func main() { _ = 1 }
)");
    g.tr.wf_type(TypeEnv{}, ty_named(n("EqBox"), {t_num()}));
    CHECK(code_of([&] { g.tr.wf_type(TypeEnv{}, ty_named(n("EqBox"), {ty_named(n("Plain"))})); }) ==
          Code::BoundViolation);
    CHECK(g.tr.methods_struct(TypeEnv{}, ty_named(n("Plain"))).empty());
    CHECK(g.tr.method_specs(t_eq(ty_named(n("Plain")))).size() == 1);
}

TEST_CASE("wf_typarams handles F-bounds, duplicates and shadowing") {
    Fix f(kBoxEq);
    f.tr.wf_typarams(TypeEnv{}, {TypeParam{n("a"), t_eq(ty_var(n("a")))}}); // F-bound ok

    CHECK(code_of([&] {
              f.tr.wf_typarams(TypeEnv{}, {TypeParam{n("a"), ty_named(n("Any"))},
                                           TypeParam{n("a"), ty_named(n("Any"))}});
          }) == Code::DuplicateTyVar);

    TypeEnv env;
    env.bind(n("a"), ty_named(n("Any")));
    CHECK(code_of([&] { f.tr.wf_typarams(env, {TypeParam{n("a"), ty_named(n("Any"))}}); }) ==
          Code::ShadowedTyVar);

    CHECK(code_of([&] { f.tr.wf_typarams(TypeEnv{}, {TypeParam{n("a"), t_num()}}); }) ==
          Code::NotAnInterfaceBound);
}

TEST_CASE("wf_msig") {
    Fix f(kBoxEq);
    f.tr.wf_msig(TypeEnv{}, MethodSig{n("eq"), {}, {Param{n("that"), t_num()}}, ty_base(BaseKind::Bool)});

    CHECK(code_of([&] {
              f.tr.wf_msig(TypeEnv{}, MethodSig{n("m"), {}, {Param{n("x"), t_num()}, Param{n("x"), t_num()}},
                                                t_num()});
          }) == Code::DuplicateParam);

    // method-local F-bound under a nonempty environment
    TypeEnv env;
    env.bind(n("a"), ty_named(n("Any")));
    f.tr.wf_msig(env, MethodSig{n("m"), {TypeParam{n("b"), t_eq(ty_var(n("b")))}},
                                {Param{n("x"), ty_var(n("b"))}}, ty_var(n("b"))});
}

TEST_CASE("wf_decl: receiver bound covariance") {
    // method bounds stronger than struct bounds: ok
    Fix ok(R"(
type Any interface {}
type Format interface { format() string }
type Num struct { val int }
func (this Num) format() string { return "" }
type Pair[a Any, b Any] struct { left a; right b }
func (this Pair[a Format, b Format]) format() string { return this.left.format() }
func main() { _ = 1 }
)");
    TranslateResult res = translate_program(ok.prog);
    CHECK(res.ok());

    // weaker method bounds: rejected with the covariance diagnostic
    Program bad = testsup::load_corpus("neg/recv_not_covariant.fgg");
    TranslateResult bad_res = translate_program(bad);
    REQUIRE_FALSE(bad_res.ok());
    CHECK(bad_res.diags.front().code == Code::ReceiverBoundsNotCovariant);
}

TEST_CASE("method_specs instantiates in declaration order") {
    Fix f(kFormatPretty);
    auto pretty = f.tr.method_specs(ty_named(n("Pretty")));
    REQUIRE(pretty.size() == 2);
    CHECK(pretty[0].name == n("format"));
    CHECK(pretty[1].name == n("pretty"));

    Fix g(kBoxEq);
    auto eq_num = g.tr.method_specs(t_eq(t_num()));
    REQUIRE(eq_num.size() == 1);
    CHECK(eq_num[0].name == n("eq"));
    REQUIRE(eq_num[0].params.size() == 1);
    CHECK(type_equal(eq_num[0].params[0].type, t_num()));

    CHECK(g.tr.method_specs(ty_named(n("Any"))).empty());
    CHECK(code_of([&] { g.tr.method_specs(ty_named(n("Nope"))); }) == Code::UnknownInterface);
}

TEST_CASE("methods_struct substitutes receiver bounds and excludes unsatisfiable ones") {
    Fix f(kBoxEq);
    auto num = f.tr.methods_struct(TypeEnv{}, t_num());
    REQUIRE(num.size() == 1);
    CHECK(num[0].sig.name == n("eq"));
    CHECK(type_equal(num[0].sig.params[0].type, t_num()));
    CHECK(tl_alpha_equal(ds(num[0].coercions), ds(s_tuple({})))); // empty coercion tuple

    auto box_num = f.tr.methods_struct(TypeEnv{}, ty_named(n("Box"), {t_num()}));
    REQUIRE(box_num.size() == 1);
    CHECK(type_equal(box_num[0].sig.params[0].type, ty_named(n("Box"), {t_num()})));
    CHECK(tl_alpha_equal(ds(box_num[0].coercions), ds(s_tuple({expected_v3()}))));

    // Box instantiated with a type lacking eq: the method is excluded
    Fix g(R"(
type Any interface {}
type Num struct { val int }
type Box[a Any] struct { content a }
type Eq[a Any] interface { eq(that a) bool }
type Plain struct {}
func (this Num) eq(that Num) bool { return true }
func (this Box[a Eq[a]]) eq(that Box[a]) bool { return true }
func main() { _ = 1 }
)");
    CHECK(g.tr.methods_struct(TypeEnv{}, ty_named(n("Box"), {ty_named(n("Plain"))})).empty());
}

TEST_CASE("instantiate_checked builds the substitution and coercion tuple") {
    Fix f(kBoxEq);
    auto bc = f.tr.instantiate_checked(TypeEnv{}, {TypeParam{n("a"), t_eq(ty_var(n("a")))}}, {t_num()});
    REQUIRE(bc.subst.lookup(n("a")));
    CHECK(type_equal(*bc.subst.lookup(n("a")), t_num()));
    CHECK(tl_alpha_equal(ds(bc.coercions), ds(s_tuple({expected_v3()}))));

    auto empty = f.tr.instantiate_checked(TypeEnv{}, {}, {});
    CHECK(empty.subst.empty());
    CHECK(tl_alpha_equal(ds(empty.coercions), ds(s_tuple({}))));

    // empty-dictionary coercion for a trivial bound
    auto any = f.tr.instantiate_checked(TypeEnv{}, {TypeParam{n("a"), ty_named(n("Any"))}}, {t_num()});
    STLPtr empty_dict = s_lam(n("x"), s_tuple({s_var(n("x")), s_tuple({})}));
    CHECK(tl_alpha_equal(ds(any.coercions), ds(s_tuple({empty_dict}))));

    CHECK(code_of([&] {
              Fix g(kBoxEq);
              g.tr.instantiate_checked(TypeEnv{}, {TypeParam{n("a"), t_eq(ty_var(n("a")))}},
                                       {ty_named(n("Any"))});
          }) == Code::BoundViolation);
}

TEST_CASE("subtype_coerce: struct to interface (V3)") {
    Fix f(kBoxEq);
    auto r = f.tr.subtype_coerce(TypeEnv{}, t_num(), t_eq(t_num()));
    REQUIRE(r.kind == CoerceResult::Kind::Coercion);
    CHECK(tl_alpha_equal(ds(r.value), ds(expected_v3())));
}

TEST_CASE("subtype_coerce: type variable composes with its coercion parameter (V1, V2)") {
    Fix f(kBoxEq);
    TypeEnv env;
    env.bind(n("a"), t_eq(ty_var(n("a"))));
    auto r = f.tr.subtype_coerce(env, ty_var(n("a")), t_eq(ty_var(n("a"))));
    REQUIRE(r.kind == CoerceResult::Kind::Coercion);
    CHECK(tl_alpha_equal(ds(r.value), ds(expected_v1())));
    // the only free names are the coercion parameter and method functions
    NameSet fv = s_free_vars(r.value);
    CHECK(fv == NameSet{n("$a")});
}

TEST_CASE("subtype_coerce: interface to interface permutes the dictionary") {
    Fix f(kFormatPretty);
    auto r = f.tr.subtype_coerce(TypeEnv{}, ty_named(n("Pretty")), ty_named(n("Format")));
    REQUIRE(r.kind == CoerceResult::Kind::Coercion);
    STLPtr want = s_patlam(spat_tuple({spat_var(n("y")), spat_tuple({spat_var(n("x1")), spat_var(n("x2"))})}),
                           s_tuple({s_var(n("y")), s_tuple({s_var(n("x1"))})}));
    CHECK(tl_alpha_equal(ds(r.value), ds(want)));

    // the reverse direction lacks a method and has no coercion
    CHECK(f.tr.subtype_coerce(TypeEnv{}, ty_named(n("Format")), ty_named(n("Pretty"))).kind ==
          CoerceResult::Kind::NotSubtype);
}

TEST_CASE("interface subtyping matches generic-method signatures up to binder names") {
    Fix f(R"(
type Format interface { format() string }
type S1 interface { m[x Format](a x) string }
type S2 interface { m[y Format](b y) string }
type Num struct { val int }
func (this Num) format() string { return "" }
func main() { _ = 1 }
)");
    auto r = f.tr.subtype_coerce(TypeEnv{}, ty_named(n("S1")), ty_named(n("S2")));
    CHECK(r.kind == CoerceResult::Kind::Coercion);
    // parameter types must still agree after pairing the binders
    Fix g(R"(
type Format interface { format() string }
type S1 interface { m[x Format](a x) string }
type S3 interface { m[y Format](b Format) string }
func main() { _ = 1 }
)");
    CHECK(g.tr.subtype_coerce(TypeEnv{}, ty_named(n("S1")), ty_named(n("S3"))).kind ==
          CoerceResult::Kind::NotSubtype);
}

TEST_CASE("pure-calculus mode rejects base forms statically") {
    Program p = parse_program("type Num struct { val int }\nfunc main() { _ = Num{1} }\n",
                              /*base_types=*/false);
    TranslateResult tr = translate_program(p);
    REQUIRE_FALSE(tr.ok());
    CHECK(tr.diags.front().code == Code::BaseDisabled);

    Program q = parse_program("type Plain struct {}\nfunc main() { _ = Plain{} }\n", false);
    CHECK(translate_program(q).ok());
}

TEST_CASE("subtype_coerce: reflexive non-interface cases are identity, others absent") {
    Fix f(kBoxEq);
    CHECK(f.tr.subtype_coerce(TypeEnv{}, t_num(), t_num()).kind == CoerceResult::Kind::Identity);
    CHECK(f.tr.subtype_coerce(TypeEnv{}, ty_base(BaseKind::Int), ty_base(BaseKind::Int)).kind ==
          CoerceResult::Kind::Identity);
    CHECK(f.tr.subtype_coerce(TypeEnv{}, t_num(), ty_named(n("Box"), {t_num()})).kind ==
          CoerceResult::Kind::NotSubtype);
    // a struct lacking the method set is not a subtype
    CHECK(f.tr.subtype_coerce(TypeEnv{}, ty_named(n("Box"), {t_num()}), t_eq(t_num())).kind ==
          CoerceResult::Kind::NotSubtype);
    // interface self-coercion is a real coercion, not identity
    CHECK(f.tr.subtype_coerce(TypeEnv{}, t_eq(t_num()), t_eq(t_num())).kind ==
          CoerceResult::Kind::Coercion);
}

TEST_CASE("identity interface coercions are observationally identity") {
    Fix f(kFormatPretty);
    auto r = f.tr.subtype_coerce(TypeEnv{}, ty_named(n("Pretty")), ty_named(n("Pretty")));
    REQUIRE(r.kind == CoerceResult::Kind::Coercion);
    // apply to a sample interface value <(1), (\x.x, \x.x)>
    TLPtr entry = tl_lam(n("z"), tl_var(n("z")));
    TLPtr dict = tl_app(tl_app(tl_ctor(tuple_ctor(2)), entry), entry);
    TLPtr strct = tl_app(tl_ctor(tuple_ctor(1)), tl_int(1));
    TLPtr alue = tl_app(tl_app(tl_ctor(tuple_ctor(2)), strct), dict);
    auto out = eval_tl(TLProgram{{}, tl_app(ds(r.value), alue)}, 1000);
    REQUIRE(out.is_value());
    CHECK(tl_equal(out.value, alue));
}

TEST_CASE("translate_expr: var, struct literal, subsumption at expected type") {
    Fix f(kBoxEq);
    ValueEnv venv;
    venv.bind(n("x"), t_num());
    auto [ty, tl] = f.tr.translate_expr(TypeEnv{}, venv, expr_var(n("x")), nullptr);
    CHECK(type_equal(ty, t_num()));
    CHECK(tl_alpha_equal(ds(tl), tl_var(n("x"))));

    auto [ty2, tl2] = f.tr.translate_expr(TypeEnv{}, ValueEnv{},
                                          expr_struct(t_num(), {expr_int(1)}), t_num());
    CHECK(type_equal(ty2, t_num()));
    CHECK(tl_equal(ds(tl2), ds(s_tuple({s_lit(TLLitVal{std::int64_t{1}})}))));

    CHECK(code_of([&] {
              Fix g(kBoxEq);
              g.tr.translate_expr(TypeEnv{}, ValueEnv{}, expr_var(n("zz")), nullptr);
          }) == Code::UnknownVar);
    CHECK(code_of([&] {
              Fix g(kBoxEq);
              g.tr.translate_expr(TypeEnv{}, ValueEnv{},
                                  expr_field(expr_struct(t_num(), {expr_int(1)}), n("zz")), nullptr);
          }) == Code::UnknownField);
    CHECK(code_of([&] {
              Fix g(kBoxEq);
              g.tr.translate_expr(TypeEnv{}, ValueEnv{}, expr_struct(t_num(), {expr_int(1)}),
                                  ty_named(n("Box"), {t_num()}));
          }) == Code::NoSubtypePath);
}

TEST_CASE("translate_expr: the body of eq for Box is E1") {
    Fix f(kBoxEq);
    TypeEnv env;
    env.bind(n("a"), t_eq(ty_var(n("a"))));
    ValueEnv venv;
    venv.bind(n("this"), ty_named(n("Box"), {ty_var(n("a"))}));
    venv.bind(n("that"), ty_named(n("Box"), {ty_var(n("a"))}));
    ExprPtr body = expr_call(expr_field(expr_var(n("this")), n("content")), n("eq"), {},
                             {expr_field(expr_var(n("that")), n("content"))});
    auto [ty, tl] = f.tr.translate_expr(env, venv, body, ty_base(BaseKind::Bool));
    CHECK(type_equal(ty, ty_base(BaseKind::Bool)));

    STLPtr e2 = s_case(s_var(n("this")), {SCaseClause{spat_tuple({spat_var(n("c"))}), s_var(n("c"))}});
    STLPtr e3 = s_case(s_var(n("that")), {SCaseClause{spat_tuple({spat_var(n("d"))}), s_var(n("d"))}});
    STLPtr e1 = s_case(s_app(expected_v1(), e2),
                       {SCaseClause{spat_tuple({spat_var(n("y")), spat_tuple({spat_var(n("x1"))})}),
                                    s_app(s_var(n("x1")),
                                          s_tuple({s_var(n("y")), s_tuple({}), s_tuple({e3})}))}});
    CHECK(tl_alpha_equal(ds(tl), ds(e1)));
}

TEST_CASE("translate_method emits the quadruple lambda shapes") {
    Fix f(kBoxEq);
    const auto& eq_num = std::get<MethodDecl>(f.prog.decls[4].node);
    auto [name_num, v_num] = f.tr.translate_method(eq_num);
    CHECK(name_num == n("eq.Num"));
    STLPtr e2 = s_case(s_var(n("this")), {SCaseClause{spat_tuple({spat_var(n("c"))}), s_var(n("c"))}});
    STLPtr e3 = s_case(s_var(n("that")), {SCaseClause{spat_tuple({spat_var(n("d"))}), s_var(n("d"))}});
    STLPtr want_num = s_patlam(spat_tuple({spat_tuple({}), spat_var(n("this")), spat_tuple({}),
                                           spat_tuple({spat_var(n("that"))})}),
                               s_prim(TLPrimOp::EqInt, {e2, e3}));
    CHECK(tl_alpha_equal(ds(v_num), ds(want_num)));

    const auto& eq_box = std::get<MethodDecl>(f.prog.decls[5].node);
    auto [name_box, v_box] = f.tr.translate_method(eq_box);
    CHECK(name_box == n("eq.Box"));
    // shape check: the first quadruple component binds one coercion parameter
    TLPtr core = ds(v_box);
    const auto* lam = std::get_if<TLLam>(&core->node);
    REQUIRE(lam);
    const auto* quad = std::get_if<TLCase>(&lam->body->node);
    REQUIRE(quad);
    REQUIRE(quad->clauses.size() == 1);
    CHECK(quad->clauses[0].ctor == tuple_ctor(4));
    const auto* first = std::get_if<TLCase>(&quad->clauses[0].body->node);
    REQUIRE(first);
    CHECK(first->clauses[0].ctor == tuple_ctor(1)); // <X_a>
}

TEST_CASE("a method-local type parameter lands in the third quadruple slot") {
    Fix f(R"(
type Any interface {}
type Format interface { format() string }
type Num struct { val int }
func (this Num) format() string { return "n" }
func (this Num) sep[s Format](x s) string { return x.format() }
func main() { _ = Num{1}.sep[Num](Num{2}) }
)");
    const auto& sep = std::get<MethodDecl>(f.prog.decls[4].node);
    auto [_, v] = f.tr.translate_method(sep);
    TLPtr core = ds(v);
    const auto* lam = std::get_if<TLLam>(&core->node);
    REQUIRE(lam);
    const auto* quad = std::get_if<TLCase>(&lam->body->node);
    REQUIRE(quad);
    // receiver coercions Tup0, receiver, method coercions Tup1, args Tup1
    const auto* recv_coerce = std::get_if<TLCase>(&quad->clauses[0].body->node);
    REQUIRE(recv_coerce);
    CHECK(recv_coerce->clauses[0].ctor == tuple_ctor(0));
    const auto* meth_coerce = std::get_if<TLCase>(&recv_coerce->clauses[0].body->node);
    REQUIRE(meth_coerce);
    CHECK(meth_coerce->clauses[0].ctor == tuple_ctor(1));
}

TEST_CASE("translate_program: trivial program and requested main type") {
    TranslateResult triv = translate_program(parse_program("func main() { _ = 1 }\n"));
    REQUIRE(triv.ok());
    CHECK(triv.translation->program.bindings.empty());
    CHECK(tl_equal(triv.translation->program.main, tl_int(1)));

    Program p = parse_program(kFormatPretty);
    Strategy want_format = Strategy::direct(parse_type_text("Format"));
    TranslateResult tr = translate_program(p, want_format);
    REQUIRE(tr.ok());
    CHECK(type_equal(tr.translation->main_type, ty_named(n("Format"))));
    // main is a coercion applied to the struct value
    const auto* app = std::get_if<TLApp>(&tr.translation->program.main->node);
    REQUIRE(app);
    CHECK(std::holds_alternative<TLLam>(app->fn->node));
    auto out = eval_tl(tr.translation->program);
    REQUIRE(out.is_value());
    Name ctor;
    std::vector<TLPtr> parts;
    REQUIRE(ctor_spine(out.value, &ctor, &parts));
    CHECK(ctor == tuple_ctor(2)); // an interface value is a pair
}

TEST_CASE("dictionary order: call-iface picks the declaration-order index") {
    Fix f(R"(
type Format interface { format() string }
type Pretty interface { format() string; pretty() string }
type Num struct { val int }
func (this Num) format() string { return "f" }
func (this Num) pretty() string { return "p" }
type User struct {}
func (u User) callSecond(x Pretty) string { return x.pretty() }
func main() { _ = User{}.callSecond(Num{1}) }
)");
    auto specs = f.tr.method_specs(ty_named(n("Pretty")));
    REQUIRE(specs.size() == 2);
    CHECK(specs[1].name == n("pretty"));

    // the dispatch must project the second dictionary slot
    TypeEnv env;
    ValueEnv venv;
    venv.bind(n("x"), ty_named(n("Pretty")));
    auto [ty, tl] = f.tr.translate_expr(env, venv, expr_call(expr_var(n("x")), n("pretty"), {}, {}), nullptr);
    STLPtr want = s_case(s_var(n("x")),
                         {SCaseClause{spat_tuple({spat_var(n("y")),
                                                  spat_tuple({spat_var(n("s1")), spat_var(n("s2"))})}),
                                      s_app(s_var(n("s2")),
                                            s_tuple({s_var(n("y")), s_tuple({}), s_tuple({})}))}});
    CHECK(tl_alpha_equal(ds(tl), ds(want)));
    // and the program evaluates to the right string end to end
    auto rep = differential_run(f.prog, {Strategy::direct()});
    CHECK(rep.verdict == "PASS");
}

TEST_CASE("translation output is closed and coercions are method/parameter free") {
    for (const auto& file : testsup::positive_corpus()) {
        Program p = testsup::load_corpus(file);
        TranslateResult tr = translate_program(p);
        INFO(file);
        REQUIRE(tr.ok());
        NameSet bound;
        for (const auto& [x, v] : tr.translation->program.bindings) bound.insert(x);
        for (const auto& [x, v] : tr.translation->program.bindings)
            for (Name fv : tl_free_vars(v)) CHECK(bound.count(fv) == 1);
        for (Name fv : tl_free_vars(tr.translation->program.main)) CHECK(bound.count(fv) == 1);
    }
}

TEST_CASE("equal seeds give byte-identical compiled output") {
    Program p = testsup::load_corpus("format_main.fgg");
    Strategy s = Strategy::randomized(1234, parse_type_text("Format"));
    TranslateResult a = translate_program(p, s);
    TranslateResult b = translate_program(p, s);
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(print_tl_program(a.translation->program) == print_tl_program(b.translation->program));
}

TEST_CASE("call arity errors carry distinct codes") {
    Fix f(kBoxEq);
    ExprPtr num1 = expr_struct(t_num(), {expr_int(1)});
    CHECK(code_of([&] {
              Fix g(kBoxEq);
              g.tr.translate_expr(TypeEnv{}, ValueEnv{}, expr_call(num1, n("eq"), {}, {}), nullptr);
          }) == Code::ArgArity);
    CHECK(code_of([&] {
              Fix g(kBoxEq);
              g.tr.translate_expr(TypeEnv{}, ValueEnv{},
                                  expr_call(num1, n("eq"), {t_num()}, {num1}), nullptr);
          }) == Code::TypeArgArity);
    CHECK(code_of([&] {
              Fix g(kBoxEq);
              g.tr.translate_expr(TypeEnv{}, ValueEnv{},
                                  expr_struct(t_num(), {expr_int(1), expr_int(2)}), nullptr);
          }) == Code::StructArity);
}

TEST_CASE("runtime arity mismatches are stuck with a diagnostic") {
    Program p = testsup::gen_fixture();
    p.main = expr_call(expr_struct(ty_named(n("Num")), {expr_int(1)}), n("eq"), {}, {});
    auto out = eval_source(p, 100);
    REQUIRE(out.is_stuck());
    CHECK(out.diagnostic.find("arity mismatch") != std::string::npos);
}

TEST_CASE("name translation is injective with pairwise disjoint ranges") {
    NameMap names;
    CHECK(names.method_fn(n("a"), n("b_c")) != names.method_fn(n("a_b"), n("c")));
    CHECK(names.type_var(n("x")) != names.value_var(n("x")));
    CHECK(names.type_var(n("x")).str() == "$x");
    CHECK(names.method_fn(n("eq"), n("Num")).str() == "eq.Num");
    Name f0 = names.fresh.fresh();
    Name f1 = names.fresh.fresh();
    CHECK(f0 != f1);
    CHECK(f0.str() == "%0");
}

TEST_CASE("field access requires a struct-typed receiver") {
    Fix f(kBoxEq);
    TypeEnv env;
    env.bind(n("a"), ty_named(n("Any")));
    ValueEnv venv;
    venv.bind(n("x"), ty_var(n("a")));
    CHECK(code_of([&] {
              f.tr.translate_expr(env, venv, expr_field(expr_var(n("x")), n("val")), nullptr);
          }) == Code::FieldOnNonStruct);
    // likewise for interface-typed receivers
    ValueEnv venv2;
    venv2.bind(n("x"), t_eq(t_num()));
    CHECK(code_of([&] {
              Fix g(kBoxEq);
              g.tr.translate_expr(env, venv2, expr_field(expr_var(n("x")), n("val")), nullptr);
          }) == Code::FieldOnNonStruct);
}

TEST_CASE("direct strategy accepts exactly the positive corpus") {
    for (const auto& file : testsup::positive_corpus()) {
        INFO(file);
        CHECK(translate_program(testsup::load_corpus(file)).ok());
    }
    for (const auto& [file, code] : testsup::negative_corpus()) {
        Program p = parse_program(testsup::read_file(testsup::repo_path("corpus/" + file)));
        TranslateResult tr = translate_program(p);
        INFO(file);
        REQUIRE_FALSE(tr.ok());
        bool hit = false;
        for (const auto& d : tr.diags)
            if (d.code == code) hit = true;
        CHECK(hit);
    }
}
