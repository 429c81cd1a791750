#pragma once

#include <cassert>
#include <optional>

#include "fgg/printer.hpp"
#include "fgg/subst.hpp"
#include "fgg/tl.hpp"

namespace fgg {

// ---------------------------------------------------------------------------
// Name translation: three injective maps with pairwise disjoint ranges.
// Source identifiers never contain '$', '.' or '%', so the ranges cannot
// collide: value variables stay plain, type variables get a '$' prefix,
// method functions are spelled m.tS, and fresh variables count up as %n.

struct NameMap {
    Name value_var(Name x) const { return x; }
    Name type_var(Name a) const { return Name::of("$" + a.str()); }
    Name method_fn(Name m, Name t_s) const { return Name::of(m.str() + "." + t_s.str()); }
    FreshGen fresh;
};

// ---------------------------------------------------------------------------
// Translation strategy. Direct inlines subsumption deterministically at
// argument, field, return and main positions. Randomized may, at each
// struct-to-interface coercion site, route through one uniformly chosen
// intermediate interface (depth 1), composing two coercions; choices are a
// pure function of (seed, site index). MainType: null means the synthesized
// minimal type, otherwise the requested type (which must be reachable via
// coercion).

struct Strategy {
    enum class Path { Direct, Randomized };
    Path path = Path::Direct;
    std::uint64_t seed = 0;
    TypePtr main_type; // null => synthesized

    static Strategy direct(TypePtr main = nullptr) { return Strategy{Path::Direct, 0, std::move(main)}; }
    static Strategy randomized(std::uint64_t seed, TypePtr main = nullptr) {
        return Strategy{Path::Randomized, seed, std::move(main)};
    }
};

inline std::string strategy_label(const Strategy& s) {
    std::string l = s.path == Strategy::Path::Direct ? "direct" : "random:" + std::to_string(s.seed);
    if (s.main_type) l += "@" + print_type(s.main_type);
    return l;
}

// Seeded translator defects for the mutation-kill harness. None is the real
// translator; everything else mis-compiles in one specific way and must be
// caught by the differential runner.
enum class Sabotage {
    None,
    WrongDictIndex,      // call-iface dispatches to the next dictionary slot
    DropBoundCoercion,   // type-inst-checked emits an empty coercion tuple
    PermutedPi,          // coerce-iface-iface rotates the projection
    SwappedQuadruple,    // call-struct swaps receiver and method coercions
    IdentityStructIface, // coerce-struct-iface emits the identity function
};

struct CoerceResult {
    enum class Kind { NotSubtype, Identity, Coercion };
    Kind kind = Kind::NotSubtype;
    STLPtr value;

    static CoerceResult not_subtype() { return {}; }
    static CoerceResult identity() { return {Kind::Identity, nullptr}; }
    static CoerceResult coercion(STLPtr v) { return {Kind::Coercion, std::move(v)}; }
};

struct BoundsCheck {
    TypeSubst subst;
    STLPtr coercions; // tuple of one coercion per formal
};

struct Translation {
    TLProgram program;
    TypePtr main_type;
};

struct TranslateResult {
    std::optional<Translation> translation;
    std::vector<Diag> diags;
    bool ok() const { return translation.has_value(); }
};

// ---------------------------------------------------------------------------

class Translator {
public:
    explicit Translator(const DeclTable& table, Strategy strat = {}, Sabotage sab = Sabotage::None,
                        std::size_t max_tuple = kDefaultMaxTupleArity)
        : table_(table), strat_(std::move(strat)), sab_(sab), max_tuple_(max_tuple) {}

    NameMap& names() { return names_; }

    // --- well-formedness -----------------------------------------------

    void wf_type(const TypeEnv& env, const TypePtr& t) {
        if (const auto* tv = as_tyvar(t)) {
            if (!env.contains(tv->name))
                throw TypeError(Code::UnboundTypeVar, tv->name.str());
            return;
        }
        if (as_base(t)) {
            if (!table_.program().base_types)
                throw TypeError(Code::BaseDisabled, "base types are disabled");
            return;
        }
        const auto& n = std::get<NamedT>(t->node);
        const std::vector<TypeParam>* formals = nullptr;
        if (const StructDecl* sd = table_.struct_decl(n.name)) formals = &sd->typarams;
        else if (const IfaceDecl* id = table_.iface_decl(n.name)) formals = &id->typarams;
        else throw TypeError(Code::UnknownTypeName, n.name.str());
        if (formals->size() != n.args.size())
            throw TypeError(Code::ArityMismatch, n.name.str() + " expects " + std::to_string(formals->size()) +
                                                     " type arguments, got " + std::to_string(n.args.size()));
        for (const auto& a : n.args) wf_type(env, a);
        instantiate_checked(env, *formals, n.args, false); // coercions discarded
    }

    void wf_typarams(const TypeEnv& env, const std::vector<TypeParam>& formals) {
        NameSet seen;
        for (const auto& tp : formals) {
            if (!seen.insert(tp.var).second)
                throw TypeError(Code::DuplicateTyVar, tp.var.str());
            if (env.contains(tp.var))
                throw TypeError(Code::ShadowedTyVar, tp.var.str());
        }
        TypeEnv extended = env.extended(formals);
        for (const auto& tp : formals) {
            const auto* n = as_named(tp.bound);
            if (!n || !table_.iface_decl(n->name))
                throw TypeError(Code::NotAnInterfaceBound,
                                tp.var.str() + " bounded by " + print_type(tp.bound));
            wf_type(extended, tp.bound);
        }
    }

    void wf_msig(const TypeEnv& env, const MethodSig& sig) {
        wf_typarams(env, sig.typarams);
        NameSet seen;
        for (const auto& p : sig.params)
            if (!seen.insert(p.var).second)
                throw TypeError(Code::DuplicateParam, sig.name.str() + ": " + p.var.str());
        TypeEnv extended = env.extended(sig.typarams);
        for (const auto& p : sig.params) wf_type(extended, p.type);
        wf_type(extended, sig.ret);
    }

    // Structural checks on a declaration. For methods this covers ok-method;
    // the body is checked by translate_method (rule method).
    void wf_decl_structural(const Decl& d) {
        if (const auto* s = std::get_if<StructDecl>(&d.node)) {
            wf_typarams(TypeEnv{}, s->typarams);
            TypeEnv env = TypeEnv{}.extended(s->typarams);
            for (const auto& f : s->fields) wf_type(env, f.type);
            return;
        }
        if (const auto* i = std::get_if<IfaceDecl>(&d.node)) {
            wf_typarams(TypeEnv{}, i->typarams);
            TypeEnv env = TypeEnv{}.extended(i->typarams);
            for (const auto& r : i->specs) wf_msig(env, r);
            return;
        }
        const auto& m = std::get<MethodDecl>(d.node);
        const StructDecl* sd = table_.struct_decl(m.recv_struct);
        if (!sd) throw TypeError(Code::UnknownStruct, m.recv_struct.str());
        wf_typarams(TypeEnv{}, m.recv_typarams);
        if (m.recv_typarams.size() != sd->typarams.size())
            throw TypeError(Code::ArityMismatch,
                            "receiver of " + m.sig.name.str() + " instantiates " + m.recv_struct.str());
        TypeEnv env = TypeEnv{}.extended(m.recv_typarams);
        wf_msig(env, m.sig);
        for (const auto& p : m.sig.params)
            if (p.var == m.recv_var)
                throw TypeError(Code::ReceiverShadowsParam, m.recv_var.str());
        // Receiver bounds must be covariant against the struct declaration:
        // the methods of the struct bound are a subset of those of the
        // receiver bound.
        TypeSubst rename;
        for (std::size_t i = 0; i < sd->typarams.size(); ++i)
            rename.add(sd->typarams[i].var, ty_var(m.recv_typarams[i].var));
        for (std::size_t i = 0; i < sd->typarams.size(); ++i) {
            TypePtr struct_bound = apply_type_subst(rename, sd->typarams[i].bound);
            std::vector<MethodSig> weaker = method_specs(struct_bound);
            std::vector<MethodSig> stronger = method_specs(m.recv_typarams[i].bound);
            for (const auto& w : weaker) {
                bool found = false;
                for (const auto& s : stronger)
                    if (sig_alpha_equal(w, s)) found = true;
                if (!found)
                    throw TypeError(Code::ReceiverBoundsNotCovariant,
                                    m.recv_struct.str() + "." + m.sig.name.str() + ": bound " +
                                        print_type(m.recv_typarams[i].bound) + " lacks " + w.name.str());
            }
        }
    }

    void wf_decl(const Decl& d) {
        wf_decl_structural(d);
        if (const auto* m = std::get_if<MethodDecl>(&d.node)) translate_method(*m);
    }

    // --- auxiliary judgments (Fig. auxiliary) ----------------------------

    // Declared specs with the instantiating substitution applied, in
    // declaration order.
    std::vector<MethodSig> method_specs(const TypePtr& iface_type) {
        const auto* n = as_named(iface_type);
        const IfaceDecl* id = n ? table_.iface_decl(n->name) : nullptr;
        if (!id) throw TypeError(Code::UnknownInterface, print_type(iface_type));
        TypeSubst eta = make_type_subst(id->typarams, n->args);
        std::vector<MethodSig> out;
        out.reserve(id->specs.size());
        for (const auto& r : id->specs) out.push_back(apply_type_subst(eta, r));
        return out;
    }

    struct StructMethod {
        MethodSig sig;       // receiver substitution applied
        STLPtr coercions;    // tuple for the receiver's bounded typarams
        const MethodDecl* decl;
    };

    // Methods available for a struct type: every declaration on the struct
    // name whose receiver bounds are satisfied by the actual type arguments.
    // Unsatisfiable bounds exclude the method rather than failing.
    std::vector<StructMethod> methods_struct(const TypeEnv& env, const TypePtr& struct_type,
                                             bool allow_random = false) {
        const auto* n = as_named(struct_type);
        const StructDecl* sd = n ? table_.struct_decl(n->name) : nullptr;
        if (!sd) throw TypeError(Code::UnknownStruct, print_type(struct_type));
        std::vector<StructMethod> out;
        for (const MethodDecl* md : table_.methods_of(n->name)) {
            try {
                BoundsCheck bc = instantiate_checked(env, md->recv_typarams, n->args, allow_random);
                out.push_back(StructMethod{apply_type_subst(bc.subst, md->sig), bc.coercions, md});
            } catch (const TypeError& err) {
                if (err.diag.code != Code::BoundViolation) throw;
            }
        }
        return out;
    }

    // type-inst-checked: builds the substitution and one coercion per formal
    // witnessing that the actual conforms to its (substituted) upper bound.
    BoundsCheck instantiate_checked(const TypeEnv& env, const std::vector<TypeParam>& formals,
                                    const std::vector<TypePtr>& actuals, bool allow_random = false) {
        TypeSubst eta = make_type_subst(formals, actuals);
        std::vector<STLPtr> coercions;
        coercions.reserve(formals.size());
        for (std::size_t i = 0; i < formals.size(); ++i) {
            TypePtr bound = apply_type_subst(eta, formals[i].bound);
            CoerceResult r = subtype_coerce(env, actuals[i], bound, allow_random);
            if (r.kind != CoerceResult::Kind::Coercion)
                throw TypeError(Code::BoundViolation,
                                print_type(actuals[i]) + " does not implement " + print_type(bound));
            coercions.push_back(r.value);
        }
        STLPtr tuple = sab_ == Sabotage::DropBoundCoercion ? s_tuple({}) : s_tuple(std::move(coercions));
        return BoundsCheck{std::move(eta), std::move(tuple)};
    }

    // --- structural subtyping (Fig. upcast) ------------------------------

    // The reflexive non-interface case yields Identity (no wrapper); with an
    // interface supertype the rule-directed coercion value is built even
    // when sub = sup.
    CoerceResult subtype_coerce(const TypeEnv& env, const TypePtr& sub, const TypePtr& sup,
                                bool allow_random = false) {
        const auto* sup_named = as_named(sup);
        const IfaceDecl* sup_iface = sup_named ? table_.iface_decl(sup_named->name) : nullptr;
        if (!sup_iface)
            return type_equal(sub, sup) ? CoerceResult::identity() : CoerceResult::not_subtype();
        CoerceResult r = CoerceResult::not_subtype();
        if (const auto* tv = as_tyvar(sub)) {
            const TypePtr* bound = env.lookup(tv->name);
            if (!bound) return CoerceResult::not_subtype();
            CoerceResult inner = subtype_coerce(env, *bound, sup, false);
            if (inner.kind != CoerceResult::Kind::Coercion) return CoerceResult::not_subtype();
            Name y = names_.fresh.fresh();
            r = CoerceResult::coercion(
                s_lam(y, s_app(inner.value, s_app(s_var(names_.type_var(tv->name)), s_var(y)))));
        } else if (const auto* sub_named = as_named(sub)) {
            if (table_.iface_decl(sub_named->name)) r = coerce_iface_iface(env, sub, sup);
            else if (table_.struct_decl(sub_named->name)) r = coerce_struct_iface(env, sub, sup, allow_random);
            else return CoerceResult::not_subtype();
        } else {
            return CoerceResult::not_subtype(); // base types implement no interfaces
        }
        if (r.kind == CoerceResult::Kind::Coercion) assert_coercion_free(r.value, env);
        return r;
    }

    // --- expressions (Fig. expressions) ----------------------------------

    // Synthesizes the minimal type; with an expected type present the
    // subsumption step is inlined here, wrapping the term in a coercion
    // (identity cases wrap nothing).
    std::pair<TypePtr, STLPtr> translate_expr(const TypeEnv& env, const ValueEnv& venv, const ExprPtr& e,
                                              const TypePtr& expected) {
        auto [ty, tl] = synth_expr(env, venv, e);
        if (!expected) return {ty, tl};
        CoerceResult r = subtype_coerce(env, ty, expected, true);
        switch (r.kind) {
            case CoerceResult::Kind::NotSubtype:
                throw TypeError(Code::NoSubtypePath,
                                "cannot use " + print_type(ty) + " as " + print_type(expected));
            case CoerceResult::Kind::Identity:
                return {expected, tl};
            case CoerceResult::Kind::Coercion:
                return {expected, s_app(r.value, tl)};
        }
        return {expected, tl};
    }

    // rule method: the binding X_{m,tS} = \(recv coercions, recv, method
    // coercions, args). E with E checked at the declared return type.
    std::pair<Name, STLPtr> translate_method(const MethodDecl& m) {
        TypeEnv env = TypeEnv{}.extended(m.recv_typarams).extended(m.sig.typarams);
        std::vector<TypePtr> recv_args;
        recv_args.reserve(m.recv_typarams.size());
        for (const auto& tp : m.recv_typarams) recv_args.push_back(ty_var(tp.var));
        ValueEnv venv;
        venv.bind(m.recv_var, ty_named(m.recv_struct, recv_args));
        for (const auto& p : m.sig.params) venv.bind(p.var, p.type);

        auto [ty, body] = translate_expr(env, venv, m.body, m.sig.ret);
        (void)ty;

        std::vector<SPat> recv_coercions, meth_coercions, params;
        for (const auto& tp : m.recv_typarams) recv_coercions.push_back(spat_var(names_.type_var(tp.var)));
        for (const auto& tp : m.sig.typarams) meth_coercions.push_back(spat_var(names_.type_var(tp.var)));
        for (const auto& p : m.sig.params) params.push_back(spat_var(names_.value_var(p.var)));
        SPat quad = spat_tuple({spat_tuple(std::move(recv_coercions)), spat_var(names_.value_var(m.recv_var)),
                                spat_tuple(std::move(meth_coercions)), spat_tuple(std::move(params))});
        return {names_.method_fn(m.sig.name, m.recv_struct), s_patlam(std::move(quad), body)};
    }

    // rule prog: wf-check all declarations, translate every method to a
    // binding, then the main expression under empty environments.
    TranslateResult run() {
        TranslateResult res;
        for (const Diag& v : validate_restrictions(table_.program())) res.diags.push_back(v);
        if (!res.diags.empty()) return res;
        for (const auto& d : table_.program().decls) {
            try {
                wf_decl_structural(d);
            } catch (const TypeError& err) {
                res.diags.push_back(err.diag);
            }
        }
        if (!res.diags.empty()) return res;

        std::vector<std::pair<Name, STLPtr>> bindings;
        for (const auto& d : table_.program().decls) {
            if (const auto* m = std::get_if<MethodDecl>(&d.node)) {
                try {
                    bindings.push_back(translate_method(*m));
                } catch (const TypeError& err) {
                    res.diags.push_back(err.diag);
                }
            }
        }
        TypePtr expected = strat_.main_type;
        if (expected) {
            try {
                wf_type(TypeEnv{}, expected);
            } catch (const TypeError& err) {
                res.diags.push_back(err.diag);
            }
        }
        if (!res.diags.empty()) return res;

        STLPtr main_stl;
        TypePtr main_ty;
        try {
            auto [ty, stl] = translate_expr(TypeEnv{}, ValueEnv{}, table_.program().main, expected);
            main_ty = ty;
            main_stl = stl;
        } catch (const TypeError& err) {
            res.diags.push_back(err.diag);
            return res;
        }

        try {
            TLProgram prog;
            prog.bindings.reserve(bindings.size());
            for (auto& [x, v] : bindings) prog.bindings.emplace_back(x, desugar(v, names_.fresh, max_tuple_));
            prog.main = desugar(main_stl, names_.fresh, max_tuple_);
            assert_translation_closed(prog);
            res.translation = Translation{std::move(prog), std::move(main_ty)};
        } catch (const TypeError& err) {
            res.diags.push_back(err.diag);
        }
        return res;
    }

    // Signature equality after bound-variable normalization: typarams are
    // paired positionally, parameter names are ignored, free type variables
    // compare by name.
    static bool sig_alpha_equal(const MethodSig& a, const MethodSig& b) {
        if (a.name != b.name || a.typarams.size() != b.typarams.size() || a.params.size() != b.params.size())
            return false;
        std::unordered_map<Name, int, NameHash> left, right;
        for (std::size_t i = 0; i < a.typarams.size(); ++i) {
            left[a.typarams[i].var] = static_cast<int>(i);
            right[b.typarams[i].var] = static_cast<int>(i);
        }
        auto ty_eq = [&](const TypePtr& x, const TypePtr& y) {
            return type_alpha_equal(x, y, left, right);
        };
        for (std::size_t i = 0; i < a.typarams.size(); ++i)
            if (!ty_eq(a.typarams[i].bound, b.typarams[i].bound)) return false;
        for (std::size_t i = 0; i < a.params.size(); ++i)
            if (!ty_eq(a.params[i].type, b.params[i].type)) return false;
        return ty_eq(a.ret, b.ret);
    }

private:
    static bool type_alpha_equal(const TypePtr& a, const TypePtr& b,
                                 const std::unordered_map<Name, int, NameHash>& left,
                                 const std::unordered_map<Name, int, NameHash>& right) {
        if (a->node.index() != b->node.index()) return false;
        if (const auto* tv = std::get_if<TyVarT>(&a->node)) {
            const auto& tw = std::get<TyVarT>(b->node);
            auto la = left.find(tv->name);
            auto rb = right.find(tw.name);
            if (la != left.end() || rb != right.end())
                return la != left.end() && rb != right.end() && la->second == rb->second;
            return tv->name == tw.name;
        }
        if (const auto* ba = std::get_if<BaseT>(&a->node)) return ba->kind == std::get<BaseT>(b->node).kind;
        const auto& na = std::get<NamedT>(a->node);
        const auto& nb = std::get<NamedT>(b->node);
        if (na.name != nb.name || na.args.size() != nb.args.size()) return false;
        for (std::size_t i = 0; i < na.args.size(); ++i)
            if (!type_alpha_equal(na.args[i], nb.args[i], left, right)) return false;
        return true;
    }

    // coerce-struct-iface: \X.(X, (U1..Un)) with Ui the dictionary entry for
    // the i-th interface method, in declaration order.
    CoerceResult coerce_struct_iface(const TypeEnv& env, const TypePtr& sub, const TypePtr& sup,
                                     bool allow_random) {
        if (allow_random && strat_.path == Strategy::Path::Randomized) {
            std::uint64_t site = coercion_site_++;
            std::vector<TypePtr> mids = eligible_intermediates(env, sub, sup);
            std::uint64_t pick = mix(strat_.seed, site) % (mids.size() + 1);
            if (pick > 0) {
                const TypePtr& mid = mids[pick - 1];
                CoerceResult v1 = subtype_coerce(env, sub, mid, false);
                CoerceResult v2 = subtype_coerce(env, mid, sup, false);
                Name y = names_.fresh.fresh();
                return CoerceResult::coercion(
                    s_lam(y, s_app(v2.value, s_app(v1.value, s_var(y)))));
            }
        }
        const auto* sub_named = as_named(sub);
        std::vector<MethodSig> specs = method_specs(sup);
        std::vector<StructMethod> avail = methods_struct(env, sub, allow_random);
        std::vector<STLPtr> entries;
        entries.reserve(specs.size());
        for (const auto& spec : specs) {
            const StructMethod* found = nullptr;
            for (const auto& sm : avail)
                if (sm.sig.name == spec.name) found = &sm;
            if (!found || !sig_alpha_equal(found->sig, spec)) return CoerceResult::not_subtype();
            Name y1 = names_.fresh.fresh();
            Name y2 = names_.fresh.fresh();
            Name y3 = names_.fresh.fresh();
            STLPtr call = s_app(s_var(names_.method_fn(spec.name, sub_named->name)),
                                s_tuple({found->coercions, s_var(y1), s_var(y2), s_var(y3)}));
            entries.push_back(s_patlam(spat_tuple({spat_var(y1), spat_var(y2), spat_var(y3)}), call));
        }
        if (sab_ == Sabotage::IdentityStructIface) {
            Name x = names_.fresh.fresh();
            return CoerceResult::coercion(s_lam(x, s_var(x)));
        }
        Name x = names_.fresh.fresh();
        return CoerceResult::coercion(s_lam(x, s_tuple({s_var(x), s_tuple(std::move(entries))})));
    }

    // coerce-iface-iface: permutes the dictionary through the total map pi
    // with eta2 R'_i = eta1 R_{pi(i)}.
    CoerceResult coerce_iface_iface(const TypeEnv& env, const TypePtr& sub, const TypePtr& sup) {
        (void)env;
        std::vector<MethodSig> specs_sub = method_specs(sub);
        std::vector<MethodSig> specs_sup = method_specs(sup);
        std::vector<std::size_t> pi(specs_sup.size());
        for (std::size_t i = 0; i < specs_sup.size(); ++i) {
            bool found = false;
            for (std::size_t j = 0; j < specs_sub.size(); ++j) {
                if (sig_alpha_equal(specs_sub[j], specs_sup[i])) {
                    pi[i] = j;
                    found = true;
                    break;
                }
            }
            if (!found) return CoerceResult::not_subtype();
        }
        if (sab_ == Sabotage::PermutedPi && !specs_sub.empty())
            for (auto& j : pi) j = (j + 1) % specs_sub.size();
        Name y = names_.fresh.fresh();
        std::vector<Name> xs;
        std::vector<SPat> pats;
        for (std::size_t j = 0; j < specs_sub.size(); ++j) {
            Name x = names_.fresh.fresh();
            xs.push_back(x);
            pats.push_back(spat_var(x));
        }
        std::vector<STLPtr> picked;
        picked.reserve(pi.size());
        for (std::size_t i = 0; i < pi.size(); ++i) picked.push_back(s_var(xs[pi[i]]));
        return CoerceResult::coercion(
            s_patlam(spat_tuple({spat_var(y), spat_tuple(std::move(pats))}),
                     s_tuple({s_var(y), s_tuple(std::move(picked))})));
    }

    // Candidate intermediates for a randomized struct-to-interface coercion:
    // non-generic interfaces, plus interfaces reusing the supertype's own
    // arguments when arities match. Probing never consumes choice sites.
    std::vector<TypePtr> eligible_intermediates(const TypeEnv& env, const TypePtr& sub, const TypePtr& sup) {
        std::vector<TypePtr> out;
        const auto* supn = as_named(sup);
        for (const auto& d : table_.program().decls) {
            const auto* iface = std::get_if<IfaceDecl>(&d.node);
            if (!iface) continue;
            TypePtr cand;
            if (iface->typarams.empty()) cand = ty_named(iface->name, {});
            else if (iface->typarams.size() == supn->args.size()) cand = ty_named(iface->name, supn->args);
            else continue;
            if (type_equal(cand, sup)) continue;
            try {
                wf_type(env, cand);
            } catch (const TypeError&) {
                continue;
            }
            if (subtype_coerce(env, sub, cand, false).kind != CoerceResult::Kind::Coercion) continue;
            if (subtype_coerce(env, cand, sup, false).kind != CoerceResult::Kind::Coercion) continue;
            out.push_back(cand);
        }
        return out;
    }

    std::pair<TypePtr, STLPtr> synth_expr(const TypeEnv& env, const ValueEnv& venv, const ExprPtr& e) {
        return std::visit(
            [&](const auto& n) -> std::pair<TypePtr, STLPtr> {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, VarE>) {
                    const TypePtr* ty = venv.lookup(n.name);
                    if (!ty) throw TypeError(Code::UnknownVar, n.name.str());
                    return {*ty, s_var(names_.value_var(n.name))};
                } else if constexpr (std::is_same_v<T, StructLit>) {
                    return synth_struct_lit(env, venv, n);
                } else if constexpr (std::is_same_v<T, FieldAccess>) {
                    return synth_field(env, venv, n);
                } else if constexpr (std::is_same_v<T, MethodCall>) {
                    return synth_call(env, venv, n);
                } else if constexpr (std::is_same_v<T, IntLit>) {
                    require_base("integer literal");
                    return {ty_base(BaseKind::Int), s_lit(TLLitVal{n.value})};
                } else if constexpr (std::is_same_v<T, BoolLit>) {
                    require_base("boolean literal");
                    return {ty_base(BaseKind::Bool), s_lit(TLLitVal{n.value})};
                } else if constexpr (std::is_same_v<T, StrLit>) {
                    require_base("string literal");
                    return {ty_base(BaseKind::Str), s_lit(TLLitVal{n.value})};
                } else if constexpr (std::is_same_v<T, BinOp>) {
                    require_base("operator");
                    BaseKind operand = n.op == BinOpKind::ConcatStr ? BaseKind::Str : BaseKind::Int;
                    STLPtr l = translate_expr(env, venv, n.lhs, ty_base(operand)).second;
                    STLPtr r = translate_expr(env, venv, n.rhs, ty_base(operand)).second;
                    TLPrimOp op = n.op == BinOpKind::EqInt   ? TLPrimOp::EqInt
                                  : n.op == BinOpKind::AddInt ? TLPrimOp::AddInt
                                                              : TLPrimOp::Concat;
                    BaseKind result = n.op == BinOpKind::EqInt ? BaseKind::Bool : operand;
                    return {ty_base(result), s_prim(op, {std::move(l), std::move(r)})};
                } else {
                    static_assert(std::is_same_v<T, Builtin>);
                    require_base("intToString");
                    STLPtr a = translate_expr(env, venv, n.arg, ty_base(BaseKind::Int)).second;
                    return {ty_base(BaseKind::Str), s_prim(TLPrimOp::IntToStr, {std::move(a)})};
                }
            },
            e->node);
    }

    std::pair<TypePtr, STLPtr> synth_struct_lit(const TypeEnv& env, const ValueEnv& venv, const StructLit& n) {
        const auto* named = as_named(n.type);
        const StructDecl* sd = named ? table_.struct_decl(named->name) : nullptr;
        if (!sd) throw TypeError(Code::NotAStruct, print_type(n.type));
        wf_type(env, n.type);
        if (n.args.size() != sd->fields.size())
            throw TypeError(Code::StructArity, print_type(n.type) + " has " +
                                                   std::to_string(sd->fields.size()) + " fields, got " +
                                                   std::to_string(n.args.size()));
        TypeSubst eta = make_type_subst(sd->typarams, named->args);
        std::vector<STLPtr> fields;
        fields.reserve(n.args.size());
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            TypePtr want = apply_type_subst(eta, sd->fields[i].type);
            fields.push_back(translate_expr(env, venv, n.args[i], want).second);
        }
        return {n.type, s_tuple(std::move(fields))};
    }

    std::pair<TypePtr, STLPtr> synth_field(const TypeEnv& env, const ValueEnv& venv, const FieldAccess& n) {
        auto [rt, recv] = translate_expr(env, venv, n.recv, nullptr);
        const auto* named = as_named(rt);
        const StructDecl* sd = named ? table_.struct_decl(named->name) : nullptr;
        if (!sd) throw TypeError(Code::FieldOnNonStruct, print_type(rt) + "." + n.field.str());
        std::size_t index = sd->fields.size();
        for (std::size_t i = 0; i < sd->fields.size(); ++i)
            if (sd->fields[i].var == n.field) index = i;
        if (index == sd->fields.size())
            throw TypeError(Code::UnknownField, print_type(rt) + "." + n.field.str());
        TypeSubst eta = make_type_subst(sd->typarams, named->args);
        TypePtr field_ty = apply_type_subst(eta, sd->fields[index].type);
        std::vector<SPat> pats;
        std::vector<Name> vars;
        for (std::size_t i = 0; i < sd->fields.size(); ++i) {
            Name x = names_.fresh.fresh();
            vars.push_back(x);
            pats.push_back(spat_var(x));
        }
        STLPtr proj = s_case(recv, {SCaseClause{spat_tuple(std::move(pats)), s_var(vars[index])}});
        return {field_ty, std::move(proj)};
    }

    std::pair<TypePtr, STLPtr> synth_call(const TypeEnv& env, const ValueEnv& venv, const MethodCall& n) {
        auto [rt, recv] = translate_expr(env, venv, n.recv, nullptr);

        // A receiver at a type variable is coerced to its bound first; the
        // call then proceeds through the bound's interface.
        if (const auto* tv = as_tyvar(rt)) {
            const TypePtr* bound = env.lookup(tv->name);
            if (!bound) throw TypeError(Code::UnboundTypeVar, tv->name.str());
            CoerceResult r = subtype_coerce(env, rt, *bound, true);
            if (r.kind != CoerceResult::Kind::Coercion)
                throw TypeError(Code::NoSubtypePath, "cannot coerce " + print_type(rt) + " to its bound");
            recv = s_app(r.value, recv);
            rt = *bound;
        }

        const auto* named = as_named(rt);
        if (named && table_.struct_decl(named->name)) {
            std::vector<StructMethod> avail = methods_struct(env, rt, true);
            const StructMethod* found = nullptr;
            for (const auto& sm : avail)
                if (sm.sig.name == n.method) found = &sm;
            if (!found)
                throw TypeError(Code::NoSuchMethod, print_type(rt) + "." + n.method.str());
            auto [eta, margs] = check_call_tyargs(env, found->sig, n);
            auto args = translate_args(env, venv, found->sig, eta, n);
            STLPtr quad = sab_ == Sabotage::SwappedQuadruple
                              ? s_tuple({margs, recv, found->coercions, args})
                              : s_tuple({found->coercions, recv, margs, args});
            STLPtr call = s_app(s_var(names_.method_fn(n.method, named->name)), std::move(quad));
            return {apply_type_subst(eta, found->sig.ret), std::move(call)};
        }
        if (named && table_.iface_decl(named->name)) {
            std::vector<MethodSig> specs = method_specs(rt);
            std::size_t j = specs.size();
            for (std::size_t i = 0; i < specs.size(); ++i)
                if (specs[i].name == n.method) j = i;
            if (j == specs.size())
                throw TypeError(Code::NoSuchMethod, print_type(rt) + "." + n.method.str());
            const MethodSig& sig = specs[j];
            auto [eta, margs] = check_call_tyargs(env, sig, n);
            auto args = translate_args(env, venv, sig, eta, n);
            std::size_t j_used = sab_ == Sabotage::WrongDictIndex ? (j + 1) % specs.size() : j;
            Name y = names_.fresh.fresh();
            std::vector<Name> xs;
            std::vector<SPat> pats;
            for (std::size_t i = 0; i < specs.size(); ++i) {
                Name x = names_.fresh.fresh();
                xs.push_back(x);
                pats.push_back(spat_var(x));
            }
            STLPtr body = s_app(s_var(xs[j_used]), s_tuple({s_var(y), margs, args}));
            STLPtr dispatch =
                s_case(recv, {SCaseClause{spat_tuple({spat_var(y), spat_tuple(std::move(pats))}), body}});
            return {apply_type_subst(eta, sig.ret), std::move(dispatch)};
        }
        throw TypeError(Code::NoSuchMethod, print_type(rt) + "." + n.method.str());
    }

    // Shared by call-struct and call-iface: checks the method's local type
    // arguments and yields (eta', coercion tuple).
    std::pair<TypeSubst, STLPtr> check_call_tyargs(const TypeEnv& env, const MethodSig& sig,
                                                   const MethodCall& n) {
        if (sig.typarams.size() != n.tyargs.size())
            throw TypeError(Code::TypeArgArity, sig.name.str() + " expects " +
                                                    std::to_string(sig.typarams.size()) +
                                                    " type arguments, got " + std::to_string(n.tyargs.size()));
        for (const auto& t : n.tyargs) wf_type(env, t);
        BoundsCheck bc = instantiate_checked(env, sig.typarams, n.tyargs, true);
        return {std::move(bc.subst), std::move(bc.coercions)};
    }

    STLPtr translate_args(const TypeEnv& env, const ValueEnv& venv, const MethodSig& sig,
                          const TypeSubst& eta, const MethodCall& n) {
        if (sig.params.size() != n.args.size())
            throw TypeError(Code::ArgArity, sig.name.str() + " expects " + std::to_string(sig.params.size()) +
                                                " arguments, got " + std::to_string(n.args.size()));
        std::vector<STLPtr> out;
        out.reserve(n.args.size());
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            TypePtr want = apply_type_subst(eta, sig.params[i].type);
            out.push_back(translate_expr(env, venv, n.args[i], want).second);
        }
        return s_tuple(std::move(out));
    }

    void require_base(const std::string& what) const {
        if (!table_.program().base_types)
            throw TypeError(Code::BaseDisabled, what + " requires base types");
    }

    // Every coercion value is closed except for coercion parameters X_alpha
    // with alpha in dom(Delta) and top-level method functions.
    void assert_coercion_free(const STLPtr& v, const TypeEnv& env) {
#ifndef NDEBUG
        for (Name f : s_free_vars(v)) {
            const std::string& s = f.str();
            if (s.find('.') != std::string::npos) continue; // method function
            bool coercion_param = false;
            for (const auto& [a, bound] : env.entries())
                if (names_.type_var(a) == f) coercion_param = true;
            assert(coercion_param && "coercion value has an unexpected free variable");
        }
#else
        (void)v;
        (void)env;
#endif
    }

    void assert_translation_closed(const TLProgram& p) {
#ifndef NDEBUG
        NameSet bound;
        for (const auto& [x, v] : p.bindings) bound.insert(x);
        for (const auto& [x, v] : p.bindings)
            for (Name f : tl_free_vars(v)) assert(bound.count(f) && "unbound name in translated binding");
        for (Name f : tl_free_vars(p.main)) assert(bound.count(f) && "unbound name in translated main");
#else
        (void)p;
#endif
    }

    static std::uint64_t mix(std::uint64_t seed, std::uint64_t site) {
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (site + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    const DeclTable& table_;
    Strategy strat_;
    Sabotage sab_;
    std::size_t max_tuple_;
    NameMap names_;
    std::uint64_t coercion_site_ = 0;
};

// Convenience entry point over a freshly built declaration table.
inline TranslateResult translate_program(const Program& p, const Strategy& strat = {},
                                         Sabotage sab = Sabotage::None,
                                         std::size_t max_tuple = kDefaultMaxTupleArity) {
    DeclTable table(p);
    Translator tr(table, strat, sab, max_tuple);
    return tr.run();
}

} // namespace fgg
