#pragma once

#include <string>

#include "fgg/ast.hpp"

namespace fgg {

inline std::string print_type(const TypePtr& t);

inline std::string print_type_list(const std::vector<TypePtr>& ts) {
    std::string s;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (i) s += ", ";
        s += print_type(ts[i]);
    }
    return s;
}

inline std::string print_type(const TypePtr& t) {
    if (const auto* tv = as_tyvar(t)) return tv->name.str();
    if (const auto* b = as_base(t)) {
        switch (b->kind) {
            case BaseKind::Int: return "int";
            case BaseKind::Bool: return "bool";
            case BaseKind::Str: return "string";
        }
    }
    const auto& n = std::get<NamedT>(t->node);
    // Non-generic types print without brackets, as in `t` for `t[]`.
    if (n.args.empty()) return n.name.str();
    return n.name.str() + "[" + print_type_list(n.args) + "]";
}

inline std::string escape_str(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += "\"";
    return out;
}

inline std::string print_expr(const ExprPtr& e);

namespace detail {

// Binop operands that are themselves binops get parenthesized, which keeps
// the printer trivially reparseable.
inline std::string print_operand(const ExprPtr& e) {
    if (std::holds_alternative<BinOp>(e->node)) return "(" + print_expr(e) + ")";
    return print_expr(e);
}

} // namespace detail

inline std::string print_expr(const ExprPtr& e) {
    return std::visit(
        [&](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, VarE>) {
                return n.name.str();
            } else if constexpr (std::is_same_v<T, StructLit>) {
                std::string s = print_type(n.type) + "{";
                for (std::size_t i = 0; i < n.args.size(); ++i) {
                    if (i) s += ", ";
                    s += print_expr(n.args[i]);
                }
                return s + "}";
            } else if constexpr (std::is_same_v<T, FieldAccess>) {
                return detail::print_operand(n.recv) + "." + n.field.str();
            } else if constexpr (std::is_same_v<T, MethodCall>) {
                std::string s = detail::print_operand(n.recv) + "." + n.method.str();
                if (!n.tyargs.empty()) s += "[" + print_type_list(n.tyargs) + "]";
                s += "(";
                for (std::size_t i = 0; i < n.args.size(); ++i) {
                    if (i) s += ", ";
                    s += print_expr(n.args[i]);
                }
                return s + ")";
            } else if constexpr (std::is_same_v<T, IntLit>) {
                return std::to_string(n.value);
            } else if constexpr (std::is_same_v<T, BoolLit>) {
                return n.value ? "true" : "false";
            } else if constexpr (std::is_same_v<T, StrLit>) {
                return escape_str(n.value);
            } else if constexpr (std::is_same_v<T, BinOp>) {
                const char* op = n.op == BinOpKind::EqInt ? " == "
                                 : n.op == BinOpKind::AddInt ? " + "
                                                             : " ++ ";
                return detail::print_operand(n.lhs) + op + detail::print_operand(n.rhs);
            } else {
                static_assert(std::is_same_v<T, Builtin>);
                return "intToString(" + print_expr(n.arg) + ")";
            }
        },
        e->node);
}

inline std::string print_typarams(const std::vector<TypeParam>& tps) {
    if (tps.empty()) return "";
    std::string s = "[";
    for (std::size_t i = 0; i < tps.size(); ++i) {
        if (i) s += ", ";
        s += tps[i].var.str() + " " + print_type(tps[i].bound);
    }
    return s + "]";
}

inline std::string print_sig(const MethodSig& sig) {
    std::string s = sig.name.str() + print_typarams(sig.typarams) + "(";
    for (std::size_t i = 0; i < sig.params.size(); ++i) {
        if (i) s += ", ";
        s += sig.params[i].var.str() + " " + print_type(sig.params[i].type);
    }
    return s + ") " + print_type(sig.ret);
}

inline std::string print_decl(const Decl& d) {
    if (const auto* s = std::get_if<StructDecl>(&d.node)) {
        std::string out = "type " + s->name.str() + print_typarams(s->typarams) + " struct {";
        for (std::size_t i = 0; i < s->fields.size(); ++i) {
            out += i ? "; " : " ";
            out += s->fields[i].var.str() + " " + print_type(s->fields[i].type);
        }
        return out + (s->fields.empty() ? "}" : " }");
    }
    if (const auto* i = std::get_if<IfaceDecl>(&d.node)) {
        std::string out = "type " + i->name.str() + print_typarams(i->typarams) + " interface {";
        for (std::size_t k = 0; k < i->specs.size(); ++k) {
            out += k ? "; " : " ";
            out += print_sig(i->specs[k]);
        }
        return out + (i->specs.empty() ? "}" : " }");
    }
    const auto& m = std::get<MethodDecl>(d.node);
    std::string recv = m.recv_var.str() + " " + m.recv_struct.str() + print_typarams(m.recv_typarams);
    return "func (" + recv + ") " + print_sig(m.sig) + " { return " + print_expr(m.body) + " }";
}

inline std::string print_program(const Program& p) {
    std::string out;
    for (const auto& d : p.decls) out += print_decl(d) + "\n";
    out += "func main() { _ = " + print_expr(p.main) + " }\n";
    return out;
}

} // namespace fgg
