#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace fgg {

// Stable diagnostic codes. Reports and the corpus runner match on the
// spelling returned by code_name, so renaming an enumerator is a breaking
// change to the corpus format.
enum class Code {
    // syntax
    SyntaxError,
    // program restrictions
    DuplicateStruct,
    DuplicateIface,
    DuplicateField,
    DuplicateReceiver,
    DuplicateIfaceMethod,
    // well-formedness
    UnboundTypeVar,
    UnknownTypeName,
    NotAnInterfaceBound,
    ArityMismatch,
    BoundViolation,
    DuplicateTyVar,
    ShadowedTyVar,
    DuplicateParam,
    ReceiverShadowsParam,
    UnknownStruct,
    ReceiverBoundsNotCovariant,
    // expression typing
    UnknownVar,
    UnknownField,
    FieldOnNonStruct,
    NotAStruct,
    StructArity,
    ArgArity,
    TypeArgArity,
    NoSuchMethod,
    NoSubtypePath,
    UnknownInterface,
    BaseDisabled,
    // target language
    TupleArityExceeded,
    ShapeError,
};

inline const char* code_name(Code c) {
    switch (c) {
        case Code::SyntaxError: return "SyntaxError";
        case Code::DuplicateStruct: return "DuplicateStruct";
        case Code::DuplicateIface: return "DuplicateIface";
        case Code::DuplicateField: return "DuplicateField";
        case Code::DuplicateReceiver: return "DuplicateReceiver";
        case Code::DuplicateIfaceMethod: return "DuplicateIfaceMethod";
        case Code::UnboundTypeVar: return "UnboundTypeVar";
        case Code::UnknownTypeName: return "UnknownTypeName";
        case Code::NotAnInterfaceBound: return "NotAnInterfaceBound";
        case Code::ArityMismatch: return "ArityMismatch";
        case Code::BoundViolation: return "BoundViolation";
        case Code::DuplicateTyVar: return "DuplicateTyVar";
        case Code::ShadowedTyVar: return "ShadowedTyVar";
        case Code::DuplicateParam: return "DuplicateParam";
        case Code::ReceiverShadowsParam: return "ReceiverShadowsParam";
        case Code::UnknownStruct: return "UnknownStruct";
        case Code::ReceiverBoundsNotCovariant: return "ReceiverBoundsNotCovariant";
        case Code::UnknownVar: return "UnknownVar";
        case Code::UnknownField: return "UnknownField";
        case Code::FieldOnNonStruct: return "FieldOnNonStruct";
        case Code::NotAStruct: return "NotAStruct";
        case Code::StructArity: return "StructArity";
        case Code::ArgArity: return "ArgArity";
        case Code::TypeArgArity: return "TypeArgArity";
        case Code::NoSuchMethod: return "NoSuchMethod";
        case Code::NoSubtypePath: return "NoSubtypePath";
        case Code::UnknownInterface: return "UnknownInterface";
        case Code::BaseDisabled: return "BaseDisabled";
        case Code::TupleArityExceeded: return "TupleArityExceeded";
        case Code::ShapeError: return "ShapeError";
    }
    return "Unknown";
}

struct Pos {
    int line = 0;
    int col = 0;
};

struct Diag {
    Code code;
    std::string message;
    std::optional<Pos> pos;

    std::string render() const {
        std::string s = code_name(code);
        if (pos) s += " at " + std::to_string(pos->line) + ":" + std::to_string(pos->col);
        if (!message.empty()) s += ": " + message;
        return s;
    }
};

struct TypeError : std::runtime_error {
    Diag diag;
    explicit TypeError(Diag d) : std::runtime_error(d.render()), diag(std::move(d)) {}
    TypeError(Code c, std::string msg)
        : TypeError(Diag{c, std::move(msg), std::nullopt}) {}
};

} // namespace fgg
