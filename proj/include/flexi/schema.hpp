#pragma once

#include "flexi/errors.hpp"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace flexi {

enum class ValueKind { UnsignedInt, SignedInt, Bool, Address, FixedBytes };

/// An elementary type occupying 1..32 bytes of a slot.
struct ValueType {
    ValueKind kind = ValueKind::UnsignedInt;
    unsigned width_bytes = 32;

    bool operator==(const ValueType&) const = default;

    /// DSL token: "uint64", "int8", "bool", "address", "bytes12".
    std::string token() const;
    static ValueType from_token(const std::string& token); // throws UnsupportedType
};

struct FixedArrayType {
    ValueType element;
    std::uint64_t length = 1;
    bool operator==(const FixedArrayType&) const = default;
};

struct DynamicArrayType {
    ValueType element;
    bool operator==(const DynamicArrayType&) const = default;
};

struct MappingType {
    ValueType key;
    ValueType value;
    bool operator==(const MappingType&) const = default;
};

using VarType = std::variant<ValueType, FixedArrayType, DynamicArrayType, MappingType>;

std::string var_type_token(const VarType& t);
bool var_types_equal(const VarType& a, const VarType& b);

struct StateVariable {
    std::string name;
    VarType var_type;
    std::uint32_t decl_index = 0;

    bool operator==(const StateVariable&) const = default;
};

struct ContractSchema {
    std::string contract_name;
    std::vector<StateVariable> variables; // ordered by decl_index
    std::uint32_t version = 1;

    bool operator==(const ContractSchema&) const = default;

    const StateVariable* find(const std::string& name) const;
};

/// Number of bytes the type consumes for packing decisions.
unsigned type_size_bytes(const ValueType& t);

/// Parses the declaration DSL:
///   contract IDENT { (TYPE IDENT ";")* }
/// with // line comments. Throws Error with SyntaxError / DuplicateVariable /
/// UnsupportedType; syntax errors carry line:column positions.
ContractSchema parse_schema(const std::string& source);

/// Canonical renderer; parse(render(s)) == s.
std::string render_schema(const ContractSchema& schema);

} // namespace flexi
