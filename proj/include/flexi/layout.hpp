#pragma once

#include "flexi/keccak.hpp"
#include "flexi/schema.hpp"
#include "flexi/word.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <variant>

namespace flexi {

using SlotAddress = Word256;

/// A scalar's physical placement: byte_offset counts from the low-order end
/// of the 32-byte word, so the first-packed variable sits at offset 0.
struct PackedLocation {
    SlotAddress slot;
    unsigned byte_offset = 0; // 0..31
    unsigned size_bytes = 32; // byte_offset + size_bytes <= 32
    bool operator==(const PackedLocation&) const = default;
};

struct FixedArrayLocation {
    SlotAddress base_slot;
    ValueType element;
    std::uint64_t length = 0;
    bool operator==(const FixedArrayLocation&) const = default;
};

/// Slot p holds the length; data begins at keccak256(p).
struct DynArrayLocation {
    SlotAddress header_slot;
    ValueType element;
    bool operator==(const DynArrayLocation&) const = default;
};

/// Slot p anchors hashing; value for key k lives at keccak256(enc(k) || p).
struct MappingLocation {
    SlotAddress header_slot;
    ValueType key;
    ValueType value;
    bool operator==(const MappingLocation&) const = default;
};

using VarLocation =
    std::variant<PackedLocation, FixedArrayLocation, DynArrayLocation, MappingLocation>;

struct StorageLayout {
    std::uint32_t schema_version = 1;
    std::map<std::string, VarLocation> locations;
    std::uint64_t slots_used_header = 0;

    const VarLocation& at(const std::string& name) const; // throws UnknownVariable
};

/// Name plus optional element index (arrays) or key (mappings).
struct VariableAccess {
    std::string name;
    std::optional<std::uint64_t> index;
    std::optional<Word256> key;
};

struct PhysicalRange {
    SlotAddress slot;
    unsigned byte_offset = 0;
    unsigned size_bytes = 32;
    bool operator==(const PhysicalRange&) const = default;
};

/// Ethereum-convention slot assignment: declaration order from slot 0,
/// scalars packed low-byte-first, arrays and mappings on fresh slots.
StorageLayout compute_layout(const ContractSchema& schema);

/// keccak256 of the 32-byte big-endian image of p.
SlotAddress dyn_array_data_base(const SlotAddress& p);

/// keccak256(key_bytes || p), both 32-byte big-endian.
SlotAddress mapping_value_slot(const SlotAddress& p, const Word256& key_bytes);

/// Elements never straddle slots: floor(32/size) elements per slot.
PhysicalRange array_element_range(const SlotAddress& data_base, const ValueType& element,
                                  std::uint64_t index);

/// Resolve an access to its physical byte range. Array bounds are checked
/// against the static length for fixed arrays and dyn_len for dynamic ones.
PhysicalRange locate(const StorageLayout& layout, const VariableAccess& access,
                     std::uint64_t dyn_len = UINT64_MAX);

} // namespace flexi
