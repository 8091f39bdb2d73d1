#include "flexi/layout.hpp"

namespace flexi {

const VarLocation& StorageLayout::at(const std::string& name) const {
    auto it = locations.find(name);
    if (it == locations.end())
        throw Error(ErrorCode::UnknownVariable, "no variable '" + name + "' in layout");
    return it->second;
}

StorageLayout compute_layout(const ContractSchema& schema) {
    StorageLayout layout;
    layout.schema_version = schema.version;
    std::uint64_t slot = 0;
    unsigned offset = 0; // next free byte from the low-order end

    auto fresh_slot = [&] {
        if (offset > 0) {
            ++slot;
            offset = 0;
        }
    };

    for (const auto& var : schema.variables) {
        if (const auto* vt = std::get_if<ValueType>(&var.var_type)) {
            unsigned size = type_size_bytes(*vt);
            if (offset + size > 32) fresh_slot();
            layout.locations.emplace(var.name,
                                     PackedLocation{Word256::from_u64(slot), offset, size});
            offset += size;
            if (offset == 32) fresh_slot();
        } else if (const auto* fa = std::get_if<FixedArrayType>(&var.var_type)) {
            fresh_slot();
            layout.locations.emplace(var.name,
                                     FixedArrayLocation{Word256::from_u64(slot), fa->element,
                                                        fa->length});
            unsigned size = type_size_bytes(fa->element);
            std::uint64_t per_slot = 32 / size;
            std::uint64_t slots = (fa->length + per_slot - 1) / per_slot;
            slot += slots;
        } else if (const auto* da = std::get_if<DynamicArrayType>(&var.var_type)) {
            fresh_slot();
            layout.locations.emplace(var.name,
                                     DynArrayLocation{Word256::from_u64(slot), da->element});
            ++slot;
        } else {
            const auto& m = std::get<MappingType>(var.var_type);
            fresh_slot();
            layout.locations.emplace(var.name,
                                     MappingLocation{Word256::from_u64(slot), m.key, m.value});
            ++slot;
        }
    }
    layout.slots_used_header = slot + (offset > 0 ? 1 : 0);
    return layout;
}

SlotAddress dyn_array_data_base(const SlotAddress& p) {
    return keccak256_word(p);
}

SlotAddress mapping_value_slot(const SlotAddress& p, const Word256& key_bytes) {
    return keccak256_words(key_bytes, p);
}

PhysicalRange array_element_range(const SlotAddress& data_base, const ValueType& element,
                                  std::uint64_t index) {
    unsigned size = type_size_bytes(element);
    std::uint64_t per_slot = 32 / size;
    return {data_base.add_u64(index / per_slot), static_cast<unsigned>((index % per_slot) * size),
            size};
}

PhysicalRange locate(const StorageLayout& layout, const VariableAccess& access,
                     std::uint64_t dyn_len) {
    const VarLocation& loc = layout.at(access.name);

    if (const auto* p = std::get_if<PackedLocation>(&loc)) {
        if (access.index || access.key)
            throw Error(ErrorCode::AccessShapeMismatch,
                        "'" + access.name + "' is a scalar, no index/key applies");
        return {p->slot, p->byte_offset, p->size_bytes};
    }
    if (const auto* fa = std::get_if<FixedArrayLocation>(&loc)) {
        if (!access.index || access.key)
            throw Error(ErrorCode::AccessShapeMismatch,
                        "'" + access.name + "' is a fixed array, an index is required");
        if (*access.index >= fa->length)
            throw Error(ErrorCode::IndexOutOfBounds,
                        access.name + "[" + std::to_string(*access.index) + "] exceeds length " +
                            std::to_string(fa->length));
        return array_element_range(fa->base_slot, fa->element, *access.index);
    }
    if (const auto* da = std::get_if<DynArrayLocation>(&loc)) {
        if (!access.index || access.key)
            throw Error(ErrorCode::AccessShapeMismatch,
                        "'" + access.name + "' is a dynamic array, an index is required");
        if (*access.index >= dyn_len)
            throw Error(ErrorCode::IndexOutOfBounds,
                        access.name + "[" + std::to_string(*access.index) + "] exceeds length " +
                            std::to_string(dyn_len));
        return array_element_range(dyn_array_data_base(da->header_slot), da->element,
                                   *access.index);
    }
    const auto& m = std::get<MappingLocation>(loc);
    if (!access.key || access.index)
        throw Error(ErrorCode::AccessShapeMismatch,
                    "'" + access.name + "' is a mapping, a key is required");
    return {mapping_value_slot(m.header_slot, *access.key), 0, type_size_bytes(m.value)};
}

} // namespace flexi
