#pragma once

#include "flexi/layout.hpp"
#include "flexi/schema.hpp"
#include "flexi/store.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace flexi {

/// Reserved cycle-breaker slot, 2^256 - 1. Restored to zero by apply.
Word256 scratch_slot_address();

struct MoveBytesStep {
    Word256 from_slot;
    unsigned from_off = 0;
    Word256 to_slot;
    unsigned to_off = 0;
    unsigned len = 32;
    bool operator==(const MoveBytesStep&) const = default;
};

struct RelocateDynArrayStep {
    std::string name;
    Word256 old_p;
    Word256 new_p;
    ValueType element;
    bool operator==(const RelocateDynArrayStep&) const = default;
};

struct RehashMappingStep {
    std::string name;
    Word256 old_p;
    Word256 new_p;
    ValueType key;
    ValueType value;
    bool operator==(const RehashMappingStep&) const = default;
};

struct ClearRangeStep {
    Word256 slot;
    unsigned off = 0;
    unsigned len = 32;
    bool operator==(const ClearRangeStep&) const = default;
};

struct UseScratchStep {
    Word256 slot;
    bool operator==(const UseScratchStep&) const = default;
};

using MigrationStep = std::variant<MoveBytesStep, RelocateDynArrayStep, RehashMappingStep,
                                   ClearRangeStep, UseScratchStep>;

struct MigrationPlan {
    std::uint32_t from_version = 1;
    std::uint32_t to_version = 2;
    std::vector<MigrationStep> steps; // conflict-free execution order
    std::vector<std::string> warnings;

    std::string to_json() const;
    static MigrationPlan from_json(const std::string& json_text);

    /// keccak256 of the canonical JSON serialization; what proposals vote on.
    Word256 hash() const;

    bool operator==(const MigrationPlan&) const = default;
};

/// The off-chain analysis: diff the two schemas' layouts into slot-level
/// instructions. Identity is by variable name; a changed type drops the data
/// (old location cleared, warning emitted). Requires new version = old + 1.
MigrationPlan diff_layouts(const ContractSchema& old_schema, const ContractSchema& new_schema);

/// All slots any step would write, expanding dynamic steps against the
/// current storage (array lengths, key journal).
std::set<Word256> plan_touched_slots(const MigrationPlan& plan, const ContractStorage& storage);

} // namespace flexi
