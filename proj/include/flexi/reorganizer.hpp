#pragma once

#include "flexi/analyzer.hpp"
#include "flexi/layout.hpp"
#include "flexi/store.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace flexi {

struct ApplyReport {
    std::set<Word256> slots_written; // distinct slots whose content changed
    std::set<Word256> slots_read;
    std::uint64_t steps_executed = 0;

    std::string to_json() const;
};

/// Execute a migration plan in place, atomically: dynamic steps are expanded
/// against runtime state (array length at old_p, journaled mapping keys), and
/// on any error the storage is left untouched. When expected_version is given
/// it must equal the plan's from_version.
ApplyReport apply_plan(ContractStorage& storage, const MigrationPlan& plan,
                       std::optional<std::uint32_t> expected_version = std::nullopt);

/// Logical values of every variable, maintained independently by callers;
/// the oracle against which a migrated storage is checked.
struct ShadowState {
    std::map<std::string, std::vector<std::uint8_t>> scalars; // raw value bytes
    std::map<std::string, std::vector<std::vector<std::uint8_t>>> arrays;
    std::map<std::string, std::map<Word256, std::vector<std::uint8_t>>> mappings;
};

/// True iff every shadow entry reads back equal through new_layout.
bool verify_post_state(ContractStorage& storage, const StorageLayout& new_layout,
                       const ShadowState& shadow);

} // namespace flexi
