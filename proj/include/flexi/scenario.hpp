#pragma once

#include "flexi/chain.hpp"

#include <string>
#include <vector>

namespace flexi {

struct AssertionResult {
    std::string description;
    bool passed = true;
    std::string detail;
};

struct ScenarioReport {
    std::vector<AssertionResult> assertions;
    bool passed = true;
    std::uint64_t total_reads = 0;  // storage read ops across all contracts
    std::uint64_t total_writes = 0;
    std::string to_json() const;
};

/// Executes a scenario: a JSON array of actions and assertions.
/// Actions: {"deploy": ...}, {"set": ...}, {"get": ...}, {"propose": ...},
/// {"vote": ...}, {"advance": n}, {"activate": ...}.
/// Assertions: {"assert_get": {..., "equals": "0x.."}},
/// {"assert_phase": {"contract":..., "equals":...}},
/// {"assert_version": {"contract":..., "equals": n}},
/// {"assert_account_count": n},
/// {"assert_last_receipt": {"success":..., "error":..., "accounts_touched":...,
/// "max_slots_written":...}}.
/// Tx actions accept "expect_error": "<code>" to assert a failure.
/// Execution stops at the first failed assertion; scenario_base resolves
/// relative schema_file paths.
ScenarioReport run_scenario(const std::string& scenario_json, ChainState& chain,
                            const std::string& scenario_base = ".");

ScenarioReport run_scenario_file(const std::string& path, ChainState& chain);

} // namespace flexi
