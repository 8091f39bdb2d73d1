#pragma once

#include "flexi/analyzer.hpp"
#include "flexi/governance.hpp"
#include "flexi/layout.hpp"
#include "flexi/reorganizer.hpp"
#include "flexi/schema.hpp"
#include "flexi/store.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace flexi {

using Address = std::array<std::uint8_t, 20>;

std::string address_hex(const Address& a);

/// One contract account: schema, derived layout, storage, and its governance
/// record. The account address never changes across upgrades.
struct ContractAccount {
    ContractSchema schema;
    StorageLayout layout;
    ContractStorage storage;
    Governance governance;
    std::uint32_t version = 1;
    // plan attached by the off-chain analyzer at proposal time, by proposal id
    std::map<std::uint32_t, MigrationPlan> pending_plans;
};

struct Account {
    std::string label;
    Address address{};
    bool is_contract = false;
    std::optional<ContractAccount> contract;
};

struct DeployAction {
    std::string contract;
    std::string schema_source;
    GovernanceParams params;
    std::vector<std::string> members;
};

struct SetVarAction {
    std::string contract;
    VariableAccess access;
    Word256 value;
};

struct GetVarAction {
    std::string contract;
    VariableAccess access;
};

struct ProposeAction {
    std::string contract;
    // exactly one of the two is set
    std::optional<std::string> new_schema_source;
    std::optional<GovernanceParams> new_params;
};

struct VoteAction {
    std::string contract;
    std::uint32_t proposal_id = 0;
    VoteChoice choice = VoteChoice::Yes;
};

struct ActivateAction {
    std::string contract;
    std::uint32_t proposal_id = 0;
    std::optional<MigrationPlan> plan; // defaults to the plan attached at proposal time
};

using TxAction = std::variant<DeployAction, SetVarAction, GetVarAction, ProposeAction, VoteAction,
                              ActivateAction>;

struct Transaction {
    std::string sender;
    TxAction action;

    nlohmann::json to_json() const;
    static Transaction from_json(const nlohmann::json& j);
};

struct TxReceipt {
    bool success = true;
    std::string error;                  // error code name when !success
    std::optional<Word256> return_value; // GetVar result
    std::uint32_t proposal_id = 0;       // Propose result
    std::uint64_t slots_read = 0;
    std::uint64_t slots_written = 0;
    unsigned accounts_touched = 0; // contract accounts whose state was accessed
    std::vector<std::string> warnings;
};

/// Deterministic single-node chain: a block counter, serialized transactions
/// and per-block governance ticks. A failed transaction leaves state
/// unchanged and reports its error in the receipt.
class ChainState {
public:
    TxReceipt apply_tx(const Transaction& tx);
    void advance_block(std::uint64_t n);

    std::uint64_t current_block() const { return current_block_; }
    std::size_t account_count() const { return accounts_.size(); }

    const Account& account(const std::string& label) const;
    const ContractAccount& contract(const std::string& label) const;
    ContractPhase contract_phase(const std::string& label) const;

    const std::vector<nlohmann::json>& tx_log() const { return tx_log_; }
    const std::map<std::string, Account>& accounts() const { return accounts_; }

    std::string to_snapshot_json() const;

    /// Re-executes a transaction log from genesis.
    static ChainState replay(const std::vector<nlohmann::json>& log);

private:
    Account& ensure_stakeholder(const std::string& label);
    ContractAccount& contract_ref(const std::string& label);
    TxReceipt dispatch(const Transaction& tx);

    TxReceipt do_deploy(const Transaction& tx, const DeployAction& a);
    TxReceipt do_set(const Transaction& tx, const SetVarAction& a);
    TxReceipt do_get(const Transaction& tx, const GetVarAction& a);
    TxReceipt do_propose(const Transaction& tx, const ProposeAction& a);
    TxReceipt do_vote(const Transaction& tx, const VoteAction& a);
    TxReceipt do_activate(const Transaction& tx, const ActivateAction& a);

    std::uint64_t current_block_ = 0;
    std::map<std::string, Account> accounts_;
    std::vector<nlohmann::json> tx_log_;
};

/// Canonical 32-byte value checks for a variable of the given elementary
/// type; throws ValueOutOfRange when the word does not fit the width.
std::vector<std::uint8_t> encode_value(const ValueType& type, const Word256& word);
Word256 decode_value(const ValueType& type, const std::vector<std::uint8_t>& bytes);

} // namespace flexi
