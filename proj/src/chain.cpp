#include "flexi/chain.hpp"

namespace flexi {

std::string address_hex(const Address& a) {
    static const char* digits = "0123456789abcdef";
    std::string s = "0x";
    for (auto b : a) {
        s += digits[b >> 4];
        s += digits[b & 0xf];
    }
    return s;
}

namespace {

Address derive_address(const std::string& tag, const std::string& label) {
    Word256 h = keccak256(tag + ":" + label);
    Address a;
    std::copy(h.bytes.begin(), h.bytes.begin() + 20, a.begin());
    return a;
}

nlohmann::json access_to_json(const VariableAccess& a) {
    nlohmann::json j;
    j["name"] = a.name;
    if (a.index) j["index"] = *a.index;
    if (a.key) j["key"] = a.key->to_hex();
    return j;
}

VariableAccess access_from_json(const nlohmann::json& j) {
    VariableAccess a;
    a.name = j.at("name").get<std::string>();
    if (j.contains("index")) a.index = j.at("index").get<std::uint64_t>();
    if (j.contains("key")) a.key = Word256::from_hex(j.at("key").get<std::string>());
    return a;
}

/// The elementary type an access resolves to (element for arrays, value for
/// mappings). Shape errors are left to locate().
const ValueType* access_value_type(const ContractSchema& schema, const VariableAccess& access) {
    const StateVariable* var = schema.find(access.name);
    if (!var) return nullptr;
    if (const auto* vt = std::get_if<ValueType>(&var->var_type)) return vt;
    if (const auto* fa = std::get_if<FixedArrayType>(&var->var_type)) return &fa->element;
    if (const auto* da = std::get_if<DynamicArrayType>(&var->var_type)) return &da->element;
    return &std::get<MappingType>(var->var_type).value;
}

} // namespace

std::vector<std::uint8_t> encode_value(const ValueType& type, const Word256& word) {
    unsigned size = type_size_bytes(type);
    unsigned high = 32 - size;
    bool negative = type.kind == ValueKind::SignedInt && (word.bytes[high] & 0x80);
    std::uint8_t fill = negative ? 0xff : 0x00;
    for (unsigned i = 0; i < high; ++i)
        if (word.bytes[i] != fill)
            throw Error(ErrorCode::ValueOutOfRange,
                        "value does not fit in " + std::to_string(size) + " bytes");
    if (type.kind == ValueKind::Bool && word.bytes[31] > 1)
        throw Error(ErrorCode::ValueOutOfRange, "bool value must be 0 or 1");
    return {word.bytes.begin() + high, word.bytes.end()};
}

Word256 decode_value(const ValueType& type, const std::vector<std::uint8_t>& bytes) {
    Word256 w;
    unsigned high = 32 - static_cast<unsigned>(bytes.size());
    if (type.kind == ValueKind::SignedInt && !bytes.empty() && (bytes[0] & 0x80))
        std::fill(w.bytes.begin(), w.bytes.begin() + high, 0xff);
    std::copy(bytes.begin(), bytes.end(), w.bytes.begin() + high);
    return w;
}

nlohmann::json Transaction::to_json() const {
    nlohmann::json j;
    j["sender"] = sender;
    if (const auto* d = std::get_if<DeployAction>(&action)) {
        j["deploy"] = {{"contract", d->contract},
                       {"schema", d->schema_source},
                       {"members", d->members},
                       {"params", governance_params_to_json(d->params)}};
    } else if (const auto* s = std::get_if<SetVarAction>(&action)) {
        j["set"] = {{"contract", s->contract},
                    {"access", access_to_json(s->access)},
                    {"value", s->value.to_hex()}};
    } else if (const auto* g = std::get_if<GetVarAction>(&action)) {
        j["get"] = {{"contract", g->contract}, {"access", access_to_json(g->access)}};
    } else if (const auto* p = std::get_if<ProposeAction>(&action)) {
        nlohmann::json pj{{"contract", p->contract}};
        if (p->new_schema_source) pj["schema"] = *p->new_schema_source;
        if (p->new_params) pj["params"] = governance_params_to_json(*p->new_params);
        j["propose"] = std::move(pj);
    } else if (const auto* v = std::get_if<VoteAction>(&action)) {
        j["vote"] = {{"contract", v->contract},
                     {"proposal", v->proposal_id},
                     {"choice", v->choice == VoteChoice::Yes ? "yes" : "no"}};
    } else {
        const auto& a = std::get<ActivateAction>(action);
        j["activate"] = {{"contract", a.contract}, {"proposal", a.proposal_id}};
        if (a.plan) j["activate"]["plan"] = nlohmann::json::parse(a.plan->to_json());
    }
    return j;
}

Transaction Transaction::from_json(const nlohmann::json& j) {
    Transaction tx;
    tx.sender = j.at("sender").get<std::string>();
    if (j.contains("deploy")) {
        const auto& d = j.at("deploy");
        DeployAction a;
        a.contract = d.at("contract").get<std::string>();
        a.schema_source = d.at("schema").get<std::string>();
        a.members = d.at("members").get<std::vector<std::string>>();
        if (d.contains("params")) a.params = governance_params_from_json(d.at("params"));
        tx.action = std::move(a);
    } else if (j.contains("set")) {
        const auto& s = j.at("set");
        tx.action = SetVarAction{s.at("contract").get<std::string>(),
                                 access_from_json(s.at("access")),
                                 Word256::from_hex(s.at("value").get<std::string>())};
    } else if (j.contains("get")) {
        const auto& g = j.at("get");
        tx.action = GetVarAction{g.at("contract").get<std::string>(),
                                 access_from_json(g.at("access"))};
    } else if (j.contains("propose")) {
        const auto& p = j.at("propose");
        ProposeAction a;
        a.contract = p.at("contract").get<std::string>();
        if (p.contains("schema")) a.new_schema_source = p.at("schema").get<std::string>();
        if (p.contains("params")) a.new_params = governance_params_from_json(p.at("params"));
        tx.action = std::move(a);
    } else if (j.contains("vote")) {
        const auto& v = j.at("vote");
        tx.action = VoteAction{v.at("contract").get<std::string>(),
                               v.at("proposal").get<std::uint32_t>(),
                               v.at("choice").get<std::string>() == "yes" ? VoteChoice::Yes
                                                                          : VoteChoice::No};
    } else if (j.contains("activate")) {
        const auto& a = j.at("activate");
        ActivateAction act;
        act.contract = a.at("contract").get<std::string>();
        act.proposal_id = a.at("proposal").get<std::uint32_t>();
        if (a.contains("plan")) act.plan = MigrationPlan::from_json(a.at("plan").dump());
        tx.action = std::move(act);
    } else {
        throw Error(ErrorCode::BadTransaction, "transaction has no recognized action");
    }
    return tx;
}

const Account& ChainState::account(const std::string& label) const {
    auto it = accounts_.find(label);
    if (it == accounts_.end())
        throw Error(ErrorCode::UnknownAccount, "no account '" + label + "'");
    return it->second;
}

const ContractAccount& ChainState::contract(const std::string& label) const {
    const Account& a = account(label);
    if (!a.is_contract)
        throw Error(ErrorCode::UnknownContract, "'" + label + "' is not a contract account");
    return *a.contract;
}

ContractPhase ChainState::contract_phase(const std::string& label) const {
    return contract(label).governance.phase();
}

Account& ChainState::ensure_stakeholder(const std::string& label) {
    auto it = accounts_.find(label);
    if (it == accounts_.end()) {
        Account a;
        a.label = label;
        a.address = derive_address("account", label);
        it = accounts_.emplace(label, std::move(a)).first;
    }
    return it->second;
}

ContractAccount& ChainState::contract_ref(const std::string& label) {
    auto it = accounts_.find(label);
    if (it == accounts_.end())
        throw Error(ErrorCode::UnknownContract, "no contract '" + label + "'");
    if (!it->second.is_contract)
        throw Error(ErrorCode::UnknownContract, "'" + label + "' is not a contract account");
    return *it->second.contract;
}

TxReceipt ChainState::apply_tx(const Transaction& tx) {
    nlohmann::json entry;
    entry["tx"] = tx.to_json();
    tx_log_.push_back(std::move(entry));
    return dispatch(tx);
}

TxReceipt ChainState::dispatch(const Transaction& tx) {
    try {
        if (const auto* a = std::get_if<DeployAction>(&tx.action)) return do_deploy(tx, *a);
        if (!accounts_.count(tx.sender))
            throw Error(ErrorCode::UnknownAccount, "unknown sender '" + tx.sender + "'");
        if (const auto* a = std::get_if<SetVarAction>(&tx.action)) return do_set(tx, *a);
        if (const auto* a = std::get_if<GetVarAction>(&tx.action)) return do_get(tx, *a);
        if (const auto* a = std::get_if<ProposeAction>(&tx.action)) return do_propose(tx, *a);
        if (const auto* a = std::get_if<VoteAction>(&tx.action)) return do_vote(tx, *a);
        return do_activate(tx, std::get<ActivateAction>(tx.action));
    } catch (const Error& e) {
        TxReceipt r;
        r.success = false;
        r.error = error_code_name(e.code());
        r.warnings.push_back(e.what());
        return r;
    }
}

TxReceipt ChainState::do_deploy(const Transaction& tx, const DeployAction& a) {
    if (accounts_.count(a.contract))
        throw Error(ErrorCode::BadTransaction, "account '" + a.contract + "' already exists");

    ContractAccount ca;
    ca.schema = parse_schema(a.schema_source);
    ca.schema.version = 1;
    ca.layout = compute_layout(ca.schema);
    ca.governance = Governance(a.params, {a.members.begin(), a.members.end()});
    ca.version = 1;

    ensure_stakeholder(tx.sender);
    for (const auto& m : a.members) ensure_stakeholder(m);

    Account acct;
    acct.label = a.contract;
    acct.address = derive_address("contract", a.contract);
    acct.is_contract = true;
    acct.contract = std::move(ca);
    accounts_.emplace(a.contract, std::move(acct));

    TxReceipt r;
    r.accounts_touched = 1;
    return r;
}

TxReceipt ChainState::do_set(const Transaction&, const SetVarAction& a) {
    ContractAccount& ca = contract_ref(a.contract);
    if (!ca.governance.is_executable())
        throw Error(ErrorCode::ContractHalted, "contract '" + a.contract + "' is non-executable");

    const ValueType* vt = access_value_type(ca.schema, a.access);
    if (!vt) throw Error(ErrorCode::UnknownVariable, "no variable '" + a.access.name + "'");
    std::vector<std::uint8_t> bytes = encode_value(*vt, a.value);

    std::uint64_t reads0 = ca.storage.read_count(), writes0 = ca.storage.write_count();

    std::uint64_t dyn_len = UINT64_MAX;
    const StateVariable* var = ca.schema.find(a.access.name);
    if (std::holds_alternative<DynamicArrayType>(var->var_type) && a.access.index) {
        const auto& loc = std::get<DynArrayLocation>(ca.layout.at(a.access.name));
        dyn_len = ca.storage.read_slot(loc.header_slot).low_u64();
        if (*a.access.index >= dyn_len) {
            // writing one past (or beyond) the end grows the array
            dyn_len = *a.access.index + 1;
            ca.storage.write_slot(loc.header_slot, Word256::from_u64(dyn_len));
        }
    }

    PhysicalRange range = locate(ca.layout, a.access, dyn_len);
    ca.storage.write_bytes(range.slot, range.byte_offset, range.size_bytes, bytes);
    if (std::holds_alternative<MappingType>(var->var_type))
        ca.storage.journal_key(a.access.name, *a.access.key);

    TxReceipt r;
    r.slots_read = ca.storage.read_count() - reads0;
    r.slots_written = ca.storage.write_count() - writes0;
    r.accounts_touched = 1;
    return r;
}

TxReceipt ChainState::do_get(const Transaction&, const GetVarAction& a) {
    ContractAccount& ca = contract_ref(a.contract);
    if (!ca.governance.is_executable())
        throw Error(ErrorCode::ContractHalted, "contract '" + a.contract + "' is non-executable");

    const ValueType* vt = access_value_type(ca.schema, a.access);
    if (!vt) throw Error(ErrorCode::UnknownVariable, "no variable '" + a.access.name + "'");

    std::uint64_t reads0 = ca.storage.read_count(), writes0 = ca.storage.write_count();

    std::uint64_t dyn_len = UINT64_MAX;
    const StateVariable* var = ca.schema.find(a.access.name);
    if (std::holds_alternative<DynamicArrayType>(var->var_type) && a.access.index) {
        const auto& loc = std::get<DynArrayLocation>(ca.layout.at(a.access.name));
        dyn_len = ca.storage.read_slot(loc.header_slot).low_u64();
    }

    PhysicalRange range = locate(ca.layout, a.access, dyn_len);
    auto bytes = ca.storage.read_bytes(range.slot, range.byte_offset, range.size_bytes);

    TxReceipt r;
    r.return_value = decode_value(*vt, bytes);
    r.slots_read = ca.storage.read_count() - reads0;
    r.slots_written = ca.storage.write_count() - writes0;
    r.accounts_touched = 1;
    return r;
}

TxReceipt ChainState::do_propose(const Transaction& tx, const ProposeAction& a) {
    ContractAccount& ca = contract_ref(a.contract);
    TxReceipt r;
    r.accounts_touched = 1;

    if (a.new_schema_source && !a.new_params) {
        ContractSchema new_schema = parse_schema(*a.new_schema_source);
        new_schema.version = ca.version + 1;
        // the off-chain analyzer runs before voting; its plan hash is what
        // stakeholders vote on
        MigrationPlan plan = diff_layouts(ca.schema, new_schema);
        r.warnings = plan.warnings;
        Word256 hash = plan.hash();
        std::uint32_t id = ca.governance.submit_proposal(
            tx.sender, UpgradeProposal{std::move(new_schema), hash}, current_block_);
        ca.pending_plans.emplace(id, std::move(plan));
        r.proposal_id = id;
    } else if (a.new_params && !a.new_schema_source) {
        r.proposal_id = ca.governance.submit_proposal(
            tx.sender, ParamChangeProposal{*a.new_params}, current_block_);
    } else {
        throw Error(ErrorCode::BadTransaction,
                    "propose needs exactly one of a schema or new params");
    }
    return r;
}

TxReceipt ChainState::do_vote(const Transaction& tx, const VoteAction& a) {
    ContractAccount& ca = contract_ref(a.contract);
    ca.governance.cast_vote(tx.sender, a.proposal_id, a.choice, current_block_);
    TxReceipt r;
    r.accounts_touched = 1;
    return r;
}

TxReceipt ChainState::do_activate(const Transaction& tx, const ActivateAction& a) {
    ContractAccount& ca = contract_ref(a.contract);

    const MigrationPlan* plan = nullptr;
    if (a.plan) {
        plan = &*a.plan;
    } else {
        auto it = ca.pending_plans.find(a.proposal_id);
        if (it != ca.pending_plans.end()) plan = &it->second;
    }

    std::optional<Word256> supplied_hash;
    if (plan) supplied_hash = plan->hash();
    const Proposal& p = ca.governance.begin_activation(tx.sender, a.proposal_id, supplied_hash);

    TxReceipt r;
    r.accounts_touched = 1;
    if (const auto* up = std::get_if<UpgradeProposal>(&p.kind)) {
        ApplyReport report = apply_plan(ca.storage, *plan, ca.version);
        ca.schema = up->new_schema;
        ca.layout = compute_layout(ca.schema);
        ca.version = ca.schema.version;
        r.slots_read = report.slots_read.size();
        r.slots_written = report.slots_written.size();
    }
    ca.governance.finish_activation(a.proposal_id);
    ca.pending_plans.erase(a.proposal_id);
    return r;
}

void ChainState::advance_block(std::uint64_t n) {
    if (n < 1) throw Error(ErrorCode::BadTransaction, "advance_block needs n >= 1");
    tx_log_.push_back(nlohmann::json{{"advance", n}});
    for (std::uint64_t i = 0; i < n; ++i) {
        ++current_block_;
        for (auto& [_, acct] : accounts_)
            if (acct.is_contract) acct.contract->governance.on_block(current_block_);
    }
}

std::string ChainState::to_snapshot_json() const {
    nlohmann::json j;
    j["current_block"] = current_block_;
    j["accounts"] = nlohmann::json::object();
    for (const auto& [label, acct] : accounts_) {
        nlohmann::json aj;
        aj["address"] = address_hex(acct.address);
        aj["kind"] = acct.is_contract ? "contract" : "stakeholder";
        if (acct.is_contract) {
            const ContractAccount& ca = *acct.contract;
            nlohmann::json cj;
            cj["version"] = ca.version;
            cj["schema"] = render_schema(ca.schema);
            cj["storage"] = nlohmann::json::parse(ca.storage.to_snapshot_json());
            cj["governance"] = nlohmann::json::parse(ca.governance.to_json());
            aj["contract"] = std::move(cj);
        }
        j["accounts"][label] = std::move(aj);
    }
    j["tx_log"] = tx_log_;
    return j.dump(2);
}

ChainState ChainState::replay(const std::vector<nlohmann::json>& log) {
    ChainState chain;
    for (const auto& entry : log) {
        if (entry.contains("advance"))
            chain.advance_block(entry.at("advance").get<std::uint64_t>());
        else
            chain.apply_tx(Transaction::from_json(entry.at("tx")));
    }
    return chain;
}

} // namespace flexi
