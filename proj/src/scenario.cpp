#include "flexi/scenario.hpp"

#include <fstream>
#include <sstream>

namespace flexi {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::ScenarioParseError, "cannot read file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string schema_source_of(const nlohmann::json& obj, const std::string& base) {
    if (obj.contains("schema")) return obj.at("schema").get<std::string>();
    if (obj.contains("schema_file")) return read_file(base + "/" + obj.at("schema_file").get<std::string>());
    throw Error(ErrorCode::ScenarioParseError, "action needs 'schema' or 'schema_file'");
}

VariableAccess access_of(const nlohmann::json& j) {
    VariableAccess a;
    a.name = j.at("name").get<std::string>();
    if (j.contains("index")) a.index = j.at("index").get<std::uint64_t>();
    if (j.contains("key")) a.key = Word256::from_hex(j.at("key").get<std::string>());
    return a;
}

std::string describe(const nlohmann::json& action) {
    return action.dump();
}

class ScenarioRunner {
public:
    ScenarioRunner(ChainState& chain, std::string base) : chain_(chain), base_(std::move(base)) {}

    ScenarioReport run(const nlohmann::json& actions) {
        if (!actions.is_array())
            throw Error(ErrorCode::ScenarioParseError, "scenario must be a JSON array");
        for (const auto& action : actions) {
            step(action);
            if (!report_.passed) break; // first failure halts with context
        }
        finish_totals();
        return std::move(report_);
    }

private:
    void step(const nlohmann::json& action) {
        if (action.contains("advance")) {
            chain_.advance_block(action.at("advance").get<std::uint64_t>());
        } else if (action.contains("deploy") || action.contains("set") ||
                   action.contains("get") || action.contains("propose") ||
                   action.contains("vote") || action.contains("activate")) {
            run_tx(action);
        } else if (action.contains("assert_get")) {
            assert_get(action.at("assert_get"));
        } else if (action.contains("assert_phase")) {
            const auto& a = action.at("assert_phase");
            std::string got =
                contract_phase_name(chain_.contract_phase(a.at("contract").get<std::string>()));
            check(got == a.at("equals").get<std::string>(), describe(action),
                  "phase is " + got);
        } else if (action.contains("assert_version")) {
            const auto& a = action.at("assert_version");
            std::uint32_t got = chain_.contract(a.at("contract").get<std::string>()).version;
            check(got == a.at("equals").get<std::uint32_t>(), describe(action),
                  "version is " + std::to_string(got));
        } else if (action.contains("assert_account_count")) {
            std::size_t got = chain_.account_count();
            check(got == action.at("assert_account_count").get<std::size_t>(), describe(action),
                  "account count is " + std::to_string(got));
        } else if (action.contains("assert_last_receipt")) {
            assert_last_receipt(action.at("assert_last_receipt"), describe(action));
        } else {
            throw Error(ErrorCode::ScenarioParseError, "unknown action: " + action.dump());
        }
    }

    Transaction build_tx(const nlohmann::json& action) {
        Transaction tx;
        tx.sender = action.value("sender", "deployer");
        if (action.contains("deploy")) {
            const auto& d = action.at("deploy");
            DeployAction a;
            a.contract = d.at("contract").get<std::string>();
            a.schema_source = schema_source_of(d, base_);
            a.members = d.at("members").get<std::vector<std::string>>();
            if (d.contains("params")) a.params = governance_params_from_json(d.at("params"));
            tx.sender = d.value("sender", tx.sender);
            tx.action = std::move(a);
        } else if (action.contains("set")) {
            const auto& s = action.at("set");
            tx.sender = s.value("sender", tx.sender);
            tx.action = SetVarAction{s.at("contract").get<std::string>(),
                                     access_of(s.at("access")),
                                     Word256::from_hex(s.at("value").get<std::string>())};
        } else if (action.contains("get")) {
            const auto& g = action.at("get");
            tx.sender = g.value("sender", tx.sender);
            tx.action = GetVarAction{g.at("contract").get<std::string>(),
                                     access_of(g.at("access"))};
        } else if (action.contains("propose")) {
            const auto& p = action.at("propose");
            ProposeAction a;
            a.contract = p.at("contract").get<std::string>();
            if (p.contains("schema") || p.contains("schema_file"))
                a.new_schema_source = schema_source_of(p, base_);
            if (p.contains("params")) a.new_params = governance_params_from_json(p.at("params"));
            tx.sender = p.value("sender", tx.sender);
            tx.action = std::move(a);
        } else if (action.contains("vote")) {
            const auto& v = action.at("vote");
            tx.sender = v.value("sender", tx.sender);
            tx.action = VoteAction{v.at("contract").get<std::string>(),
                                   v.at("proposal").get<std::uint32_t>(),
                                   v.at("choice").get<std::string>() == "yes" ? VoteChoice::Yes
                                                                              : VoteChoice::No};
        } else {
            const auto& a = action.at("activate");
            ActivateAction act;
            act.contract = a.at("contract").get<std::string>();
            act.proposal_id = a.at("proposal").get<std::uint32_t>();
            if (a.contains("plan")) act.plan = MigrationPlan::from_json(a.at("plan").dump());
            tx.sender = a.value("sender", tx.sender);
            tx.action = std::move(act);
        }
        return tx;
    }

    void run_tx(const nlohmann::json& action) {
        Transaction tx = build_tx(action);
        last_receipt_ = chain_.apply_tx(tx);
        if (action.contains("expect_error")) {
            std::string expected = action.at("expect_error").get<std::string>();
            check(!last_receipt_.success && last_receipt_.error == expected, describe(action),
                  last_receipt_.success ? "transaction unexpectedly succeeded"
                                        : "failed with " + last_receipt_.error);
        } else if (!last_receipt_.success) {
            check(false, describe(action),
                  "transaction failed with " + last_receipt_.error +
                      (last_receipt_.warnings.empty() ? "" : ": " + last_receipt_.warnings[0]));
        }
    }

    void assert_get(const nlohmann::json& a) {
        nlohmann::json get_action{{"get", a}};
        if (a.contains("sender")) get_action["get"]["sender"] = a.at("sender");
        Transaction tx = build_tx(get_action);
        last_receipt_ = chain_.apply_tx(tx);
        std::string desc = "assert_get " + a.dump();
        if (a.contains("expect_error")) {
            std::string expected = a.at("expect_error").get<std::string>();
            check(!last_receipt_.success && last_receipt_.error == expected, desc,
                  last_receipt_.success ? "read unexpectedly succeeded"
                                        : "failed with " + last_receipt_.error);
            return;
        }
        if (!last_receipt_.success) {
            check(false, desc, "read failed with " + last_receipt_.error);
            return;
        }
        Word256 expected = Word256::from_hex(a.at("equals").get<std::string>());
        check(last_receipt_.return_value == expected, desc,
              "read " + (last_receipt_.return_value ? last_receipt_.return_value->to_hex()
                                                    : std::string("<nothing>")));
    }

    void assert_last_receipt(const nlohmann::json& a, const std::string& desc) {
        if (a.contains("success"))
            check(last_receipt_.success == a.at("success").get<bool>(), desc,
                  std::string("success=") + (last_receipt_.success ? "true" : "false"));
        if (a.contains("accounts_touched"))
            check(last_receipt_.accounts_touched == a.at("accounts_touched").get<unsigned>(),
                  desc, "accounts_touched=" + std::to_string(last_receipt_.accounts_touched));
        if (a.contains("slots_written"))
            check(last_receipt_.slots_written == a.at("slots_written").get<std::uint64_t>(), desc,
                  "slots_written=" + std::to_string(last_receipt_.slots_written));
        if (a.contains("max_slots_written"))
            check(last_receipt_.slots_written <= a.at("max_slots_written").get<std::uint64_t>(),
                  desc, "slots_written=" + std::to_string(last_receipt_.slots_written));
    }

    void check(bool ok, const std::string& description, const std::string& detail) {
        report_.assertions.push_back({description, ok, detail});
        if (!ok) report_.passed = false;
    }

    void finish_totals() {
        for (const auto& [_, acct] : chain_.accounts()) {
            if (!acct.is_contract) continue;
            report_.total_reads += acct.contract->storage.read_count();
            report_.total_writes += acct.contract->storage.write_count();
        }
    }

    ChainState& chain_;
    std::string base_;
    ScenarioReport report_;
    TxReceipt last_receipt_;
};

} // namespace

ScenarioReport run_scenario(const std::string& scenario_json, ChainState& chain,
                            const std::string& scenario_base) {
    nlohmann::json actions;
    try {
        actions = nlohmann::json::parse(scenario_json);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ScenarioParseError, e.what());
    }
    return ScenarioRunner(chain, scenario_base).run(actions);
}

ScenarioReport run_scenario_file(const std::string& path, ChainState& chain) {
    auto slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? "." : path.substr(0, slash);
    return run_scenario(read_file(path), chain, base);
}

std::string ScenarioReport::to_json() const {
    nlohmann::json j;
    j["passed"] = passed;
    j["assertions"] = nlohmann::json::array();
    for (const auto& a : assertions)
        j["assertions"].push_back(
            {{"assertion", a.description}, {"passed", a.passed}, {"detail", a.detail}});
    j["total_reads"] = total_reads;
    j["total_writes"] = total_writes;
    return j.dump(2);
}

} // namespace flexi
