#include "flexi/chain.hpp"

#include <doctest.h>

using namespace flexi;

namespace {

Transaction deploy_tx(const std::string& contract, const std::string& schema,
                      std::vector<std::string> members = {"alice", "bob", "carol"}) {
    return Transaction{"alice", DeployAction{contract, schema, GovernanceParams{},
                                             std::move(members)}};
}

Transaction set_tx(const std::string& sender, const std::string& contract, VariableAccess access,
                   std::uint64_t value) {
    return Transaction{sender, SetVarAction{contract, std::move(access),
                                            Word256::from_u64(value)}};
}

Transaction get_tx(const std::string& sender, const std::string& contract,
                   VariableAccess access) {
    return Transaction{sender, GetVarAction{contract, std::move(access)}};
}

} // namespace

TEST_CASE("deploy then read back a default-zero variable") {
    ChainState chain;
    auto r = chain.apply_tx(deploy_tx("token", "contract Token { uint256 supply; }"));
    CHECK(r.success);
    CHECK(chain.account_count() == 4); // contract + three stakeholders

    auto g = chain.apply_tx(get_tx("alice", "token", {"supply", {}, {}}));
    REQUIRE(g.success);
    CHECK(g.return_value == Word256{});
    CHECK(chain.contract("token").version == 1);
    CHECK(chain.contract_phase("token") == ContractPhase::Executable);
}

TEST_CASE("set and get cover scalars, arrays and mappings") {
    ChainState chain;
    chain.apply_tx(deploy_tx("c", "contract C { uint64 a; uint8[3] fix; uint256[] dyn; "
                                  "mapping(uint256 => uint256) m; }"));

    CHECK(chain.apply_tx(set_tx("alice", "c", {"a", {}, {}}, 42)).success);
    CHECK(chain.apply_tx(set_tx("alice", "c", {"fix", 2, {}}, 7)).success);
    CHECK(chain.apply_tx(
                   Transaction{"alice", SetVarAction{"c", {"m", {}, Word256::from_u64(5)},
                                                     Word256::from_u64(50)}})
              .success);

    CHECK(chain.apply_tx(get_tx("alice", "c", {"a", {}, {}})).return_value ==
          Word256::from_u64(42));
    CHECK(chain.apply_tx(get_tx("alice", "c", {"fix", 2, {}})).return_value ==
          Word256::from_u64(7));
    CHECK(chain.apply_tx(get_tx("alice", "c", {"m", {}, Word256::from_u64(5)})).return_value ==
          Word256::from_u64(50));

    // the journal recorded the mapping key for later rehashes
    CHECK(chain.contract("c").storage.journaled_keys("m") ==
          std::set<Word256>{Word256::from_u64(5)});
}

TEST_CASE("writing past a dynamic array's end grows it") {
    ChainState chain;
    chain.apply_tx(deploy_tx("c", "contract C { uint256[] dyn; }"));
    CHECK(chain.apply_tx(set_tx("alice", "c", {"dyn", 0, {}}, 10)).success);
    CHECK(chain.apply_tx(set_tx("alice", "c", {"dyn", 2, {}}, 30)).success);
    // length is now 3; index 1 exists and reads zero
    CHECK(chain.apply_tx(get_tx("alice", "c", {"dyn", 1, {}})).return_value == Word256{});
    CHECK(chain.contract("c").storage.peek(Word256::from_u64(0)) == Word256::from_u64(3));
    // reading beyond the length fails
    auto r = chain.apply_tx(get_tx("alice", "c", {"dyn", 9, {}}));
    CHECK(!r.success);
    CHECK(r.error == "IndexOutOfBounds");
}

TEST_CASE("failed transactions leave state untouched and name their error") {
    ChainState chain;
    chain.apply_tx(deploy_tx("c", "contract C { uint8 small; bool flag; }"));

    auto r1 = chain.apply_tx(set_tx("alice", "c", {"small", {}, {}}, 256));
    CHECK(!r1.success);
    CHECK(r1.error == "ValueOutOfRange");
    auto r2 = chain.apply_tx(set_tx("alice", "c", {"flag", {}, {}}, 2));
    CHECK(!r2.success);
    CHECK(r2.error == "ValueOutOfRange");
    auto r3 = chain.apply_tx(get_tx("alice", "c", {"ghost", {}, {}}));
    CHECK(!r3.success);
    CHECK(r3.error == "UnknownVariable");
    auto r4 = chain.apply_tx(get_tx("nobody", "c", {"small", {}, {}}));
    CHECK(!r4.success);
    CHECK(r4.error == "UnknownAccount");
    auto r5 = chain.apply_tx(get_tx("alice", "ghost", {"small", {}, {}}));
    CHECK(!r5.success);
    CHECK(r5.error == "UnknownContract");

    CHECK(chain.contract("c").storage.slot_count() == 0);
    // negative in-range signed values round trip
    chain.apply_tx(deploy_tx("s", "contract S { int16 t; }"));
    Word256 minus_two;
    minus_two.bytes.fill(0xff);
    minus_two.bytes[31] = 0xfe;
    CHECK(chain.apply_tx(Transaction{"alice", SetVarAction{"s", {"t", {}, {}}, minus_two}})
              .success);
    CHECK(chain.apply_tx(get_tx("alice", "s", {"t", {}, {}})).return_value == minus_two);
}

TEST_CASE("the full upgrade lifecycle migrates storage in place") {
    ChainState chain;
    chain.apply_tx(
        deploy_tx("demo", "contract Demo { uint256 a; uint256 b; uint256 c; uint256 d; }"));
    for (std::uint64_t i = 0; i < 4; ++i) {
        const char* names[] = {"a", "b", "c", "d"};
        chain.apply_tx(set_tx("alice", "demo", {names[i], {}, {}}, 100 + i));
    }

    auto pr = chain.apply_tx(Transaction{
        "alice", ProposeAction{"demo",
                               "contract Demo { uint256 a; uint256 c; uint256 b; uint256 e; "
                               "uint256 d; }",
                               {}}});
    REQUIRE(pr.success);
    std::uint32_t id = pr.proposal_id;
    CHECK(chain.contract_phase("demo") == ContractPhase::VotingOpen);

    // while voting is open execution continues
    CHECK(chain.apply_tx(get_tx("bob", "demo", {"a", {}, {}})).success);

    CHECK(chain.apply_tx(Transaction{"alice", VoteAction{"demo", id, VoteChoice::Yes}}).success);
    CHECK(chain.apply_tx(Transaction{"bob", VoteAction{"demo", id, VoteChoice::Yes}}).success);
    CHECK(chain.contract_phase("demo") == ContractPhase::NonExecutable);

    // halted: reads and writes bounce
    auto blocked = chain.apply_tx(get_tx("bob", "demo", {"a", {}, {}}));
    CHECK(!blocked.success);
    CHECK(blocked.error == "ContractHalted");
    CHECK(!chain.apply_tx(set_tx("bob", "demo", {"a", {}, {}}, 1)).success);

    Address addr_before = chain.account("demo").address;
    auto ar = chain.apply_tx(Transaction{"carol", ActivateAction{"demo", id, {}}});
    REQUIRE(ar.success);
    CHECK(chain.contract("demo").version == 2);
    CHECK(chain.contract_phase("demo") == ContractPhase::Executable);
    CHECK(chain.account("demo").address == addr_before); // address survives upgrades

    // data followed the variables
    CHECK(chain.apply_tx(get_tx("alice", "demo", {"a", {}, {}})).return_value ==
          Word256::from_u64(100));
    CHECK(chain.apply_tx(get_tx("alice", "demo", {"b", {}, {}})).return_value ==
          Word256::from_u64(101));
    CHECK(chain.apply_tx(get_tx("alice", "demo", {"c", {}, {}})).return_value ==
          Word256::from_u64(102));
    CHECK(chain.apply_tx(get_tx("alice", "demo", {"d", {}, {}})).return_value ==
          Word256::from_u64(103));
    CHECK(chain.apply_tx(get_tx("alice", "demo", {"e", {}, {}})).return_value == Word256{});

    // physical slots match the new layout
    const ContractStorage& st = chain.contract("demo").storage;
    CHECK(st.peek(Word256::from_u64(1)) == Word256::from_u64(102));
    CHECK(st.peek(Word256::from_u64(2)) == Word256::from_u64(101));
    CHECK(st.peek(scratch_slot_address()).is_zero());
}

TEST_CASE("activation without an approved proposal or with a wrong plan fails") {
    ChainState chain;
    chain.apply_tx(deploy_tx("c", "contract C { uint256 a; uint256 b; }"));
    auto pr = chain.apply_tx(
        Transaction{"alice", ProposeAction{"c", "contract C { uint256 b; uint256 a; }", {}}});
    std::uint32_t id = pr.proposal_id;

    auto r = chain.apply_tx(Transaction{"alice", ActivateAction{"c", id, {}}});
    CHECK(!r.success);
    CHECK(r.error == "NotApproved");

    chain.apply_tx(Transaction{"alice", VoteAction{"c", id, VoteChoice::Yes}});
    chain.apply_tx(Transaction{"bob", VoteAction{"c", id, VoteChoice::Yes}});

    // supplying a plan whose hash differs from the voted one is refused
    MigrationPlan wrong;
    wrong.from_version = 1;
    wrong.to_version = 2;
    auto r2 = chain.apply_tx(Transaction{"alice", ActivateAction{"c", id, wrong}});
    CHECK(!r2.success);
    CHECK(r2.error == "PlanHashMismatch");
    CHECK(chain.contract("c").version == 1);

    CHECK(chain.apply_tx(Transaction{"alice", ActivateAction{"c", id, {}}}).success);
    CHECK(chain.contract("c").version == 2);
}

TEST_CASE("expiry at the deadline reopens execution") {
    ChainState chain;
    chain.apply_tx(deploy_tx("c", "contract C { uint256 a; }"));
    auto pr = chain.apply_tx(
        Transaction{"alice", ProposeAction{"c", "contract C { uint256 a; uint256 b; }", {}}});
    chain.apply_tx(Transaction{"alice", VoteAction{"c", pr.proposal_id, VoteChoice::Yes}});

    CHECK_THROWS_AS(chain.advance_block(0), Error);
    chain.advance_block(20);
    CHECK(chain.current_block() == 20);
    CHECK(chain.contract("c").governance.find_proposal(pr.proposal_id)->status ==
          ProposalStatus::Expired);
    CHECK(chain.contract_phase("c") == ContractPhase::Executable);
    CHECK(chain.contract("c").version == 1);
}

TEST_CASE("receipts count slot traffic and touched accounts") {
    ChainState chain;
    chain.apply_tx(deploy_tx("c", "contract C { uint256 a; uint256[] dyn; }"));

    auto w = chain.apply_tx(set_tx("alice", "c", {"a", {}, {}}, 5));
    CHECK(w.slots_written == 1);
    CHECK(w.slots_read == 0);
    CHECK(w.accounts_touched == 1);

    // growing a dynamic array reads the length and writes header + element
    auto g = chain.apply_tx(set_tx("alice", "c", {"dyn", 0, {}}, 9));
    CHECK(g.slots_read == 1);
    CHECK(g.slots_written == 2);

    auto r = chain.apply_tx(get_tx("alice", "c", {"a", {}, {}}));
    CHECK(r.slots_read == 1);
    CHECK(r.slots_written == 0);
}

TEST_CASE("account addresses are deterministic and distinct") {
    ChainState a, b;
    a.apply_tx(deploy_tx("token", "contract T { uint8 x; }"));
    b.apply_tx(deploy_tx("token", "contract T { uint8 x; }"));
    CHECK(a.account("token").address == b.account("token").address);
    CHECK(a.account("alice").address == b.account("alice").address);
    CHECK(a.account("token").address != a.account("alice").address);
    CHECK(address_hex(a.account("token").address).size() == 42);
}

TEST_CASE("replaying the transaction log reproduces the snapshot byte for byte") {
    ChainState chain;
    chain.apply_tx(deploy_tx("demo", "contract Demo { uint256 a; uint256[] dyn; "
                                     "mapping(uint256 => uint256) m; }"));
    chain.apply_tx(set_tx("alice", "demo", {"a", {}, {}}, 1));
    chain.apply_tx(set_tx("bob", "demo", {"dyn", 0, {}}, 2));
    chain.apply_tx(Transaction{"carol", SetVarAction{"demo", {"m", {}, Word256::from_u64(9)},
                                                     Word256::from_u64(90)}});
    chain.advance_block(3);
    auto pr = chain.apply_tx(Transaction{
        "alice",
        ProposeAction{"demo",
                      "contract Demo { uint256 b; uint256 a; uint256[] dyn; "
                      "mapping(uint256 => uint256) m; }",
                      {}}});
    chain.apply_tx(Transaction{"alice", VoteAction{"demo", pr.proposal_id, VoteChoice::Yes}});
    chain.apply_tx(Transaction{"bob", VoteAction{"demo", pr.proposal_id, VoteChoice::Yes}});
    chain.apply_tx(Transaction{"bob", ActivateAction{"demo", pr.proposal_id, {}}});
    chain.apply_tx(set_tx("alice", "demo", {"b", {}, {}}, 7));
    // a failing transaction is part of the log and must replay identically
    chain.apply_tx(set_tx("alice", "demo", {"ghost", {}, {}}, 1));
    chain.advance_block(2);

    ChainState replayed = ChainState::replay(chain.tx_log());
    CHECK(replayed.to_snapshot_json() == chain.to_snapshot_json());
    CHECK(replayed.contract("demo").version == 2);
}
