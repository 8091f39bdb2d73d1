#include "flexi/reorganizer.hpp"

#include "generators.hpp"

#include <doctest.h>

using namespace flexi;

namespace {

ContractSchema schema_v(const std::string& src, std::uint32_t version) {
    ContractSchema s = parse_schema(src);
    s.version = version;
    return s;
}

const Word256 kScratch = scratch_slot_address();

} // namespace

TEST_CASE("an empty plan is a no-op with an empty report") {
    ContractStorage storage;
    storage.write_slot(Word256::from_u64(0), Word256::from_u64(5));
    MigrationPlan plan;
    auto report = apply_plan(storage, plan);
    CHECK(report.steps_executed == 0);
    CHECK(report.slots_written.empty());
    CHECK(report.slots_read.empty());
    CHECK(storage.peek(Word256::from_u64(0)) == Word256::from_u64(5));
}

TEST_CASE("applying the reorder-with-insertion plan rearranges the slots") {
    // old: a=0 b=1 c=2 d=3 -> new: a=0 c=1 b=2 e=3 d=4
    auto v1 = schema_v("contract C { uint256 a; uint256 b; uint256 c; uint256 d; }", 1);
    auto v2 =
        schema_v("contract C { uint256 a; uint256 c; uint256 b; uint256 e; uint256 d; }", 2);
    ContractStorage storage;
    for (std::uint64_t i = 0; i < 4; ++i)
        storage.write_slot(Word256::from_u64(i), Word256::from_u64(100 + i));

    auto report = apply_plan(storage, diff_layouts(v1, v2));

    CHECK(storage.peek(Word256::from_u64(0)) == Word256::from_u64(100)); // a
    CHECK(storage.peek(Word256::from_u64(1)) == Word256::from_u64(102)); // c
    CHECK(storage.peek(Word256::from_u64(2)) == Word256::from_u64(101)); // b
    CHECK(storage.peek(Word256::from_u64(3)).is_zero());                 // e reads zero
    CHECK(storage.peek(Word256::from_u64(4)) == Word256::from_u64(103)); // d
    CHECK(storage.peek(kScratch).is_zero());
    CHECK(report.steps_executed == 7);
}

TEST_CASE("relocating a dynamic array moves header, data and zeroes the source") {
    auto v1 = schema_v("contract Demo { uint256 a; uint256[] arr; }", 1);
    auto v2 = schema_v("contract Demo { uint256 a; uint256 b; uint256[] arr; }", 2);
    ContractStorage storage;
    storage.write_slot(Word256::from_u64(0), Word256::from_u64(7)); // a
    storage.write_slot(Word256::from_u64(1), Word256::from_u64(3)); // len(arr) = 3
    Word256 old_base = dyn_array_data_base(Word256::from_u64(1));
    for (std::uint64_t i = 0; i < 3; ++i)
        storage.write_slot(old_base.add_u64(i), Word256::from_u64(10 + i));

    apply_plan(storage, diff_layouts(v1, v2));

    Word256 new_base = dyn_array_data_base(Word256::from_u64(2));
    CHECK(storage.peek(Word256::from_u64(2)) == Word256::from_u64(3));
    for (std::uint64_t i = 0; i < 3; ++i) {
        CHECK(storage.peek(new_base.add_u64(i)) == Word256::from_u64(10 + i));
        CHECK(storage.peek(old_base.add_u64(i)).is_zero());
    }
    CHECK(storage.peek(Word256::from_u64(1)).is_zero()); // old header vacated
    CHECK(storage.peek(Word256::from_u64(0)) == Word256::from_u64(7));
}

TEST_CASE("rehashing a mapping walks the key journal and skips zero values") {
    auto v1 = schema_v("contract C { uint256 a; mapping(uint256 => uint256) m; }", 1);
    auto v2 = schema_v("contract C { uint256 a; uint256 b; mapping(uint256 => uint256) m; }", 2);
    ContractStorage storage;
    storage.write_slot(mapping_value_slot(Word256::from_u64(1), Word256::from_u64(5)),
                       Word256::from_u64(50));
    storage.write_slot(mapping_value_slot(Word256::from_u64(1), Word256::from_u64(6)),
                       Word256::from_u64(60));
    storage.journal_key("m", Word256::from_u64(5));
    storage.journal_key("m", Word256::from_u64(6));
    storage.journal_key("m", Word256::from_u64(7)); // journaled but zero-valued

    auto report = apply_plan(storage, diff_layouts(v1, v2));

    CHECK(storage.peek(mapping_value_slot(Word256::from_u64(2), Word256::from_u64(5))) ==
          Word256::from_u64(50));
    CHECK(storage.peek(mapping_value_slot(Word256::from_u64(2), Word256::from_u64(6))) ==
          Word256::from_u64(60));
    CHECK(storage.peek(mapping_value_slot(Word256::from_u64(1), Word256::from_u64(5))).is_zero());
    // the zero-valued key must not materialize a destination slot
    CHECK(storage.peek(mapping_value_slot(Word256::from_u64(2), Word256::from_u64(7))).is_zero());
    CHECK(report.slots_written.count(
              mapping_value_slot(Word256::from_u64(2), Word256::from_u64(7))) == 0);
}

TEST_CASE("version guard rejects a mismatched contract version") {
    auto v1 = schema_v("contract C { uint256 a; uint256 b; }", 1);
    auto v2 = schema_v("contract C { uint256 b; uint256 a; }", 2);
    auto plan = diff_layouts(v1, v2);
    ContractStorage storage;
    storage.write_slot(Word256::from_u64(0), Word256::from_u64(1));
    storage.write_slot(Word256::from_u64(1), Word256::from_u64(2));
    ContractStorage before = storage;
    try {
        apply_plan(storage, plan, 3);
        FAIL("expected VersionMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::VersionMismatch);
    }
    CHECK(storage == before); // untouched
    apply_plan(storage, plan, 1); // matching version passes
    CHECK(storage.peek(Word256::from_u64(0)) == Word256::from_u64(2));
}

TEST_CASE("a corrupt plan leaves storage byte-identical") {
    ContractStorage storage;
    storage.write_slot(Word256::from_u64(0), Word256::from_u64(11));
    storage.write_slot(Word256::from_u64(9), Word256::from_u64(99));
    ContractStorage before = storage;

    MigrationPlan plan;
    // first step succeeds, second is out of bounds: nothing may commit
    plan.steps = {MoveBytesStep{Word256::from_u64(0), 0, Word256::from_u64(1), 0, 32},
                  MoveBytesStep{Word256::from_u64(9), 20, Word256::from_u64(2), 0, 20}};
    try {
        apply_plan(storage, plan);
        FAIL("expected PlanCorrupt");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PlanCorrupt);
    }
    CHECK(storage == before);

    // a plan that strands data in scratch must also roll back
    MigrationPlan bad;
    bad.steps = {UseScratchStep{kScratch},
                 MoveBytesStep{Word256::from_u64(0), 0, kScratch, 0, 32}};
    try {
        apply_plan(storage, bad);
        FAIL("expected ScratchNotRestored");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ScratchNotRestored);
    }
    CHECK(storage == before);
}

TEST_CASE("self-targeted relocate and rehash steps are rejected") {
    ContractStorage storage;
    MigrationPlan plan;
    plan.steps = {RelocateDynArrayStep{"arr", Word256::from_u64(1), Word256::from_u64(1),
                                       ValueType{ValueKind::UnsignedInt, 32}}};
    CHECK_THROWS_AS(apply_plan(storage, plan), Error);
    plan.steps = {RehashMappingStep{"m", Word256::from_u64(2), Word256::from_u64(2),
                                    ValueType{ValueKind::UnsignedInt, 32},
                                    ValueType{ValueKind::UnsignedInt, 32}}};
    CHECK_THROWS_AS(apply_plan(storage, plan), Error);
}

TEST_CASE("report counts distinct changed slots and all writes are predicted") {
    auto v1 = schema_v("contract C { uint256 a; uint256 b; uint256 c; uint256 d; }", 1);
    auto v2 =
        schema_v("contract C { uint256 a; uint256 c; uint256 b; uint256 e; uint256 d; }", 2);
    ContractStorage storage;
    for (std::uint64_t i = 0; i < 4; ++i)
        storage.write_slot(Word256::from_u64(i), Word256::from_u64(100 + i));
    auto plan = diff_layouts(v1, v2);
    auto touched = plan_touched_slots(plan, storage);

    auto report = apply_plan(storage, plan);
    for (const auto& slot : report.slots_written) CHECK(touched.count(slot) == 1);
    CHECK(report.slots_written.size() <= touched.size());

    // a no-op move (identical content) never lands in the report
    ContractStorage same;
    same.write_slot(Word256::from_u64(0), Word256::from_u64(8));
    same.write_slot(Word256::from_u64(1), Word256::from_u64(8));
    MigrationPlan noop;
    noop.steps = {MoveBytesStep{Word256::from_u64(0), 0, Word256::from_u64(1), 0, 32}};
    auto r2 = apply_plan(same, noop);
    CHECK(r2.slots_written.empty());
    CHECK(r2.slots_read.size() == 1);
}

TEST_CASE("verify_post_state flags any divergence from the shadow") {
    auto v2 = schema_v("contract C { uint64 a; uint64[] arr; mapping(uint8 => uint64) m; }", 2);
    auto layout = compute_layout(v2);
    ContractStorage storage;
    ShadowState shadow;
    shadow.scalars["a"] = {0, 0, 0, 0, 0, 0, 0, 42};
    storage.write_bytes(Word256::from_u64(0), 0, 8, shadow.scalars["a"]);
    shadow.arrays["arr"] = {{0, 0, 0, 0, 0, 0, 0, 7}};
    storage.write_slot(Word256::from_u64(1), Word256::from_u64(1)); // length
    storage.write_bytes(dyn_array_data_base(Word256::from_u64(1)), 0, 8, shadow.arrays["arr"][0]);
    shadow.mappings["m"][Word256::from_u64(3)] = {0, 0, 0, 0, 0, 0, 0, 9};
    storage.write_bytes(mapping_value_slot(Word256::from_u64(2), Word256::from_u64(3)), 0, 8,
                        shadow.mappings["m"][Word256::from_u64(3)]);
    CHECK(verify_post_state(storage, layout, shadow));

    SUBCASE("scalar mismatch") {
        storage.write_bytes(Word256::from_u64(0), 0, 8, {0, 0, 0, 0, 0, 0, 0, 43});
        CHECK(!verify_post_state(storage, layout, shadow));
    }
    SUBCASE("dynamic array length mismatch") {
        storage.write_slot(Word256::from_u64(1), Word256::from_u64(2));
        CHECK(!verify_post_state(storage, layout, shadow));
    }
    SUBCASE("mapping value mismatch") {
        storage.write_slot(mapping_value_slot(Word256::from_u64(2), Word256::from_u64(3)),
                           Word256{});
        CHECK(!verify_post_state(storage, layout, shadow));
    }
    SUBCASE("variable missing from the layout") {
        shadow.scalars["ghost"] = {1};
        CHECK(!verify_post_state(storage, layout, shadow));
    }
}

TEST_CASE("report serializes to JSON") {
    ApplyReport r;
    r.slots_written = {Word256::from_u64(1), Word256::from_u64(2)};
    r.slots_read = {Word256::from_u64(1)};
    r.steps_executed = 3;
    std::string j = r.to_json();
    CHECK(j.find("\"slots_written\": 2") != std::string::npos);
    CHECK(j.find("\"slots_read\": 1") != std::string::npos);
    CHECK(j.find("\"steps_executed\": 3") != std::string::npos);
}

TEST_CASE("random round trips through plan JSON apply identically") {
    testgen::SchemaGen gen(0x5eed0030);
    for (int trial = 0; trial < 100; ++trial) {
        ContractSchema v1 = gen.random_schema(1, 6);
        ContractSchema v2 = gen.random_edit(v1);
        MigrationPlan plan = diff_layouts(v1, v2);
        MigrationPlan round = MigrationPlan::from_json(plan.to_json());

        ContractStorage a;
        auto layout = compute_layout(v1);
        testgen::populate_random(a, v1, layout, gen);
        ContractStorage b = a;
        apply_plan(a, plan);
        apply_plan(b, round);
        CHECK(a == b);
        CHECK(a.to_snapshot_json() == b.to_snapshot_json());
    }
}
