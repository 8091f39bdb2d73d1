#include "flexi/reorganizer.hpp"

#include <nlohmann/json.hpp>

namespace flexi {

namespace {

/// Executes steps against a working copy; commit happens in apply_plan.
class PlanExecutor {
public:
    PlanExecutor(ContractStorage& storage, ApplyReport& report)
        : storage_(storage), report_(report) {}

    void execute(const MigrationStep& step) {
        std::visit([this](const auto& s) { run(s); }, step);
        ++report_.steps_executed;
    }

    void check_scratch_restored() {
        if (!storage_.peek(scratch_slot_address()).is_zero())
            throw Error(ErrorCode::ScratchNotRestored,
                        "scratch slot nonzero after plan execution");
    }

private:
    Word256 read(const Word256& addr) {
        report_.slots_read.insert(addr);
        return storage_.read_slot(addr);
    }

    // Skips the write when the slot already holds the word, so untouched
    // slots never show up in the report.
    void write(const Word256& addr, const Word256& word) {
        if (storage_.peek(addr) == word) return;
        report_.slots_written.insert(addr);
        storage_.write_slot(addr, word);
    }

    void write_range(const Word256& addr, unsigned off, unsigned len,
                     const std::vector<std::uint8_t>& bytes) {
        Word256 word = storage_.peek(addr);
        std::copy(bytes.begin(), bytes.end(), word.bytes.begin() + (32 - off - len));
        write(addr, word);
    }

    void run(const MoveBytesStep& s) {
        if (s.len < 1 || s.len > 32 || s.from_off + s.len > 32 || s.to_off + s.len > 32)
            throw Error(ErrorCode::PlanCorrupt, "move_bytes range out of bounds");
        Word256 src = read(s.from_slot);
        std::vector<std::uint8_t> bytes(src.bytes.begin() + (32 - s.from_off - s.len),
                                        src.bytes.begin() + (32 - s.from_off));
        write_range(s.to_slot, s.to_off, s.len, bytes);
    }

    void run(const RelocateDynArrayStep& s) {
        if (s.old_p == s.new_p)
            throw Error(ErrorCode::PlanCorrupt, "relocate_dyn_array with identical slots");
        Word256 length_word = read(s.old_p);
        std::uint64_t length = length_word.low_u64();
        std::uint64_t per_slot = 32 / type_size_bytes(s.element);
        std::uint64_t data_slots = (length + per_slot - 1) / per_slot;

        Word256 old_base = dyn_array_data_base(s.old_p);
        Word256 new_base = dyn_array_data_base(s.new_p);
        check_region_overlap(old_base, new_base, data_slots);

        write(s.new_p, length_word);
        write(s.old_p, Word256{});
        for (std::uint64_t j = 0; j < data_slots; ++j) {
            Word256 old_slot = old_base.add_u64(j);
            write(new_base.add_u64(j), read(old_slot));
            write(old_slot, Word256{});
        }
    }

    void run(const RehashMappingStep& s) {
        if (s.old_p == s.new_p)
            throw Error(ErrorCode::PlanCorrupt, "rehash_mapping with identical slots");
        for (const auto& key : storage_.journaled_keys(s.name)) {
            Word256 old_slot = mapping_value_slot(s.old_p, key);
            Word256 new_slot = mapping_value_slot(s.new_p, key);
            Word256 value = read(old_slot);
            if (value.is_zero()) continue;
            write(new_slot, value);
            write(old_slot, Word256{});
        }
    }

    void run(const ClearRangeStep& s) {
        if (s.len < 1 || s.len > 32 || s.off + s.len > 32)
            throw Error(ErrorCode::PlanCorrupt, "clear_range out of bounds");
        write_range(s.slot, s.off, s.len, std::vector<std::uint8_t>(s.len, 0));
    }

    void run(const UseScratchStep& s) {
        if (s.slot != scratch_slot_address())
            throw Error(ErrorCode::PlanCorrupt, "unexpected scratch slot address");
    }

    void check_region_overlap(const Word256& a, const Word256& b, std::uint64_t slots) const {
        // keccak-derived regions colliding is not a case worth handling
        if (slots == 0) return;
        Word256 a_end = a.add_u64(slots - 1);
        Word256 b_end = b.add_u64(slots - 1);
        if (!(a_end < b || b_end < a))
            throw Error(ErrorCode::PlanCorrupt, "old and new array data regions overlap");
    }

    ContractStorage& storage_;
    ApplyReport& report_;
};

} // namespace

ApplyReport apply_plan(ContractStorage& storage, const MigrationPlan& plan,
                       std::optional<std::uint32_t> expected_version) {
    if (expected_version && *expected_version != plan.from_version)
        throw Error(ErrorCode::VersionMismatch,
                    "plan migrates from version " + std::to_string(plan.from_version) +
                        " but contract is at version " + std::to_string(*expected_version));

    ContractStorage staged = storage;
    ApplyReport report;
    PlanExecutor executor(staged, report);
    for (const auto& step : plan.steps) executor.execute(step);
    executor.check_scratch_restored();
    storage = std::move(staged); // commit; any throw above leaves storage untouched
    return report;
}

bool verify_post_state(ContractStorage& storage, const StorageLayout& new_layout,
                       const ShadowState& shadow) {
    try {
        for (const auto& [name, value] : shadow.scalars) {
            PhysicalRange r = locate(new_layout, VariableAccess{name, {}, {}});
            if (storage.read_bytes(r.slot, r.byte_offset, r.size_bytes) != value) return false;
        }
        for (const auto& [name, elements] : shadow.arrays) {
            const VarLocation& loc = new_layout.at(name);
            if (const auto* da = std::get_if<DynArrayLocation>(&loc)) {
                if (storage.read_slot(da->header_slot).low_u64() != elements.size()) return false;
            }
            for (std::size_t i = 0; i < elements.size(); ++i) {
                PhysicalRange r = locate(new_layout, VariableAccess{name, i, {}},
                                         elements.size());
                if (storage.read_bytes(r.slot, r.byte_offset, r.size_bytes) != elements[i])
                    return false;
            }
        }
        for (const auto& [name, entries] : shadow.mappings) {
            for (const auto& [key, value] : entries) {
                PhysicalRange r = locate(new_layout, VariableAccess{name, {}, key});
                if (storage.read_bytes(r.slot, r.byte_offset, r.size_bytes) != value) return false;
            }
        }
    } catch (const Error&) {
        return false;
    }
    return true;
}

std::string ApplyReport::to_json() const {
    nlohmann::json j;
    j["slots_written"] = slots_written.size();
    j["slots_read"] = slots_read.size();
    j["steps_executed"] = steps_executed;
    return j.dump(2);
}

} // namespace flexi
