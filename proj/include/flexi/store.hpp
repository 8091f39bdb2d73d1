#pragma once

#include "flexi/errors.hpp"
#include "flexi/word.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace flexi {

/// Sparse emulation of one contract account's 2^256 x 32-byte storage.
/// Absent slots read as zero; writing a zero word removes the entry, so the
/// sparse map is always in canonical form. read_count/write_count are exact
/// operation counts and stand in for gas.
class ContractStorage {
public:
    Word256 read_slot(const Word256& addr);
    void write_slot(const Word256& addr, const Word256& word);

    /// offset counts from the low-order end of the word; offset+len <= 32.
    std::vector<std::uint8_t> read_bytes(const Word256& addr, unsigned offset, unsigned len);
    void write_bytes(const Word256& addr, unsigned offset, unsigned len,
                     const std::vector<std::uint8_t>& bytes);

    /// Uncounted inspection (test/reorganizer internals).
    Word256 peek(const Word256& addr) const;
    bool has_slot(const Word256& addr) const { return slots_.count(addr) != 0; }
    std::size_t slot_count() const { return slots_.size(); }

    void journal_key(const std::string& mapping_name, const Word256& key);
    const std::set<Word256>& journaled_keys(const std::string& mapping_name) const;

    const std::map<Word256, Word256>& slots() const { return slots_; }
    const std::map<std::string, std::set<Word256>>& key_journal() const { return journal_; }

    std::uint64_t read_count() const { return read_count_; }
    std::uint64_t write_count() const { return write_count_; }

    /// Snapshot form: {"slots": {...}, "journal": {...}} as canonical JSON text.
    std::string to_snapshot_json() const;
    static ContractStorage from_snapshot_json(const std::string& json_text);

    bool operator==(const ContractStorage& o) const {
        return slots_ == o.slots_ && journal_ == o.journal_;
    }

private:
    static void check_range(unsigned offset, unsigned len);

    std::map<Word256, Word256> slots_;
    std::map<std::string, std::set<Word256>> journal_;
    std::uint64_t read_count_ = 0;
    std::uint64_t write_count_ = 0;
};

} // namespace flexi
