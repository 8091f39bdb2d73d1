#include "flexi/store.hpp"

#include <nlohmann/json.hpp>

namespace flexi {

Word256 ContractStorage::read_slot(const Word256& addr) {
    ++read_count_;
    return peek(addr);
}

Word256 ContractStorage::peek(const Word256& addr) const {
    auto it = slots_.find(addr);
    return it == slots_.end() ? Word256{} : it->second;
}

void ContractStorage::write_slot(const Word256& addr, const Word256& word) {
    ++write_count_;
    if (word.is_zero())
        slots_.erase(addr);
    else
        slots_[addr] = word;
}

void ContractStorage::check_range(unsigned offset, unsigned len) {
    if (len < 1 || len > 32 || offset > 31 || offset + len > 32)
        throw Error(ErrorCode::RangeError,
                    "byte range offset=" + std::to_string(offset) + " len=" + std::to_string(len));
}

std::vector<std::uint8_t> ContractStorage::read_bytes(const Word256& addr, unsigned offset,
                                                      unsigned len) {
    check_range(offset, len);
    Word256 word = read_slot(addr);
    // offset 0 is the least-significant byte region; word.bytes is big-endian
    unsigned start = 32 - offset - len;
    return {word.bytes.begin() + start, word.bytes.begin() + start + len};
}

void ContractStorage::write_bytes(const Word256& addr, unsigned offset, unsigned len,
                                  const std::vector<std::uint8_t>& bytes) {
    check_range(offset, len);
    if (bytes.size() != len)
        throw Error(ErrorCode::RangeError, "byte count " + std::to_string(bytes.size()) +
                                               " != len " + std::to_string(len));
    Word256 word = peek(addr); // RMW; the read is not a counted operation
    unsigned start = 32 - offset - len;
    std::copy(bytes.begin(), bytes.end(), word.bytes.begin() + start);
    write_slot(addr, word);
}

void ContractStorage::journal_key(const std::string& mapping_name, const Word256& key) {
    journal_[mapping_name].insert(key);
}

const std::set<Word256>& ContractStorage::journaled_keys(const std::string& mapping_name) const {
    static const std::set<Word256> empty;
    auto it = journal_.find(mapping_name);
    return it == journal_.end() ? empty : it->second;
}

std::string ContractStorage::to_snapshot_json() const {
    nlohmann::json j;
    j["slots"] = nlohmann::json::object();
    for (const auto& [addr, word] : slots_)
        j["slots"][addr.to_hex()] = word.to_hex();
    j["journal"] = nlohmann::json::object();
    for (const auto& [name, keys] : journal_) {
        auto arr = nlohmann::json::array();
        for (const auto& k : keys) arr.push_back(k.to_hex());
        j["journal"][name] = std::move(arr);
    }
    return j.dump(2);
}

ContractStorage ContractStorage::from_snapshot_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    ContractStorage s;
    for (const auto& [addr, word] : j.at("slots").items()) {
        Word256 w = Word256::from_hex(word.get<std::string>());
        if (!w.is_zero()) s.slots_[Word256::from_hex(addr)] = w;
    }
    if (j.contains("journal"))
        for (const auto& [name, keys] : j.at("journal").items())
            for (const auto& k : keys)
                s.journal_[name].insert(Word256::from_hex(k.get<std::string>()));
    return s;
}

} // namespace flexi
