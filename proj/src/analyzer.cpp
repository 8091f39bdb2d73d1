#include "flexi/analyzer.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace flexi {

Word256 scratch_slot_address() {
    Word256 w;
    w.bytes.fill(0xff);
    return w;
}

namespace {

// bit i = byte at low-order offset i of a slot
using Mask = std::uint32_t;
using RangeMap = std::map<Word256, Mask>;

Mask mask_of(unsigned off, unsigned len) {
    Mask all = ~Mask{0};
    Mask m = len >= 32 ? all : ((Mask{1} << len) - 1);
    return m << off;
}

void add_range(RangeMap& rm, const Word256& slot, unsigned off, unsigned len) {
    rm[slot] |= mask_of(off, len);
}

bool ranges_overlap(const RangeMap& a, const RangeMap& b) {
    for (const auto& [slot, mask] : a) {
        auto it = b.find(slot);
        if (it != b.end() && (mask & it->second)) return true;
    }
    return false;
}

void subtract(RangeMap& a, const RangeMap& b) {
    for (auto it = a.begin(); it != a.end();) {
        auto bi = b.find(it->first);
        if (bi != b.end()) it->second &= ~bi->second;
        if (it->second == 0)
            it = a.erase(it);
        else
            ++it;
    }
}

// keccak-derived data regions are tracked by (family, header slot): a dynamic
// array's data lives at keccak(p)+j, a mapping's values at keccak(key || p),
// so regions of the same family collide exactly when their header slots match
enum class RegionFamily { DynData, MapValues };
using RegionKey = std::pair<RegionFamily, Word256>;

struct PendingStep {
    MigrationStep step;
    RangeMap reads;
    RangeMap writes;
    std::set<RegionKey> region_reads;
    std::set<RegionKey> region_writes;
    bool is_relocate = false;
    Word256 relocate_old_p;   // zero-write target; must precede other writers

    // staging bookkeeping: resources this step releases when it finally runs
    Mask scratch_free = 0;        // scratch-word bytes holding its stashed source
    bool frees_dyn_stash = false; // array parked in the scratch-keyed data region
    bool frees_map_stash = false; // mapping parked in the scratch-keyed value region
};

std::uint64_t fixed_array_slot_count(const ValueType& element, std::uint64_t length) {
    std::uint64_t per_slot = 32 / type_size_bytes(element);
    return (length + per_slot - 1) / per_slot;
}

constexpr std::size_t kNoVictim = static_cast<std::size_t>(-1);
constexpr unsigned kNoOffset = 33;

/// Lowest offset of a contiguous run of `len` free bytes in the scratch word.
unsigned find_free_offset(Mask arena, unsigned len) {
    Mask want = mask_of(0, len);
    for (unsigned off = 0; off + len <= 32; ++off)
        if ((arena & (want << off)) == 0) return off;
    return kNoOffset;
}

/// When every pending step is blocked, pick one to divert through scratch:
/// a member of a dependency cycle whose strongly connected component has no
/// edges out to other components, so only in-cycle steps are still waiting
/// on it. The scratch word is an allocation arena - several byte stashes can
/// coexist at disjoint offsets - but the scratch-keyed data/value regions
/// hold at most one parked array and one parked mapping at a time, so a
/// victim is only eligible if its stash fits the resources still free.
/// Returns kNoVictim when no eligible step can make progress.
std::size_t pick_victim(const std::vector<PendingStep>& pending, Mask arena, bool dyn_stash,
                        bool map_stash) {
    const std::size_t n = pending.size();

    // edge i -> j: i must wait for j (j reads data i overwrites)
    std::vector<std::vector<std::size_t>> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            bool waits = ranges_overlap(pending[j].reads, pending[i].writes);
            if (!waits)
                for (const auto& r : pending[j].region_reads)
                    if (pending[i].region_writes.count(r)) { waits = true; break; }
            if (!waits && pending[j].is_relocate) {
                RangeMap old_header{{pending[j].relocate_old_p, mask_of(0, 32)}};
                waits = ranges_overlap(pending[i].writes, old_header);
            }
            if (waits) out[i].push_back(j);
        }
    }

    // component ids via forward/backward reachability (n is tiny)
    auto reachable = [&](std::size_t from) {
        std::vector<bool> seen(n, false);
        std::vector<std::size_t> stack{from};
        seen[from] = true;
        while (!stack.empty()) {
            std::size_t v = stack.back();
            stack.pop_back();
            for (std::size_t w : out[v])
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
        }
        return seen;
    };
    std::vector<std::vector<bool>> reach(n);
    for (std::size_t i = 0; i < n; ++i) reach[i] = reachable(i);

    // among eligible victims prefer one whose staging breaks every cycle of
    // its component (so it drains without another stash), then a plain move
    // over a relocate over a rehash, then a smaller stash
    auto rank = [&](std::size_t j) {
        if (std::holds_alternative<MoveBytesStep>(pending[j].step)) return 0;
        if (std::holds_alternative<RelocateDynArrayStep>(pending[j].step)) return 1;
        if (std::holds_alternative<RehashMappingStep>(pending[j].step)) return 2;
        return 3;
    };
    auto eligible = [&](std::size_t j) {
        if (const auto* mv = std::get_if<MoveBytesStep>(&pending[j].step))
            return !dyn_stash && find_free_offset(arena, mv->len) != kNoOffset;
        if (std::holds_alternative<RelocateDynArrayStep>(pending[j].step))
            return arena == 0 && !dyn_stash;
        if (std::holds_alternative<RehashMappingStep>(pending[j].step)) return !map_stash;
        return false;
    };
    // Staging x's source removes every edge into x (its whole read is
    // diverted); acyclic_without(x) asks whether x's component then drains
    // with no further stash.
    auto acyclic_without = [&](std::size_t x) {
        std::map<std::size_t, int> state; // 0 unvisited, 1 on stack, 2 done
        auto dfs = [&](auto&& self, std::size_t v) -> bool {
            state[v] = 1;
            for (std::size_t w : out[v]) {
                if (w == x) continue; // in-edges of x removed
                if (!(reach[x][w] && reach[w][x])) continue;
                if (state[w] == 1) return false;
                if (state[w] == 0 && !self(self, w)) return false;
            }
            state[v] = 2;
            return true;
        };
        for (std::size_t m = 0; m < n; ++m) {
            if (m != x && !(reach[x][m] && reach[m][x])) continue;
            if (state[m] == 0 && !dfs(dfs, m)) return false;
        }
        return true;
    };
    auto stash_len = [&](std::size_t j) {
        const auto* mv = std::get_if<MoveBytesStep>(&pending[j].step);
        return mv ? mv->len : 32u;
    };

    std::size_t best = kNoVictim;
    auto score = [&](std::size_t j) {
        return std::tuple<int, int, unsigned>{acyclic_without(j) ? 0 : 1, rank(j), stash_len(j)};
    };
    for (std::size_t i = 0; i < n; ++i) {
        // i belongs to a sink SCC iff it lies on a cycle and everything
        // reachable from i reaches back
        bool on_cycle = false;
        bool is_sink = true;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || !reach[i][j]) continue;
            if (!reach[j][i]) {
                is_sink = false;
                break;
            }
            on_cycle = true;
        }
        if (!is_sink || !on_cycle || !eligible(i)) continue;
#ifdef FLEXI_DEBUG_PLANNER
        std::cerr << "candidate " << i << " kind=" << pending[i].step.index()
                  << " acyclic=" << acyclic_without(i) << "\n";
#endif
        if (best == kNoVictim || score(i) < score(best)) best = i;
    }
    return best;
}

/// Fallback for interlocking cycles that share steps: single-byte moves give
/// every move at most one writer of its source byte and one reader of its
/// destination byte, so the remaining cycles are vertex-disjoint and each
/// breaks with one scratch staging.
void split_moves_to_bytes(std::vector<PendingStep>& pending) {
    std::vector<PendingStep> split;
    for (auto& p : pending) {
        const auto* mv = std::get_if<MoveBytesStep>(&p.step);
        if (!mv || mv->len == 1) {
            split.push_back(std::move(p));
            continue;
        }
        for (unsigned k = 0; k < mv->len; ++k) {
            PendingStep b;
            b.step = MoveBytesStep{mv->from_slot, mv->from_off + k, mv->to_slot, mv->to_off + k, 1};
            add_range(b.reads, mv->from_slot, mv->from_off + k, 1);
            add_range(b.writes, mv->to_slot, mv->to_off + k, 1);
            // an already-staged move reads scratch; each byte frees its own bit
            if (p.scratch_free) b.scratch_free = Mask{1} << (mv->from_off + k);
            split.push_back(std::move(b));
        }
    }
    pending = std::move(split);
}

/// Topologically order pending steps so no step reads a range a previous step
/// overwrote; cycles are broken through the scratch slot.
std::vector<MigrationStep> order_steps(std::vector<PendingStep> pending) {
    std::vector<MigrationStep> ordered;
    const Word256 scratch = scratch_slot_address();
    bool scratch_used = false;
    bool moves_split = false;
    Mask arena = 0;         // scratch-word bytes currently holding stashes
    bool dyn_stash = false; // an array is parked in the scratch-keyed region
    bool map_stash = false; // a mapping is parked in the scratch-keyed region

    auto emittable = [&](std::size_t i) {
        for (std::size_t j = 0; j < pending.size(); ++j) {
            if (j == i) continue;
            if (ranges_overlap(pending[j].reads, pending[i].writes)) return false;
            for (const auto& r : pending[j].region_reads)
                if (pending[i].region_writes.count(r)) return false;
            if (pending[j].is_relocate) {
                RangeMap old_header{{pending[j].relocate_old_p, mask_of(0, 32)}};
                if (ranges_overlap(pending[i].writes, old_header)) return false;
            }
        }
        return true;
    };

    while (!pending.empty()) {
        bool progress = false;
        for (std::size_t i = 0; i < pending.size(); ++i) {
            if (emittable(i)) {
                arena &= ~pending[i].scratch_free;
                if (pending[i].frees_dyn_stash) dyn_stash = false;
                if (pending[i].frees_map_stash) map_stash = false;
                ordered.push_back(std::move(pending[i].step));
                pending.erase(pending.begin() + i);
                progress = true;
                break;
            }
        }
        if (progress) continue;

        // Cycle breaking: divert one step's source into the scratch slot (or
        // the scratch-keyed region for array/mapping steps) and rewrite the
        // pending step to read from there. The staged emission only reads
        // live data - any pending writer of that data was blocked on this
        // very step's read - so emitting it immediately is safe. The victim
        // must sit inside a dependency cycle that waits on nothing outside
        // itself (a sink SCC), or draining it could stall on a second cycle
        // while its stash is still live. Interlocking cycles take several
        // concurrent stashes; the arena tracks what is still free.
        std::size_t victim = pick_victim(pending, arena, dyn_stash, map_stash);
        if (victim == kNoVictim && !moves_split) {
            split_moves_to_bytes(pending);
            moves_split = true;
            continue;
        }
        if (victim == kNoVictim) {
#ifdef FLEXI_DEBUG_PLANNER
            std::cerr << "stuck with " << pending.size() << " pending steps:\n";
            for (const auto& p : pending) {
                std::cerr << "  reads=";
                for (auto& [s, m] : p.reads) std::cerr << s.to_hex_trimmed() << ":" << std::hex << m << std::dec << " ";
                std::cerr << "writes=";
                for (auto& [s, m] : p.writes) std::cerr << s.to_hex_trimmed() << ":" << std::hex << m << std::dec << " ";
                std::cerr << "rr=" << p.region_reads.size() << " rw=" << p.region_writes.size()
                          << " reloc=" << p.is_relocate << " kind=" << p.step.index() << "\n";
            }
#endif
            throw Error(ErrorCode::PlanCorrupt, "cyclic migration plan without movable step");
        }

        if (!scratch_used) {
            ordered.push_back(UseScratchStep{scratch});
            scratch_used = true;
        }
        PendingStep& p = pending[victim];
        if (auto* mv = std::get_if<MoveBytesStep>(&p.step)) {
            unsigned off = find_free_offset(arena, mv->len);
            ordered.push_back(MoveBytesStep{mv->from_slot, mv->from_off, scratch, off, mv->len});
            mv->from_slot = scratch;
            mv->from_off = off;
            p.reads.clear();
            add_range(p.reads, scratch, off, mv->len);
            arena |= mask_of(off, mv->len);
            p.scratch_free = mask_of(off, mv->len);
        } else if (auto* rl = std::get_if<RelocateDynArrayStep>(&p.step)) {
            ordered.push_back(RelocateDynArrayStep{rl->name, rl->old_p, scratch, rl->element});
            rl->old_p = scratch;
            p.reads.clear();
            add_range(p.reads, scratch, 0, 32);
            p.region_reads = {{RegionFamily::DynData, scratch}};
            p.writes.clear();
            add_range(p.writes, rl->new_p, 0, 32);
            p.region_writes = {{RegionFamily::DynData, scratch},
                               {RegionFamily::DynData, rl->new_p}};
            p.relocate_old_p = scratch; // zeroed by this step when it runs
            arena = mask_of(0, 32);     // the length word occupies all of scratch
            dyn_stash = true;
            p.scratch_free = mask_of(0, 32);
            p.frees_dyn_stash = true;
        } else {
            auto& rh = std::get<RehashMappingStep>(p.step);
            ordered.push_back(RehashMappingStep{rh.name, rh.old_p, scratch, rh.key, rh.value});
            rh.old_p = scratch;
            p.region_reads = {{RegionFamily::MapValues, scratch}};
            p.region_writes = {{RegionFamily::MapValues, scratch},
                               {RegionFamily::MapValues, rh.new_p}};
            map_stash = true;
            p.frees_map_stash = true;
        }
    }

    if (scratch_used) ordered.push_back(ClearRangeStep{scratch, 0, 32});
    return ordered;
}

} // namespace

MigrationPlan diff_layouts(const ContractSchema& old_schema, const ContractSchema& new_schema) {
    if (new_schema.version != old_schema.version + 1)
        throw Error(ErrorCode::VersionMismatch,
                    "expected new version " + std::to_string(old_schema.version + 1) + ", got " +
                        std::to_string(new_schema.version));

    StorageLayout old_layout = compute_layout(old_schema);
    StorageLayout new_layout = compute_layout(new_schema);

    MigrationPlan plan;
    plan.from_version = old_schema.version;
    plan.to_version = new_schema.version;

    std::vector<PendingStep> pending;
    RangeMap vacated;      // old byte ranges no longer holding live data
    RangeMap destinations; // byte ranges written by move/relocate steps

    auto add_move = [&](const Word256& from_slot, unsigned from_off, const Word256& to_slot,
                        unsigned to_off, unsigned len) {
        if (from_slot == to_slot && from_off == to_off) return;
        PendingStep p;
        p.step = MoveBytesStep{from_slot, from_off, to_slot, to_off, len};
        add_range(p.reads, from_slot, from_off, len);
        add_range(p.writes, to_slot, to_off, len);
        add_range(vacated, from_slot, from_off, len);
        add_range(destinations, to_slot, to_off, len);
        pending.push_back(std::move(p));
    };

    auto vacate_old_location = [&](const std::string& name, const VarLocation& loc) {
        if (const auto* pk = std::get_if<PackedLocation>(&loc)) {
            add_range(vacated, pk->slot, pk->byte_offset, pk->size_bytes);
        } else if (const auto* fa = std::get_if<FixedArrayLocation>(&loc)) {
            std::uint64_t slots = fixed_array_slot_count(fa->element, fa->length);
            for (std::uint64_t j = 0; j < slots; ++j)
                add_range(vacated, fa->base_slot.add_u64(j), 0, 32);
        } else if (const auto* da = std::get_if<DynArrayLocation>(&loc)) {
            add_range(vacated, da->header_slot, 0, 32);
            plan.warnings.push_back("dynamic array '" + name + "': data region at keccak256(" +
                                    da->header_slot.to_hex_trimmed() + ") left orphaned");
        } else {
            plan.warnings.push_back("mapping '" + name + "': value slots left orphaned");
        }
    };

    for (const auto& old_var : old_schema.variables) {
        const StateVariable* new_var = new_schema.find(old_var.name);
        const VarLocation& old_loc = old_layout.at(old_var.name);

        if (!new_var) {
            plan.warnings.push_back("variable '" + old_var.name + "' removed; storage cleared");
            vacate_old_location(old_var.name, old_loc);
            continue;
        }
        if (!var_types_equal(old_var.var_type, new_var->var_type)) {
            plan.warnings.push_back("variable '" + old_var.name + "' type changed from " +
                                    var_type_token(old_var.var_type) + " to " +
                                    var_type_token(new_var->var_type) + "; data not migrated");
            vacate_old_location(old_var.name, old_loc);
            continue;
        }

        const VarLocation& new_loc = new_layout.at(old_var.name);
        if (const auto* op = std::get_if<PackedLocation>(&old_loc)) {
            const auto& np = std::get<PackedLocation>(new_loc);
            add_move(op->slot, op->byte_offset, np.slot, np.byte_offset, op->size_bytes);
        } else if (const auto* ofa = std::get_if<FixedArrayLocation>(&old_loc)) {
            const auto& nfa = std::get<FixedArrayLocation>(new_loc);
            if (ofa->base_slot != nfa.base_slot) {
                std::uint64_t slots = fixed_array_slot_count(ofa->element, ofa->length);
                for (std::uint64_t j = 0; j < slots; ++j)
                    add_move(ofa->base_slot.add_u64(j), 0, nfa.base_slot.add_u64(j), 0, 32);
            }
        } else if (const auto* oda = std::get_if<DynArrayLocation>(&old_loc)) {
            const auto& nda = std::get<DynArrayLocation>(new_loc);
            if (oda->header_slot != nda.header_slot) {
                PendingStep p;
                p.step = RelocateDynArrayStep{old_var.name, oda->header_slot, nda.header_slot,
                                              oda->element};
                add_range(p.reads, oda->header_slot, 0, 32);
                add_range(p.writes, oda->header_slot, 0, 32); // zeroed
                add_range(p.writes, nda.header_slot, 0, 32);
                p.region_reads = {{RegionFamily::DynData, oda->header_slot}};
                p.region_writes = {{RegionFamily::DynData, oda->header_slot},
                                   {RegionFamily::DynData, nda.header_slot}};
                p.is_relocate = true;
                p.relocate_old_p = oda->header_slot;
                add_range(destinations, nda.header_slot, 0, 32);
                add_range(destinations, oda->header_slot, 0, 32); // relocate zeroes it itself
                pending.push_back(std::move(p));
            }
        } else {
            const auto& om = std::get<MappingLocation>(old_loc);
            const auto& nm = std::get<MappingLocation>(new_loc);
            if (om.header_slot != nm.header_slot) {
                PendingStep p;
                p.step = RehashMappingStep{old_var.name, om.header_slot, nm.header_slot, om.key,
                                           om.value};
                p.region_reads = {{RegionFamily::MapValues, om.header_slot}};
                p.region_writes = {{RegionFamily::MapValues, om.header_slot},
                                   {RegionFamily::MapValues, nm.header_slot}};
                pending.push_back(std::move(p));
            }
        }
    }

    // Ranges vacated but not overwritten must read zero afterwards (new
    // variables rely on the zero default); clear them explicitly.
    RangeMap residual = vacated;
    subtract(residual, destinations);
    for (const auto& [slot, mask] : residual) {
        unsigned off = 0;
        while (off < 32) {
            if (mask & (Mask{1} << off)) {
                unsigned len = 0;
                while (off + len < 32 && (mask & (Mask{1} << (off + len)))) ++len;
                PendingStep p;
                p.step = ClearRangeStep{slot, off, len};
                add_range(p.writes, slot, off, len);
                pending.push_back(std::move(p));
                off += len;
            } else {
                ++off;
            }
        }
    }

    plan.steps = order_steps(std::move(pending));
    return plan;
}

std::set<Word256> plan_touched_slots(const MigrationPlan& plan, const ContractStorage& storage) {
    std::set<Word256> touched;
    // array lengths staged through intermediate headers (scratch hops) are
    // not visible in the pre-state, so simulate header movement
    std::map<Word256, std::uint64_t> staged_len;
    for (const auto& step : plan.steps) {
        if (const auto* mv = std::get_if<MoveBytesStep>(&step)) {
            touched.insert(mv->to_slot);
        } else if (const auto* rl = std::get_if<RelocateDynArrayStep>(&step)) {
            touched.insert(rl->old_p);
            touched.insert(rl->new_p);
            auto it = staged_len.find(rl->old_p);
            std::uint64_t len =
                it != staged_len.end() ? it->second : storage.peek(rl->old_p).low_u64();
            staged_len[rl->new_p] = len;
            std::uint64_t slots = fixed_array_slot_count(rl->element, len);
            Word256 old_base = dyn_array_data_base(rl->old_p);
            Word256 new_base = dyn_array_data_base(rl->new_p);
            for (std::uint64_t j = 0; j < slots; ++j) {
                touched.insert(old_base.add_u64(j));
                touched.insert(new_base.add_u64(j));
            }
        } else if (const auto* rh = std::get_if<RehashMappingStep>(&step)) {
            for (const auto& key : storage.journaled_keys(rh->name)) {
                touched.insert(mapping_value_slot(rh->old_p, key));
                touched.insert(mapping_value_slot(rh->new_p, key));
            }
        } else if (const auto* cl = std::get_if<ClearRangeStep>(&step)) {
            touched.insert(cl->slot);
        } else if (const auto* us = std::get_if<UseScratchStep>(&step)) {
            touched.insert(us->slot);
        }
    }
    return touched;
}

namespace {

nlohmann::json step_to_json(const MigrationStep& step) {
    nlohmann::json j;
    if (const auto* mv = std::get_if<MoveBytesStep>(&step)) {
        j["op"] = "move_bytes";
        j["from_slot"] = mv->from_slot.to_hex();
        j["from_off"] = mv->from_off;
        j["to_slot"] = mv->to_slot.to_hex();
        j["to_off"] = mv->to_off;
        j["len"] = mv->len;
    } else if (const auto* rl = std::get_if<RelocateDynArrayStep>(&step)) {
        j["op"] = "relocate_dyn_array";
        j["name"] = rl->name;
        j["old_p"] = rl->old_p.to_hex();
        j["new_p"] = rl->new_p.to_hex();
        j["element"] = rl->element.token();
    } else if (const auto* rh = std::get_if<RehashMappingStep>(&step)) {
        j["op"] = "rehash_mapping";
        j["name"] = rh->name;
        j["old_p"] = rh->old_p.to_hex();
        j["new_p"] = rh->new_p.to_hex();
        j["key"] = rh->key.token();
        j["value"] = rh->value.token();
    } else if (const auto* cl = std::get_if<ClearRangeStep>(&step)) {
        j["op"] = "clear_range";
        j["slot"] = cl->slot.to_hex();
        j["off"] = cl->off;
        j["len"] = cl->len;
    } else {
        const auto& us = std::get<UseScratchStep>(step);
        j["op"] = "use_scratch";
        j["slot"] = us.slot.to_hex();
    }
    return j;
}

MigrationStep step_from_json(const nlohmann::json& j) {
    const std::string op = j.at("op").get<std::string>();
    auto word = [&](const char* key) { return Word256::from_hex(j.at(key).get<std::string>()); };
    if (op == "move_bytes")
        return MoveBytesStep{word("from_slot"), j.at("from_off").get<unsigned>(), word("to_slot"),
                             j.at("to_off").get<unsigned>(), j.at("len").get<unsigned>()};
    if (op == "relocate_dyn_array")
        return RelocateDynArrayStep{j.at("name").get<std::string>(), word("old_p"), word("new_p"),
                                    ValueType::from_token(j.at("element").get<std::string>())};
    if (op == "rehash_mapping")
        return RehashMappingStep{j.at("name").get<std::string>(), word("old_p"), word("new_p"),
                                 ValueType::from_token(j.at("key").get<std::string>()),
                                 ValueType::from_token(j.at("value").get<std::string>())};
    if (op == "clear_range")
        return ClearRangeStep{word("slot"), j.at("off").get<unsigned>(),
                              j.at("len").get<unsigned>()};
    if (op == "use_scratch") return UseScratchStep{word("slot")};
    throw Error(ErrorCode::PlanCorrupt, "unknown step op '" + op + "'");
}

nlohmann::json plan_to_json_object(const MigrationPlan& plan) {
    nlohmann::json j;
    j["from"] = plan.from_version;
    j["to"] = plan.to_version;
    j["steps"] = nlohmann::json::array();
    for (const auto& s : plan.steps) j["steps"].push_back(step_to_json(s));
    j["warnings"] = plan.warnings;
    return j;
}

} // namespace

std::string MigrationPlan::to_json() const {
    return plan_to_json_object(*this).dump(2);
}

MigrationPlan MigrationPlan::from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::PlanCorrupt, std::string("plan is not valid JSON: ") + e.what());
    }
    MigrationPlan plan;
    try {
        plan.from_version = j.at("from").get<std::uint32_t>();
        plan.to_version = j.at("to").get<std::uint32_t>();
        for (const auto& s : j.at("steps")) plan.steps.push_back(step_from_json(s));
        if (j.contains("warnings"))
            plan.warnings = j.at("warnings").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::PlanCorrupt, std::string("malformed plan: ") + e.what());
    }
    return plan;
}

Word256 MigrationPlan::hash() const {
    return keccak256(plan_to_json_object(*this).dump());
}

} // namespace flexi
