#pragma once

#include "flexi/analyzer.hpp"
#include "flexi/schema.hpp"
#include "flexi/word.hpp"

#include <cstdint>
#include <map>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace flexi {

/// Exact threshold fraction; comparisons stay in integer arithmetic.
struct Rational {
    std::uint32_t num = 1;
    std::uint32_t den = 2;

    bool operator==(const Rational&) const = default;

    static Rational parse(const std::string& text); // "2/3" or "1"
    std::string str() const;
};

struct GovernanceParams {
    std::uint32_t voting_deadline_blocks = 20;
    Rational approval_threshold{1, 2};
    Rational halt_threshold{2, 3}; // >= approval_threshold
    Rational quorum{1, 2};

    bool operator==(const GovernanceParams&) const = default;
    void validate() const;
};

enum class VoteChoice { Yes, No };
enum class ProposalStatus { Voting, Rejected, ApprovedPending, Applied, Expired };
enum class ContractPhase { Executable, VotingOpen, NonExecutable };

const char* proposal_status_name(ProposalStatus s);
const char* contract_phase_name(ContractPhase p);

nlohmann::json governance_params_to_json(const GovernanceParams& p);
GovernanceParams governance_params_from_json(const nlohmann::json& j);

struct UpgradeProposal {
    ContractSchema new_schema;
    Word256 plan_hash;
    bool operator==(const UpgradeProposal&) const = default;
};

struct ParamChangeProposal {
    GovernanceParams new_params;
    bool operator==(const ParamChangeProposal&) const = default;
};

using ProposalKind = std::variant<UpgradeProposal, ParamChangeProposal>;

struct Proposal {
    std::uint32_t id = 0;
    ProposalKind kind;
    std::string proposer;
    std::uint64_t created_block = 0;
    std::uint64_t deadline_block = 0; // created + voting_deadline_blocks
    std::map<std::string, VoteChoice> votes;
    ProposalStatus status = ProposalStatus::Voting;
};

struct StatusChange {
    std::uint32_t proposal_id = 0;
    ProposalStatus status = ProposalStatus::Voting;
    ContractPhase phase = ContractPhase::Executable;
};

enum class VoteOutcome { Pending, Approved, Rejected, Halted };

/// The proposal lifecycle state machine: one in-flight proposal, block-based
/// deadline, quorum-then-majority resolution, and an emergency halt once the
/// affirmative fraction reaches halt_threshold.
class Governance {
public:
    Governance() = default;
    Governance(GovernanceParams params, std::set<std::string> members);

    std::uint32_t submit_proposal(const std::string& proposer, ProposalKind kind,
                                  std::uint64_t current_block);
    VoteOutcome cast_vote(const std::string& voter, std::uint32_t proposal_id, VoteChoice choice,
                          std::uint64_t current_block);
    std::vector<StatusChange> on_block(std::uint64_t current_block);

    /// Marks an ApprovedPending proposal Applied and reopens execution.
    /// The caller (the chain) performs the actual storage/schema swap; for
    /// ParamChange proposals the new params are installed here.
    const Proposal& begin_activation(const std::string& caller, std::uint32_t proposal_id,
                                     std::optional<Word256> supplied_plan_hash);
    void finish_activation(std::uint32_t proposal_id);

    bool is_executable() const { return phase_ != ContractPhase::NonExecutable; }
    ContractPhase phase() const { return phase_; }
    const GovernanceParams& params() const { return params_; }
    const std::set<std::string>& members() const { return members_; }
    bool is_member(const std::string& account) const { return members_.count(account) != 0; }

    const Proposal* find_proposal(std::uint32_t id) const;
    const std::vector<Proposal>& proposals() const { return proposals_; }

    std::string to_json() const;
    static Governance from_json(const std::string& json_text);

private:
    Proposal& proposal_ref(std::uint32_t id);
    void require_member(const std::string& account) const;
    bool threshold_met(std::uint64_t count, const Rational& t, std::uint64_t total) const;
    void resolve_early(Proposal& p);

    GovernanceParams params_;
    std::set<std::string> members_;
    std::vector<Proposal> proposals_;
    std::uint32_t next_id_ = 1;
    ContractPhase phase_ = ContractPhase::Executable;
};

} // namespace flexi
