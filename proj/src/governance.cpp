#include "flexi/governance.hpp"

#include <nlohmann/json.hpp>

namespace flexi {

Rational Rational::parse(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            std::uint32_t v = static_cast<std::uint32_t>(std::stoul(text));
            return {v, 1};
        }
        std::uint32_t num = static_cast<std::uint32_t>(std::stoul(text.substr(0, slash)));
        std::uint32_t den = static_cast<std::uint32_t>(std::stoul(text.substr(slash + 1)));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return {num, den};
    } catch (const std::exception&) {
        throw Error(ErrorCode::BadTransaction, "bad rational '" + text + "'");
    }
}

std::string Rational::str() const {
    return std::to_string(num) + "/" + std::to_string(den);
}

void GovernanceParams::validate() const {
    if (voting_deadline_blocks < 1)
        throw Error(ErrorCode::BadTransaction, "voting_deadline_blocks must be >= 1");
    auto check_unit = [](const Rational& r, const char* name, bool allow_zero) {
        if (r.den == 0 || r.num > r.den || (!allow_zero && r.num == 0))
            throw Error(ErrorCode::BadTransaction, std::string(name) + " must be a fraction " +
                                                       (allow_zero ? "in [0,1]" : "in (0,1]"));
    };
    check_unit(approval_threshold, "approval_threshold", false);
    check_unit(halt_threshold, "halt_threshold", false);
    check_unit(quorum, "quorum", true);
    // halting must be at least as hard as approving
    if (static_cast<std::uint64_t>(halt_threshold.num) * approval_threshold.den <
        static_cast<std::uint64_t>(approval_threshold.num) * halt_threshold.den)
        throw Error(ErrorCode::BadTransaction, "halt_threshold must be >= approval_threshold");
}

const char* proposal_status_name(ProposalStatus s) {
    switch (s) {
    case ProposalStatus::Voting: return "Voting";
    case ProposalStatus::Rejected: return "Rejected";
    case ProposalStatus::ApprovedPending: return "ApprovedPending";
    case ProposalStatus::Applied: return "Applied";
    case ProposalStatus::Expired: return "Expired";
    }
    return "?";
}

const char* contract_phase_name(ContractPhase p) {
    switch (p) {
    case ContractPhase::Executable: return "Executable";
    case ContractPhase::VotingOpen: return "VotingOpen";
    case ContractPhase::NonExecutable: return "NonExecutable";
    }
    return "?";
}

Governance::Governance(GovernanceParams params, std::set<std::string> members)
    : params_(params), members_(std::move(members)) {
    params_.validate();
    if (members_.empty())
        throw Error(ErrorCode::BadTransaction, "stakeholder set must be non-empty");
}

void Governance::require_member(const std::string& account) const {
    if (!is_member(account))
        throw Error(ErrorCode::NotStakeholder, "'" + account + "' is not a stakeholder");
}

bool Governance::threshold_met(std::uint64_t count, const Rational& t,
                               std::uint64_t total) const {
    return count * t.den >= static_cast<std::uint64_t>(t.num) * total;
}

const Proposal* Governance::find_proposal(std::uint32_t id) const {
    for (const auto& p : proposals_)
        if (p.id == id) return &p;
    return nullptr;
}

Proposal& Governance::proposal_ref(std::uint32_t id) {
    for (auto& p : proposals_)
        if (p.id == id) return p;
    throw Error(ErrorCode::UnknownProposal, "no proposal with id " + std::to_string(id));
}

std::uint32_t Governance::submit_proposal(const std::string& proposer, ProposalKind kind,
                                          std::uint64_t current_block) {
    require_member(proposer);
    for (const auto& p : proposals_)
        if (p.status == ProposalStatus::Voting || p.status == ProposalStatus::ApprovedPending)
            throw Error(ErrorCode::ProposalInFlight,
                        "proposal " + std::to_string(p.id) + " is still unresolved");
    if (phase_ != ContractPhase::Executable)
        throw Error(ErrorCode::WrongPhase,
                    std::string("cannot propose while ") + contract_phase_name(phase_));
    if (const auto* pc = std::get_if<ParamChangeProposal>(&kind)) pc->new_params.validate();

    Proposal p;
    p.id = next_id_++;
    p.kind = std::move(kind);
    p.proposer = proposer;
    p.created_block = current_block;
    p.deadline_block = current_block + params_.voting_deadline_blocks;
    proposals_.push_back(std::move(p));
    phase_ = ContractPhase::VotingOpen;
    return proposals_.back().id;
}

VoteOutcome Governance::cast_vote(const std::string& voter, std::uint32_t proposal_id,
                                  VoteChoice choice, std::uint64_t current_block) {
    require_member(voter);
    Proposal& p = proposal_ref(proposal_id);
    if (p.status != ProposalStatus::Voting)
        throw Error(ErrorCode::VotingClosed,
                    "proposal is " + std::string(proposal_status_name(p.status)));
    if (current_block >= p.deadline_block)
        throw Error(ErrorCode::VotingClosed, "voting deadline has passed");
    if (p.votes.count(voter))
        throw Error(ErrorCode::AlreadyVoted, "'" + voter + "' already voted");
    p.votes.emplace(voter, choice);

    std::uint64_t n = members_.size();
    std::uint64_t yes = 0, no = 0;
    for (const auto& [_, c] : p.votes) (c == VoteChoice::Yes ? yes : no) += 1;

    bool halted = threshold_met(yes, params_.halt_threshold, n);
    if (halted) phase_ = ContractPhase::NonExecutable;

    if (threshold_met(yes, params_.approval_threshold, n)) {
        p.status = ProposalStatus::ApprovedPending;
        phase_ = ContractPhase::NonExecutable;
        return VoteOutcome::Approved;
    }
    // approval mathematically impossible: No > (1 - threshold) * members
    const Rational& a = params_.approval_threshold;
    if (no * a.den > static_cast<std::uint64_t>(a.den - a.num) * n) {
        p.status = ProposalStatus::Rejected;
        phase_ = halted ? ContractPhase::NonExecutable : ContractPhase::Executable;
        return VoteOutcome::Rejected;
    }
    return halted ? VoteOutcome::Halted : VoteOutcome::Pending;
}

std::vector<StatusChange> Governance::on_block(std::uint64_t current_block) {
    std::vector<StatusChange> changes;
    for (auto& p : proposals_) {
        if (p.status != ProposalStatus::Voting || current_block < p.deadline_block) continue;
        std::uint64_t n = members_.size();
        std::uint64_t cast = p.votes.size();
        std::uint64_t yes = 0;
        for (const auto& [_, c] : p.votes)
            if (c == VoteChoice::Yes) ++yes;
        bool quorum_met = threshold_met(cast, params_.quorum, n);
        bool approved = quorum_met && threshold_met(yes, params_.approval_threshold, cast);
        if (approved) {
            p.status = ProposalStatus::ApprovedPending;
            phase_ = ContractPhase::NonExecutable;
        } else {
            p.status = ProposalStatus::Expired;
            phase_ = ContractPhase::Executable;
        }
        changes.push_back({p.id, p.status, phase_});
    }
    return changes;
}

const Proposal& Governance::begin_activation(const std::string& caller, std::uint32_t proposal_id,
                                             std::optional<Word256> supplied_plan_hash) {
    require_member(caller);
    Proposal& p = proposal_ref(proposal_id);
    if (p.status != ProposalStatus::ApprovedPending)
        throw Error(ErrorCode::NotApproved,
                    "proposal is " + std::string(proposal_status_name(p.status)));
    if (const auto* up = std::get_if<UpgradeProposal>(&p.kind)) {
        if (!supplied_plan_hash || *supplied_plan_hash != up->plan_hash)
            throw Error(ErrorCode::PlanHashMismatch,
                        "supplied plan does not match the voted plan hash");
    }
    return p;
}

void Governance::finish_activation(std::uint32_t proposal_id) {
    Proposal& p = proposal_ref(proposal_id);
    if (const auto* pc = std::get_if<ParamChangeProposal>(&p.kind)) params_ = pc->new_params;
    p.status = ProposalStatus::Applied;
    phase_ = ContractPhase::Executable;
}

nlohmann::json governance_params_to_json(const GovernanceParams& p) {
    nlohmann::json j;
    j["voting_deadline_blocks"] = p.voting_deadline_blocks;
    j["approval_threshold"] = p.approval_threshold.str();
    j["halt_threshold"] = p.halt_threshold.str();
    j["quorum"] = p.quorum.str();
    return j;
}

GovernanceParams governance_params_from_json(const nlohmann::json& j) {
    GovernanceParams p;
    if (j.contains("voting_deadline_blocks"))
        p.voting_deadline_blocks = j.at("voting_deadline_blocks").get<std::uint32_t>();
    if (j.contains("approval_threshold"))
        p.approval_threshold = Rational::parse(j.at("approval_threshold").get<std::string>());
    if (j.contains("halt_threshold"))
        p.halt_threshold = Rational::parse(j.at("halt_threshold").get<std::string>());
    if (j.contains("quorum")) p.quorum = Rational::parse(j.at("quorum").get<std::string>());
    p.validate();
    return p;
}

std::string Governance::to_json() const {
    nlohmann::json j;
    j["params"] = governance_params_to_json(params_);
    j["members"] = members_;
    j["phase"] = contract_phase_name(phase_);
    j["next_id"] = next_id_;
    j["proposals"] = nlohmann::json::array();
    for (const auto& p : proposals_) {
        nlohmann::json pj;
        pj["id"] = p.id;
        pj["proposer"] = p.proposer;
        pj["created_block"] = p.created_block;
        pj["deadline_block"] = p.deadline_block;
        pj["status"] = proposal_status_name(p.status);
        nlohmann::json votes = nlohmann::json::object();
        for (const auto& [voter, choice] : p.votes)
            votes[voter] = choice == VoteChoice::Yes ? "yes" : "no";
        pj["votes"] = std::move(votes);
        if (const auto* up = std::get_if<UpgradeProposal>(&p.kind)) {
            pj["kind"] = "upgrade";
            pj["new_schema"] = render_schema(up->new_schema);
            pj["new_version"] = up->new_schema.version;
            pj["plan_hash"] = up->plan_hash.to_hex();
        } else {
            pj["kind"] = "param_change";
            pj["new_params"] =
                governance_params_to_json(std::get<ParamChangeProposal>(p.kind).new_params);
        }
        j["proposals"].push_back(std::move(pj));
    }
    return j.dump(2);
}

Governance Governance::from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    Governance g(governance_params_from_json(j.at("params")),
                 j.at("members").get<std::set<std::string>>());
    g.next_id_ = j.at("next_id").get<std::uint32_t>();
    std::string phase = j.at("phase").get<std::string>();
    for (auto ph : {ContractPhase::Executable, ContractPhase::VotingOpen,
                    ContractPhase::NonExecutable})
        if (phase == contract_phase_name(ph)) g.phase_ = ph;
    for (const auto& pj : j.at("proposals")) {
        Proposal p;
        p.id = pj.at("id").get<std::uint32_t>();
        p.proposer = pj.at("proposer").get<std::string>();
        p.created_block = pj.at("created_block").get<std::uint64_t>();
        p.deadline_block = pj.at("deadline_block").get<std::uint64_t>();
        std::string status = pj.at("status").get<std::string>();
        for (auto st : {ProposalStatus::Voting, ProposalStatus::Rejected,
                        ProposalStatus::ApprovedPending, ProposalStatus::Applied,
                        ProposalStatus::Expired})
            if (status == proposal_status_name(st)) p.status = st;
        for (const auto& [voter, choice] : pj.at("votes").items())
            p.votes.emplace(voter, choice.get<std::string>() == "yes" ? VoteChoice::Yes
                                                                      : VoteChoice::No);
        if (pj.at("kind").get<std::string>() == "upgrade") {
            UpgradeProposal up;
            up.new_schema = parse_schema(pj.at("new_schema").get<std::string>());
            up.new_schema.version = pj.at("new_version").get<std::uint32_t>();
            up.plan_hash = Word256::from_hex(pj.at("plan_hash").get<std::string>());
            p.kind = std::move(up);
        } else {
            p.kind = ParamChangeProposal{governance_params_from_json(pj.at("new_params"))};
        }
        g.proposals_.push_back(std::move(p));
    }
    return g;
}

} // namespace flexi
