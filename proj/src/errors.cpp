#include "flexi/errors.hpp"

namespace flexi {

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::DuplicateVariable: return "DuplicateVariable";
    case ErrorCode::UnsupportedType: return "UnsupportedType";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::IndexOutOfBounds: return "IndexOutOfBounds";
    case ErrorCode::AccessShapeMismatch: return "AccessShapeMismatch";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::PlanCorrupt: return "PlanCorrupt";
    case ErrorCode::ScratchNotRestored: return "ScratchNotRestored";
    case ErrorCode::NotStakeholder: return "NotStakeholder";
    case ErrorCode::ProposalInFlight: return "ProposalInFlight";
    case ErrorCode::WrongPhase: return "WrongPhase";
    case ErrorCode::AlreadyVoted: return "AlreadyVoted";
    case ErrorCode::VotingClosed: return "VotingClosed";
    case ErrorCode::UnknownProposal: return "UnknownProposal";
    case ErrorCode::NotApproved: return "NotApproved";
    case ErrorCode::PlanHashMismatch: return "PlanHashMismatch";
    case ErrorCode::ContractHalted: return "ContractHalted";
    case ErrorCode::UnknownAccount: return "UnknownAccount";
    case ErrorCode::UnknownContract: return "UnknownContract";
    case ErrorCode::BadTransaction: return "BadTransaction";
    case ErrorCode::ScenarioParseError: return "ScenarioParseError";
    }
    return "UnknownError";
}

} // namespace flexi
