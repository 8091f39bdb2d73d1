#pragma once

#include <stdexcept>
#include <string>

namespace flexi {

enum class ErrorCode {
    // schema
    SyntaxError,
    DuplicateVariable,
    UnsupportedType,
    // layout / store access
    UnknownVariable,
    IndexOutOfBounds,
    AccessShapeMismatch,
    RangeError,
    ValueOutOfRange,
    // analyzer / reorganizer
    VersionMismatch,
    PlanCorrupt,
    ScratchNotRestored,
    // governance
    NotStakeholder,
    ProposalInFlight,
    WrongPhase,
    AlreadyVoted,
    VotingClosed,
    UnknownProposal,
    NotApproved,
    PlanHashMismatch,
    // chain
    ContractHalted,
    UnknownAccount,
    UnknownContract,
    BadTransaction,
    ScenarioParseError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace flexi
