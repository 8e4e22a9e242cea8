#pragma once

#include <stdexcept>
#include <string>

namespace pott {

enum class ErrorCode {
    // wire format
    NonCanonicalEncoding,
    UnknownKey,
    WrongLength,
    Truncated,
    DigestError,
    // chain construction
    ClockError,
    MonotonicityError,
    EmptyChain,
    NonceMismatch,
    // time
    TableGap,
    WindowNotCovered,
    // policy
    ManifestSignatureInvalid,
    ManifestStale,
    MixedPayload,
    // btc
    EmptyInput,
    WindowTooShort,
    // crypto
    InvalidKey,
    // simulator
    ScenarioInvalid,
    // tooling
    IoError,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

} // namespace pott
