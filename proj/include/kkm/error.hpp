#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kkm {

enum class ErrorCode {
    InputError,
    StructuralError,
    FullyLabeledOnDomain,
    BlOnDomain,
    CoverViolation,
    ZeroDenominator,
    NullHomotopyUndefined,
    NotFoundAtResolution,
    DegreeVanished,
    NoPerfectMatching,
    VerificationFailed,
    EmptyDomain,
    A2DegreeZero,
    SizeGuard,
    InternalError,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception carrying a machine-readable code.  `field` names the
/// offending input field when the error originates from parsing.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what, std::string field = {})
        : std::runtime_error(what), code_(code), field_(std::move(field)) {}

    ErrorCode code() const noexcept { return code_; }
    const std::string& field() const noexcept { return field_; }

private:
    ErrorCode code_;
    std::string field_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what, std::string field = {})
{
    throw Error(code, what, std::move(field));
}

inline void require(bool cond, const std::string& what, std::string field = {})
{
    if (!cond) fail(ErrorCode::InputError, what, std::move(field));
}

} // namespace kkm
