#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fs3a {

// Every failure the protocol entities can surface. The names double as the
// wire spelling of `error` fields, so keep them stable.
enum class Errc {
    InvariantViolation,
    MalformedFrame,
    NoRoute,
    LivelockGuard,
    UnknownSubscriber,
    NetworkAuthFailure,
    ResFailure,
    NotAttached,
    OrphanContext,
    UnknownSourceIP,
    NotEntitled,
    SubscriptionPending,
    BadSignature,
    Expired,
    AudienceMismatch,
    SubjectIpMismatch,
    HomeUnreachable,
    StaleWatch,
    SourceStateGone,
    NoSession,
    NoNeighbors,
    DuplicatePrefix,
    UnroutableRealm,
    CorrelationLost,
    ConfigMismatch,
    ConfigError,
    IoFailure,
};

std::string_view errc_name(Errc code);
std::optional<Errc> errc_from_name(std::string_view name);

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& detail)
        : std::runtime_error(std::string(errc_name(code)) + (detail.empty() ? "" : ": " + detail)),
          code_(code) {}
    explicit Error(Errc code) : Error(code, "") {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace fs3a
