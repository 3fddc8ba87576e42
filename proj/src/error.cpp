#include "fs3a/error.hpp"

#include <array>
#include <utility>

namespace fs3a {

namespace {

constexpr std::array<std::pair<Errc, std::string_view>, 27> kNames{{
    {Errc::InvariantViolation, "InvariantViolation"},
    {Errc::MalformedFrame, "MalformedFrame"},
    {Errc::NoRoute, "NoRoute"},
    {Errc::LivelockGuard, "LivelockGuard"},
    {Errc::UnknownSubscriber, "UnknownSubscriber"},
    {Errc::NetworkAuthFailure, "NetworkAuthFailure"},
    {Errc::ResFailure, "ResFailure"},
    {Errc::NotAttached, "NotAttached"},
    {Errc::OrphanContext, "OrphanContext"},
    {Errc::UnknownSourceIP, "UnknownSourceIP"},
    {Errc::NotEntitled, "NotEntitled"},
    {Errc::SubscriptionPending, "SubscriptionPending"},
    {Errc::BadSignature, "BadSignature"},
    {Errc::Expired, "Expired"},
    {Errc::AudienceMismatch, "AudienceMismatch"},
    {Errc::SubjectIpMismatch, "SubjectIpMismatch"},
    {Errc::HomeUnreachable, "HomeUnreachable"},
    {Errc::StaleWatch, "StaleWatch"},
    {Errc::SourceStateGone, "SourceStateGone"},
    {Errc::NoSession, "NoSession"},
    {Errc::NoNeighbors, "NoNeighbors"},
    {Errc::DuplicatePrefix, "DuplicatePrefix"},
    {Errc::UnroutableRealm, "UnroutableRealm"},
    {Errc::CorrelationLost, "CorrelationLost"},
    {Errc::ConfigMismatch, "ConfigMismatch"},
    {Errc::ConfigError, "ConfigError"},
    {Errc::IoFailure, "IoFailure"},
}};

} // namespace

std::string_view errc_name(Errc code) {
    for (const auto& [c, name] : kNames) {
        if (c == code) return name;
    }
    return "Unknown";
}

std::optional<Errc> errc_from_name(std::string_view name) {
    for (const auto& [c, n] : kNames) {
        if (n == name) return c;
    }
    return std::nullopt;
}

} // namespace fs3a
