#pragma once

// Helpers shared by the integration-style unit tests.

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "fs3a/error.hpp"
#include "fs3a/netsim/transport.hpp"
#include "fs3a/wire/messages.hpp"

namespace fs3a::testing {

template <class T>
std::uint8_t type_of() {
    return msg_type(Message{T{}});
}

// Frames of type T sent from `from` to `to` (empty string matches any).
template <class T>
std::size_t count(const std::vector<netsim::TraceRecord>& trace, const std::string& from = {},
                  const std::string& to = {}) {
    const auto t = type_of<T>();
    return static_cast<std::size_t>(std::count_if(trace.begin(), trace.end(), [&](const auto& r) {
        return r.msg_type == t && (from.empty() || r.from == from) && (to.empty() || r.to == to);
    }));
}

inline std::size_t count_between(const std::vector<netsim::TraceRecord>& trace, const std::string& a,
                                 const std::string& b) {
    return static_cast<std::size_t>(std::count_if(trace.begin(), trace.end(), [&](const auto& r) {
        return (r.from == a && r.to == b) || (r.from == b && r.to == a);
    }));
}

inline Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::InvariantViolation;
}

inline bool throws_nothing(const std::function<void()>& f) {
    try {
        f();
    } catch (...) {
        return false;
    }
    return true;
}

} // namespace fs3a::testing
