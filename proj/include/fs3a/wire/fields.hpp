#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "fs3a/wire/bytes.hpp"

namespace fs3a::wire {

// A frame body is a list of `key=value\n` lines with keys in strictly
// increasing byte order. Keys use [a-z0-9_.]; values are UTF-8 where
// control characters and '%' appear as %XX (uppercase hex) and nothing else
// may be escaped. Exactly one text maps to each FieldMap.
using FieldMap = std::map<std::string, std::string>;

bool valid_key(std::string_view key);
bool valid_utf8(std::string_view s);
std::string encode_body(const FieldMap& fields);
std::optional<FieldMap> decode_body(std::string_view body);

// Thrown by the typed accessors; the frame decoder converts it into a
// Malformed result.
struct FieldError {
    std::string what;
};

// Typed views over a FieldMap. Integers are fixed-width lowercase hex so a
// message's encoded size does not depend on counter or clock values.
class FieldWriter {
public:
    void str(const std::string& key, std::string_view value);
    void u32(const std::string& key, std::uint32_t value);
    void u64(const std::string& key, std::uint64_t value);
    void flag(const std::string& key, bool value);
    void ip(const std::string& key, Ipv4 value);
    void bytes(const std::string& key, std::span<const std::uint8_t> value);
    void hex(const std::string& key, std::span<const std::uint8_t> value);

    const FieldMap& fields() const { return fields_; }
    FieldMap take() { return std::move(fields_); }

private:
    FieldMap fields_;
};

class FieldReader {
public:
    explicit FieldReader(const FieldMap& fields) : fields_(fields) {}

    bool has(const std::string& key) const { return fields_.count(key) != 0; }
    std::string str(const std::string& key);
    std::uint32_t u32(const std::string& key);
    std::uint64_t u64(const std::string& key);
    bool flag(const std::string& key);
    Ipv4 ip(const std::string& key);
    Bytes bytes(const std::string& key);
    template <std::size_t N>
    std::array<std::uint8_t, N> hex(const std::string& key) {
        auto raw = from_hex(take(key));
        if (!raw || raw->size() != N) throw FieldError{"bad hex field " + key};
        std::array<std::uint8_t, N> out{};
        std::copy(raw->begin(), raw->end(), out.begin());
        return out;
    }
    // Keys under `prefix.` not yet consumed, with the prefix stripped.
    std::map<std::string, std::string> take_prefixed(const std::string& prefix);
    // Every key must have been read exactly once.
    void finish() const;

private:
    const std::string& take(const std::string& key);

    const FieldMap& fields_;
    std::set<std::string> consumed_;
};

} // namespace fs3a::wire
