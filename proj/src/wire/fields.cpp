#include "fs3a/wire/fields.hpp"

#include <cstdio>

namespace fs3a::wire {

namespace {

bool needs_escape(unsigned char c) { return c < 0x20 || c == 0x7f || c == '%'; }

int upper_hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

bool valid_utf8(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        auto c = static_cast<unsigned char>(s[i]);
        std::size_t len = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xe0) == 0xc0) {
            len = 2;
            cp = c & 0x1f;
        } else if ((c & 0xf0) == 0xe0) {
            len = 3;
            cp = c & 0x0f;
        } else if ((c & 0xf8) == 0xf0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > s.size()) return false;
        for (std::size_t j = 1; j < len; ++j) {
            auto cc = static_cast<unsigned char>(s[i + j]);
            if ((cc & 0xc0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3f);
        }
        // Reject overlong forms, surrogates and out-of-range code points.
        if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000)) return false;
        if (cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) return false;
        i += len;
    }
    return true;
}

namespace {

std::string fixed_hex(std::uint64_t v, int width) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%0*llx", width, static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t parse_fixed_hex(std::string_view s, std::size_t width, const std::string& key) {
    if (s.size() != width) throw FieldError{"bad width for " + key};
    std::uint64_t v = 0;
    for (char c : s) {
        int d;
        if (c >= '0' && c <= '9') d = c - '0';
        else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
        else throw FieldError{"bad hex digit in " + key};
        v = (v << 4) | static_cast<std::uint64_t>(d);
    }
    return v;
}

} // namespace

bool valid_key(std::string_view key) {
    if (key.empty()) return false;
    for (char c : key) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.';
        if (!ok) return false;
    }
    return true;
}

std::string encode_body(const FieldMap& fields) {
    std::string out;
    for (const auto& [key, value] : fields) {
        out += key;
        out.push_back('=');
        for (char ch : value) {
            auto c = static_cast<unsigned char>(ch);
            if (needs_escape(c)) {
                char buf[4];
                std::snprintf(buf, sizeof buf, "%%%02X", c);
                out += buf;
            } else {
                out.push_back(ch);
            }
        }
        out.push_back('\n');
    }
    return out;
}

std::optional<FieldMap> decode_body(std::string_view body) {
    FieldMap out;
    std::string previous;
    bool first = true;
    std::size_t pos = 0;
    while (pos < body.size()) {
        auto nl = body.find('\n', pos);
        if (nl == std::string_view::npos) return std::nullopt;
        auto line = body.substr(pos, nl - pos);
        pos = nl + 1;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) return std::nullopt;
        std::string key(line.substr(0, eq));
        if (!valid_key(key)) return std::nullopt;
        if (!first && key <= previous) return std::nullopt;
        std::string value;
        auto raw = line.substr(eq + 1);
        for (std::size_t i = 0; i < raw.size(); ++i) {
            auto c = static_cast<unsigned char>(raw[i]);
            if (c == '%') {
                if (i + 2 >= raw.size()) return std::nullopt;
                int hi = upper_hex_value(raw[i + 1]);
                int lo = upper_hex_value(raw[i + 2]);
                if (hi < 0 || lo < 0) return std::nullopt;
                auto decoded = static_cast<unsigned char>((hi << 4) | lo);
                if (!needs_escape(decoded)) return std::nullopt;
                value.push_back(static_cast<char>(decoded));
                i += 2;
            } else if (needs_escape(c)) {
                return std::nullopt;
            } else {
                value.push_back(static_cast<char>(c));
            }
        }
        if (!valid_utf8(value)) return std::nullopt;
        previous = key;
        first = false;
        out.emplace(std::move(key), std::move(value));
    }
    return out;
}

void FieldWriter::str(const std::string& key, std::string_view value) { fields_[key] = std::string(value); }
void FieldWriter::u32(const std::string& key, std::uint32_t value) { fields_[key] = fixed_hex(value, 8); }
void FieldWriter::u64(const std::string& key, std::uint64_t value) { fields_[key] = fixed_hex(value, 16); }
void FieldWriter::flag(const std::string& key, bool value) { fields_[key] = value ? "1" : "0"; }
void FieldWriter::ip(const std::string& key, Ipv4 value) { fields_[key] = fixed_hex(value.value, 8); }
void FieldWriter::bytes(const std::string& key, std::span<const std::uint8_t> value) {
    fields_[key] = base64_encode(value);
}
void FieldWriter::hex(const std::string& key, std::span<const std::uint8_t> value) { fields_[key] = to_hex(value); }

const std::string& FieldReader::take(const std::string& key) {
    auto it = fields_.find(key);
    if (it == fields_.end()) throw FieldError{"missing field " + key};
    if (!consumed_.insert(key).second) throw FieldError{"field read twice " + key};
    return it->second;
}

std::string FieldReader::str(const std::string& key) { return take(key); }
std::uint32_t FieldReader::u32(const std::string& key) {
    return static_cast<std::uint32_t>(parse_fixed_hex(take(key), 8, key));
}
std::uint64_t FieldReader::u64(const std::string& key) { return parse_fixed_hex(take(key), 16, key); }
bool FieldReader::flag(const std::string& key) {
    const auto& v = take(key);
    if (v == "1") return true;
    if (v == "0") return false;
    throw FieldError{"bad flag " + key};
}
Ipv4 FieldReader::ip(const std::string& key) {
    return Ipv4{static_cast<std::uint32_t>(parse_fixed_hex(take(key), 8, key))};
}
Bytes FieldReader::bytes(const std::string& key) {
    auto raw = base64_decode(take(key));
    if (!raw) throw FieldError{"bad base64 field " + key};
    return *raw;
}

std::map<std::string, std::string> FieldReader::take_prefixed(const std::string& prefix) {
    std::map<std::string, std::string> out;
    std::string p = prefix + ".";
    for (auto it = fields_.lower_bound(p); it != fields_.end() && it->first.compare(0, p.size(), p) == 0; ++it) {
        if (consumed_.count(it->first)) continue;
        consumed_.insert(it->first);
        out.emplace(it->first.substr(p.size()), it->second);
    }
    return out;
}

void FieldReader::finish() const {
    if (consumed_.size() != fields_.size()) throw FieldError{"unexpected extra fields"};
}

} // namespace fs3a::wire
