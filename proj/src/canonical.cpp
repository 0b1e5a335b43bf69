#include "ciph/canonical.hpp"

#include <string>

#include "ciph/crypto.hpp"
#include "ciph/errors.hpp"

namespace ciph {

namespace {

void append_escaped(std::string& out, const std::string& s) {
    out.push_back('"');
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\f': out += "\\f"; break;
            case '\r': out += "\\r"; break;
            default:
                if (c < 0x20) {
                    static const char hex[] = "0123456789abcdef";
                    out += "\\u00";
                    out.push_back(hex[c >> 4]);
                    out.push_back(hex[c & 0x0f]);
                } else {
                    out.push_back(static_cast<char>(c));
                }
        }
    }
    out.push_back('"');
}

void encode(std::string& out, const Json& v) {
    switch (v.type()) {
        case Json::value_t::object: {
            out.push_back('{');
            bool first = true;
            // nlohmann objects are std::map-backed: iteration is already
            // bytewise-ascending by key.
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) out.push_back(',');
                first = false;
                append_escaped(out, it.key());
                out.push_back(':');
                encode(out, it.value());
            }
            out.push_back('}');
            break;
        }
        case Json::value_t::array: {
            out.push_back('[');
            bool first = true;
            for (const auto& item : v) {
                if (!first) out.push_back(',');
                first = false;
                encode(out, item);
            }
            out.push_back(']');
            break;
        }
        case Json::value_t::string:
            append_escaped(out, v.get_ref<const std::string&>());
            break;
        case Json::value_t::boolean:
            out += v.get<bool>() ? "true" : "false";
            break;
        case Json::value_t::number_integer:
            out += std::to_string(v.get<std::int64_t>());
            break;
        case Json::value_t::number_unsigned:
            out += std::to_string(v.get<std::uint64_t>());
            break;
        case Json::value_t::number_float:
            throw UnsupportedValue("canonical encoding rejects floats");
        case Json::value_t::null:
            throw UnsupportedValue("canonical encoding rejects null");
        default:
            throw UnsupportedValue("canonical encoding rejects this value type");
    }
}

}  // namespace

Bytes canonical_bytes(const Json& doc) {
    std::string out;
    encode(out, doc);
    return to_bytes(out);
}

Bytes canonical_digest(const Json& doc) { return crypto::sha256(canonical_bytes(doc)); }

}  // namespace ciph
