#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "ciph/canonical.hpp"
#include "ciph/errors.hpp"
#include "ciph/rng.hpp"

using namespace ciph;

namespace {

// Independent re-implementation of the canonical encoding, written against
// the same rules but sharing no code with the library. Random documents must
// encode identically through both paths.
std::string oracle_encode(const Json& v);

std::string oracle_string(const std::string& s) {
    std::string out = "\"";
    for (unsigned char c : s) {
        if (c == '"') {
            out += "\\\"";
        } else if (c == '\\') {
            out += "\\\\";
        } else if (c == '\b') {
            out += "\\b";
        } else if (c == '\t') {
            out += "\\t";
        } else if (c == '\n') {
            out += "\\n";
        } else if (c == '\f') {
            out += "\\f";
        } else if (c == '\r') {
            out += "\\r";
        } else if (c < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out += buf;
        } else {
            out += static_cast<char>(c);
        }
    }
    out += "\"";
    return out;
}

std::string oracle_encode(const Json& v) {
    if (v.is_object()) {
        std::vector<std::string> keys;
        for (auto it = v.begin(); it != v.end(); ++it) keys.push_back(it.key());
        std::sort(keys.begin(), keys.end());  // bytewise via std::string::operator<
        std::string out = "{";
        for (std::size_t i = 0; i < keys.size(); ++i) {
            if (i > 0) out += ",";
            out += oracle_string(keys[i]) + ":" + oracle_encode(v.at(keys[i]));
        }
        return out + "}";
    }
    if (v.is_array()) {
        std::string out = "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0) out += ",";
            out += oracle_encode(v[i]);
        }
        return out + "]";
    }
    if (v.is_string()) return oracle_string(v.get<std::string>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    FAIL("oracle got unsupported type");
    return {};
}

std::string random_key(Rng& rng) {
    static const std::string alphabet = "abcdefghijklmnopqrstuvwxyzABCXYZ0189_- .\t\n\"\\";
    std::string out;
    auto len = static_cast<std::size_t>(rng.uniform_int(0, 12));
    for (std::size_t i = 0; i < len; ++i) {
        out.push_back(alphabet[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(alphabet.size() - 1)))]);
    }
    return out;
}

Json random_doc(Rng& rng, int depth) {
    int pick = static_cast<int>(rng.uniform_int(0, depth > 2 ? 3 : 5));
    switch (pick) {
        case 0: return Json(random_key(rng));
        case 1: return Json(rng.uniform_int(-1'000'000'000, 1'000'000'000));
        case 2: return Json(rng.uniform_int(0, 1) == 1);
        case 3: return Json(static_cast<std::uint64_t>(rng.next()));
        case 4: {
            Json arr = Json::array();
            auto n = static_cast<std::size_t>(rng.uniform_int(0, 4));
            for (std::size_t i = 0; i < n; ++i) arr.push_back(random_doc(rng, depth + 1));
            return arr;
        }
        default: {
            Json obj = Json::object();
            auto n = static_cast<std::size_t>(rng.uniform_int(0, 4));
            for (std::size_t i = 0; i < n; ++i) obj[random_key(rng)] = random_doc(rng, depth + 1);
            return obj;
        }
    }
}

}  // namespace

TEST_CASE("key order does not affect the encoding") {
    Json a;
    a["b"] = 1;
    a["a"] = 2;
    Json b;
    b["a"] = 2;
    b["b"] = 1;
    CHECK(canonical_bytes(a) == canonical_bytes(b));
    CHECK(bytes_to_string(canonical_bytes(a)) == "{\"a\":2,\"b\":1}");
}

TEST_CASE("empty map encodes to the two-character form") {
    CHECK(bytes_to_string(canonical_bytes(Json::object())) == "{}");
}

TEST_CASE("floats and null are rejected") {
    CHECK_THROWS_AS(canonical_bytes(Json(1.5)), UnsupportedValue);
    CHECK_THROWS_AS(canonical_bytes(Json(nullptr)), UnsupportedValue);
    Json nested{{"a", Json::array({Json(true), Json(0.25)})}};
    CHECK_THROWS_AS(canonical_bytes(nested), UnsupportedValue);
}

TEST_CASE("integers use shortest decimal form and strings escape minimally") {
    Json doc{{"n", -42}, {"s", "line\nbreak\t\"q\""}, {"u", std::uint64_t{18446744073709551615ull}}};
    CHECK(bytes_to_string(canonical_bytes(doc)) ==
          "{\"n\":-42,\"s\":\"line\\nbreak\\t\\\"q\\\"\",\"u\":18446744073709551615}");
}

TEST_CASE("agrees with an independent encoder on random documents") {
    Rng rng(20250810);
    for (int trial = 0; trial < 100; ++trial) {
        Json doc = random_doc(rng, 0);
        CHECK(bytes_to_string(canonical_bytes(doc)) == oracle_encode(doc));
    }
}

TEST_CASE("construction order never changes the digest") {
    Json a{{"k1", Json::array({1, 2, 3})}, {"k2", "v"}};
    Json b = Json::object();
    b["k2"] = "v";
    b["k1"] = Json::array();
    b["k1"].push_back(1);
    b["k1"].push_back(2);
    b["k1"].push_back(3);
    CHECK(canonical_digest(a) == canonical_digest(b));
}
