#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ciph/bytes.hpp"
#include "ciph/canonical.hpp"

namespace ciph {

/// Wire protocol: length-prefixed frames carrying JSON envelopes
/// {type, id, body}. The prefix is a 4-byte big-endian payload length.
inline constexpr std::size_t kMaxFrameBytes = 16u << 20;

enum class MsgType {
    enroll_req,
    enroll_resp,
    challenge_req,
    challenge_resp,
    auth_req,
    auth_resp,
    verify_task,
    verify_result,
    revoke_req,
    revoke_resp,
    status_req,
    status_resp,
    error,
};

std::string_view to_string(MsgType t);
std::optional<MsgType> msg_type_from_string(std::string_view s);

struct Envelope {
    MsgType type = MsgType::error;
    std::uint64_t id = 0;
    Json body = Json::object();

    Json to_json() const;
    static std::optional<Envelope> from_json(const Json& j);
};

Envelope make_error(std::uint64_t id, std::string_view code, std::string_view message);

/// Frame = 4-byte big-endian length + JSON payload bytes.
Bytes encode_frame(const Envelope& envelope);

/// Consumes exactly one frame from the front of `buffer` when complete;
/// returns std::nullopt if more bytes are needed. Throws Error on oversized
/// or malformed frames.
std::optional<Envelope> try_decode_frame(Bytes& buffer);

}  // namespace ciph
