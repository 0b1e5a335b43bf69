#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ciph {

using Bytes = std::vector<std::uint8_t>;

std::string to_hex(std::span<const std::uint8_t> data);

/// Returns std::nullopt on odd length or non-hex characters.
std::optional<Bytes> from_hex(std::string_view hex);

/// Unpadded base64url (RFC 4648 §5).
std::string base64url_encode(std::span<const std::uint8_t> data);
std::optional<Bytes> base64url_decode(std::string_view text);

/// Constant-time equality for MACs and other secret-derived values.
bool ct_equal(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

Bytes to_bytes(std::string_view s);
std::string bytes_to_string(std::span<const std::uint8_t> data);

}  // namespace ciph
