#pragma once

#include <cstdint>
#include <span>

#include "ciph/bytes.hpp"

namespace ciph::crypto {

inline constexpr std::size_t kSha256Bytes = 32;
inline constexpr std::size_t kEd25519PublicKeyBytes = 32;
inline constexpr std::size_t kEd25519SeedBytes = 32;
inline constexpr std::size_t kEd25519SignatureBytes = 64;
inline constexpr std::size_t kAeadKeyBytes = 32;
inline constexpr std::size_t kAeadNonceBytes = 12;
inline constexpr std::size_t kAeadTagBytes = 16;

Bytes sha256(std::span<const std::uint8_t> data);
Bytes hmac_sha256(std::span<const std::uint8_t> key, std::span<const std::uint8_t> msg);

struct Ed25519KeyPair {
    Bytes public_key;   // 32 bytes
    Bytes private_seed; // 32 bytes, never serialized by any wire operation
};

/// Deterministic: the seed fully determines the key pair.
Ed25519KeyPair ed25519_from_seed(std::span<const std::uint8_t> seed32);

Bytes ed25519_sign(std::span<const std::uint8_t> private_seed, std::span<const std::uint8_t> msg);
bool ed25519_verify(std::span<const std::uint8_t> public_key, std::span<const std::uint8_t> msg,
                    std::span<const std::uint8_t> signature);

struct Sealed {
    Bytes nonce;      // 12 bytes
    Bytes ciphertext; // plaintext length + 16-byte tag
};

/// AES-256-GCM. The caller supplies the nonce (12 bytes, fresh per key).
Sealed aes256gcm_seal(std::span<const std::uint8_t> key32, std::span<const std::uint8_t> nonce12,
                      std::span<const std::uint8_t> plaintext);

/// Throws AuthenticationFailure when the key is wrong or the ciphertext was
/// modified.
Bytes aes256gcm_open(std::span<const std::uint8_t> key32, std::span<const std::uint8_t> nonce12,
                     std::span<const std::uint8_t> ciphertext);

}  // namespace ciph::crypto
