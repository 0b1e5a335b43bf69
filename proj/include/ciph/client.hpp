#pragma once

#include <cstdint>
#include <optional>

#include "ciph/biometric.hpp"
#include "ciph/gateway.hpp"
#include "ciph/identity.hpp"
#include "ciph/proof.hpp"
#include "ciph/rng.hpp"

namespace ciph {

/// The user-controlled device side: key pair, biometric profile, encrypted
/// template vault, and credential. Raw biometric material and the private
/// key never leave this structure; everything sent outward is derived
/// (proofs, commitments, digests).
struct ClientDevice {
    Did did;
    KeyPair keys;
    IdentityProfile profile;
    Bytes vault_key;             // 256-bit template encryption key
    ProtectedTemplate enrolled;  // encrypted enrollment template
    Credential credential;
    Json metadata;  // document stored by CID at enrolment

    LivenessStub liveness;
    DeviceAttestation attestation;
};

/// Provisions a device: identity from seed, enrollment sample, encrypted
/// template, metadata document, and an issuer-signed credential whose
/// metadata_cid addresses that document.
ClientDevice provision_client(std::span<const std::uint8_t> seed32, Issuer& issuer,
                              std::int64_t now_ms);

/// One local authentication round: fresh sample, template recovery, match,
/// liveness and device gate, then proof construction. Throws AuthBlocked or
/// MatchRejected on the corresponding local failures.
AuthProof local_auth_round(const ClientDevice& device, std::span<const std::uint8_t> challenge,
                           std::uint64_t ledger_epoch, std::uint64_t sample_seed,
                           RandomSource& random,
                           double threshold = kDefaultMatchThreshold,
                           double noise_sigma = kDefaultNoiseSigma);

}  // namespace ciph
