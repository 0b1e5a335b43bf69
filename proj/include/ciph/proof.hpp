#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ciph/biometric.hpp"
#include "ciph/bytes.hpp"
#include "ciph/identity.hpp"
#include "ciph/rng.hpp"

namespace ciph {

inline constexpr std::size_t kChallengeBytes = 32;
inline constexpr std::size_t kCommitmentSaltBytes = 16;
inline constexpr std::uint64_t kDefaultEpochTolerance = 2;

/// Device integrity flags reported by the client platform. Real probing
/// (root detection, keystore, TEE) is out of scope; these are attestation
/// inputs.
struct DeviceAttestation {
    bool rooted = false;
    bool keystore_ok = true;
    bool tee_ok = true;
    bool liveness_ok = true;

    bool passes() const { return !rooted && keystore_ok && tee_ok && liveness_ok; }
    std::vector<std::string> failed_checks() const;
    Json canonical_doc() const;
    Bytes digest() const;  // SHA-256 of the canonical doc
};

/// Proof-of-passage token for the device gate. Only gate_device can mint
/// one, so no proof can be built without passing the gate.
class GatePass {
public:
    GatePass(const GatePass&) = default;
    GatePass& operator=(const GatePass&) = default;

private:
    GatePass() = default;
    friend GatePass gate_device(const DeviceAttestation& att);
};

/// Throws AuthBlocked naming every failed check.
GatePass gate_device(const DeviceAttestation& att);

/// Hash commitment to the local match outcome. The salt stays on the device;
/// a verifier sees only the 32-byte commitment.
struct MatchCommitment {
    Bytes commitment;  // SHA-256(accepted byte || salt)
    Bytes salt;        // 16 bytes, local only

    static MatchCommitment create(bool match_accepted, RandomSource& random);
};

enum class RejectReason {
    bad_signature,
    stale_challenge,
    stale_epoch,
    metadata_missing,
    metadata_mismatch,
    revoked,
};

std::string_view to_string(RejectReason r);
std::optional<RejectReason> reject_reason_from_string(std::string_view s);

struct VerifyOutcome {
    bool accepted = false;
    std::optional<RejectReason> reason;

    static VerifyOutcome accept() { return {true, std::nullopt}; }
    static VerifyOutcome reject(RejectReason r) { return {false, r}; }
};

/// Challenge-bound signed transcript binding credential possession, the
/// local match commitment, the device attestation digest, and the ledger
/// epoch the prover observed. The serialization carries no biometric
/// material and no commitment salt.
struct AuthProof {
    Bytes credential_id;
    Did subject_did;
    Bytes challenge;           // 32-byte gateway nonce
    Bytes match_commitment;    // MatchCommitment.commitment
    Bytes attestation_digest;  // SHA-256 of canonical DeviceAttestation
    std::uint64_t ledger_epoch = 0;
    Bytes signature;  // subject signature over the canonical transcript

    Json transcript() const;  // signed portion
    Json to_json() const;
    static AuthProof from_json(const Json& j);  // throws Error on malformed input
};

/// Requires a passed device gate and an accepted local match. The commitment
/// salt is drawn fresh from `random` on every call.
AuthProof build_proof(const Credential& cred, const KeyPair& subject_keys,
                      std::span<const std::uint8_t> challenge, const MatchResult& match,
                      const DeviceAttestation& att, GatePass pass, std::uint64_t ledger_epoch,
                      RandomSource& random);

/// Accept iff the signature verifies under the subject key, the subject DID
/// is bound to that key, the challenge matches, and the claimed epoch is
/// within tolerance of current_epoch. Revocation itself is re-checked
/// authoritatively by verifier nodes; the epoch here only bounds how stale a
/// prover's ledger view may be.
VerifyOutcome verify_proof(const AuthProof& proof,
                           std::span<const std::uint8_t> subject_public_key,
                           std::span<const std::uint8_t> expected_challenge,
                           std::uint64_t current_epoch,
                           std::uint64_t epoch_tolerance = kDefaultEpochTolerance);

}  // namespace ciph
