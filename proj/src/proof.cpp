#include "ciph/proof.hpp"

#include "ciph/canonical.hpp"
#include "ciph/crypto.hpp"
#include "ciph/errors.hpp"

namespace ciph {

std::vector<std::string> DeviceAttestation::failed_checks() const {
    std::vector<std::string> failed;
    if (rooted) failed.push_back("rooted");
    if (!keystore_ok) failed.push_back("keystore");
    if (!tee_ok) failed.push_back("tee");
    if (!liveness_ok) failed.push_back("liveness");
    return failed;
}

Json DeviceAttestation::canonical_doc() const {
    return Json{
        {"keystore_ok", keystore_ok},
        {"liveness_ok", liveness_ok},
        {"rooted", rooted},
        {"tee_ok", tee_ok},
    };
}

Bytes DeviceAttestation::digest() const { return canonical_digest(canonical_doc()); }

GatePass gate_device(const DeviceAttestation& att) {
    if (!att.passes()) throw AuthBlocked(att.failed_checks());
    return GatePass{};
}

MatchCommitment MatchCommitment::create(bool match_accepted, RandomSource& random) {
    MatchCommitment c;
    c.salt = random.bytes(kCommitmentSaltBytes);
    Bytes preimage;
    preimage.reserve(1 + kCommitmentSaltBytes);
    preimage.push_back(match_accepted ? 0x01 : 0x00);
    preimage.insert(preimage.end(), c.salt.begin(), c.salt.end());
    c.commitment = crypto::sha256(preimage);
    return c;
}

std::string_view to_string(RejectReason r) {
    switch (r) {
        case RejectReason::bad_signature: return "bad_signature";
        case RejectReason::stale_challenge: return "stale_challenge";
        case RejectReason::stale_epoch: return "stale_epoch";
        case RejectReason::metadata_missing: return "metadata_missing";
        case RejectReason::metadata_mismatch: return "metadata_mismatch";
        case RejectReason::revoked: return "revoked";
    }
    return "unknown";
}

std::optional<RejectReason> reject_reason_from_string(std::string_view s) {
    if (s == "bad_signature") return RejectReason::bad_signature;
    if (s == "stale_challenge") return RejectReason::stale_challenge;
    if (s == "stale_epoch") return RejectReason::stale_epoch;
    if (s == "metadata_missing") return RejectReason::metadata_missing;
    if (s == "metadata_mismatch") return RejectReason::metadata_mismatch;
    if (s == "revoked") return RejectReason::revoked;
    return std::nullopt;
}

Json AuthProof::transcript() const {
    return Json{
        {"attestation_digest", to_hex(attestation_digest)},
        {"challenge", to_hex(challenge)},
        {"credential_id", to_hex(credential_id)},
        {"ledger_epoch", ledger_epoch},
        {"match_commitment", to_hex(match_commitment)},
        {"subject_did", subject_did.str()},
    };
}

Json AuthProof::to_json() const {
    Json j = transcript();
    j["signature"] = to_hex(signature);
    return j;
}

AuthProof AuthProof::from_json(const Json& j) {
    try {
        AuthProof p;
        auto id = from_hex(j.at("credential_id").get<std::string>());
        auto challenge = from_hex(j.at("challenge").get<std::string>());
        auto commitment = from_hex(j.at("match_commitment").get<std::string>());
        auto att = from_hex(j.at("attestation_digest").get<std::string>());
        auto sig = from_hex(j.at("signature").get<std::string>());
        auto subject = Did::parse(j.at("subject_did").get<std::string>());
        if (!id || !challenge || !commitment || !att || !sig || !subject) {
            throw Error("malformed proof fields");
        }
        p.credential_id = std::move(*id);
        p.challenge = std::move(*challenge);
        p.match_commitment = std::move(*commitment);
        p.attestation_digest = std::move(*att);
        p.signature = std::move(*sig);
        p.subject_did = std::move(*subject);
        p.ledger_epoch = j.at("ledger_epoch").get<std::uint64_t>();
        return p;
    } catch (const Json::exception& e) {
        throw Error(std::string("proof parse error: ") + e.what());
    }
}

AuthProof build_proof(const Credential& cred, const KeyPair& subject_keys,
                      std::span<const std::uint8_t> challenge, const MatchResult& match,
                      const DeviceAttestation& att, GatePass, std::uint64_t ledger_epoch,
                      RandomSource& random) {
    if (!match.accepted) throw MatchRejected("local biometric match was rejected");
    if (challenge.size() != kChallengeBytes) throw Error("challenge must be 32 bytes");

    AuthProof proof;
    proof.credential_id = cred.credential_id;
    proof.subject_did = cred.subject_did;
    proof.challenge.assign(challenge.begin(), challenge.end());
    proof.match_commitment = MatchCommitment::create(match.accepted, random).commitment;
    proof.attestation_digest = att.digest();
    proof.ledger_epoch = ledger_epoch;
    proof.signature = subject_keys.sign(canonical_bytes(proof.transcript()));
    return proof;
}

VerifyOutcome verify_proof(const AuthProof& proof,
                           std::span<const std::uint8_t> subject_public_key,
                           std::span<const std::uint8_t> expected_challenge,
                           std::uint64_t current_epoch, std::uint64_t epoch_tolerance) {
    // Key binding first: a proof under a key that does not derive the claimed
    // DID is a forgery, whatever the signature says.
    if (!proof.subject_did.matches_key(subject_public_key)) {
        return VerifyOutcome::reject(RejectReason::bad_signature);
    }
    try {
        Bytes msg = canonical_bytes(proof.transcript());
        if (!crypto::ed25519_verify(subject_public_key, msg, proof.signature)) {
            return VerifyOutcome::reject(RejectReason::bad_signature);
        }
    } catch (const Error&) {
        return VerifyOutcome::reject(RejectReason::bad_signature);
    }
    if (proof.challenge.size() != kChallengeBytes ||
        expected_challenge.size() != kChallengeBytes ||
        !std::equal(proof.challenge.begin(), proof.challenge.end(),
                    expected_challenge.begin())) {
        return VerifyOutcome::reject(RejectReason::stale_challenge);
    }
    // A node's own view may trail the prover's, so negative lag is fine.
    if (current_epoch > proof.ledger_epoch &&
        current_epoch - proof.ledger_epoch > epoch_tolerance) {
        return VerifyOutcome::reject(RejectReason::stale_epoch);
    }
    return VerifyOutcome::accept();
}

}  // namespace ciph
