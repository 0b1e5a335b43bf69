#include "ciph/client.hpp"

#include "ciph/canonical.hpp"
#include "ciph/errors.hpp"
#include "ciph/trust.hpp"

namespace ciph {

ClientDevice provision_client(std::span<const std::uint8_t> seed32, Issuer& issuer,
                              std::int64_t now_ms) {
    ClientDevice device;
    auto [did, keys] = generate_identity(seed32);
    device.did = did;
    device.keys = std::move(keys);
    device.profile = make_profile(seed32);

    // Vault key and enrollment template stay on the device.
    Rng vault_rng(seed32);
    device.vault_key.resize(crypto::kAeadKeyBytes);
    vault_rng.fill(device.vault_key);
    SeededRandom nonce_source(vault_rng.next());
    Embedding enrollment = sample_embedding(device.profile, kDefaultNoiseSigma, 0);
    device.enrolled = protect_template(enrollment, device.vault_key, "vault-0", nonce_source);

    // The credential id is derivable before signing, so the metadata document
    // can reference it and its CID can be committed inside the credential.
    std::uint64_t counter = issuer.allocate_counter();
    Bytes credential_id = derive_credential_id(issuer.did(), device.did, now_ms, counter);
    device.metadata = Json{
        {"credential_id", to_hex(credential_id)},
        {"issuer_public_key", to_hex(issuer.keys().public_key)},
        {"kind", "identity-credential-metadata"},
        {"subject_did", device.did.str()},
    };
    Cid cid = Cid::of(canonical_bytes(device.metadata));
    device.credential =
        issuer.issue_with_counter(device.did, {{"kind", "person"}}, cid.str(), now_ms, counter);
    return device;
}

AuthProof local_auth_round(const ClientDevice& device, std::span<const std::uint8_t> challenge,
                           std::uint64_t ledger_epoch, std::uint64_t sample_seed,
                           RandomSource& random, double threshold, double noise_sigma) {
    FrameDescriptor frame;
    DeviceAttestation att = device.attestation;
    att.liveness_ok = att.liveness_ok && device.liveness.check(frame);
    GatePass pass = gate_device(att);

    Embedding fresh = sample_embedding(device.profile, noise_sigma, sample_seed);
    Embedding enrolled = recover_template(device.enrolled, device.vault_key);
    MatchResult result = match(fresh, enrolled, threshold);
    if (!result.accepted) throw MatchRejected("local biometric match below threshold");

    return build_proof(device.credential, device.keys, challenge, result, att, pass,
                       ledger_epoch, random);
}

}  // namespace ciph
