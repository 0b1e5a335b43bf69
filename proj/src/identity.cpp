#include "ciph/identity.hpp"

#include <algorithm>
#include <cctype>

#include "ciph/errors.hpp"

namespace ciph {

namespace {

bool is_lower_hex(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    });
}

bool is_method_label(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    });
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

Did Did::from_public_key(std::span<const std::uint8_t> public_key, std::string_view method) {
    Bytes digest = crypto::sha256(public_key);
    Did did;
    did.method = std::string(method);
    did.identifier = to_hex(digest).substr(0, kDidIdentifierHexChars);
    return did;
}

std::optional<Did> Did::parse(std::string_view text) {
    if (!text.starts_with("did:")) return std::nullopt;
    text.remove_prefix(4);
    std::size_t colon = text.find(':');
    if (colon == std::string_view::npos) return std::nullopt;
    std::string_view method = text.substr(0, colon);
    std::string_view id = text.substr(colon + 1);
    if (!is_method_label(method)) return std::nullopt;
    if (id.size() != kDidIdentifierHexChars || !is_lower_hex(id)) return std::nullopt;
    Did did;
    did.method = std::string(method);
    did.identifier = std::string(id);
    return did;
}

std::string Did::str() const { return "did:" + method + ":" + identifier; }

bool Did::matches_key(std::span<const std::uint8_t> public_key) const {
    return *this == Did::from_public_key(public_key, method);
}

Bytes KeyPair::sign(std::span<const std::uint8_t> msg) const {
    return crypto::ed25519_sign(private_seed, msg);
}

std::pair<Did, KeyPair> generate_identity(std::span<const std::uint8_t> seed32) {
    crypto::Ed25519KeyPair kp = crypto::ed25519_from_seed(seed32);
    Did did = Did::from_public_key(kp.public_key);
    return {did, KeyPair{std::move(kp.public_key), std::move(kp.private_seed)}};
}

void check_attribute_privacy(const std::map<std::string, std::string>& attributes) {
    for (const auto& [key, value] : attributes) {
        std::string k = lower(key);
        if (k.find("embedding") != std::string::npos || k.find("template") != std::string::npos) {
            throw PrivacyViolation("attribute key '" + key + "' may carry biometric material");
        }
    }
}

Json Credential::signing_document() const {
    Json attrs = Json::object();
    for (const auto& [k, v] : attributes) attrs[k] = v;
    return Json{
        {"attributes", attrs},
        {"credential_id", to_hex(credential_id)},
        {"issued_at", issued_at},
        {"issuer_did", issuer_did.str()},
        {"metadata_cid", metadata_cid},
        {"scheme", scheme},
        {"subject_did", subject_did.str()},
    };
}

Json Credential::to_json() const {
    Json j = signing_document();
    j["signature"] = to_hex(signature);
    return j;
}

Credential Credential::from_json(const Json& j) {
    try {
        Credential cred;
        auto id = from_hex(j.at("credential_id").get<std::string>());
        auto sig = from_hex(j.at("signature").get<std::string>());
        auto subject = Did::parse(j.at("subject_did").get<std::string>());
        auto issuer = Did::parse(j.at("issuer_did").get<std::string>());
        if (!id || id->size() != kCredentialIdBytes || !sig || !subject || !issuer) {
            throw InvalidCredential("malformed credential fields");
        }
        cred.credential_id = std::move(*id);
        cred.signature = std::move(*sig);
        cred.subject_did = std::move(*subject);
        cred.issuer_did = std::move(*issuer);
        cred.metadata_cid = j.at("metadata_cid").get<std::string>();
        cred.issued_at = j.at("issued_at").get<std::int64_t>();
        cred.scheme = j.at("scheme").get<std::string>();
        for (const auto& [k, v] : j.at("attributes").items()) {
            cred.attributes[k] = v.get<std::string>();
        }
        return cred;
    } catch (const Json::exception& e) {
        throw InvalidCredential(std::string("credential parse error: ") + e.what());
    }
}

Bytes derive_credential_id(const Did& issuer, const Did& subject, std::int64_t now_ms,
                           std::uint64_t counter) {
    Bytes digest = canonical_digest(Json{
        {"counter", counter},
        {"issued_at", now_ms},
        {"issuer_did", issuer.str()},
        {"subject_did", subject.str()},
    });
    return Bytes(digest.begin(), digest.begin() + kCredentialIdBytes);
}

Credential issue_credential(const Did& subject, const Did& issuer, const KeyPair& issuer_keys,
                            std::map<std::string, std::string> attributes,
                            std::string metadata_cid, std::int64_t now_ms,
                            std::uint64_t counter) {
    check_attribute_privacy(attributes);

    Credential cred;
    cred.subject_did = subject;
    cred.issuer_did = issuer;
    cred.attributes = std::move(attributes);
    cred.metadata_cid = std::move(metadata_cid);
    cred.issued_at = now_ms;
    cred.credential_id = derive_credential_id(issuer, subject, now_ms, counter);
    cred.signature = issuer_keys.sign(canonical_bytes(cred.signing_document()));
    return cred;
}

bool verify_credential(const Credential& cred, std::span<const std::uint8_t> issuer_public_key) {
    if (cred.scheme != kSignatureScheme) return false;
    if (cred.credential_id.size() != kCredentialIdBytes) return false;
    if (!cred.issuer_did.matches_key(issuer_public_key)) return false;
    try {
        Bytes msg = canonical_bytes(cred.signing_document());
        return crypto::ed25519_verify(issuer_public_key, msg, cred.signature);
    } catch (const Error&) {
        return false;
    }
}

}  // namespace ciph
