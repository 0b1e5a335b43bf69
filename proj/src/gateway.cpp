#include "ciph/gateway.hpp"

#include <algorithm>
#include <cctype>

#include "ciph/biometric.hpp"
#include "ciph/canonical.hpp"
#include "ciph/crypto.hpp"
#include "ciph/errors.hpp"

namespace ciph {

namespace {

std::string mac_tag(const Bytes& key, std::string_view signing_input) {
    Bytes msg = to_bytes(signing_input);
    return base64url_encode(crypto::hmac_sha256(key, msg));
}

}  // namespace

std::string mint_token(const TokenConfig& config, const std::string& subject_did,
                       std::int64_t now_ms, RandomSource& random) {
    if (config.mac_key.empty()) throw ConfigError("token MAC key is not configured");
    Json header{{"alg", "HS256"}, {"typ", "JWT"}};
    std::int64_t iat = now_ms / 1000;
    Json payload{
        {"exp", iat + config.lifetime_s},
        {"iat", iat},
        {"sid", to_hex(random.bytes(16))},
        {"sub", subject_did},
    };
    std::string h = base64url_encode(canonical_bytes(header));
    std::string p = base64url_encode(canonical_bytes(payload));
    std::string signing_input = h + "." + p;
    return signing_input + "." + mac_tag(config.mac_key, signing_input);
}

TokenCheck validate_token(const TokenConfig& config, std::string_view token,
                          std::int64_t now_ms) {
    std::size_t dot1 = token.find('.');
    std::size_t dot2 = token.rfind('.');
    if (dot1 == std::string_view::npos || dot2 == dot1) return TokenCheck::invalid("malformed");

    std::string_view signing_input = token.substr(0, dot2);
    std::string_view tag_part = token.substr(dot2 + 1);
    auto tag = base64url_decode(tag_part);
    if (!tag) return TokenCheck::invalid("malformed");

    Bytes expected = crypto::hmac_sha256(config.mac_key, to_bytes(signing_input));
    if (!ct_equal(*tag, expected)) return TokenCheck::invalid("bad_mac");

    auto payload_bytes = base64url_decode(token.substr(dot1 + 1, dot2 - dot1 - 1));
    if (!payload_bytes) return TokenCheck::invalid("malformed");
    TokenClaims claims;
    try {
        Json payload = Json::parse(*payload_bytes);
        claims.sub = payload.at("sub").get<std::string>();
        claims.sid = payload.at("sid").get<std::string>();
        claims.iat_s = payload.at("iat").get<std::int64_t>();
        claims.exp_s = payload.at("exp").get<std::int64_t>();
    } catch (const Json::exception&) {
        return TokenCheck::invalid("malformed");
    }

    std::int64_t exp_ms = claims.exp_s * 1000;
    bool expired = config.legacy_expiry ? (now_ms > exp_ms) : (now_ms >= exp_ms);
    if (expired) return TokenCheck::invalid("expired");
    return TokenCheck::ok(std::move(claims));
}

bool RateLimiter::admit(const std::string& did, std::int64_t now_ms) {
    std::lock_guard lock(mutex_);
    auto [it, inserted] = buckets_.try_emplace(did, Bucket{capacity_, now_ms});
    Bucket& bucket = it->second;
    if (!inserted) {
        double refill = static_cast<double>(now_ms - bucket.last_ms) * refill_per_s_ / 1000.0;
        bucket.tokens = std::min(capacity_, bucket.tokens + refill);
        bucket.last_ms = now_ms;
    }
    if (bucket.tokens >= 1.0) {
        bucket.tokens -= 1.0;
        return true;
    }
    return false;
}

ChallengeGrant ChallengeRegistry::issue(std::int64_t now_ms, std::uint64_t ledger_epoch,
                                        RandomSource& random) {
    ChallengeGrant grant;
    grant.challenge = random.bytes(kChallengeBytes);
    grant.expires_ms = now_ms + ttl_ms_;
    grant.ledger_epoch = ledger_epoch;
    std::lock_guard lock(mutex_);
    prune(now_ms);
    expires_[to_hex(grant.challenge)] = grant.expires_ms;
    return grant;
}

bool ChallengeRegistry::consume(std::span<const std::uint8_t> challenge, std::int64_t now_ms) {
    std::lock_guard lock(mutex_);
    auto it = expires_.find(to_hex(challenge));
    if (it == expires_.end()) return false;
    bool live = now_ms < it->second;
    expires_.erase(it);
    return live;
}

std::size_t ChallengeRegistry::pending(std::int64_t now_ms) const {
    std::lock_guard lock(mutex_);
    std::size_t n = 0;
    for (const auto& [_, expiry] : expires_) {
        if (now_ms < expiry) ++n;
    }
    return n;
}

Json ChallengeRegistry::dump(std::int64_t now_ms) const {
    std::lock_guard lock(mutex_);
    Json out = Json::array();
    for (const auto& [hex, expiry] : expires_) {
        if (now_ms < expiry) out.push_back(Json{{"challenge", hex}, {"expires_ms", expiry}});
    }
    return out;
}

void ChallengeRegistry::prune(std::int64_t now_ms) {
    for (auto it = expires_.begin(); it != expires_.end();) {
        it = (now_ms >= it->second) ? expires_.erase(it) : std::next(it);
    }
}

Json Decision::to_json() const {
    Json vote_list = Json::array();
    for (const auto& v : votes) vote_list.push_back(v.to_json());
    return Json{
        {"accepted", accepted},
        {"quorum", quorum},
        {"reason", reason},
        {"unilateral_config", unilateral_config},
        {"votes", vote_list},
    };
}

Decision aggregate(const std::vector<std::optional<VerifyResult>>& votes_by_node, int quorum,
                   int n_nodes) {
    if (quorum < 1 || quorum > n_nodes) {
        throw ConfigError("quorum must satisfy 1 <= quorum <= n_nodes");
    }
    if (static_cast<int>(votes_by_node.size()) != n_nodes) {
        throw ConfigError("one vote slot per node expected");
    }

    Decision decision;
    decision.quorum = quorum;
    decision.unilateral_config = (n_nodes == 1 || quorum == 1);

    int accepts = 0;
    int timeouts = 0;
    std::map<std::string, int> reject_reasons;
    for (const auto& slot : votes_by_node) {
        if (!slot) {
            ++timeouts;
            continue;
        }
        decision.votes.push_back(*slot);
        if (slot->accept) {
            ++accepts;
        } else {
            std::string reason =
                slot->reason ? std::string(to_string(*slot->reason)) : "unspecified";
            ++reject_reasons[reason];
        }
    }

    decision.accepted = accepts >= quorum;
    if (!decision.accepted) {
        if (!reject_reasons.empty()) {
            // Dominant reject reason; ties break toward the lexicographically
            // first for determinism.
            auto best = reject_reasons.begin();
            for (auto it = reject_reasons.begin(); it != reject_reasons.end(); ++it) {
                if (it->second > best->second) best = it;
            }
            decision.reason = best->first;
        } else if (timeouts > 0) {
            decision.reason = "timeout";
        } else {
            decision.reason = "quorum_not_met";
        }
    }
    return decision;
}

void check_metadata_privacy(const Json& metadata) {
    if (metadata.is_object()) {
        for (const auto& [key, value] : metadata.items()) {
            std::string k = key;
            std::transform(k.begin(), k.end(), k.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            if (k.find("embedding") != std::string::npos ||
                k.find("template") != std::string::npos) {
                throw PrivacyViolation("metadata key '" + key + "' may carry biometric material");
            }
            check_metadata_privacy(value);
        }
    } else if (metadata.is_array()) {
        for (const auto& item : metadata) check_metadata_privacy(item);
    } else if (metadata.is_string()) {
        // A hex string the size of an embedding wire encoding is treated as
        // smuggled biometric payload.
        const auto& s = metadata.get_ref<const std::string&>();
        if (s.size() == kEmbeddingDim * 4 && from_hex(s)) {
            throw PrivacyViolation("metadata value looks like an embedding wire encoding");
        }
    }
}

GatewayCore::GatewayCore(GatewayConfig config, ContentStore& store,
                         const RevocationLedger& ledger)
    : config_(std::move(config)),
      store_(store),
      ledger_(ledger),
      limiter_(config_.rate_capacity, config_.rate_refill_per_s),
      challenges_(config_.challenge_ttl_ms) {
    if (config_.token.mac_key.empty()) throw ConfigError("gateway requires a token MAC key");
}

void GatewayCore::register_node(const std::string& node_id, Bytes public_key) {
    std::lock_guard lock(nodes_mutex_);
    for (auto& [id, key] : nodes_) {
        if (id == node_id) {
            key = std::move(public_key);
            return;
        }
    }
    nodes_.emplace_back(node_id, std::move(public_key));
}

std::size_t GatewayCore::node_count() const {
    std::lock_guard lock(nodes_mutex_);
    return nodes_.size();
}

std::vector<std::pair<std::string, Bytes>> GatewayCore::registered_nodes() const {
    std::lock_guard lock(nodes_mutex_);
    return nodes_;
}

ChallengeGrant GatewayCore::issue_challenge(const std::string& subject_did, std::int64_t now_ms,
                                            RandomSource& random) {
    if (!limiter_.admit(subject_did, now_ms)) {
        throw RateLimited("challenge rate limit exceeded for " + subject_did);
    }
    return challenges_.issue(now_ms, ledger_.height(), random);
}

EnrollReceipt GatewayCore::handle_enroll(const Credential& credential, const Json& metadata,
                                         std::int64_t now_ms) {
    (void)now_ms;
    check_attribute_privacy(credential.attributes);
    check_metadata_privacy(metadata);

    Bytes issuer_key;
    std::string doc_credential_id;
    try {
        doc_credential_id = metadata.at("credential_id").get<std::string>();
        auto key = from_hex(metadata.at("issuer_public_key").get<std::string>());
        if (!key) throw InvalidCredential("issuer_public_key is not valid hex");
        issuer_key = std::move(*key);
    } catch (const Json::exception&) {
        throw InvalidCredential("metadata must carry credential_id and issuer_public_key");
    }
    if (doc_credential_id != to_hex(credential.credential_id)) {
        throw InvalidCredential("metadata credential_id does not match the credential");
    }
    if (!verify_credential(credential, issuer_key)) {
        throw InvalidCredential("credential signature does not verify");
    }

    Bytes metadata_bytes = canonical_bytes(metadata);
    Cid cid = Cid::of(metadata_bytes);
    if (cid.str() != credential.metadata_cid) {
        throw InvalidCredential("credential metadata_cid does not address this metadata");
    }
    store_.put(metadata_bytes);
    return EnrollReceipt{cid, credential};
}

std::vector<VerifyTask> GatewayCore::begin_auth(const AuthRequest& request, std::int64_t now_ms,
                                                RandomSource& random) {
    const std::string did = request.proof.subject_did.str();
    if (!limiter_.admit(did, now_ms)) {
        throw RateLimited("authentication rate limit exceeded for " + did);
    }
    if (!challenges_.consume(request.proof.challenge, now_ms)) {
        throw UnknownChallenge("challenge is unknown, expired, or already consumed");
    }

    std::vector<VerifyTask> tasks;
    std::lock_guard lock(nodes_mutex_);
    tasks.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        VerifyTask task;
        task.task_id = random.bytes(kTaskIdBytes);
        task.proof = request.proof;
        task.credential = request.credential;
        task.subject_public_key = request.subject_public_key;
        task.expected_challenge = request.proof.challenge;
        task.deadline_ms = now_ms + config_.node_timeout_ms;
        tasks.push_back(std::move(task));
    }
    return tasks;
}

AuthOutcome GatewayCore::complete_auth(const std::string& subject_did,
                                       const std::vector<std::optional<VerifyResult>>& votes,
                                       std::int64_t now_ms, RandomSource& random) {
    // A vote that does not verify under its node's registered key is voided
    // (fail closed), exactly like a timeout.
    std::vector<std::optional<VerifyResult>> checked;
    checked.reserve(votes.size());
    {
        std::lock_guard lock(nodes_mutex_);
        for (const auto& slot : votes) {
            if (!slot) {
                checked.push_back(std::nullopt);
                continue;
            }
            auto node = std::find_if(nodes_.begin(), nodes_.end(),
                                     [&](const auto& n) { return n.first == slot->node_id; });
            if (node == nodes_.end() || !verify_result_signature(*slot, node->second)) {
                checked.push_back(std::nullopt);
                continue;
            }
            checked.push_back(*slot);
        }
    }

    AuthOutcome outcome;
    outcome.decision = aggregate(checked, config_.quorum, static_cast<int>(votes.size()));
    if (outcome.decision.accepted) {
        outcome.token = mint_token(config_.token, subject_did, now_ms, random);
    }
    return outcome;
}

TokenCheck GatewayCore::validate_token(std::string_view token, std::int64_t now_ms) const {
    return ciph::validate_token(config_.token, token, now_ms);
}

Json GatewayCore::storage_dump(std::int64_t now_ms) const {
    return Json{{"challenges", challenges_.dump(now_ms)}};
}

}  // namespace ciph
