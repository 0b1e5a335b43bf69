#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ciph/identity.hpp"
#include "ciph/proof.hpp"
#include "ciph/rng.hpp"
#include "ciph/trust.hpp"
#include "ciph/verifier.hpp"

namespace ciph {

inline constexpr std::int64_t kDefaultTokenLifetimeS = 900;
inline constexpr std::int64_t kDefaultChallengeTtlMs = 30'000;
inline constexpr std::int64_t kDefaultNodeTimeoutMs = 2'000;
inline constexpr double kDefaultRateCapacity = 20.0;
inline constexpr double kDefaultRateRefillPerS = 10.0;

struct TokenConfig {
    Bytes mac_key;  // keyed-hash secret
    std::int64_t lifetime_s = kDefaultTokenLifetimeS;
    /// Fault injection reproducing a historical defect class: expiry
    /// comparison uses now > exp instead of now >= exp, letting the exact
    /// boundary instant through. Never enable outside regression demos.
    bool legacy_expiry = false;
};

struct TokenClaims {
    std::string sub;  // subject DID string
    std::string sid;  // session id
    std::int64_t iat_s = 0;
    std::int64_t exp_s = 0;
};

/// Compact three-part token: base64url(header).base64url(payload).base64url(tag)
/// with tag = HMAC-SHA256(key, "header.payload"). Stateless to validate.
std::string mint_token(const TokenConfig& config, const std::string& subject_did,
                       std::int64_t now_ms, RandomSource& random);

struct TokenCheck {
    bool valid = false;
    TokenClaims claims;
    std::string reason;  // bad_mac | expired | malformed

    static TokenCheck ok(TokenClaims claims) { return {true, std::move(claims), {}}; }
    static TokenCheck invalid(std::string reason) { return {false, {}, std::move(reason)}; }
};

/// Valid iff the MAC verifies and now < exp. The boundary instant
/// now == exp is expired.
TokenCheck validate_token(const TokenConfig& config, std::string_view token, std::int64_t now_ms);

/// Per-DID token bucket. Tokens never exceed capacity; a request is admitted
/// iff a whole token is available.
class RateLimiter {
public:
    RateLimiter(double capacity = kDefaultRateCapacity,
                double refill_per_s = kDefaultRateRefillPerS)
        : capacity_(capacity), refill_per_s_(refill_per_s) {}

    bool admit(const std::string& did, std::int64_t now_ms);

private:
    struct Bucket {
        double tokens;
        std::int64_t last_ms;
    };
    double capacity_;
    double refill_per_s_;
    std::mutex mutex_;
    std::map<std::string, Bucket> buckets_;
};

struct ChallengeGrant {
    Bytes challenge;  // 32 bytes
    std::int64_t expires_ms = 0;
    std::uint64_t ledger_epoch = 0;
};

/// Transient single-use challenge table — the only state the gateway keeps
/// between requests. Entries carry no identity material and vanish on
/// consumption or expiry.
class ChallengeRegistry {
public:
    explicit ChallengeRegistry(std::int64_t ttl_ms = kDefaultChallengeTtlMs) : ttl_ms_(ttl_ms) {}

    ChallengeGrant issue(std::int64_t now_ms, std::uint64_t ledger_epoch, RandomSource& random);

    /// Atomically consumes the challenge: exactly one caller wins, even under
    /// concurrent replay attempts. False for unknown, expired, or already
    /// consumed challenges.
    bool consume(std::span<const std::uint8_t> challenge, std::int64_t now_ms);

    std::size_t pending(std::int64_t now_ms) const;
    Json dump(std::int64_t now_ms) const;

private:
    void prune(std::int64_t now_ms);

    std::int64_t ttl_ms_;
    mutable std::mutex mutex_;
    std::map<std::string, std::int64_t> expires_;  // challenge hex -> expiry ms
};

/// Aggregated authentication decision. Accept iff accepting votes from
/// distinct registered nodes reach the quorum; missing or timed-out votes
/// count as rejections.
struct Decision {
    bool accepted = false;
    std::vector<VerifyResult> votes;  // votes actually received
    int quorum = 0;
    std::string reason;  // on reject: dominant vote reason, or "timeout" / "quorum_not_met"
    /// True for configurations where a single node decides alone (n == 1 or
    /// quorum == 1): such a deployment loses the no-unilateral-authority
    /// property and is surfaced, not hidden.
    bool unilateral_config = false;

    Json to_json() const;
};

/// votes_by_node has one slot per fanned-out node; nullopt is a timeout.
/// Throws ConfigError unless 1 <= quorum <= n_nodes.
Decision aggregate(const std::vector<std::optional<VerifyResult>>& votes_by_node, int quorum,
                   int n_nodes);

struct GatewayConfig {
    int quorum = 2;
    std::int64_t node_timeout_ms = kDefaultNodeTimeoutMs;
    std::int64_t challenge_ttl_ms = kDefaultChallengeTtlMs;
    double rate_capacity = kDefaultRateCapacity;
    double rate_refill_per_s = kDefaultRateRefillPerS;
    std::uint64_t epoch_tolerance = kDefaultEpochTolerance;
    TokenConfig token;
};

struct EnrollReceipt {
    Cid metadata_cid;
    Credential credential;  // echo of the accepted credential
};

struct AuthRequest {
    AuthProof proof;
    Credential credential;
    Bytes subject_public_key;
};

struct AuthOutcome {
    Decision decision;
    std::optional<std::string> token;
};

/// Stateless orchestration core shared by the in-process harness and the
/// wire server. Transport drivers own the actual fan-out; this class
/// validates requests, builds tasks, aggregates votes, and mints tokens.
/// After any request completes the only thing retained is the unexpired
/// unconsumed challenge set.
class GatewayCore {
public:
    GatewayCore(GatewayConfig config, ContentStore& store, const RevocationLedger& ledger);

    void register_node(const std::string& node_id, Bytes public_key);
    std::size_t node_count() const;

    /// Throws RateLimited when the per-DID bucket is empty.
    ChallengeGrant issue_challenge(const std::string& subject_did, std::int64_t now_ms,
                                   RandomSource& random);

    /// Verifies the credential against the issuer key carried in the
    /// metadata document, enforces the structural privacy check, and stores
    /// the metadata by content address. Throws InvalidCredential or
    /// PrivacyViolation.
    EnrollReceipt handle_enroll(const Credential& credential, const Json& metadata,
                                std::int64_t now_ms);

    /// Validates and atomically consumes the challenge, then builds one task
    /// per registered node. Throws RateLimited or UnknownChallenge.
    std::vector<VerifyTask> begin_auth(const AuthRequest& request, std::int64_t now_ms,
                                       RandomSource& random);

    /// Aggregates votes (nullopt = timeout), checks vote signatures against
    /// registered node keys (a bad signature voids that vote), and mints a
    /// session token on acceptance.
    AuthOutcome complete_auth(const std::string& subject_did,
                              const std::vector<std::optional<VerifyResult>>& votes,
                              std::int64_t now_ms, RandomSource& random);

    TokenCheck validate_token(std::string_view token, std::int64_t now_ms) const;

    /// Everything the gateway holds between requests, for storage audits.
    Json storage_dump(std::int64_t now_ms) const;

    const GatewayConfig& config() const { return config_; }
    std::vector<std::pair<std::string, Bytes>> registered_nodes() const;

private:
    GatewayConfig config_;
    ContentStore& store_;
    const RevocationLedger& ledger_;
    RateLimiter limiter_;
    ChallengeRegistry challenges_;
    mutable std::mutex nodes_mutex_;
    std::vector<std::pair<std::string, Bytes>> nodes_;  // id -> public key
};

/// Structural privacy check on a metadata document: no key anywhere in the
/// tree may smell like biometric material, and no string value may be a
/// plausible embedding wire encoding.
void check_metadata_privacy(const Json& metadata);

}  // namespace ciph
