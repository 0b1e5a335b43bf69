#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>

#include "ciph/audit.hpp"
#include "ciph/identity.hpp"
#include "ciph/proof.hpp"
#include "ciph/trust.hpp"

namespace ciph {

inline constexpr std::size_t kTaskIdBytes = 16;

/// Unit of work fanned out by the gateway. Carries the proof, the presented
/// credential, and the subject key; never any biometric material.
struct VerifyTask {
    Bytes task_id;  // 16 bytes
    AuthProof proof;
    Credential credential;
    Bytes subject_public_key;
    Bytes expected_challenge;
    std::int64_t deadline_ms = 0;

    Json to_json() const;
    static VerifyTask from_json(const Json& j);
};

/// A node's signed vote on one task.
struct VerifyResult {
    Bytes task_id;
    std::string node_id;
    bool accept = false;
    std::optional<RejectReason> reason;
    std::uint64_t as_of_height = 0;
    Bytes node_signature;

    Json signing_document() const;
    Json to_json() const;
    static VerifyResult from_json(const Json& j);
};

bool verify_result_signature(const VerifyResult& result,
                             std::span<const std::uint8_t> node_public_key);

struct NodeStatus {
    std::string node_id;
    std::uint64_t view_height = 0;
    std::int64_t last_refresh_ms = 0;
    std::uint64_t processed = 0;
};

struct NodeConfig {
    std::string node_id;
    CacheMode cache_mode = CacheMode::polling;
    std::int64_t poll_interval_ms = 500;
    std::int64_t ttl_ms = 1000;
    std::uint64_t epoch_tolerance = kDefaultEpochTolerance;
    AuditPolicy audit_policy = AuditPolicy::deterministic;
    std::int64_t settle_delay_ms = kDefaultSettleDelayMs;
    bool log_view_refresh = false;
};

/// Abstraction over metadata retrieval so storage faults can be injected.
class MetadataSource {
public:
    virtual ~MetadataSource() = default;
    virtual Bytes fetch(const Cid& cid) = 0;  // throws NotFound and friends
};

class StoreMetadataSource final : public MetadataSource {
public:
    explicit StoreMetadataSource(const ContentStore& store) : store_(store) {}
    Bytes fetch(const Cid& cid) override { return store_.get(cid); }

private:
    const ContentStore& store_;
};

/// An independent verifier: proof validation, metadata lookup by CID,
/// revocation check against its own cached ledger view, and a signed vote.
/// Fail-closed: every internal failure becomes a Reject, never an Accept.
/// A vote alone never yields a session token; only gateway aggregation
/// mints those.
class VerifierNode {
public:
    VerifierNode(NodeConfig config, KeyPair keys, MetadataSource& metadata, LedgerReader& reader);

    VerifyResult handle_task(const VerifyTask& task, std::int64_t now_ms);

    /// Poll-tick or snapshot delivery from the driver. Heights never move
    /// backwards.
    void apply_view_snapshot(const LedgerSnapshot& snapshot, std::int64_t now_ms);

    /// Event-driven push of one revocation.
    void on_revocation_notice(std::uint64_t height, const RevocationEvent& event,
                              std::int64_t now_ms);

    /// Broadcast audit stream (enroll/auth/revoke events shared by every
    /// node). Ordering behavior depends on the configured policy.
    void on_audit_event(const AuditEvent& event, std::int64_t arrival_ms);
    void flush_audit(std::int64_t now_ms);
    void drain_audit();

    NodeStatus status() const;
    const NodeConfig& config() const { return config_; }
    const Bytes& public_key() const { return keys_.public_key; }
    std::vector<AuditEntry> audit_entries() const;
    LedgerView view() const;

private:
    VerifyResult decide(const VerifyTask& task, std::int64_t now_ms);
    VerifyResult signed_result(const Bytes& task_id, bool accept,
                               std::optional<RejectReason> reason, std::uint64_t height) const;
    void maybe_refresh(std::int64_t now_ms);

    NodeConfig config_;
    KeyPair keys_;
    MetadataSource& metadata_;
    LedgerReader& reader_;

    mutable std::mutex mutex_;
    LedgerView view_;
    AuditLog audit_;
    std::uint64_t processed_ = 0;
};

}  // namespace ciph
