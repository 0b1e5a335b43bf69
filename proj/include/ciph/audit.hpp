#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ciph/bytes.hpp"
#include "ciph/canonical.hpp"
#include "ciph/trust.hpp"

namespace ciph {

enum class AuditEventType { enroll, auth_accept, auth_reject, revoke, view_refresh };

std::string_view to_string(AuditEventType t);
std::optional<AuditEventType> audit_event_type_from_string(std::string_view s);

/// An event as produced at its source, before it is chained into any log.
/// event_time is the source timestamp; event_id is globally unique, so
/// (event_time, event_id) is a total order.
struct AuditEvent {
    AuditEventType type = AuditEventType::enroll;
    std::string actor_did;
    Json payload = Json::object();
    std::int64_t event_time = 0;  // unix ms at the source
    Bytes event_id;               // 16 bytes

    Bytes payload_digest() const;
};

struct AuditEntry {
    std::uint64_t seq = 0;
    Bytes prev_hash;  // zeros at genesis
    AuditEventType event_type = AuditEventType::enroll;
    std::string actor_did;
    Bytes payload_digest;
    std::int64_t event_time = 0;
    Bytes event_id;
    Bytes entry_hash;

    Json hash_document() const;
    Bytes compute_hash() const;
    Json to_json() const;
    static AuditEntry from_json(const Json& j);
};

enum class AuditPolicy {
    /// Append in arrival order. Concurrent delivery races across nodes
    /// reproduce cross-node head-hash divergence.
    naive,
    /// Buffer arrivals for settle_delay_ms, then append in total order by
    /// (event_time, event_id). Any delivery permutation of the same events
    /// yields one head hash, provided no event arrives later than
    /// settle_delay_ms after its event_time.
    deterministic,
};

std::string_view to_string(AuditPolicy p);
std::optional<AuditPolicy> audit_policy_from_string(std::string_view s);

inline constexpr std::int64_t kDefaultSettleDelayMs = 250;

/// One node's hash-chained audit log. Single appender; concurrent producers
/// enqueue through the owning node.
class AuditLog {
public:
    explicit AuditLog(AuditPolicy policy = AuditPolicy::deterministic,
                      std::int64_t settle_delay_ms = kDefaultSettleDelayMs)
        : policy_(policy), settle_delay_ms_(settle_delay_ms) {}

    /// Naive policy chains the event immediately; deterministic policy
    /// buffers it until flush. Returns the new entry in naive mode.
    std::optional<AuditEntry> append(const AuditEvent& event, std::int64_t arrival_ms);

    /// Deterministic policy only: chains every buffered event whose settle
    /// window has elapsed (event_time + settle_delay <= now), in total order.
    void flush(std::int64_t now_ms);

    /// Chains everything still buffered, in total order. Call at shutdown.
    void drain();

    const std::vector<AuditEntry>& entries() const { return entries_; }
    std::size_t pending() const { return buffer_.size(); }
    Bytes head_hash() const;  // zeros when empty

    AuditPolicy policy() const { return policy_; }

private:
    AuditEntry chain(const AuditEvent& event);

    AuditPolicy policy_;
    std::int64_t settle_delay_ms_;
    std::vector<AuditEntry> entries_;
    std::vector<AuditEvent> buffer_;
};

/// Recomputes every entry hash and link. Broken carries the first bad seq.
ChainCheck verify_log(std::span<const AuditEntry> entries);

/// Line-delimited canonical entries.
void export_log(std::span<const AuditEntry> entries, std::ostream& out);
std::vector<AuditEntry> import_log(std::istream& in);  // throws Error on parse failure

/// Cross-node comparison outcome. "reordered" means the logs hold the same
/// event multiset in different orders; "missing" means the multisets differ.
struct ConsistencyReport {
    std::size_t node_count = 0;
    std::vector<std::string> head_hashes;  // hex, one per log
    bool diverged = false;
    std::optional<std::uint64_t> first_divergent_seq;
    bool multisets_equal = true;
    enum class Difference { none, reordered, missing } difference = Difference::none;

    Json to_json() const;
    std::string to_csv() const;
};

ConsistencyReport compare_logs(const std::vector<std::vector<AuditEntry>>& logs);

}  // namespace ciph
