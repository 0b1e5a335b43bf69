#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "ciph/bytes.hpp"
#include "ciph/canonical.hpp"

namespace ciph {

/// Content identifier: "sha256:" + 64 lowercase hex chars of the content
/// digest. Equal content implies equal address.
struct Cid {
    std::string digest_hex;

    static Cid of(std::span<const std::uint8_t> content);
    static std::optional<Cid> parse(std::string_view text);
    std::string str() const { return "sha256:" + digest_hex; }

    bool operator==(const Cid&) const = default;
    auto operator<=>(const Cid&) const = default;
};

/// In-process content-addressed blob store standing in for IPFS. Thread-safe;
/// put is idempotent.
class ContentStore {
public:
    Cid put(std::span<const std::uint8_t> content);  // throws Error on empty content
    Bytes get(const Cid& cid) const;                 // throws NotFound
    bool contains(const Cid& cid) const;
    std::size_t size() const;

    /// Full contents for storage audits, keyed by CID string.
    Json dump() const;

private:
    mutable std::shared_mutex mutex_;
    std::map<std::string, Bytes> blobs_;
};

struct RevocationEvent {
    Bytes credential_id;
    std::string reason;

    Json to_json() const;
    static RevocationEvent from_json(const Json& j);
};

/// One link of the hash-chained revocation ledger. block_hash covers the
/// canonical encoding of (index, prev_hash, timestamp, events); prev_hash is
/// all zeros at genesis.
struct RevocationBlock {
    std::uint64_t index = 0;
    Bytes prev_hash;
    std::int64_t timestamp = 0;  // unix ms
    std::vector<RevocationEvent> events;
    Bytes block_hash;

    Json hash_document() const;
    Bytes compute_hash() const;
    Json to_json() const;
    static RevocationBlock from_json(const Json& j);
};

struct ChainCheck {
    bool ok = true;
    std::uint64_t first_bad_index = 0;
};

/// Append-only hash-chained ledger anchoring revocation events. Single
/// writer, any number of readers.
class RevocationLedger {
public:
    /// Throws AlreadyRevoked on a duplicate credential id; duplicates are an
    /// error, not a no-op, so consistency tests see exact event counts.
    RevocationBlock append(std::span<const std::uint8_t> credential_id, std::string reason,
                           std::int64_t now_ms);

    std::uint64_t height() const;
    bool is_revoked(std::span<const std::uint8_t> credential_id) const;
    std::set<std::string> revoked_up_to(std::uint64_t height) const;  // hex credential ids
    std::vector<RevocationBlock> blocks() const;
    RevocationBlock block_at(std::uint64_t index) const;

    ChainCheck verify() const;

private:
    mutable std::shared_mutex mutex_;
    std::vector<RevocationBlock> blocks_;
    std::set<std::string> revoked_;
};

/// Recomputes every hash and link of an exported chain.
ChainCheck verify_chain(std::span<const RevocationBlock> blocks);

/// Line-delimited canonical encoding, one block per line.
void export_ledger(const RevocationLedger& ledger, std::ostream& out);
std::vector<RevocationBlock> import_ledger(std::istream& in);  // throws Error on parse failure

/// A consistent read of the ledger at some height.
struct LedgerSnapshot {
    std::uint64_t height = 0;
    std::set<std::string> revoked;  // hex credential ids
};

/// Read abstraction between a node's view and the authoritative ledger.
class LedgerReader {
public:
    virtual ~LedgerReader() = default;
    virtual LedgerSnapshot read(std::int64_t now_ms) = 0;
};

/// Pass-through reader: always the current chain head.
class DirectLedgerReader final : public LedgerReader {
public:
    explicit DirectLedgerReader(const RevocationLedger& ledger) : ledger_(ledger) {}
    LedgerSnapshot read(std::int64_t now_ms) override;

private:
    const RevocationLedger& ledger_;
};

/// Source-side read cache: serves a cached snapshot until it is ttl_ms old.
/// This is the "cache invalidation timing" term of the revocation
/// propagation window; readers polling through it can observe state up to
/// ttl_ms behind the chain head. ttl_ms = 0 disables caching.
class CachingLedgerReader final : public LedgerReader {
public:
    CachingLedgerReader(const RevocationLedger& ledger, std::int64_t ttl_ms)
        : ledger_(ledger), ttl_ms_(ttl_ms) {}
    LedgerSnapshot read(std::int64_t now_ms) override;

private:
    const RevocationLedger& ledger_;
    std::int64_t ttl_ms_;
    std::optional<LedgerSnapshot> cached_;
    std::int64_t taken_at_ = 0;
};

enum class CacheMode { polling, event_driven };

std::string_view to_string(CacheMode m);
std::optional<CacheMode> cache_mode_from_string(std::string_view s);

/// One verifier node's cached picture of the revocation ledger.
struct LedgerView {
    std::string node_id;
    std::set<std::string> revoked;  // union of events up to as_of_height
    std::uint64_t as_of_height = 0;
    std::int64_t fetched_at = 0;  // node-clock ms
    std::int64_t ttl_ms = 1000;
    std::int64_t poll_interval_ms = 500;

    /// A view this old must not answer queries without a refresh first.
    bool expired(std::int64_t node_now) const { return node_now - fetched_at >= ttl_ms; }
};

/// Polling refresh: refetches only when the view is at least
/// poll_interval_ms old; otherwise returns the view unchanged. Event-driven
/// views are updated through apply_notification instead.
LedgerView refresh_view(LedgerView view, LedgerReader& reader, std::int64_t node_now);

/// Event-driven update: folds a pushed revocation notification into the
/// view. Heights only move forward.
LedgerView apply_notification(LedgerView view, std::uint64_t height,
                              const RevocationEvent& event, std::int64_t node_now);

struct RevocationQuery {
    bool revoked = false;
    std::uint64_t as_of_height = 0;  // callers log this to spot staleness
};

RevocationQuery is_revoked(const LedgerView& view, std::span<const std::uint8_t> credential_id);

}  // namespace ciph
