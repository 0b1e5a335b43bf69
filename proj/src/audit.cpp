#include "ciph/audit.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "ciph/crypto.hpp"
#include "ciph/errors.hpp"

namespace ciph {

std::string_view to_string(AuditEventType t) {
    switch (t) {
        case AuditEventType::enroll: return "enroll";
        case AuditEventType::auth_accept: return "auth_accept";
        case AuditEventType::auth_reject: return "auth_reject";
        case AuditEventType::revoke: return "revoke";
        case AuditEventType::view_refresh: return "view_refresh";
    }
    return "unknown";
}

std::optional<AuditEventType> audit_event_type_from_string(std::string_view s) {
    if (s == "enroll") return AuditEventType::enroll;
    if (s == "auth_accept") return AuditEventType::auth_accept;
    if (s == "auth_reject") return AuditEventType::auth_reject;
    if (s == "revoke") return AuditEventType::revoke;
    if (s == "view_refresh") return AuditEventType::view_refresh;
    return std::nullopt;
}

std::string_view to_string(AuditPolicy p) {
    return p == AuditPolicy::naive ? "naive" : "deterministic";
}

std::optional<AuditPolicy> audit_policy_from_string(std::string_view s) {
    if (s == "naive") return AuditPolicy::naive;
    if (s == "deterministic") return AuditPolicy::deterministic;
    return std::nullopt;
}

Bytes AuditEvent::payload_digest() const { return canonical_digest(payload); }

Json AuditEntry::hash_document() const {
    return Json{
        {"actor_did", actor_did},
        {"event_id", to_hex(event_id)},
        {"event_time", event_time},
        {"event_type", std::string(to_string(event_type))},
        {"payload_digest", to_hex(payload_digest)},
        {"prev_hash", to_hex(prev_hash)},
        {"seq", seq},
    };
}

Bytes AuditEntry::compute_hash() const { return canonical_digest(hash_document()); }

Json AuditEntry::to_json() const {
    Json j = hash_document();
    j["entry_hash"] = to_hex(entry_hash);
    return j;
}

AuditEntry AuditEntry::from_json(const Json& j) {
    try {
        AuditEntry e;
        e.seq = j.at("seq").get<std::uint64_t>();
        e.event_time = j.at("event_time").get<std::int64_t>();
        e.actor_did = j.at("actor_did").get<std::string>();
        auto type = audit_event_type_from_string(j.at("event_type").get<std::string>());
        auto prev = from_hex(j.at("prev_hash").get<std::string>());
        auto digest = from_hex(j.at("payload_digest").get<std::string>());
        auto id = from_hex(j.at("event_id").get<std::string>());
        auto hash = from_hex(j.at("entry_hash").get<std::string>());
        if (!type || !prev || !digest || !id || !hash) throw Error("malformed audit entry");
        e.event_type = *type;
        e.prev_hash = std::move(*prev);
        e.payload_digest = std::move(*digest);
        e.event_id = std::move(*id);
        e.entry_hash = std::move(*hash);
        return e;
    } catch (const Json::exception& ex) {
        throw Error(std::string("audit entry parse error: ") + ex.what());
    }
}

AuditEntry AuditLog::chain(const AuditEvent& event) {
    AuditEntry entry;
    entry.seq = entries_.size();
    entry.prev_hash = entries_.empty() ? Bytes(crypto::kSha256Bytes, 0) : entries_.back().entry_hash;
    entry.event_type = event.type;
    entry.actor_did = event.actor_did;
    entry.payload_digest = event.payload_digest();
    entry.event_time = event.event_time;
    entry.event_id = event.event_id;
    entry.entry_hash = entry.compute_hash();
    entries_.push_back(entry);
    return entry;
}

std::optional<AuditEntry> AuditLog::append(const AuditEvent& event, std::int64_t arrival_ms) {
    if (policy_ == AuditPolicy::naive) return chain(event);
    buffer_.push_back(event);
    flush(arrival_ms);
    return std::nullopt;
}

namespace {

bool event_order(const AuditEvent& a, const AuditEvent& b) {
    if (a.event_time != b.event_time) return a.event_time < b.event_time;
    return a.event_id < b.event_id;
}

}  // namespace

void AuditLog::flush(std::int64_t now_ms) {
    if (policy_ != AuditPolicy::deterministic || buffer_.empty()) return;
    std::stable_sort(buffer_.begin(), buffer_.end(), event_order);
    std::size_t ready = 0;
    while (ready < buffer_.size() && buffer_[ready].event_time + settle_delay_ms_ <= now_ms) {
        ++ready;
    }
    for (std::size_t i = 0; i < ready; ++i) chain(buffer_[i]);
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(ready));
}

void AuditLog::drain() {
    std::stable_sort(buffer_.begin(), buffer_.end(), event_order);
    for (const auto& event : buffer_) chain(event);
    buffer_.clear();
}

Bytes AuditLog::head_hash() const {
    if (entries_.empty()) return Bytes(crypto::kSha256Bytes, 0);
    return entries_.back().entry_hash;
}

ChainCheck verify_log(std::span<const AuditEntry> entries) {
    Bytes expected_prev(crypto::kSha256Bytes, 0);
    for (std::uint64_t i = 0; i < entries.size(); ++i) {
        const AuditEntry& e = entries[i];
        if (e.seq != i || e.prev_hash != expected_prev || e.compute_hash() != e.entry_hash) {
            return ChainCheck{false, i};
        }
        expected_prev = e.entry_hash;
    }
    return ChainCheck{true, 0};
}

void export_log(std::span<const AuditEntry> entries, std::ostream& out) {
    for (const auto& entry : entries) {
        Bytes line = canonical_bytes(entry.to_json());
        out.write(reinterpret_cast<const char*>(line.data()),
                  static_cast<std::streamsize>(line.size()));
        out.put('\n');
    }
}

std::vector<AuditEntry> import_log(std::istream& in) {
    std::vector<AuditEntry> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        entries.push_back(AuditEntry::from_json(Json::parse(line)));
    }
    return entries;
}

Json ConsistencyReport::to_json() const {
    Json j{
        {"diverged", diverged},
        {"difference", difference == Difference::none       ? "none"
                       : difference == Difference::reordered ? "reordered"
                                                             : "missing"},
        {"head_hashes", head_hashes},
        {"multisets_equal", multisets_equal},
        {"node_count", node_count},
    };
    if (first_divergent_seq) j["first_divergent_seq"] = *first_divergent_seq;
    return j;
}

std::string ConsistencyReport::to_csv() const {
    std::ostringstream out;
    out << "node_count,diverged,first_divergent_seq,multisets_equal,difference\n";
    out << node_count << ',' << (diverged ? 1 : 0) << ',';
    if (first_divergent_seq) out << *first_divergent_seq;
    out << ',' << (multisets_equal ? 1 : 0) << ','
        << (difference == Difference::none       ? "none"
            : difference == Difference::reordered ? "reordered"
                                                  : "missing")
        << '\n';
    return out.str();
}

ConsistencyReport compare_logs(const std::vector<std::vector<AuditEntry>>& logs) {
    if (logs.size() < 2) throw ConfigError("compare_logs needs at least two logs");

    ConsistencyReport report;
    report.node_count = logs.size();

    for (const auto& log : logs) {
        Bytes head = log.empty() ? Bytes(crypto::kSha256Bytes, 0) : log.back().entry_hash;
        report.head_hashes.push_back(to_hex(head));
    }
    report.diverged = std::adjacent_find(report.head_hashes.begin(), report.head_hashes.end(),
                                         std::not_equal_to<>()) != report.head_hashes.end();

    if (report.diverged) {
        std::size_t max_len = 0;
        for (const auto& log : logs) max_len = std::max(max_len, log.size());
        for (std::uint64_t seq = 0; seq < max_len && !report.first_divergent_seq; ++seq) {
            for (std::size_t n = 1; n < logs.size(); ++n) {
                bool a_has = seq < logs[0].size();
                bool b_has = seq < logs[n].size();
                if (a_has != b_has ||
                    (a_has && logs[0][seq].entry_hash != logs[n][seq].entry_hash)) {
                    report.first_divergent_seq = seq;
                    break;
                }
            }
        }
    }

    std::map<std::string, std::size_t> reference;
    for (const auto& e : logs[0]) ++reference[to_hex(e.event_id)];
    for (std::size_t n = 1; n < logs.size() && report.multisets_equal; ++n) {
        std::map<std::string, std::size_t> other;
        for (const auto& e : logs[n]) ++other[to_hex(e.event_id)];
        if (other != reference) report.multisets_equal = false;
    }

    if (report.diverged) {
        report.difference = report.multisets_equal ? ConsistencyReport::Difference::reordered
                                                   : ConsistencyReport::Difference::missing;
    }
    return report;
}

}  // namespace ciph
