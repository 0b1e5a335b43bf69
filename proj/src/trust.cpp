#include "ciph/trust.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "ciph/crypto.hpp"
#include "ciph/errors.hpp"

namespace ciph {

Cid Cid::of(std::span<const std::uint8_t> content) {
    return Cid{to_hex(crypto::sha256(content))};
}

std::optional<Cid> Cid::parse(std::string_view text) {
    if (!text.starts_with("sha256:")) return std::nullopt;
    std::string_view hex = text.substr(7);
    if (hex.size() != 64) return std::nullopt;
    for (char c : hex) {
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return std::nullopt;
    }
    return Cid{std::string(hex)};
}

Cid ContentStore::put(std::span<const std::uint8_t> content) {
    if (content.empty()) throw Error("content store rejects empty blobs");
    Cid cid = Cid::of(content);
    std::unique_lock lock(mutex_);
    blobs_.emplace(cid.str(), Bytes(content.begin(), content.end()));
    return cid;
}

Bytes ContentStore::get(const Cid& cid) const {
    std::shared_lock lock(mutex_);
    auto it = blobs_.find(cid.str());
    if (it == blobs_.end()) throw NotFound("no content for " + cid.str());
    return it->second;
}

bool ContentStore::contains(const Cid& cid) const {
    std::shared_lock lock(mutex_);
    return blobs_.contains(cid.str());
}

std::size_t ContentStore::size() const {
    std::shared_lock lock(mutex_);
    return blobs_.size();
}

Json ContentStore::dump() const {
    std::shared_lock lock(mutex_);
    Json j = Json::object();
    for (const auto& [cid, bytes] : blobs_) j[cid] = to_hex(bytes);
    return j;
}

Json RevocationEvent::to_json() const {
    return Json{{"credential_id", to_hex(credential_id)}, {"reason", reason}};
}

RevocationEvent RevocationEvent::from_json(const Json& j) {
    auto id = from_hex(j.at("credential_id").get<std::string>());
    if (!id) throw Error("malformed revocation event");
    return RevocationEvent{std::move(*id), j.at("reason").get<std::string>()};
}

Json RevocationBlock::hash_document() const {
    Json evs = Json::array();
    for (const auto& e : events) evs.push_back(e.to_json());
    return Json{
        {"events", evs},
        {"index", index},
        {"prev_hash", to_hex(prev_hash)},
        {"timestamp", timestamp},
    };
}

Bytes RevocationBlock::compute_hash() const { return canonical_digest(hash_document()); }

Json RevocationBlock::to_json() const {
    Json j = hash_document();
    j["block_hash"] = to_hex(block_hash);
    return j;
}

RevocationBlock RevocationBlock::from_json(const Json& j) {
    try {
        RevocationBlock b;
        b.index = j.at("index").get<std::uint64_t>();
        b.timestamp = j.at("timestamp").get<std::int64_t>();
        auto prev = from_hex(j.at("prev_hash").get<std::string>());
        auto hash = from_hex(j.at("block_hash").get<std::string>());
        if (!prev || !hash) throw Error("malformed block hashes");
        b.prev_hash = std::move(*prev);
        b.block_hash = std::move(*hash);
        for (const auto& e : j.at("events")) b.events.push_back(RevocationEvent::from_json(e));
        return b;
    } catch (const Json::exception& e) {
        throw Error(std::string("block parse error: ") + e.what());
    }
}

RevocationBlock RevocationLedger::append(std::span<const std::uint8_t> credential_id,
                                         std::string reason, std::int64_t now_ms) {
    std::unique_lock lock(mutex_);
    std::string id_hex = to_hex(credential_id);
    if (revoked_.contains(id_hex)) {
        throw AlreadyRevoked("credential " + id_hex + " is already revoked");
    }
    RevocationBlock block;
    block.index = blocks_.size();
    block.prev_hash = blocks_.empty() ? Bytes(crypto::kSha256Bytes, 0) : blocks_.back().block_hash;
    block.timestamp = now_ms;
    block.events.push_back(
        RevocationEvent{Bytes(credential_id.begin(), credential_id.end()), std::move(reason)});
    block.block_hash = block.compute_hash();
    blocks_.push_back(block);
    revoked_.insert(std::move(id_hex));
    return block;
}

std::uint64_t RevocationLedger::height() const {
    std::shared_lock lock(mutex_);
    return blocks_.size();
}

bool RevocationLedger::is_revoked(std::span<const std::uint8_t> credential_id) const {
    std::shared_lock lock(mutex_);
    return revoked_.contains(to_hex(credential_id));
}

std::set<std::string> RevocationLedger::revoked_up_to(std::uint64_t height) const {
    std::shared_lock lock(mutex_);
    std::set<std::string> out;
    std::uint64_t limit = std::min<std::uint64_t>(height, blocks_.size());
    for (std::uint64_t i = 0; i < limit; ++i) {
        for (const auto& e : blocks_[i].events) out.insert(to_hex(e.credential_id));
    }
    return out;
}

std::vector<RevocationBlock> RevocationLedger::blocks() const {
    std::shared_lock lock(mutex_);
    return blocks_;
}

RevocationBlock RevocationLedger::block_at(std::uint64_t index) const {
    std::shared_lock lock(mutex_);
    if (index >= blocks_.size()) throw NotFound("no block at that height");
    return blocks_[index];
}

ChainCheck RevocationLedger::verify() const {
    std::shared_lock lock(mutex_);
    return verify_chain(blocks_);
}

ChainCheck verify_chain(std::span<const RevocationBlock> blocks) {
    Bytes expected_prev(crypto::kSha256Bytes, 0);
    for (std::uint64_t i = 0; i < blocks.size(); ++i) {
        const RevocationBlock& b = blocks[i];
        if (b.index != i || b.prev_hash != expected_prev || b.compute_hash() != b.block_hash) {
            return ChainCheck{false, i};
        }
        expected_prev = b.block_hash;
    }
    return ChainCheck{true, 0};
}

void export_ledger(const RevocationLedger& ledger, std::ostream& out) {
    for (const auto& block : ledger.blocks()) {
        Bytes line = canonical_bytes(block.to_json());
        out.write(reinterpret_cast<const char*>(line.data()),
                  static_cast<std::streamsize>(line.size()));
        out.put('\n');
    }
}

std::vector<RevocationBlock> import_ledger(std::istream& in) {
    std::vector<RevocationBlock> blocks;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        blocks.push_back(RevocationBlock::from_json(Json::parse(line)));
    }
    return blocks;
}

LedgerSnapshot DirectLedgerReader::read(std::int64_t) {
    std::uint64_t h = ledger_.height();
    return LedgerSnapshot{h, ledger_.revoked_up_to(h)};
}

LedgerSnapshot CachingLedgerReader::read(std::int64_t now_ms) {
    if (!cached_ || ttl_ms_ == 0 || now_ms - taken_at_ >= ttl_ms_) {
        std::uint64_t h = ledger_.height();
        cached_ = LedgerSnapshot{h, ledger_.revoked_up_to(h)};
        taken_at_ = now_ms;
    }
    return *cached_;
}

std::string_view to_string(CacheMode m) {
    return m == CacheMode::polling ? "polling" : "event_driven";
}

std::optional<CacheMode> cache_mode_from_string(std::string_view s) {
    if (s == "polling") return CacheMode::polling;
    if (s == "event_driven" || s == "event-driven") return CacheMode::event_driven;
    return std::nullopt;
}

LedgerView refresh_view(LedgerView view, LedgerReader& reader, std::int64_t node_now) {
    if (node_now - view.fetched_at < view.poll_interval_ms) return view;
    LedgerSnapshot snap = reader.read(node_now);
    // The source may itself serve a cached snapshot; never move backwards.
    if (snap.height >= view.as_of_height) {
        view.as_of_height = snap.height;
        view.revoked = std::move(snap.revoked);
    }
    view.fetched_at = node_now;
    return view;
}

LedgerView apply_notification(LedgerView view, std::uint64_t height, const RevocationEvent& event,
                              std::int64_t node_now) {
    if (height > view.as_of_height) view.as_of_height = height;
    view.revoked.insert(to_hex(event.credential_id));
    view.fetched_at = node_now;
    return view;
}

RevocationQuery is_revoked(const LedgerView& view, std::span<const std::uint8_t> credential_id) {
    return RevocationQuery{view.revoked.contains(to_hex(credential_id)), view.as_of_height};
}

}  // namespace ciph
