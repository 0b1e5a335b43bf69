#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "ciph/errors.hpp"
#include "ciph/rng.hpp"
#include "ciph/trust.hpp"

using namespace ciph;

namespace {

Bytes cred_id(std::uint8_t fill) { return Bytes(16, fill); }

void fill_ledger(RevocationLedger& ledger, std::size_t blocks, Rng& rng) {
    for (std::size_t i = 0; i < blocks; ++i) {
        Bytes id(16);
        rng.fill(id);
        ledger.append(id, "compromised", static_cast<std::int64_t>(1000 + i));
    }
}

}  // namespace

TEST_CASE("content store addresses by SHA-256") {
    ContentStore store;
    Cid cid = store.put(to_bytes("hello"));
    // Standard SHA-256 of ASCII "hello"; verifiable with any independent tool.
    CHECK(cid.str() == "sha256:2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824");
    CHECK(store.get(cid) == to_bytes("hello"));
}

TEST_CASE("put is idempotent") {
    ContentStore store;
    Cid a = store.put(to_bytes("blob"));
    Cid b = store.put(to_bytes("blob"));
    CHECK(a == b);
    CHECK(store.size() == 1);
}

TEST_CASE("unknown CIDs and empty blobs are errors") {
    ContentStore store;
    Cid ghost{std::string(64, '0')};
    CHECK_THROWS_AS(store.get(ghost), NotFound);
    CHECK_THROWS_AS(store.put(Bytes{}), Error);
    CHECK_FALSE(Cid::parse("sha256:short"));
    CHECK_FALSE(Cid::parse("md5:" + std::string(64, 'a')));
    CHECK(Cid::parse("sha256:" + std::string(64, 'a')));
}

TEST_CASE("appending revocations grows a verifiable chain") {
    RevocationLedger ledger;
    RevocationBlock first = ledger.append(cred_id(1), "lost", 100);
    CHECK(first.index == 0);
    CHECK(first.prev_hash == Bytes(32, 0));
    CHECK(first.events.size() == 1);
    CHECK(ledger.height() == 1);
    CHECK(ledger.is_revoked(cred_id(1)));

    CHECK_THROWS_AS(ledger.append(cred_id(1), "again", 200), AlreadyRevoked);
    CHECK(ledger.height() == 1);

    Rng rng(77);
    for (int i = 0; i < 50; ++i) {
        Bytes id(16);
        rng.fill(id);
        ledger.append(id, "compromised", 300 + i);
    }
    CHECK(ledger.verify().ok);
    CHECK(ledger.height() == 51);
}

TEST_CASE("chain verification pinpoints mutations") {
    Rng rng(88);
    RevocationLedger ledger;
    fill_ledger(ledger, 10, rng);
    auto blocks = ledger.blocks();
    CHECK(verify_chain(blocks).ok);

    SUBCASE("mutated event in block 3") {
        blocks[3].events[0].reason = "innocent";
        ChainCheck check = verify_chain(blocks);
        CHECK_FALSE(check.ok);
        CHECK(check.first_bad_index == 3);
    }
    SUBCASE("spliced-out block") {
        blocks.erase(blocks.begin() + 4);
        for (std::size_t i = 4; i < blocks.size(); ++i) blocks[i].index = i;
        ChainCheck check = verify_chain(blocks);
        CHECK_FALSE(check.ok);
        CHECK(check.first_bad_index == 4);
    }
}

TEST_CASE("any single bit flip breaks the chain at or before that block") {
    Rng rng(99);
    RevocationLedger ledger;
    fill_ledger(ledger, 20, rng);
    const auto reference = ledger.blocks();

    Rng flips(123);
    for (int trial = 0; trial < 1000; ++trial) {
        auto blocks = reference;
        auto block_idx = static_cast<std::size_t>(
            flips.uniform_int(0, static_cast<std::int64_t>(blocks.size() - 1)));
        RevocationBlock& target = blocks[block_idx];

        // Pick a random bit across the block's mutable fields.
        switch (flips.uniform_int(0, 3)) {
            case 0:
                target.prev_hash[static_cast<std::size_t>(flips.uniform_int(0, 31))] ^=
                    static_cast<std::uint8_t>(1 << flips.uniform_int(0, 7));
                break;
            case 1:
                target.block_hash[static_cast<std::size_t>(flips.uniform_int(0, 31))] ^=
                    static_cast<std::uint8_t>(1 << flips.uniform_int(0, 7));
                break;
            case 2:
                target.events[0].credential_id[static_cast<std::size_t>(
                    flips.uniform_int(0, 15))] ^=
                    static_cast<std::uint8_t>(1 << flips.uniform_int(0, 7));
                break;
            default:
                target.timestamp ^= (std::int64_t{1} << flips.uniform_int(0, 40));
                break;
        }

        ChainCheck check = verify_chain(blocks);
        REQUIRE_FALSE(check.ok);
        REQUIRE(check.first_bad_index <= block_idx);
    }
}

TEST_CASE("ledger exports and imports through the line format") {
    Rng rng(101);
    RevocationLedger ledger;
    fill_ledger(ledger, 5, rng);
    std::ostringstream out;
    export_ledger(ledger, out);

    std::istringstream in(out.str());
    auto blocks = import_ledger(in);
    CHECK(blocks.size() == 5);
    CHECK(verify_chain(blocks).ok);

    std::ostringstream again;
    for (const auto& b : blocks) {
        Bytes line = canonical_bytes(b.to_json());
        again.write(reinterpret_cast<const char*>(line.data()),
                    static_cast<std::streamsize>(line.size()));
        again.put('\n');
    }
    CHECK(again.str() == out.str());
}

TEST_CASE("polling refresh honors the poll interval") {
    RevocationLedger ledger;
    DirectLedgerReader reader(ledger);

    LedgerView view;
    view.node_id = "n0";
    view.poll_interval_ms = 500;
    view.ttl_ms = 1000;
    view.fetched_at = 10'000;
    view.as_of_height = 0;

    ledger.append(cred_id(1), "lost", 10'100);

    // Fresh view: age below the poll interval leaves the view untouched.
    LedgerView same = refresh_view(view, reader, 10'400);
    CHECK(same.as_of_height == 0);
    CHECK(same.fetched_at == 10'000);

    // Stale view: jumps to the current height.
    LedgerView bumped = refresh_view(view, reader, 10'500);
    CHECK(bumped.as_of_height == 1);
    CHECK(bumped.fetched_at == 10'500);
    CHECK(is_revoked(bumped, cred_id(1)).revoked);
}

TEST_CASE("the source-side cache serves stale snapshots within its ttl") {
    RevocationLedger ledger;
    CachingLedgerReader reader(ledger, 1000);

    CHECK(reader.read(0).height == 0);
    ledger.append(cred_id(2), "lost", 100);
    // Still inside the ttl window: the cache hides the new block.
    CHECK(reader.read(900).height == 0);
    // Past the ttl: refreshed.
    CHECK(reader.read(1000).height == 1);

    SUBCASE("ttl zero disables caching") {
        CachingLedgerReader fresh(ledger, 0);
        CHECK(fresh.read(0).height == 1);
        ledger.append(cred_id(3), "lost", 200);
        CHECK(fresh.read(0).height == 2);
    }
}

TEST_CASE("event-driven notifications update views immediately") {
    LedgerView view;
    view.node_id = "n1";
    view.as_of_height = 3;
    RevocationEvent event{cred_id(7), "stolen"};
    LedgerView updated = apply_notification(view, 4, event, 5000);
    CHECK(updated.as_of_height == 4);
    CHECK(updated.fetched_at == 5000);
    CHECK(is_revoked(updated, cred_id(7)).revoked);

    // Heights never go backwards.
    LedgerView replay = apply_notification(updated, 2, event, 6000);
    CHECK(replay.as_of_height == 4);
}

TEST_CASE("stale views answer from their own height") {
    RevocationLedger ledger;
    DirectLedgerReader reader(ledger);
    for (int i = 0; i < 5; ++i) ledger.append(cred_id(static_cast<std::uint8_t>(i)), "r", i);

    LedgerView at4;
    at4.poll_interval_ms = 500;
    at4 = refresh_view(at4, reader, 1000);
    CHECK(at4.as_of_height == 5);

    Bytes late = cred_id(9);
    ledger.append(late, "r", 2000);  // height 6, unseen by the view

    RevocationQuery q = is_revoked(at4, late);
    CHECK_FALSE(q.revoked);  // the stale-window phenomenon
    CHECK(q.as_of_height == 5);

    RevocationQuery seen = is_revoked(at4, cred_id(2));
    CHECK(seen.revoked);

    CHECK_FALSE(is_revoked(at4, cred_id(200)).revoked);
}

TEST_CASE("revocation monotonicity across growing views") {
    RevocationLedger ledger;
    DirectLedgerReader reader(ledger);
    Rng rng(313);

    std::vector<Bytes> ids;
    for (int i = 0; i < 20; ++i) {
        Bytes id(16);
        rng.fill(id);
        ids.push_back(id);
        ledger.append(id, "r", i);
    }

    LedgerView view;
    view.poll_interval_ms = 0;
    std::uint64_t last_height = 0;
    std::set<std::string> seen_revoked;
    for (std::int64_t t = 0; t <= 20; ++t) {
        view = refresh_view(view, reader, t * 100);
        CHECK(view.as_of_height >= last_height);
        last_height = view.as_of_height;
        for (const auto& id : ids) {
            std::string hex = to_hex(id);
            if (seen_revoked.contains(hex)) {
                // Once revoked at some height, revoked at every later height.
                CHECK(is_revoked(view, id).revoked);
            } else if (is_revoked(view, id).revoked) {
                seen_revoked.insert(hex);
            }
        }
    }
}
