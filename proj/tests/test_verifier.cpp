#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ciph/client.hpp"
#include "ciph/errors.hpp"
#include "ciph/verifier.hpp"

using namespace ciph;

namespace {

struct FailingSource final : MetadataSource {
    Bytes fetch(const Cid&) override { throw IoFailure("injected storage fault"); }
};

struct Harness {
    Harness()
        : issuer_ident(generate_identity(Bytes(32, 1))),
          issuer(issuer_ident.first, issuer_ident.second),
          device(provision_client(Bytes(32, 2), issuer, 1000)),
          metadata_source(store),
          reader(ledger),
          random(11) {
        store.put(canonical_bytes(device.metadata));
    }

    VerifierNode make_node(const std::string& id, CacheMode mode = CacheMode::polling) {
        NodeConfig cfg;
        cfg.node_id = id;
        cfg.cache_mode = mode;
        auto [did, keys] = generate_identity(Bytes(32, static_cast<std::uint8_t>(0x80 + id.size())));
        (void)did;
        return VerifierNode(cfg, keys, metadata_source, reader);
    }

    VerifyTask make_task(std::int64_t now, std::uint64_t epoch = 0) {
        Bytes challenge(kChallengeBytes, 0x33);
        AuthProof proof = local_auth_round(device, challenge, epoch, 1, random);
        VerifyTask task;
        task.task_id = Bytes(16, 0x44);
        task.proof = proof;
        task.credential = device.credential;
        task.subject_public_key = device.keys.public_key;
        task.expected_challenge = challenge;
        task.deadline_ms = now + 2000;
        return task;
    }

    std::pair<Did, KeyPair> issuer_ident;
    Issuer issuer;
    ClientDevice device;
    ContentStore store;
    RevocationLedger ledger;
    StoreMetadataSource metadata_source;
    DirectLedgerReader reader;
    SeededRandom random;
};

}  // namespace

TEST_CASE("honest task with fresh view is accepted and signed") {
    Harness h;
    VerifierNode node = h.make_node("n0");
    VerifyTask task = h.make_task(5000);
    VerifyResult result = node.handle_task(task, 5000);
    CHECK(result.accept);
    CHECK(result.node_id == "n0");
    CHECK(verify_result_signature(result, node.public_key()));

    // Tampered vote fails signature validation.
    VerifyResult forged = result;
    forged.accept = false;
    CHECK_FALSE(verify_result_signature(forged, node.public_key()));
}

TEST_CASE("stale view accepts a freshly revoked credential") {
    Harness h;
    VerifierNode node = h.make_node("n0");

    // Warm the node's view before the revocation lands.
    node.apply_view_snapshot(LedgerSnapshot{h.ledger.height(), {}}, 4000);
    h.ledger.append(h.device.credential.credential_id, "stolen", 4100);

    VerifyTask task = h.make_task(4200);
    VerifyResult result = node.handle_task(task, 4200);
    CHECK(result.accept);  // the stale-acceptance window
    CHECK(result.as_of_height < h.ledger.height());

    // Once the view catches up, the same credential is rejected.
    node.apply_view_snapshot(
        LedgerSnapshot{h.ledger.height(), h.ledger.revoked_up_to(h.ledger.height())}, 4300);
    VerifyTask task2 = h.make_task(4400);
    VerifyResult rejected = node.handle_task(task2, 4400);
    CHECK_FALSE(rejected.accept);
    CHECK(rejected.reason == RejectReason::revoked);
}

TEST_CASE("missing metadata is a reject, not a transport error") {
    Harness h;
    ContentStore empty_store;
    StoreMetadataSource empty_source(empty_store);
    NodeConfig cfg;
    cfg.node_id = "n1";
    auto keys = generate_identity(Bytes(32, 0x55)).second;
    VerifierNode node(cfg, keys, empty_source, h.reader);

    VerifyResult result = node.handle_task(h.make_task(1000), 1000);
    CHECK_FALSE(result.accept);
    CHECK(result.reason == RejectReason::metadata_missing);
}

TEST_CASE("metadata whose credential id disagrees is rejected") {
    Harness h;
    // Store a metadata document at the CID the credential points to is not
    // possible (content addressing), so corrupt the credential instead: point
    // it at a different stored document.
    Json other_doc = h.device.metadata;
    other_doc["credential_id"] = std::string(32, 'f');
    Cid other_cid = h.store.put(canonical_bytes(other_doc));

    VerifierNode node = h.make_node("n2");
    VerifyTask task = h.make_task(1000);
    task.credential.metadata_cid = other_cid.str();
    // Re-issue so the credential signature covers the new CID.
    task.credential.signature =
        h.issuer.keys().sign(canonical_bytes(task.credential.signing_document()));
    // The proof no longer matches the credential id? It does: ids unchanged.
    VerifyResult result = node.handle_task(task, 1000);
    CHECK_FALSE(result.accept);
    CHECK(result.reason == RejectReason::metadata_mismatch);
}

TEST_CASE("injected storage fault fails closed") {
    Harness h;
    FailingSource failing;
    NodeConfig cfg;
    cfg.node_id = "n3";
    auto keys = generate_identity(Bytes(32, 0x66)).second;
    VerifierNode node(cfg, keys, failing, h.reader);

    VerifyResult result = node.handle_task(h.make_task(1000), 1000);
    CHECK_FALSE(result.accept);
    CHECK(result.reason == RejectReason::metadata_missing);
}

TEST_CASE("expired deadlines fail closed with stale_challenge") {
    Harness h;
    VerifierNode node = h.make_node("n4");
    VerifyTask task = h.make_task(1000);
    task.deadline_ms = 900;
    VerifyResult result = node.handle_task(task, 1000);
    CHECK_FALSE(result.accept);
    CHECK(result.reason == RejectReason::stale_challenge);
}

TEST_CASE("wrong subject key is rejected as bad signature") {
    Harness h;
    VerifierNode node = h.make_node("n5");
    VerifyTask task = h.make_task(1000);
    task.subject_public_key = generate_identity(Bytes(32, 0x77)).second.public_key;
    VerifyResult result = node.handle_task(task, 1000);
    CHECK_FALSE(result.accept);
    CHECK(result.reason == RejectReason::bad_signature);
}

TEST_CASE("two nodes at equal view heights vote identically") {
    Harness h;
    VerifierNode a = h.make_node("na");
    VerifierNode b = h.make_node("nb");
    LedgerSnapshot snap{h.ledger.height(), h.ledger.revoked_up_to(h.ledger.height())};
    a.apply_view_snapshot(snap, 900);
    b.apply_view_snapshot(snap, 900);

    VerifyTask task = h.make_task(1000);
    VerifyResult ra = a.handle_task(task, 1000);
    VerifyResult rb = b.handle_task(task, 1000);
    CHECK(ra.accept == rb.accept);
    CHECK(ra.reason == rb.reason);
    CHECK(ra.as_of_height == rb.as_of_height);
}

TEST_CASE("status counters track work") {
    Harness h;
    VerifierNode node = h.make_node("n6");
    CHECK(node.status().processed == 0);

    for (int i = 0; i < 3; ++i) node.handle_task(h.make_task(1000 + i), 1000 + i);
    NodeStatus status = node.status();
    CHECK(status.processed == 3);
    CHECK(status.node_id == "n6");

    h.ledger.append(Bytes(16, 0xee), "r", 2000);
    node.apply_view_snapshot(LedgerSnapshot{7, {}}, 2100);
    CHECK(node.status().view_height == 7);
    CHECK(node.status().last_refresh_ms == 2100);
}

TEST_CASE("task wire form round trips") {
    Harness h;
    VerifyTask task = h.make_task(1000);
    VerifyTask back = VerifyTask::from_json(task.to_json());
    CHECK(back.to_json() == task.to_json());

    VerifierNode node = h.make_node("n7");
    VerifyResult result = node.handle_task(back, 1000);
    CHECK(result.accept);
    VerifyResult round = VerifyResult::from_json(result.to_json());
    CHECK(round.to_json() == result.to_json());
    CHECK(verify_result_signature(round, node.public_key()));
}

TEST_CASE("event-driven notices update the node view") {
    Harness h;
    VerifierNode node = h.make_node("ne", CacheMode::event_driven);
    node.apply_view_snapshot(LedgerSnapshot{0, {}}, 100);

    RevocationBlock block = h.ledger.append(h.device.credential.credential_id, "stolen", 200);
    node.on_revocation_notice(block.index + 1, block.events[0], 250);

    VerifyTask task = h.make_task(300, 1);
    VerifyResult result = node.handle_task(task, 300);
    CHECK_FALSE(result.accept);
    CHECK(result.reason == RejectReason::revoked);
}
