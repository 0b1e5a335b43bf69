#include "ciph/verifier.hpp"

#include "ciph/canonical.hpp"
#include "ciph/crypto.hpp"
#include "ciph/errors.hpp"

namespace ciph {

Json VerifyTask::to_json() const {
    return Json{
        {"credential", credential.to_json()},
        {"deadline_ms", deadline_ms},
        {"expected_challenge", to_hex(expected_challenge)},
        {"proof", proof.to_json()},
        {"subject_public_key", to_hex(subject_public_key)},
        {"task_id", to_hex(task_id)},
    };
}

VerifyTask VerifyTask::from_json(const Json& j) {
    VerifyTask t;
    auto id = from_hex(j.at("task_id").get<std::string>());
    auto key = from_hex(j.at("subject_public_key").get<std::string>());
    auto challenge = from_hex(j.at("expected_challenge").get<std::string>());
    if (!id || !key || !challenge) throw Error("malformed verify task");
    t.task_id = std::move(*id);
    t.subject_public_key = std::move(*key);
    t.expected_challenge = std::move(*challenge);
    t.deadline_ms = j.at("deadline_ms").get<std::int64_t>();
    t.proof = AuthProof::from_json(j.at("proof"));
    t.credential = Credential::from_json(j.at("credential"));
    return t;
}

Json VerifyResult::signing_document() const {
    return Json{
        {"as_of_height", as_of_height},
        {"node_id", node_id},
        {"reason", reason ? std::string(to_string(*reason)) : std::string()},
        {"task_id", to_hex(task_id)},
        {"vote", accept ? "accept" : "reject"},
    };
}

Json VerifyResult::to_json() const {
    Json j = signing_document();
    j["node_signature"] = to_hex(node_signature);
    return j;
}

VerifyResult VerifyResult::from_json(const Json& j) {
    VerifyResult r;
    auto id = from_hex(j.at("task_id").get<std::string>());
    auto sig = from_hex(j.at("node_signature").get<std::string>());
    if (!id || !sig) throw Error("malformed verify result");
    r.task_id = std::move(*id);
    r.node_signature = std::move(*sig);
    r.node_id = j.at("node_id").get<std::string>();
    r.accept = j.at("vote").get<std::string>() == "accept";
    std::string reason = j.at("reason").get<std::string>();
    if (!reason.empty()) r.reason = reject_reason_from_string(reason);
    r.as_of_height = j.at("as_of_height").get<std::uint64_t>();
    return r;
}

bool verify_result_signature(const VerifyResult& result,
                             std::span<const std::uint8_t> node_public_key) {
    try {
        Bytes msg = canonical_bytes(result.signing_document());
        return crypto::ed25519_verify(node_public_key, msg, result.node_signature);
    } catch (const Error&) {
        return false;
    }
}

VerifierNode::VerifierNode(NodeConfig config, KeyPair keys, MetadataSource& metadata,
                           LedgerReader& reader)
    : config_(std::move(config)),
      keys_(std::move(keys)),
      metadata_(metadata),
      reader_(reader),
      audit_(config_.audit_policy, config_.settle_delay_ms) {
    view_.node_id = config_.node_id;
    view_.ttl_ms = config_.ttl_ms;
    view_.poll_interval_ms = config_.poll_interval_ms;
    // fetched_at starts at the epoch; the first use forces a refresh.
    view_.fetched_at = -view_.ttl_ms - view_.poll_interval_ms;
}

VerifyResult VerifierNode::signed_result(const Bytes& task_id, bool accept,
                                         std::optional<RejectReason> reason,
                                         std::uint64_t height) const {
    VerifyResult r;
    r.task_id = task_id;
    r.node_id = config_.node_id;
    r.accept = accept;
    r.reason = reason;
    r.as_of_height = height;
    r.node_signature = keys_.sign(canonical_bytes(r.signing_document()));
    return r;
}

void VerifierNode::maybe_refresh(std::int64_t now_ms) {
    std::uint64_t before = view_.as_of_height;
    if (config_.cache_mode == CacheMode::polling) {
        view_ = refresh_view(view_, reader_, now_ms);
    }
    if (view_.expired(now_ms)) {
        // Views past their ttl must not answer queries; degenerate configs
        // (poll interval longer than ttl) land here.
        LedgerSnapshot snap = reader_.read(now_ms);
        if (snap.height >= view_.as_of_height) {
            view_.as_of_height = snap.height;
            view_.revoked = std::move(snap.revoked);
        }
        view_.fetched_at = now_ms;
    }
    if (config_.log_view_refresh && view_.as_of_height != before) {
        AuditEvent ev;
        ev.type = AuditEventType::view_refresh;
        ev.actor_did = config_.node_id;
        ev.payload = Json{{"height", view_.as_of_height}};
        ev.event_time = now_ms;
        Bytes digest = canonical_digest(
            Json{{"height", view_.as_of_height}, {"node", config_.node_id}, {"t", now_ms}});
        ev.event_id.assign(digest.begin(), digest.begin() + 16);
        audit_.append(ev, now_ms);
    }
}

VerifyResult VerifierNode::decide(const VerifyTask& task, std::int64_t now_ms) {
    maybe_refresh(now_ms);
    std::uint64_t height = view_.as_of_height;

    if (now_ms > task.deadline_ms) {
        return signed_result(task.task_id, false, RejectReason::stale_challenge, height);
    }

    VerifyOutcome proof_check =
        verify_proof(task.proof, task.subject_public_key, task.expected_challenge, height,
                     config_.epoch_tolerance);
    if (!proof_check.accepted) {
        return signed_result(task.task_id, false, proof_check.reason, height);
    }

    // The proof must speak for the presented credential, not merely for any
    // credential the subject owns.
    if (task.proof.credential_id != task.credential.credential_id ||
        task.proof.subject_did != task.credential.subject_did) {
        return signed_result(task.task_id, false, RejectReason::metadata_mismatch, height);
    }

    auto cid = Cid::parse(task.credential.metadata_cid);
    if (!cid) {
        return signed_result(task.task_id, false, RejectReason::metadata_mismatch, height);
    }
    Bytes metadata;
    try {
        metadata = metadata_.fetch(*cid);
    } catch (const std::exception&) {
        return signed_result(task.task_id, false, RejectReason::metadata_missing, height);
    }
    try {
        Json doc = Json::parse(metadata);
        if (doc.at("credential_id").get<std::string>() != to_hex(task.credential.credential_id)) {
            return signed_result(task.task_id, false, RejectReason::metadata_mismatch, height);
        }
        auto issuer_key = from_hex(doc.at("issuer_public_key").get<std::string>());
        if (!issuer_key) {
            return signed_result(task.task_id, false, RejectReason::metadata_mismatch, height);
        }
        if (!verify_credential(task.credential, *issuer_key)) {
            return signed_result(task.task_id, false, RejectReason::bad_signature, height);
        }
    } catch (const Json::exception&) {
        return signed_result(task.task_id, false, RejectReason::metadata_mismatch, height);
    }

    RevocationQuery q = is_revoked(view_, task.credential.credential_id);
    if (q.revoked) {
        return signed_result(task.task_id, false, RejectReason::revoked, q.as_of_height);
    }
    return signed_result(task.task_id, true, std::nullopt, q.as_of_height);
}

VerifyResult VerifierNode::handle_task(const VerifyTask& task, std::int64_t now_ms) {
    std::lock_guard lock(mutex_);
    ++processed_;
    try {
        return decide(task, now_ms);
    } catch (const std::exception&) {
        // Fail closed: an internal fault is a rejection, never an acceptance.
        return signed_result(task.task_id, false, RejectReason::metadata_missing,
                             view_.as_of_height);
    }
}

void VerifierNode::apply_view_snapshot(const LedgerSnapshot& snapshot, std::int64_t now_ms) {
    std::lock_guard lock(mutex_);
    if (snapshot.height >= view_.as_of_height) {
        view_.as_of_height = snapshot.height;
        view_.revoked = snapshot.revoked;
    }
    view_.fetched_at = now_ms;
}

void VerifierNode::on_revocation_notice(std::uint64_t height, const RevocationEvent& event,
                                        std::int64_t now_ms) {
    std::lock_guard lock(mutex_);
    view_ = apply_notification(view_, height, event, now_ms);
}

void VerifierNode::on_audit_event(const AuditEvent& event, std::int64_t arrival_ms) {
    std::lock_guard lock(mutex_);
    audit_.append(event, arrival_ms);
}

void VerifierNode::flush_audit(std::int64_t now_ms) {
    std::lock_guard lock(mutex_);
    audit_.flush(now_ms);
}

void VerifierNode::drain_audit() {
    std::lock_guard lock(mutex_);
    audit_.drain();
}

NodeStatus VerifierNode::status() const {
    std::lock_guard lock(mutex_);
    return NodeStatus{config_.node_id, view_.as_of_height, view_.fetched_at, processed_};
}

std::vector<AuditEntry> VerifierNode::audit_entries() const {
    std::lock_guard lock(mutex_);
    return audit_.entries();
}

LedgerView VerifierNode::view() const {
    std::lock_guard lock(mutex_);
    return view_;
}

}  // namespace ciph
