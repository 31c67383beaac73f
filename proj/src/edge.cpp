#include "poh/edge.hpp"

#include <algorithm>

namespace poh {

std::string to_string(ProofState s) {
    switch (s) {
        case ProofState::Unknown: return "Unknown";
        case ProofState::Attested: return "Attested";
        case ProofState::Suspect: return "Suspect";
        case ProofState::Escalated: return "Escalated";
        case ProofState::Expired: return "Expired";
    }
    return "?";
}

std::string to_string(EdgeEvent e) {
    switch (e) {
        case EdgeEvent::TokenVerified: return "TokenVerified";
        case EdgeEvent::TokenExpired: return "TokenExpired";
        case EdgeEvent::TokenInvalidSignature: return "TokenInvalidSignature";
        case EdgeEvent::TokenReplayed: return "TokenReplayed";
        case EdgeEvent::TokenUnverifiable: return "TokenUnverifiable";
        case EdgeEvent::TokenAbsent: return "TokenAbsent";
        case EdgeEvent::WindowLapsed: return "WindowLapsed";
    }
    return "?";
}

std::string to_string(Action a) {
    switch (a) {
        case Action::Forward: return "Forward";
        case Action::RateLimit: return "RateLimit";
        case Action::Escalate: return "Escalate";
    }
    return "?";
}

EdgeEvent event_for_verdict(Verdict v) {
    switch (v) {
        case Verdict::Verified: return EdgeEvent::TokenVerified;
        case Verdict::Expired: return EdgeEvent::TokenExpired;
        case Verdict::InvalidSignature: return EdgeEvent::TokenInvalidSignature;
        case Verdict::Replayed: return EdgeEvent::TokenReplayed;
        case Verdict::Unverifiable: return EdgeEvent::TokenUnverifiable;
    }
    return EdgeEvent::TokenUnverifiable;
}

ProofState next_state(ProofState state, EdgeEvent event) {
    if (event == EdgeEvent::WindowLapsed) return ProofState::Expired;
    switch (state) {
        case ProofState::Unknown:
            return event == EdgeEvent::TokenVerified ? ProofState::Attested
                                                     : ProofState::Suspect;
        case ProofState::Attested:
            if (event == EdgeEvent::TokenVerified) return ProofState::Attested;
            if (event == EdgeEvent::TokenAbsent) return ProofState::Attested;
            return ProofState::Suspect;
        case ProofState::Suspect:
            return event == EdgeEvent::TokenVerified ? ProofState::Attested
                                                     : ProofState::Suspect;
        case ProofState::Escalated:
            return ProofState::Escalated;
        case ProofState::Expired:
            return ProofState::Expired;
    }
    return ProofState::Expired;
}

TokenBucket::TokenBucket(double capacity, double refill_per_second, Micros now)
    : capacity_(capacity),
      refill_per_second_(refill_per_second),
      level_(capacity),
      last_refill_(now) {}

void TokenBucket::refill(Micros now) {
    if (now <= last_refill_) return;
    double elapsed_s = static_cast<double>(now - last_refill_) /
                       static_cast<double>(kMicrosPerSecond);
    level_ = std::min(capacity_, level_ + elapsed_s * refill_per_second_);
    last_refill_ = now;
}

bool TokenBucket::try_consume(Micros now) {
    refill(now);
    if (level_ < 1.0) return false;
    level_ -= 1.0;
    return true;
}

double TokenBucket::level(Micros now) const {
    TokenBucket copy = *this;
    copy.refill(now);
    return copy.level_;
}

EdgeVerifier::EdgeVerifier(EdgeConfig config, KeyStore keys, AuditLog* audit)
    : config_(config), keys_(keys), audit_(audit) {}

void EdgeVerifier::register_session(const SessionId& session_id, const FlowId& flow,
                                    Micros expires_at) {
    std::lock_guard lock(mutex_);
    std::string key = session_id_hex(session_id);
    flow_to_session_[flow.to_string()] = key;
    Entry& entry = entry_for(key);
    entry.expires_at = expires_at;
}

EdgeVerifier::Entry& EdgeVerifier::entry_for(const std::string& key) {
    auto it = sessions_.find(key);
    if (it == sessions_.end()) {
        // Buckets start full; the first refill clamps at capacity regardless
        // of how much virtual time has passed since construction.
        Entry entry{
            .proof = {.session_id = key},
            .bucket = TokenBucket(config_.bucket_capacity,
                                  config_.bucket_refill_per_second, 0),
        };
        it = sessions_.emplace(key, std::move(entry)).first;
    }
    return it->second;
}

std::string EdgeVerifier::resolve(const FlowId& flow) const {
    auto it = flow_to_session_.find(flow.to_string());
    if (it != flow_to_session_.end()) return it->second;
    return "flow:" + flow.to_string();
}

void EdgeVerifier::refresh_confidence(Entry& entry) const {
    double token_component =
        entry.proof.last_token_verdict == Verdict::Verified ? 1.0 : 0.0;
    entry.proof.confidence = config_.weight_token * token_component +
                             config_.weight_flow * entry.proof.mean_flow_score;
}

EdgeVerifier::PacketResult EdgeVerifier::process_packet(const SimPacket& packet,
                                                        Micros now) {
    std::lock_guard lock(mutex_);
    std::string key = resolve(packet.flow_id);
    Entry& entry = entry_for(key);

    // Window lapse dominates the packet's own event and is terminal.
    if (entry.proof.state != ProofState::Expired && entry.expires_at &&
        now >= *entry.expires_at) {
        ProofState before = entry.proof.state;
        entry.proof.state = next_state(before, EdgeEvent::WindowLapsed);
        entry.proof.updated_at = now;
        refresh_confidence(entry);
        if (audit_ && before != entry.proof.state)
            audit_->append("transition", key, to_string(entry.proof.state), now);
        return {Action::RateLimit, EdgeEvent::WindowLapsed, entry.proof};
    }

    // Derive the packet event.
    EdgeEvent event;
    ExtractResult extracted = extract_token(packet);
    switch (extracted.status) {
        case ExtractStatus::Absent:
            event = EdgeEvent::TokenAbsent;
            break;
        case ExtractStatus::Corrupt:
            event = EdgeEvent::TokenUnverifiable;
            entry.proof.last_token_verdict = Verdict::Unverifiable;
            if (audit_)
                audit_->append("token_verdict", key,
                               to_string(Verdict::Unverifiable), now);
            break;
        case ExtractStatus::Present: {
            Verdict verdict =
                verify_token_with_store(extracted.token, keys_, now, replay_cache_);
            event = event_for_verdict(verdict);
            entry.proof.last_token_verdict = verdict;
            if (verdict == Verdict::Verified) entry.chain.append(extracted.token);
            if (audit_) audit_->append("token_verdict", key, to_string(verdict), now);
            break;
        }
    }

    ProofState before = entry.proof.state;
    ProofState after = next_state(before, event);

    // Guard 1: consecutive failures while already Suspect.
    if (event == EdgeEvent::TokenVerified) {
        entry.consecutive_failures = 0;
    } else if (before == ProofState::Suspect) {
        ++entry.consecutive_failures;
        if (after == ProofState::Suspect &&
            entry.consecutive_failures >= config_.escalation_threshold) {
            after = ProofState::Escalated;
        }
    } else if (after == ProofState::Suspect) {
        entry.consecutive_failures = 0;  // just entered Suspect
    }

    // Action, with guard 2: bucket exhaustion escalates.
    Action action;
    switch (after) {
        case ProofState::Attested:
            action = Action::Forward;
            break;
        case ProofState::Suspect:
            if (entry.bucket.try_consume(now)) {
                action = Action::Forward;
            } else {
                action = Action::RateLimit;
                after = ProofState::Escalated;
            }
            break;
        case ProofState::Escalated:
            action = Action::Escalate;
            break;
        default:
            action = Action::RateLimit;
            break;
    }

    entry.proof.state = after;
    entry.proof.updated_at = now;
    refresh_confidence(entry);
    if (audit_ && after != before)
        audit_->append("transition", key, to_string(after), now);

    return {action, event, entry.proof};
}

SessionProofState EdgeVerifier::snapshot(const Entry& entry, Micros now) const {
    SessionProofState out = entry.proof;
    if (out.state != ProofState::Expired && entry.expires_at &&
        now >= *entry.expires_at) {
        out.state = ProofState::Expired;
    }
    return out;
}

SessionProofState EdgeVerifier::poh_status(const SessionId& session_id,
                                           Micros now) const {
    std::lock_guard lock(mutex_);
    std::string key = session_id_hex(session_id);
    auto it = sessions_.find(key);
    if (it == sessions_.end()) {
        SessionProofState unknown;
        unknown.session_id = key;
        unknown.updated_at = now;
        return unknown;
    }
    return snapshot(it->second, now);
}

void EdgeVerifier::observe_flow_score(const SessionId& session_id, double score) {
    std::lock_guard lock(mutex_);
    Entry& entry = entry_for(session_id_hex(session_id));
    entry.flow_score_sum += score;
    entry.flow_score_count += 1;
    entry.proof.mean_flow_score =
        entry.flow_score_sum / static_cast<double>(entry.flow_score_count);
    refresh_confidence(entry);
}

Hash256 EdgeVerifier::session_chain_root(const SessionId& session_id) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(session_id_hex(session_id));
    if (it == sessions_.end()) return Hash256{};
    return it->second.chain.root();
}

InclusionProof EdgeVerifier::session_chain_prove(const SessionId& session_id,
                                                 std::size_t index) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(session_id_hex(session_id));
    if (it == sessions_.end()) throw IndexOutOfRange(index);
    return it->second.chain.prove(index);
}

}  // namespace poh
