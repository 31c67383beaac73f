#pragma once

#include <map>
#include <memory>
#include <mutex>

#include "poh/audit_log.hpp"
#include "poh/merkle.hpp"
#include "poh/packet.hpp"
#include "poh/token.hpp"

namespace poh {

enum class ProofState { Unknown, Attested, Suspect, Escalated, Expired };
enum class EdgeEvent {
    TokenVerified,
    TokenExpired,
    TokenInvalidSignature,
    TokenReplayed,
    TokenUnverifiable,
    TokenAbsent,
    WindowLapsed
};
enum class Action { Forward, RateLimit, Escalate };

std::string to_string(ProofState s);
std::string to_string(EdgeEvent e);
std::string to_string(Action a);
EdgeEvent event_for_verdict(Verdict v);

// The base table from docs/transition_table.md; total over state × event.
ProofState next_state(ProofState state, EdgeEvent event);

struct SessionProofState {
    std::string session_id;  // hex, or flow:<tuple> for unregistered flows
    ProofState state = ProofState::Unknown;
    double confidence = 0.0;
    std::optional<Verdict> last_token_verdict;
    double mean_flow_score = 0.0;
    Micros updated_at = 0;
};

// Per-session token bucket; level refills linearly in elapsed virtual time.
class TokenBucket {
public:
    TokenBucket(double capacity, double refill_per_second, Micros now);

    bool try_consume(Micros now);
    double level(Micros now) const;

private:
    void refill(Micros now);

    double capacity_;
    double refill_per_second_;
    double level_;
    Micros last_refill_;
};

struct EdgeConfig {
    double weight_token = 0.7;
    double weight_flow = 0.3;
    std::size_t escalation_threshold = 10;  // consecutive failures while Suspect
    double bucket_capacity = 10.0;
    double bucket_refill_per_second = 1.0;
};

// The edge-located verification agent: verifies tokens from packet headers,
// maintains per-session proof state, rate-limits suspect traffic, escalates,
// and appends every verdict and transition to the audit log. Per-session
// updates are serialized; the audit log appends atomically.
class EdgeVerifier {
public:
    EdgeVerifier(EdgeConfig config, KeyStore keys, AuditLog* audit = nullptr);

    // Ingress registration: binds a flow to its session and expiry window.
    void register_session(const SessionId& session_id, const FlowId& flow,
                          Micros expires_at);

    struct PacketResult {
        Action action = Action::Forward;
        EdgeEvent event = EdgeEvent::TokenAbsent;
        SessionProofState state;
    };

    PacketResult process_packet(const SimPacket& packet, Micros now);

    // Read-only snapshot; Unknown with zero confidence for absent sessions.
    // A lapsed window reports Expired without mutating the store.
    SessionProofState poh_status(const SessionId& session_id, Micros now) const;

    void observe_flow_score(const SessionId& session_id, double score);

    // Per-session provenance chain over verified token bytes.
    Hash256 session_chain_root(const SessionId& session_id) const;
    InclusionProof session_chain_prove(const SessionId& session_id,
                                       std::size_t index) const;

    ReplayCache& replay_cache() { return replay_cache_; }
    const KeyStore& keys() const { return keys_; }

private:
    struct Entry {
        SessionProofState proof;
        TokenBucket bucket;
        std::size_t consecutive_failures = 0;
        std::optional<Micros> expires_at;
        ProvenanceChain chain;
        double flow_score_sum = 0.0;
        std::size_t flow_score_count = 0;
    };

    Entry& entry_for(const std::string& key);
    void refresh_confidence(Entry& entry) const;
    SessionProofState snapshot(const Entry& entry, Micros now) const;
    std::string resolve(const FlowId& flow) const;

    EdgeConfig config_;
    KeyStore keys_;
    AuditLog* audit_;
    ReplayCache replay_cache_;
    mutable std::mutex mutex_;
    std::map<std::string, Entry> sessions_;
    std::map<std::string, std::string> flow_to_session_;
};

}  // namespace poh
