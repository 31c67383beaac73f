#pragma once

#include <map>
#include <mutex>
#include <set>

#include "poh/identity_core.hpp"
#include "poh/signature.hpp"
#include "poh/token.hpp"

namespace poh {

struct StaleAttestation : std::runtime_error {
    StaleAttestation() : std::runtime_error("attestation already superseded") {}
};
struct BadResumptionCount : std::runtime_error {
    BadResumptionCount() : std::runtime_error("resumption count must increment by one") {}
};

// Abstract handshake transcript; stands in for the TLS wire exchange, whose
// mechanics are out of scope. Digests are fixed once the handshake completes.
struct HandshakeTranscript {
    Hash256 client_hello_digest{};
    Hash256 negotiated_params_digest{};
    std::uint32_t resumption_count = 0;

    Hash256 digest() const;
};

constexpr std::uint8_t kAttestationVersion = 2;

// Identity-bound session attestation. transcript_binding commits to both the
// session key and the transcript, so it is recomputable only by a party
// holding the session key.
struct SessionAttestation {
    std::uint8_t version = kAttestationVersion;
    std::string issuer_id;
    std::string key_id;
    SessionId session_id{};
    Hash256 transcript_binding{};
    Seconds issued_at = 0;
    Seconds expires_at = 0;
    Nonce16 challenge_nonce{};
    std::uint32_t resumption_count = 0;
    Signature signature{};
};

Bytes attestation_canonical_encode(const SessionAttestation& att);
Bytes attestation_wire_encode(const SessionAttestation& att);
std::optional<SessionAttestation> attestation_wire_decode(
    std::span<const std::uint8_t> wire);

Hash256 transcript_binding_hash(const Key256& session_key,
                                const HandshakeTranscript& transcript);

// Issuer-side authority: binds sessions, rotates at resumption boundaries,
// and keeps the supersession registry. rotate-and-supersede is atomic.
class AttestationAuthority {
public:
    struct Config {
        std::string issuer_id = "telco-01";
        std::string key_id = "sess-k1";
        Seconds lifetime = 600;
    };

    AttestationAuthority(Config config, const Key256& signing_seed,
                         std::uint64_t nonce_seed);

    SessionAttestation bind_session(const SessionContext& session,
                                    const HandshakeTranscript& transcript,
                                    Micros now);

    // Requires next.resumption_count == old.resumption_count + 1 and that old
    // has not been rotated before; the old attestation verifies as Expired
    // afterwards. Chains never fork.
    SessionAttestation rotate_attestation(const SessionAttestation& old,
                                          const HandshakeTranscript& next,
                                          Micros now);

    // Same verdict lattice as verify_token; a superseded attestation is
    // Expired, a reused challenge nonce is Replayed.
    Verdict verify(const SessionAttestation& att, Micros now);
    // Additionally checks the transcript binding against a concrete session
    // and transcript; a mismatch reports InvalidSignature.
    Verdict verify_with_context(const SessionAttestation& att,
                                const SessionContext& session,
                                const HandshakeTranscript& transcript, Micros now);

    Ed25519PublicKey public_key() const { return sign_key_.public_key(); }

private:
    SessionAttestation issue(const SessionId& session_id, const Key256& session_key,
                             const HandshakeTranscript& transcript, Micros now);
    static Hash256 attestation_id(const SessionAttestation& att);

    Config config_;
    Ed25519KeyPair sign_key_;
    mutable std::mutex mutex_;
    DeterministicRng nonce_rng_;
    std::set<Hash256> superseded_;
    std::map<Hash256, Key256> session_keys_;  // attestation id -> key, for rotation
    ReplayCache nonce_cache_;
};

}  // namespace poh
