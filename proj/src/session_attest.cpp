#include "poh/session_attest.hpp"

#include "poh/hash.hpp"

namespace poh {

Hash256 HandshakeTranscript::digest() const {
    ByteWriter w;
    w.raw(client_hello_digest);
    w.raw(negotiated_params_digest);
    w.u32(resumption_count);
    return labeled_hash("poh/transcript/v1", {std::span(w.bytes())});
}

Bytes attestation_canonical_encode(const SessionAttestation& att) {
    if (att.issuer_id.empty() || att.issuer_id.size() > 256 ||
        att.key_id.empty() || att.key_id.size() > 256) {
        throw std::invalid_argument("issuer_id/key_id must be 1..256 bytes");
    }
    ByteWriter w;
    w.u8(att.version);
    w.var_string(att.issuer_id);
    w.var_string(att.key_id);
    w.raw(att.session_id);
    w.raw(att.transcript_binding);
    w.u64(att.issued_at);
    w.u64(att.expires_at);
    w.raw(att.challenge_nonce);
    w.u32(att.resumption_count);
    return w.take();
}

Bytes attestation_wire_encode(const SessionAttestation& att) {
    Bytes out = attestation_canonical_encode(att);
    out.insert(out.end(), att.signature.begin(), att.signature.end());
    return out;
}

std::optional<SessionAttestation> attestation_wire_decode(
    std::span<const std::uint8_t> wire) {
    ByteReader r(wire);
    SessionAttestation att;
    att.version = r.u8();
    if (!r.ok() || att.version != kAttestationVersion) return std::nullopt;
    auto issuer = r.var_string();
    auto key = r.var_string();
    if (!issuer || issuer->empty() || !key || key->empty()) return std::nullopt;
    att.issuer_id = *issuer;
    att.key_id = *key;
    if (!r.raw(att.session_id) || !r.raw(att.transcript_binding)) return std::nullopt;
    att.issued_at = r.u64();
    att.expires_at = r.u64();
    if (!r.raw(att.challenge_nonce)) return std::nullopt;
    att.resumption_count = r.u32();
    if (!r.ok() || !r.raw(att.signature) || !r.exhausted()) return std::nullopt;
    return att;
}

Hash256 transcript_binding_hash(const Key256& session_key,
                                const HandshakeTranscript& transcript) {
    Hash256 td = transcript.digest();
    return labeled_hash("poh/sess-bind/v1",
                        {std::span(session_key), std::span(td)});
}

AttestationAuthority::AttestationAuthority(Config config, const Key256& signing_seed,
                                           std::uint64_t nonce_seed)
    : config_(std::move(config)),
      sign_key_(Ed25519KeyPair::from_seed(signing_seed)),
      nonce_rng_(nonce_seed, "poh/attest-nonces") {}

Hash256 AttestationAuthority::attestation_id(const SessionAttestation& att) {
    Bytes canonical = attestation_canonical_encode(att);
    return labeled_hash("poh/attest-id/v1", {std::span(canonical)});
}

SessionAttestation AttestationAuthority::issue(const SessionId& session_id,
                                               const Key256& session_key,
                                               const HandshakeTranscript& transcript,
                                               Micros now) {
    SessionAttestation att;
    att.issuer_id = config_.issuer_id;
    att.key_id = config_.key_id;
    att.session_id = session_id;
    att.transcript_binding = transcript_binding_hash(session_key, transcript);
    att.issued_at = to_seconds(now);
    att.expires_at = att.issued_at + config_.lifetime;
    att.challenge_nonce = nonce_rng_.nonce16();
    att.resumption_count = transcript.resumption_count;
    att.signature = sign_key_.sign(attestation_canonical_encode(att));
    session_keys_[attestation_id(att)] = session_key;
    return att;
}

SessionAttestation AttestationAuthority::bind_session(
    const SessionContext& session, const HandshakeTranscript& transcript,
    Micros now) {
    if (session.expired(now)) throw SessionExpired();
    std::lock_guard lock(mutex_);
    return issue(session.session_id, session.session_key, transcript, now);
}

SessionAttestation AttestationAuthority::rotate_attestation(
    const SessionAttestation& old, const HandshakeTranscript& next, Micros now) {
    if (next.resumption_count != old.resumption_count + 1)
        throw BadResumptionCount();
    if (!sign_key_.public_key().verify(attestation_canonical_encode(old),
                                       old.signature)) {
        throw std::invalid_argument("old attestation does not verify");
    }

    std::lock_guard lock(mutex_);
    Hash256 id = attestation_id(old);
    if (superseded_.contains(id)) throw StaleAttestation();
    auto key_it = session_keys_.find(id);
    if (key_it == session_keys_.end()) throw StaleAttestation();

    Key256 session_key = key_it->second;
    superseded_.insert(id);
    session_keys_.erase(key_it);
    SessionAttestation fresh = issue(old.session_id, session_key, next, now);
    // Rotation must always advance the nonce.
    while (fresh.challenge_nonce == old.challenge_nonce) {
        fresh.challenge_nonce = nonce_rng_.nonce16();
        fresh.signature = sign_key_.sign(attestation_canonical_encode(fresh));
    }
    return fresh;
}

Verdict AttestationAuthority::verify(const SessionAttestation& att, Micros now) {
    Bytes canonical;
    try {
        canonical = attestation_canonical_encode(att);
    } catch (const std::invalid_argument&) {
        return Verdict::Unverifiable;
    }
    if (!sign_key_.public_key().verify(canonical, att.signature))
        return Verdict::InvalidSignature;

    Seconds now_s = to_seconds(now);
    {
        std::lock_guard lock(mutex_);
        if (superseded_.contains(attestation_id(att))) return Verdict::Expired;
    }
    if (now_s > att.expires_at) return Verdict::Expired;
    if (!nonce_cache_.check_and_insert(att.challenge_nonce, att.expires_at, now_s))
        return Verdict::Replayed;
    return Verdict::Verified;
}

Verdict AttestationAuthority::verify_with_context(
    const SessionAttestation& att, const SessionContext& session,
    const HandshakeTranscript& transcript, Micros now) {
    if (att.transcript_binding !=
        transcript_binding_hash(session.session_key, transcript)) {
        return Verdict::InvalidSignature;
    }
    return verify(att, now);
}

}  // namespace poh
