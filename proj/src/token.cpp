#include "poh/token.hpp"

#include "poh/hash.hpp"

namespace poh {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Verified: return "Verified";
        case Verdict::Expired: return "Expired";
        case Verdict::InvalidSignature: return "InvalidSignature";
        case Verdict::Replayed: return "Replayed";
        case Verdict::Unverifiable: return "Unverifiable";
    }
    return "?";
}

std::optional<Verdict> verdict_from_string(const std::string& s) {
    if (s == "Verified") return Verdict::Verified;
    if (s == "Expired") return Verdict::Expired;
    if (s == "InvalidSignature") return Verdict::InvalidSignature;
    if (s == "Replayed") return Verdict::Replayed;
    if (s == "Unverifiable") return Verdict::Unverifiable;
    return std::nullopt;
}

Bytes canonical_encode(const ProvenanceToken& token) {
    if (token.issuer_id.empty() || token.issuer_id.size() > 256 ||
        token.key_id.empty() || token.key_id.size() > 256) {
        throw std::invalid_argument("issuer_id/key_id must be 1..256 bytes");
    }
    ByteWriter w;
    w.u8(token.version);
    w.var_string(token.issuer_id);
    w.var_string(token.key_id);
    w.raw(token.subject_attestation);
    w.raw(token.session_nonce);
    w.u64(token.issued_at);
    w.u64(token.expires_at);
    w.u8(static_cast<std::uint8_t>(token.mode));
    return w.take();
}

Bytes wire_encode(const ProvenanceToken& token) {
    Bytes out = canonical_encode(token);
    out.insert(out.end(), token.signature.begin(), token.signature.end());
    return out;
}

std::optional<ProvenanceToken> wire_decode(std::span<const std::uint8_t> wire) {
    ByteReader r(wire);
    ProvenanceToken t;
    t.version = r.u8();
    if (!r.ok() || t.version != kTokenVersion) return std::nullopt;
    auto issuer = r.var_string();
    auto key = r.var_string();
    if (!issuer || issuer->empty() || !key || key->empty()) return std::nullopt;
    t.issuer_id = *issuer;
    t.key_id = *key;
    if (!r.raw(t.subject_attestation) || !r.raw(t.session_nonce)) return std::nullopt;
    t.issued_at = r.u64();
    t.expires_at = r.u64();
    std::uint8_t mode = r.u8();
    if (!r.ok() || mode > 1) return std::nullopt;
    t.mode = static_cast<TokenMode>(mode);
    if (!r.raw(t.signature)) return std::nullopt;
    if (!r.exhausted()) return std::nullopt;
    return t;
}

Hash256 subject_attestation_for_session(const SessionContext& session) {
    return labeled_hash("poh/attest/v1",
                        {std::span(session.session_key), std::span(session.session_id)});
}

bool ReplayCache::check_and_insert(const Nonce16& nonce, Seconds expires_at,
                                   Seconds now) {
    std::lock_guard lock(mutex_);
    // Lazy eviction keeps the map bounded by live tokens.
    std::erase_if(entries_, [now](const auto& kv) { return kv.second < now; });
    auto [it, inserted] = entries_.try_emplace(nonce, expires_at);
    if (!inserted) return false;
    return true;
}

bool ReplayCache::contains(const Nonce16& nonce, Seconds now) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(nonce);
    return it != entries_.end() && it->second >= now;
}

std::size_t ReplayCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

TokenIssuer::TokenIssuer(Config config, const Key256& signing_seed,
                         std::uint64_t nonce_seed, AuditLog* audit)
    : config_(std::move(config)),
      sign_key_(Ed25519KeyPair::from_seed(signing_seed)),
      audit_(audit),
      nonce_rng_(nonce_seed, "poh/issuer-nonces") {
    if (config_.blind_capable) blind_key_ = BlindIssuer::generate();
}

ProvenanceToken TokenIssuer::issue_common(const Hash256& attestation,
                                          TokenMode mode, Micros now,
                                          Seconds lifetime) {
    if (lifetime > config_.max_lifetime) throw LifetimeTooLong();

    ProvenanceToken token;
    token.issuer_id = config_.issuer_id;
    token.key_id = config_.key_id;
    token.subject_attestation = attestation;
    token.issued_at = to_seconds(now);
    token.expires_at = token.issued_at + lifetime;
    token.mode = mode;
    {
        std::lock_guard lock(mutex_);
        token.session_nonce = nonce_rng_.nonce16();
    }
    token.signature = sign_key_.sign(canonical_encode(token));
    if (audit_)
        audit_->append("issue", to_hex(token.session_nonce),
                       mode == TokenMode::Plain ? "Plain" : "Blinded", now);
    return token;
}

ProvenanceToken TokenIssuer::issue(const SessionContext& session, Micros now,
                                   Seconds lifetime) {
    if (session.expired(now)) throw SessionExpired();
    return issue_common(subject_attestation_for_session(session),
                        TokenMode::Plain, now, lifetime);
}

ProvenanceToken TokenIssuer::issue_blinded(
    std::span<const std::uint8_t> blinded_message, Micros now, Seconds lifetime) {
    if (!config_.blind_capable) throw NotBlindCapable();
    Hash256 tag = labeled_hash("poh/blind-tag/v1", {blinded_message});
    return issue_common(tag, TokenMode::Blinded, now, lifetime);
}

Bytes TokenIssuer::blind_sign(std::span<const std::uint8_t> blinded_message) const {
    if (!blind_key_) throw NotBlindCapable();
    return blind_key_->blind_sign(blinded_message);
}

BlindPublicKey TokenIssuer::blind_public_key() const {
    if (!blind_key_) throw NotBlindCapable();
    return blind_key_->public_key();
}

Verdict verify_token(std::span<const std::uint8_t> wire,
                     const Ed25519PublicKey& issuer_key, Micros now,
                     ReplayCache& replay_cache) {
    auto token = wire_decode(wire);
    if (!token) return Verdict::Unverifiable;

    Bytes canonical(wire.begin(), wire.end() - kSignatureSize);
    if (!issuer_key.verify(canonical, token->signature))
        return Verdict::InvalidSignature;

    Seconds now_s = to_seconds(now);
    if (now_s > token->expires_at) return Verdict::Expired;

    if (!replay_cache.check_and_insert(token->session_nonce, token->expires_at,
                                       now_s)) {
        return Verdict::Replayed;
    }
    return Verdict::Verified;
}

KeyStore::KeyStore(const KeyStore& other) {
    std::lock_guard lock(other.mutex_);
    keys_ = other.keys_;
}

KeyStore& KeyStore::operator=(const KeyStore& other) {
    if (this == &other) return *this;
    std::scoped_lock lock(mutex_, other.mutex_);
    keys_ = other.keys_;
    return *this;
}

void KeyStore::add(const std::string& key_id, const Ed25519PublicKey& key) {
    std::lock_guard lock(mutex_);
    keys_[key_id] = key;
}

std::optional<Ed25519PublicKey> KeyStore::find(const std::string& key_id) const {
    std::lock_guard lock(mutex_);
    auto it = keys_.find(key_id);
    if (it == keys_.end()) return std::nullopt;
    return it->second;
}

Verdict verify_token_with_store(std::span<const std::uint8_t> wire,
                                const KeyStore& keys, Micros now,
                                ReplayCache& replay_cache) {
    auto token = wire_decode(wire);
    if (!token) return Verdict::Unverifiable;
    auto key = keys.find(token->key_id);
    if (!key) return Verdict::Unverifiable;
    return verify_token(wire, *key, now, replay_cache);
}

}  // namespace poh
