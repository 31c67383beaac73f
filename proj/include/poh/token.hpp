#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

#include "poh/blind_rsa.hpp"
#include "poh/bytes.hpp"
#include "poh/clock.hpp"
#include "poh/identity_core.hpp"
#include "poh/rng.hpp"
#include "poh/signature.hpp"

namespace poh {

enum class Verdict { Verified, Expired, InvalidSignature, Replayed, Unverifiable };

std::string to_string(Verdict v);
std::optional<Verdict> verdict_from_string(const std::string& s);

enum class TokenMode : std::uint8_t { Plain = 0, Blinded = 1 };

constexpr std::uint8_t kTokenVersion = 1;
constexpr Seconds kMaxTokenLifetime = 300;

struct SessionExpired : std::runtime_error {
    SessionExpired() : std::runtime_error("session expired") {}
};
struct LifetimeTooLong : std::runtime_error {
    LifetimeTooLong() : std::runtime_error("requested lifetime exceeds maximum") {}
};
struct NotBlindCapable : std::runtime_error {
    NotBlindCapable() : std::runtime_error("issuer key is not blind-capable") {}
};

// The canonical PoH token; see docs/token_wire_format.md.
struct ProvenanceToken {
    std::uint8_t version = kTokenVersion;
    std::string issuer_id;
    std::string key_id;
    Hash256 subject_attestation{};
    Nonce16 session_nonce{};
    Seconds issued_at = 0;
    Seconds expires_at = 0;
    TokenMode mode = TokenMode::Plain;
    Signature signature{};
};

// Deterministic length-prefixed encoding of everything the signature covers.
Bytes canonical_encode(const ProvenanceToken& token);
// canonical bytes ‖ signature.
Bytes wire_encode(const ProvenanceToken& token);
// Strict structural decode; nullopt on any malformation (wrong version,
// bad length prefixes, truncation, trailing bytes).
std::optional<ProvenanceToken> wire_decode(std::span<const std::uint8_t> wire);

Hash256 subject_attestation_for_session(const SessionContext& session);

// Nonce store with TTL eviction. check_and_insert is one atomic step so a
// nonce can never be accepted twice under concurrent verification.
class ReplayCache {
public:
    // True if the nonce was fresh (and is now recorded until expires_at).
    bool check_and_insert(const Nonce16& nonce, Seconds expires_at, Seconds now);
    bool contains(const Nonce16& nonce, Seconds now) const;
    std::size_t size() const;

private:
    mutable std::mutex mutex_;
    std::map<Nonce16, Seconds> entries_;  // nonce -> expiry
};

// Issuer-side key material. The Ed25519 signing key and the RSA blind-signing
// key never serialize into tokens or responses.
class TokenIssuer {
public:
    struct Config {
        std::string issuer_id = "telco-01";
        std::string key_id = "ed25519-k1";
        Seconds max_lifetime = kMaxTokenLifetime;
        bool blind_capable = false;
    };

    TokenIssuer(Config config, const Key256& signing_seed,
                std::uint64_t nonce_seed, AuditLog* audit = nullptr);

    ProvenanceToken issue(const SessionContext& session, Micros now,
                          Seconds lifetime);
    // Blind mode: the subject attestation commits to the caller's blinded
    // message; the token itself carries no session identifiers.
    ProvenanceToken issue_blinded(std::span<const std::uint8_t> blinded_message,
                                  Micros now, Seconds lifetime);
    // Chaumian credential half of blind issuance.
    Bytes blind_sign(std::span<const std::uint8_t> blinded_message) const;

    Ed25519PublicKey public_key() const { return sign_key_.public_key(); }
    BlindPublicKey blind_public_key() const;
    const Config& config() const { return config_; }

private:
    ProvenanceToken issue_common(const Hash256& attestation, TokenMode mode,
                                 Micros now, Seconds lifetime);

    Config config_;
    Ed25519KeyPair sign_key_;
    std::optional<BlindIssuer> blind_key_;
    AuditLog* audit_;
    mutable std::mutex mutex_;
    DeterministicRng nonce_rng_;
};

// Full verdict lattice over raw wire bytes. Precedence:
// Unverifiable > InvalidSignature > Expired > Replayed > Verified.
// On Verified the nonce is recorded in the replay cache until token expiry.
Verdict verify_token(std::span<const std::uint8_t> wire,
                     const Ed25519PublicKey& issuer_key, Micros now,
                     ReplayCache& replay_cache);

// key_id -> verification key. Unknown key ids are Unverifiable.
// Copyable so the edge and the API can each hold a populated store.
class KeyStore {
public:
    KeyStore() = default;
    KeyStore(const KeyStore& other);
    KeyStore& operator=(const KeyStore& other);

    void add(const std::string& key_id, const Ed25519PublicKey& key);
    std::optional<Ed25519PublicKey> find(const std::string& key_id) const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, Ed25519PublicKey> keys_;
};

Verdict verify_token_with_store(std::span<const std::uint8_t> wire,
                                const KeyStore& keys, Micros now,
                                ReplayCache& replay_cache);

}  // namespace poh
