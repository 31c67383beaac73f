#pragma once

#include <memory>
#include <string>

#include "poh/bytes.hpp"

namespace poh {

constexpr std::size_t kSignatureSize = 64;
using Signature = std::array<std::uint8_t, kSignatureSize>;

// Ed25519 public half; copyable value type, safe to hand to verifiers.
class Ed25519PublicKey {
public:
    Ed25519PublicKey() = default;
    explicit Ed25519PublicKey(const Key256& raw) : raw_(raw) {}

    bool verify(std::span<const std::uint8_t> message, const Signature& sig) const;
    const Key256& raw() const { return raw_; }

private:
    Key256 raw_{};
};

// Ed25519 keypair. The secret half never leaves this object; tokens and API
// responses carry only signatures and the raw public key.
class Ed25519KeyPair {
public:
    // Deterministic from a 32-byte seed.
    static Ed25519KeyPair from_seed(const Key256& seed);

    Signature sign(std::span<const std::uint8_t> message) const;
    Ed25519PublicKey public_key() const { return Ed25519PublicKey(public_raw_); }

private:
    Ed25519KeyPair() = default;
    Key256 seed_{};
    Key256 public_raw_{};
};

}  // namespace poh
