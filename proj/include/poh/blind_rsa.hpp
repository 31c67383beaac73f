#pragma once

#include <memory>

#include "poh/bytes.hpp"
#include "poh/rng.hpp"

namespace poh {

// Chaum blind signatures over RSA with a full-domain hash. The issuer signs a
// blinded value m·r^e mod n and never sees the message; unblinding divides out
// r, leaving an ordinary FDH-RSA signature on the message.

struct BlindPublicKey {
    Bytes modulus;    // n, big-endian
    Bytes exponent;   // e, big-endian
};

// Client-held unblinding state. Discarding it severs the only link between
// the issuance transcript and the final (message, signature) pair.
struct UnblindingSecret {
    Bytes r;
    Bytes modulus;
};

struct BlindRequest {
    Bytes blinded_message;
    UnblindingSecret secret;
};

class BlindIssuer {
public:
    static BlindIssuer generate(int bits = 2048);

    BlindIssuer(BlindIssuer&&) noexcept;
    BlindIssuer& operator=(BlindIssuer&&) noexcept;
    ~BlindIssuer();

    Bytes blind_sign(std::span<const std::uint8_t> blinded_message) const;
    BlindPublicKey public_key() const;

private:
    BlindIssuer();
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

BlindRequest blind_request(std::span<const std::uint8_t> message,
                           const BlindPublicKey& pk, DeterministicRng& rng);

Bytes unblind(std::span<const std::uint8_t> blinded_signature,
              const UnblindingSecret& secret);

bool blind_verify(std::span<const std::uint8_t> message,
                  std::span<const std::uint8_t> signature,
                  const BlindPublicKey& pk);

}  // namespace poh
