#include "poh/blind_rsa.hpp"

#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/evp.h>

#include <stdexcept>

#include "poh/hash.hpp"

namespace poh {

namespace {

struct BnDeleter {
    void operator()(BIGNUM* b) const { BN_clear_free(b); }
};
struct BnCtxDeleter {
    void operator()(BN_CTX* c) const { BN_CTX_free(c); }
};
using BnPtr = std::unique_ptr<BIGNUM, BnDeleter>;
using BnCtxPtr = std::unique_ptr<BN_CTX, BnCtxDeleter>;

BnPtr bn_from_bytes(std::span<const std::uint8_t> data) {
    BnPtr bn(BN_bin2bn(data.data(), static_cast<int>(data.size()), nullptr));
    if (!bn) throw std::runtime_error("BN_bin2bn failed");
    return bn;
}

Bytes bn_to_bytes(const BIGNUM* bn, std::size_t width) {
    Bytes out(width);
    if (BN_bn2binpad(bn, out.data(), static_cast<int>(width)) < 0)
        throw std::runtime_error("BN_bn2binpad failed");
    return out;
}

// Full-domain hash: SHA-256 expanded in counter mode to one byte less than
// the modulus width, so the value is always below n.
BnPtr fdh(std::span<const std::uint8_t> message, std::size_t modulus_width) {
    Bytes expanded;
    std::uint32_t counter = 0;
    while (expanded.size() < modulus_width - 1) {
        ByteWriter w;
        w.var_string("poh/blind-fdh/v1");
        w.u32(counter++);
        w.var_bytes(message);
        Hash256 h = sha256(w.bytes());
        expanded.insert(expanded.end(), h.begin(), h.end());
    }
    expanded.resize(modulus_width - 1);
    return bn_from_bytes(expanded);
}

}  // namespace

struct BlindIssuer::Impl {
    BnPtr n;
    BnPtr e;
    BnPtr d;
    std::size_t width = 0;
};

BlindIssuer::BlindIssuer() : impl_(std::make_unique<Impl>()) {}
BlindIssuer::BlindIssuer(BlindIssuer&&) noexcept = default;
BlindIssuer& BlindIssuer::operator=(BlindIssuer&&) noexcept = default;
BlindIssuer::~BlindIssuer() = default;

BlindIssuer BlindIssuer::generate(int bits) {
    EVP_PKEY* raw = EVP_PKEY_Q_keygen(nullptr, nullptr, "RSA",
                                      static_cast<std::size_t>(bits));
    if (!raw) throw std::runtime_error("RSA keygen failed");
    std::unique_ptr<EVP_PKEY, decltype(&EVP_PKEY_free)> pkey(raw, EVP_PKEY_free);

    BlindIssuer issuer;
    BIGNUM* n = nullptr;
    BIGNUM* e = nullptr;
    BIGNUM* d = nullptr;
    if (EVP_PKEY_get_bn_param(pkey.get(), OSSL_PKEY_PARAM_RSA_N, &n) != 1 ||
        EVP_PKEY_get_bn_param(pkey.get(), OSSL_PKEY_PARAM_RSA_E, &e) != 1 ||
        EVP_PKEY_get_bn_param(pkey.get(), OSSL_PKEY_PARAM_RSA_D, &d) != 1) {
        throw std::runtime_error("RSA parameter extraction failed");
    }
    issuer.impl_->n.reset(n);
    issuer.impl_->e.reset(e);
    issuer.impl_->d.reset(d);
    issuer.impl_->width = static_cast<std::size_t>(BN_num_bytes(n));
    return issuer;
}

Bytes BlindIssuer::blind_sign(std::span<const std::uint8_t> blinded_message) const {
    if (blinded_message.empty() || blinded_message.size() > impl_->width)
        throw std::invalid_argument("blinded message has wrong width");
    BnCtxPtr ctx(BN_CTX_new());
    BnPtr m = bn_from_bytes(blinded_message);
    if (BN_cmp(m.get(), impl_->n.get()) >= 0)
        throw std::invalid_argument("blinded message out of range");
    BnPtr s(BN_new());
    if (!s || BN_mod_exp(s.get(), m.get(), impl_->d.get(), impl_->n.get(),
                         ctx.get()) != 1) {
        throw std::runtime_error("blind sign exponentiation failed");
    }
    return bn_to_bytes(s.get(), impl_->width);
}

BlindPublicKey BlindIssuer::public_key() const {
    BlindPublicKey pk;
    pk.modulus = bn_to_bytes(impl_->n.get(), impl_->width);
    pk.exponent = bn_to_bytes(impl_->e.get(),
                              static_cast<std::size_t>(BN_num_bytes(impl_->e.get())));
    return pk;
}

BlindRequest blind_request(std::span<const std::uint8_t> message,
                           const BlindPublicKey& pk, DeterministicRng& rng) {
    BnCtxPtr ctx(BN_CTX_new());
    BnPtr n = bn_from_bytes(pk.modulus);
    BnPtr e = bn_from_bytes(pk.exponent);
    std::size_t width = pk.modulus.size();

    BnPtr m = fdh(message, width);

    // r uniform in [2, n), coprime to n.
    BnPtr r(BN_new());
    BnPtr gcd(BN_new());
    for (;;) {
        Bytes rb = rng.bytes(width - 1);
        BnPtr cand = bn_from_bytes(rb);
        if (BN_cmp(cand.get(), BN_value_one()) <= 0) continue;
        if (BN_gcd(gcd.get(), cand.get(), n.get(), ctx.get()) != 1) continue;
        if (!BN_is_one(gcd.get())) continue;
        r = std::move(cand);
        break;
    }

    // blinded = m * r^e mod n
    BnPtr re(BN_new());
    BnPtr blinded(BN_new());
    if (BN_mod_exp(re.get(), r.get(), e.get(), n.get(), ctx.get()) != 1 ||
        BN_mod_mul(blinded.get(), m.get(), re.get(), n.get(), ctx.get()) != 1) {
        throw std::runtime_error("blinding failed");
    }

    BlindRequest req;
    req.blinded_message = bn_to_bytes(blinded.get(), width);
    req.secret.r = bn_to_bytes(r.get(), width);
    req.secret.modulus = pk.modulus;
    return req;
}

Bytes unblind(std::span<const std::uint8_t> blinded_signature,
              const UnblindingSecret& secret) {
    BnCtxPtr ctx(BN_CTX_new());
    BnPtr n = bn_from_bytes(secret.modulus);
    BnPtr r = bn_from_bytes(secret.r);
    BnPtr s = bn_from_bytes(blinded_signature);

    BnPtr r_inv(BN_mod_inverse(nullptr, r.get(), n.get(), ctx.get()));
    if (!r_inv) throw std::runtime_error("unblinding inverse failed");
    BnPtr sig(BN_new());
    if (BN_mod_mul(sig.get(), s.get(), r_inv.get(), n.get(), ctx.get()) != 1)
        throw std::runtime_error("unblinding failed");
    return bn_to_bytes(sig.get(), secret.modulus.size());
}

bool blind_verify(std::span<const std::uint8_t> message,
                  std::span<const std::uint8_t> signature,
                  const BlindPublicKey& pk) {
    if (signature.size() != pk.modulus.size()) return false;
    BnCtxPtr ctx(BN_CTX_new());
    BnPtr n = bn_from_bytes(pk.modulus);
    BnPtr e = bn_from_bytes(pk.exponent);
    BnPtr s = bn_from_bytes(signature);
    if (BN_cmp(s.get(), n.get()) >= 0) return false;

    BnPtr recovered(BN_new());
    if (BN_mod_exp(recovered.get(), s.get(), e.get(), n.get(), ctx.get()) != 1)
        return false;
    BnPtr expected = fdh(message, pk.modulus.size());
    return BN_cmp(recovered.get(), expected.get()) == 0;
}

}  // namespace poh
