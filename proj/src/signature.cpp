#include "poh/signature.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace poh {

namespace {

struct PkeyDeleter {
    void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

PkeyPtr private_from_seed(const Key256& seed) {
    PkeyPtr key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr,
                                             seed.data(), seed.size()));
    if (!key) throw std::runtime_error("ed25519 private key construction failed");
    return key;
}

}  // namespace

Ed25519KeyPair Ed25519KeyPair::from_seed(const Key256& seed) {
    Ed25519KeyPair kp;
    kp.seed_ = seed;
    auto key = private_from_seed(seed);
    std::size_t len = kp.public_raw_.size();
    if (EVP_PKEY_get_raw_public_key(key.get(), kp.public_raw_.data(), &len) != 1 ||
        len != kp.public_raw_.size()) {
        throw std::runtime_error("ed25519 public key extraction failed");
    }
    return kp;
}

Signature Ed25519KeyPair::sign(std::span<const std::uint8_t> message) const {
    auto key = private_from_seed(seed_);
    MdCtxPtr ctx(EVP_MD_CTX_new());
    if (!ctx ||
        EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1) {
        throw std::runtime_error("ed25519 sign init failed");
    }
    Signature sig{};
    std::size_t len = sig.size();
    if (EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(),
                       message.size()) != 1 ||
        len != sig.size()) {
        throw std::runtime_error("ed25519 sign failed");
    }
    return sig;
}

bool Ed25519PublicKey::verify(std::span<const std::uint8_t> message,
                              const Signature& sig) const {
    PkeyPtr key(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr,
                                            raw_.data(), raw_.size()));
    if (!key) return false;
    MdCtxPtr ctx(EVP_MD_CTX_new());
    if (!ctx ||
        EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, key.get()) != 1) {
        return false;
    }
    return EVP_DigestVerify(ctx.get(), sig.data(), sig.size(), message.data(),
                            message.size()) == 1;
}

}  // namespace poh
