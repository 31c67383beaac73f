#include <catch2/catch_amalgamated.hpp>

#include "poh/hash.hpp"
#include "poh/merkle.hpp"
#include "poh/rng.hpp"

using namespace poh;

namespace {

// Independent recomputation from raw hash calls, no ProvenanceChain involved.
Hash256 raw_leaf(const Bytes& data) {
    Bytes buf = to_bytes("poh/leaf");
    buf.insert(buf.end(), data.begin(), data.end());
    return sha256(buf);
}

Hash256 raw_node(const Hash256& l, const Hash256& r) {
    Bytes buf = to_bytes("poh/node");
    buf.insert(buf.end(), l.begin(), l.end());
    buf.insert(buf.end(), r.begin(), r.end());
    return sha256(buf);
}

Bytes token_bytes(int i) {
    Bytes b = to_bytes("token-");
    b.push_back(static_cast<std::uint8_t>(i));
    return b;
}

}  // namespace

TEST_CASE("single leaf chain root equals the leaf hash") {
    ProvenanceChain chain;
    chain.append(token_bytes(0));
    REQUIRE(chain.root() == raw_leaf(token_bytes(0)));
}

TEST_CASE("empty chain has the zero root") {
    ProvenanceChain chain;
    REQUIRE(chain.root() == Hash256{});
}

TEST_CASE("four leaf root matches brute-force recomputation") {
    ProvenanceChain chain;
    for (int i = 0; i < 4; ++i) chain.append(token_bytes(i));

    Hash256 l0 = raw_leaf(token_bytes(0));
    Hash256 l1 = raw_leaf(token_bytes(1));
    Hash256 l2 = raw_leaf(token_bytes(2));
    Hash256 l3 = raw_leaf(token_bytes(3));
    Hash256 expected = raw_node(raw_node(l0, l1), raw_node(l2, l3));
    REQUIRE(chain.root() == expected);
}

TEST_CASE("odd leaf counts promote the trailing node") {
    ProvenanceChain chain;
    for (int i = 0; i < 3; ++i) chain.append(token_bytes(i));
    Hash256 l0 = raw_leaf(token_bytes(0));
    Hash256 l1 = raw_leaf(token_bytes(1));
    Hash256 l2 = raw_leaf(token_bytes(2));
    REQUIRE(chain.root() == raw_node(raw_node(l0, l1), l2));
}

TEST_CASE("mutating any leaf changes the root") {
    ProvenanceChain chain;
    for (int i = 0; i < 4; ++i) chain.append(token_bytes(i));
    Hash256 original = chain.root();

    ProvenanceChain mutated;
    mutated.append(token_bytes(0));
    mutated.append(token_bytes(1));
    mutated.append(token_bytes(9));  // leaf 2 replaced
    mutated.append(token_bytes(3));
    REQUIRE(mutated.root() != original);
}

TEST_CASE("permuting distinct leaves changes the root") {
    ProvenanceChain a, b;
    for (int i = 0; i < 6; ++i) a.append(token_bytes(i));
    for (int i : {1, 0, 2, 3, 4, 5}) b.append(token_bytes(i));
    REQUIRE(a.root() != b.root());
}

TEST_CASE("all inclusion proofs verify for chains of 1 to 64 leaves") {
    for (std::size_t n = 1; n <= 64; ++n) {
        ProvenanceChain chain;
        for (std::size_t i = 0; i < n; ++i)
            chain.append(token_bytes(static_cast<int>(i)));
        Hash256 root = chain.root();
        for (std::size_t i = 0; i < n; ++i) {
            InclusionProof proof = chain.prove(i);
            REQUIRE(ProvenanceChain::verify(root, chain.leaves()[i], proof));
        }
    }
}

TEST_CASE("proofs fail for the wrong leaf") {
    ProvenanceChain chain;
    for (int i = 0; i < 8; ++i) chain.append(token_bytes(i));
    InclusionProof proof = chain.prove(3);
    REQUIRE_FALSE(
        ProvenanceChain::verify(chain.root(), chain.leaves()[4], proof));
}

TEST_CASE("prove rejects out-of-range indices") {
    ProvenanceChain chain;
    chain.append(token_bytes(0));
    REQUIRE_THROWS_AS(chain.prove(1), IndexOutOfRange);
}

TEST_CASE("randomized proof corruption never falsely accepts") {
    DeterministicRng rng(77, "merkle-corrupt");
    ProvenanceChain chain;
    for (int i = 0; i < 21; ++i) chain.append(token_bytes(i));
    Hash256 root = chain.root();

    int false_accepts = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t idx = rng.uniform_u64(chain.size());
        InclusionProof proof = chain.prove(idx);
        Hash256 leaf = chain.leaves()[idx];

        // Corrupt one random byte of the proof, the leaf, or the root.
        std::uint8_t flip = static_cast<std::uint8_t>(1 + rng.uniform_u64(255));
        switch (rng.uniform_u64(3)) {
            case 0: {
                if (proof.elements.empty()) continue;
                auto& elem = proof.elements[rng.uniform_u64(proof.elements.size())];
                elem.sibling[rng.uniform_u64(32)] ^= flip;
                if (ProvenanceChain::verify(root, leaf, proof)) ++false_accepts;
                break;
            }
            case 1: {
                Hash256 bad_leaf = leaf;
                bad_leaf[rng.uniform_u64(32)] ^= flip;
                if (ProvenanceChain::verify(root, bad_leaf, proof)) ++false_accepts;
                break;
            }
            default: {
                Hash256 bad_root = root;
                bad_root[rng.uniform_u64(32)] ^= flip;
                if (ProvenanceChain::verify(bad_root, leaf, proof)) ++false_accepts;
                break;
            }
        }
    }
    REQUIRE(false_accepts == 0);
}
