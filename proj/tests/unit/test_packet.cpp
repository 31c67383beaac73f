#include <catch2/catch_amalgamated.hpp>

#include "poh/packet.hpp"

using namespace poh;

namespace {

constexpr Micros kBase = 1'755'000'000ULL * kMicrosPerSecond;

struct PlaneFixture {
    Key256 seed{};
    TokenIssuer issuer;
    SessionContext session;
    DeterministicRng rng{1, "plane"};

    PlaneFixture() : issuer(make_issuer()), session(make_session()) {}

    TokenIssuer make_issuer() {
        seed.fill(0x42);
        return TokenIssuer({.issuer_id = "telco-eu-01", .key_id = "ed25519-k1"},
                           seed, 99);
    }

    static SessionContext make_session() {
        SessionContext s;
        s.session_id.fill(0x31);
        s.subscriber_id = "imsi-001";
        s.session_key.fill(0x55);
        s.established_at = kBase;
        s.expires_at = kBase + 3600 * kMicrosPerSecond;
        s.auth_nonce.fill(0x77);
        return s;
    }

    SimPacket make_packet(std::uint64_t seq = 0) const {
        SimPacket p;
        p.flow_id = {"10.0.0.1", "203.0.113.5", 40000, 443, 17};
        p.seq = seq;
        p.sent_at = kBase;
        p.payload_len = 1200;
        p.payload = std::make_shared<PoisonedPayloadSource>();
        return p;
    }

    Bytes fresh_wire() {
        return wire_encode(issuer.issue(session, kBase, 300));
    }

    std::vector<HopNode> honest_path(std::size_t n) const {
        std::vector<HopNode> path;
        for (std::size_t i = 0; i < n; ++i)
            path.push_back({"hop-" + std::to_string(i), HopBehavior::Honest, 500, 0,
                            nullptr, nullptr});
        return path;
    }
};

}  // namespace

TEST_CASE("token injection round trips and leaves other fields alone") {
    PlaneFixture fx;
    SimPacket packet = fx.make_packet();
    Bytes wire = fx.fresh_wire();

    SimPacket with_token = inject_token(packet, wire);
    REQUIRE(with_token.payload_len == packet.payload_len);
    REQUIRE(with_token.seq == packet.seq);
    REQUIRE(with_token.flow_id == packet.flow_id);

    ExtractResult extracted = extract_token(with_token);
    REQUIRE(extracted.status == ExtractStatus::Present);
    REQUIRE(extracted.token == wire);

    REQUIRE_THROWS_AS(inject_token(with_token, wire), HeaderOccupied);
}

TEST_CASE("extract distinguishes absent and corrupt headers") {
    PlaneFixture fx;
    SimPacket bare = fx.make_packet();
    REQUIRE(extract_token(bare).status == ExtractStatus::Absent);

    Bytes wire = fx.fresh_wire();
    Bytes truncated(wire.begin(), wire.begin() + wire.size() / 2);
    SimPacket corrupt = inject_token(bare, truncated);
    REQUIRE(extract_token(corrupt).status == ExtractStatus::Corrupt);
}

TEST_CASE("encapsulation round trips and preserves the header") {
    PlaneFixture fx;
    SimPacket packet = inject_token(fx.make_packet(), fx.fresh_wire());

    SimPacket tunneled = encapsulate(packet, "gtp-7");
    REQUIRE(tunneled.encapsulation == "gtp-7");
    REQUIRE_THROWS_AS(encapsulate(tunneled, "gtp-8"), AlreadyEncapsulated);

    SimPacket back = decapsulate(tunneled);
    REQUIRE_FALSE(back.encapsulation.has_value());
    REQUIRE(back.ext_header == packet.ext_header);
    REQUIRE(extract_token(back).status == ExtractStatus::Present);

    REQUIRE_THROWS_AS(decapsulate(back), NotEncapsulated);
}

TEST_CASE("honest multi-hop traversal is byte-identical") {
    PlaneFixture fx;
    Bytes wire = fx.fresh_wire();
    SimPacket packet = inject_token(fx.make_packet(), wire);

    auto path = fx.honest_path(5);
    ForwardResult res = forward_path(packet, path, fx.rng);
    REQUIRE(res.trace.size() == 5);
    REQUIRE(res.delivered.ext_header == wire);
    REQUIRE(res.delivered.sent_at == packet.sent_at + 5 * 500);
    for (const HopTrace& t : res.trace) REQUIRE(t.header_state != "absent");
}

TEST_CASE("honest paths of any length preserve the egress verdict") {
    PlaneFixture fx;
    Ed25519PublicKey pk = fx.issuer.public_key();
    for (std::size_t hops = 1; hops <= 32; ++hops) {
        Bytes wire = fx.fresh_wire();
        SimPacket packet = inject_token(fx.make_packet(), wire);
        ForwardResult res = forward_path(packet, fx.honest_path(hops), fx.rng);

        ReplayCache direct_cache, egress_cache;
        Verdict direct = verify_token(wire, pk, kBase, direct_cache);
        ExtractResult ex = extract_token(res.delivered);
        REQUIRE(ex.status == ExtractStatus::Present);
        Verdict at_egress = verify_token(ex.token, pk, kBase, egress_cache);
        REQUIRE(at_egress == direct);
        REQUIRE(at_egress == Verdict::Verified);
    }
}

TEST_CASE("strip hop removes the header") {
    PlaneFixture fx;
    SimPacket packet = inject_token(fx.make_packet(), fx.fresh_wire());
    std::vector<HopNode> path = fx.honest_path(3);
    path[1].behavior = HopBehavior::Strip;

    ForwardResult res = forward_path(packet, path, fx.rng);
    REQUIRE(extract_token(res.delivered).status == ExtractStatus::Absent);
    REQUIRE(res.trace[0].header_state != "absent");
    REQUIRE(res.trace[1].header_state == "absent");
}

TEST_CASE("tampered signature yields InvalidSignature at egress") {
    PlaneFixture fx;
    SimPacket packet = inject_token(fx.make_packet(), fx.fresh_wire());
    std::vector<HopNode> path = fx.honest_path(3);
    path[2].behavior = HopBehavior::TamperSignature;

    ForwardResult res = forward_path(packet, path, fx.rng);
    ExtractResult ex = extract_token(res.delivered);
    REQUIRE(ex.status == ExtractStatus::Present);
    ReplayCache cache;
    REQUIRE(verify_token(ex.token, fx.issuer.public_key(), kBase, cache) ==
            Verdict::InvalidSignature);
}

TEST_CASE("tampered timestamp breaks the signature binding") {
    PlaneFixture fx;
    Bytes wire = fx.fresh_wire();
    SimPacket packet = inject_token(fx.make_packet(), wire);
    std::vector<HopNode> path = fx.honest_path(2);
    path[0].behavior = HopBehavior::TamperTimestamp;

    ForwardResult res = forward_path(packet, path, fx.rng);
    ExtractResult ex = extract_token(res.delivered);
    REQUIRE(ex.status == ExtractStatus::Present);
    auto shifted = wire_decode(ex.token);
    auto original = wire_decode(wire);
    REQUIRE(shifted->issued_at == original->issued_at + 3600);

    ReplayCache cache;
    REQUIRE(verify_token(ex.token, fx.issuer.public_key(), kBase, cache) ==
            Verdict::InvalidSignature);
}

TEST_CASE("injector with unknown key id is Unverifiable, colliding key id is InvalidSignature") {
    PlaneFixture fx;
    KeyStore store;
    store.add("ed25519-k1", fx.issuer.public_key());

    SECTION("unknown key id") {
        std::vector<HopNode> path = fx.honest_path(2);
        path[1].behavior = HopBehavior::Injector;
        path[1].rogue_issuer = make_rogue_issuer(1337);
        ForwardResult res = forward_path(fx.make_packet(), path, fx.rng);
        ExtractResult ex = extract_token(res.delivered);
        REQUIRE(ex.status == ExtractStatus::Present);
        ReplayCache cache;
        REQUIRE(verify_token_with_store(ex.token, store, kBase, cache) ==
                Verdict::Unverifiable);
    }
    SECTION("colliding key id resolves to the wrong key") {
        std::vector<HopNode> path = fx.honest_path(2);
        path[1].behavior = HopBehavior::Injector;
        path[1].rogue_issuer = make_rogue_issuer(1337, "ed25519-k1");
        ForwardResult res = forward_path(fx.make_packet(), path, fx.rng);
        ExtractResult ex = extract_token(res.delivered);
        REQUIRE(ex.status == ExtractStatus::Present);
        ReplayCache cache;
        REQUIRE(verify_token_with_store(ex.token, store, kBase, cache) ==
                Verdict::InvalidSignature);
    }
}

TEST_CASE("replay recorder captures header bytes for re-injection") {
    PlaneFixture fx;
    Bytes wire = fx.fresh_wire();
    SimPacket packet = inject_token(fx.make_packet(), wire);
    std::vector<HopNode> path = fx.honest_path(3);
    path[1].behavior = HopBehavior::ReplayRecorder;
    path[1].stash = std::make_shared<ReplayStash>();

    ForwardResult res = forward_path(packet, path, fx.rng);
    REQUIRE(res.delivered.ext_header == wire);  // recording is passive
    REQUIRE(path[1].stash->captured.size() == 1);
    REQUIRE(path[1].stash->captured[0] == wire);
}

TEST_CASE("every adversarial behavior at every position defeats verification") {
    PlaneFixture fx;
    KeyStore store;
    store.add("ed25519-k1", fx.issuer.public_key());

    const HopBehavior behaviors[] = {HopBehavior::Strip, HopBehavior::TamperSignature,
                                     HopBehavior::TamperTimestamp,
                                     HopBehavior::Injector};
    for (std::size_t path_len = 1; path_len <= 6; ++path_len) {
        for (std::size_t pos = 0; pos < path_len; ++pos) {
            for (HopBehavior behavior : behaviors) {
                std::vector<HopNode> path = fx.honest_path(path_len);
                path[pos].behavior = behavior;
                if (behavior == HopBehavior::Injector)
                    path[pos].rogue_issuer = make_rogue_issuer(7000 + pos);

                SimPacket packet = inject_token(fx.make_packet(), fx.fresh_wire());
                ForwardResult res = forward_path(packet, path, fx.rng);
                ExtractResult ex = extract_token(res.delivered);
                ReplayCache cache;
                Verdict verdict =
                    ex.status == ExtractStatus::Present
                        ? verify_token_with_store(ex.token, store, kBase, cache)
                        : Verdict::Unverifiable;
                INFO("behavior " << to_string(behavior) << " at hop " << pos
                                 << " of " << path_len);
                REQUIRE(verdict != Verdict::Verified);
            }
        }
    }
}

TEST_CASE("pipeline never reads payload content") {
    PlaneFixture fx;
    // Poisoned source at every stage: inject, encapsulate, forward, extract,
    // verify. Reaching payload bytes throws PayloadInspected and fails here.
    SimPacket packet = fx.make_packet();
    REQUIRE(packet.payload != nullptr);

    SimPacket with_token = inject_token(packet, fx.fresh_wire());
    SimPacket tunneled = encapsulate(with_token, "gtp-1");
    std::vector<HopNode> path = fx.honest_path(4);
    path[2].behavior = HopBehavior::TamperSignature;
    ForwardResult res = forward_path(tunneled, path, fx.rng);
    SimPacket out = decapsulate(res.delivered);
    ExtractResult ex = extract_token(out);
    ReplayCache cache;
    verify_token(ex.token, fx.issuer.public_key(), kBase, cache);
    SUCCEED("no payload read occurred");
}

TEST_CASE("trace export lines carry flow, seq, hop, and header hash") {
    PlaneFixture fx;
    SimPacket packet = inject_token(fx.make_packet(3), fx.fresh_wire());
    ForwardResult res = forward_path(packet, fx.honest_path(2), fx.rng);
    std::string line = format_trace_line(packet, 1, res.trace[1]);
    REQUIRE(line.find("10.0.0.1:40000->203.0.113.5:443/17") != std::string::npos);
    REQUIRE(line.find("\t3\t") != std::string::npos);
    REQUIRE(line.find("hop-1") != std::string::npos);
}
