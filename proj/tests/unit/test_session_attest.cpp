#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "poh/session_attest.hpp"

using namespace poh;

namespace {

constexpr Micros kBase = 1'755'000'000ULL * kMicrosPerSecond;

SessionContext make_session(std::uint8_t tag) {
    SessionContext s;
    s.session_id.fill(tag);
    s.subscriber_id = "imsi-" + std::to_string(tag);
    s.session_key.fill(static_cast<std::uint8_t>(tag ^ 0x5A));
    s.established_at = kBase;
    s.expires_at = kBase + 3600 * kMicrosPerSecond;
    s.auth_nonce.fill(tag);
    return s;
}

HandshakeTranscript make_transcript(std::uint8_t tag, std::uint32_t resumption = 0) {
    HandshakeTranscript t;
    t.client_hello_digest.fill(tag);
    t.negotiated_params_digest.fill(static_cast<std::uint8_t>(tag + 1));
    t.resumption_count = resumption;
    return t;
}

AttestationAuthority make_authority() {
    Key256 seed{};
    seed.fill(0x66);
    return AttestationAuthority({}, seed, 2025);
}

}  // namespace

TEST_CASE("bind then verify round trips") {
    AttestationAuthority authority = make_authority();
    SessionContext session = make_session(1);
    HandshakeTranscript transcript = make_transcript(10);

    SessionAttestation att = authority.bind_session(session, transcript, kBase);
    REQUIRE(att.expires_at > att.issued_at);
    REQUIRE(authority.verify_with_context(att, session, transcript,
                                          kBase + kMicrosPerSecond) ==
            Verdict::Verified);
}

TEST_CASE("binding rejects expired sessions") {
    AttestationAuthority authority = make_authority();
    SessionContext session = make_session(1);
    REQUIRE_THROWS_AS(
        authority.bind_session(session, make_transcript(1), session.expires_at),
        SessionExpired);
}

TEST_CASE("binding separates sessions and transcripts") {
    AttestationAuthority authority = make_authority();
    SessionContext session = make_session(1);
    SessionAttestation a = authority.bind_session(session, make_transcript(10), kBase);
    SessionAttestation b = authority.bind_session(session, make_transcript(11), kBase);
    REQUIRE(a.transcript_binding != b.transcript_binding);

    SessionContext other = make_session(2);
    SessionAttestation c = authority.bind_session(other, make_transcript(10), kBase);
    REQUIRE(a.transcript_binding != c.transcript_binding);
}

TEST_CASE("only the diagonal of sessions x transcripts verifies") {
    AttestationAuthority authority = make_authority();
    std::vector<SessionContext> sessions;
    std::vector<HandshakeTranscript> transcripts;
    std::vector<SessionAttestation> attestations;
    for (std::uint8_t i = 0; i < 10; ++i) {
        sessions.push_back(make_session(i));
        transcripts.push_back(make_transcript(static_cast<std::uint8_t>(100 + i)));
    }
    for (std::size_t i = 0; i < 10; ++i)
        attestations.push_back(
            authority.bind_session(sessions[i], transcripts[i], kBase));

    for (std::size_t i = 0; i < 10; ++i) {
        for (std::size_t j = 0; j < 10; ++j) {
            // Binding check only: replay bookkeeping would reject repeats of
            // the diagonal, which is not what this test measures.
            bool binding_ok =
                attestations[i].transcript_binding ==
                transcript_binding_hash(sessions[j].session_key, transcripts[j]);
            if (i == j) {
                REQUIRE(binding_ok);
            } else {
                REQUIRE_FALSE(binding_ok);
            }
        }
    }

    // Substituting another session's attestation into this context fails.
    REQUIRE(authority.verify_with_context(attestations[3], sessions[4],
                                          transcripts[4], kBase) ==
            Verdict::InvalidSignature);
}

TEST_CASE("rotation supersedes the old attestation") {
    AttestationAuthority authority = make_authority();
    SessionContext session = make_session(1);
    SessionAttestation old = authority.bind_session(session, make_transcript(10, 0), kBase);

    SessionAttestation fresh =
        authority.rotate_attestation(old, make_transcript(10, 1), kBase);
    REQUIRE(fresh.challenge_nonce != old.challenge_nonce);
    REQUIRE(fresh.resumption_count == 1);
    REQUIRE(fresh.expires_at >= old.expires_at);

    REQUIRE(authority.verify(fresh, kBase) == Verdict::Verified);
    // Superseded: Expired, not Replayed.
    REQUIRE(authority.verify(old, kBase) == Verdict::Expired);
}

TEST_CASE("rotation chains never fork") {
    AttestationAuthority authority = make_authority();
    SessionContext session = make_session(1);
    SessionAttestation old = authority.bind_session(session, make_transcript(10, 0), kBase);

    authority.rotate_attestation(old, make_transcript(10, 1), kBase);
    REQUIRE_THROWS_AS(authority.rotate_attestation(old, make_transcript(10, 1), kBase),
                      StaleAttestation);
}

TEST_CASE("rotation validates the resumption count") {
    AttestationAuthority authority = make_authority();
    SessionContext session = make_session(1);
    SessionAttestation old = authority.bind_session(session, make_transcript(10, 0), kBase);
    REQUIRE_THROWS_AS(authority.rotate_attestation(old, make_transcript(10, 0), kBase),
                      BadResumptionCount);
    REQUIRE_THROWS_AS(authority.rotate_attestation(old, make_transcript(10, 2), kBase),
                      BadResumptionCount);
}

TEST_CASE("resumption counts strictly increase along a rotation chain") {
    AttestationAuthority authority = make_authority();
    SessionContext session = make_session(1);
    SessionAttestation att = authority.bind_session(session, make_transcript(10, 0), kBase);
    for (std::uint32_t i = 1; i <= 20; ++i) {
        SessionAttestation next =
            authority.rotate_attestation(att, make_transcript(10, i), kBase);
        REQUIRE(next.resumption_count == att.resumption_count + 1);
        att = next;
    }
}

TEST_CASE("a thousand rotations never collide on nonces") {
    AttestationAuthority authority = make_authority();
    SessionContext session = make_session(1);
    SessionAttestation att = authority.bind_session(session, make_transcript(10, 0), kBase);
    std::set<Nonce16> nonces{att.challenge_nonce};
    for (std::uint32_t i = 1; i <= 1000; ++i) {
        att = authority.rotate_attestation(att, make_transcript(10, i), kBase);
        REQUIRE(nonces.insert(att.challenge_nonce).second);
    }
}

TEST_CASE("verdict lattice: expired window, superseded, and nonce replay") {
    AttestationAuthority authority = make_authority();
    SessionContext session = make_session(1);
    SessionAttestation att = authority.bind_session(session, make_transcript(10, 0), kBase);

    SECTION("expired window") {
        Micros late = kBase + (600 + 1) * kMicrosPerSecond;
        REQUIRE(authority.verify(att, late) == Verdict::Expired);
    }
    SECTION("nonce replay yields Replayed") {
        REQUIRE(authority.verify(att, kBase) == Verdict::Verified);
        REQUIRE(authority.verify(att, kBase) == Verdict::Replayed);
    }
    SECTION("supersession yields Expired even after nonce consumption") {
        REQUIRE(authority.verify(att, kBase) == Verdict::Verified);
        authority.rotate_attestation(att, make_transcript(10, 1), kBase);
        REQUIRE(authority.verify(att, kBase) == Verdict::Expired);
    }
    SECTION("tampered signature") {
        att.signature[5] ^= 0x10;
        REQUIRE(authority.verify(att, kBase) == Verdict::InvalidSignature);
    }
}

TEST_CASE("attestation wire format round trips and rejects malformation") {
    AttestationAuthority authority = make_authority();
    SessionContext session = make_session(9);
    SessionAttestation att =
        authority.bind_session(session, make_transcript(3, 2), kBase);

    Bytes wire = attestation_wire_encode(att);
    auto decoded = attestation_wire_decode(wire);
    REQUIRE(decoded.has_value());
    REQUIRE(attestation_wire_encode(*decoded) == wire);
    REQUIRE(decoded->resumption_count == 2);

    // Token version byte does not decode as an attestation.
    Bytes wrong_version = wire;
    wrong_version[0] = 1;
    REQUIRE_FALSE(attestation_wire_decode(wrong_version).has_value());

    Bytes truncated(wire.begin(), wire.end() - 5);
    REQUIRE_FALSE(attestation_wire_decode(truncated).has_value());
}
