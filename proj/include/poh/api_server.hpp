#pragma once

#include <memory>
#include <thread>

#include "poh/edge.hpp"
#include "poh/identity_core.hpp"
#include "poh/token.hpp"

namespace poh {

struct PortInUse : std::runtime_error {
    explicit PortInUse(int port)
        : std::runtime_error("port already in use: " + std::to_string(port)) {}
};

struct ApiClientConfig {
    std::string client_id;
    std::string api_key;
    std::string tier = "Free";  // Free | Certified
    double bucket_capacity = 100.0;
    double bucket_refill_per_second = 10.0;
};

struct ApiServerConfig {
    std::string host = "127.0.0.1";
    int port = 0;  // 0 = pick an ephemeral port
    std::vector<ApiClientConfig> clients;
    std::string network_id = "net-sim";
};

// Canonical bytes covered by the PoH status response signature.
Bytes status_signing_bytes(const std::string& session_id_hex,
                           const std::string& state, double confidence,
                           const std::string& last_verdict,
                           double mean_flow_score, Seconds issued_at);

// The Layer-7 exposure surface: attach, token issuance (plain and blinded),
// verification, and signed per-session PoH status, with per-client token
// buckets. Wraps the identity core, token issuer, and edge verifier; all
// shared state keeps its owning module's atomicity contracts.
class AttestationApiServer {
public:
    AttestationApiServer(ApiServerConfig config, SubscriberRegistry& registry,
                         TokenIssuer& issuer, EdgeVerifier& edge,
                         const Clock& clock, const Key256& service_seed);
    ~AttestationApiServer();

    AttestationApiServer(const AttestationApiServer&) = delete;
    AttestationApiServer& operator=(const AttestationApiServer&) = delete;

    // Binds and serves on a background thread; throws PortInUse when the
    // configured port is taken.
    void start();
    void stop();
    int port() const { return bound_port_; }
    bool running() const;

    Ed25519PublicKey service_public_key() const { return service_key_.public_key(); }
    ReplayCache& replay_cache() { return replay_cache_; }

private:
    struct Impl;

    ApiServerConfig config_;
    SubscriberRegistry& registry_;
    TokenIssuer& issuer_;
    EdgeVerifier& edge_;
    const Clock& clock_;
    Ed25519KeyPair service_key_;
    ReplayCache replay_cache_;

    std::unique_ptr<Impl> impl_;
    std::thread server_thread_;
    int bound_port_ = 0;
};

}  // namespace poh
