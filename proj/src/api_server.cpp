#include "poh/api_server.hpp"

#include <httplib.h>

#include <bit>
#include <nlohmann/json.hpp>

#include "poh/hash.hpp"

namespace poh {

using json = nlohmann::json;

Bytes status_signing_bytes(const std::string& session_id_hex,
                           const std::string& state, double confidence,
                           const std::string& last_verdict,
                           double mean_flow_score, Seconds issued_at) {
    ByteWriter w;
    w.var_string("poh/status/v1");
    w.var_string(session_id_hex);
    w.var_string(state);
    w.u64(std::bit_cast<std::uint64_t>(confidence));
    w.var_string(last_verdict);
    w.u64(std::bit_cast<std::uint64_t>(mean_flow_score));
    w.u64(issued_at);
    return w.take();
}

struct AttestationApiServer::Impl {
    httplib::Server server;
    std::map<std::string, ApiClientConfig> clients_by_digest;
    std::mutex bucket_mutex;
    std::map<std::string, TokenBucket> buckets;
};

namespace {

void send_error(httplib::Response& res, int status, const std::string& code,
                const std::string& message) {
    res.status = status;
    res.set_content(json{{"code", code}, {"message", message}}.dump(),
                    "application/json");
}

std::string key_digest(const std::string& api_key) {
    return to_hex(labeled_hash("poh/api-key/v1", {std::span(
        reinterpret_cast<const std::uint8_t*>(api_key.data()), api_key.size())}));
}

}  // namespace

AttestationApiServer::AttestationApiServer(ApiServerConfig config,
                                           SubscriberRegistry& registry,
                                           TokenIssuer& issuer, EdgeVerifier& edge,
                                           const Clock& clock,
                                           const Key256& service_seed)
    : config_(std::move(config)),
      registry_(registry),
      issuer_(issuer),
      edge_(edge),
      clock_(clock),
      service_key_(Ed25519KeyPair::from_seed(service_seed)),
      impl_(std::make_unique<Impl>()) {
    for (const ApiClientConfig& client : config_.clients)
        impl_->clients_by_digest[key_digest(client.api_key)] = client;
}

AttestationApiServer::~AttestationApiServer() { stop(); }

bool AttestationApiServer::running() const { return impl_->server.is_running(); }

void AttestationApiServer::start() {
    httplib::Server& server = impl_->server;

    // SO_REUSEADDR only; httplib's default adds SO_REUSEPORT, which would let
    // a second server silently share the port instead of failing.
    server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR,
                   reinterpret_cast<const void*>(&yes), sizeof(yes));
    });

    // Authentication + throttling for the authenticated endpoints.
    auto authenticate = [this](const httplib::Request& req, httplib::Response& res,
                               std::string* client_id) -> bool {
        std::string key = req.get_header_value("X-Api-Key");
        if (key.empty()) {
            send_error(res, 401, "unauthenticated", "missing X-Api-Key header");
            return false;
        }
        auto it = impl_->clients_by_digest.find(key_digest(key));
        if (it == impl_->clients_by_digest.end()) {
            send_error(res, 401, "unauthenticated", "unknown API key");
            return false;
        }
        const ApiClientConfig& client = it->second;
        {
            std::lock_guard lock(impl_->bucket_mutex);
            auto [bucket_it, inserted] = impl_->buckets.try_emplace(
                client.client_id, client.bucket_capacity,
                client.bucket_refill_per_second, 0);
            if (!bucket_it->second.try_consume(clock_.now())) {
                send_error(res, 429, "throttled", "per-client rate limit exceeded");
                return false;
            }
        }
        *client_id = client.client_id;
        return true;
    };

    server.Post("/v1/attach", [this, authenticate](const httplib::Request& req,
                                                   httplib::Response& res) {
        std::string client_id;
        if (!authenticate(req, res, &client_id)) return;
        json body = json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.contains("subscriber_id") ||
            !body.contains("device_id")) {
            send_error(res, 400, "malformed", "expected subscriber_id and device_id");
            return;
        }
        try {
            SessionContext session = registry_.authenticate_attach(
                body["subscriber_id"].get<std::string>(),
                body["device_id"].get<std::string>(), config_.network_id,
                clock_.now());
            res.set_content(
                json{{"session_id", session_id_hex(session.session_id)},
                     {"established_at", to_seconds(session.established_at)},
                     {"expires_at", to_seconds(session.expires_at)}}
                    .dump(),
                "application/json");
        } catch (const UnknownSubscriber& e) {
            send_error(res, 404, "UnknownSubscriber", e.what());
        } catch (const DeviceMismatch& e) {
            send_error(res, 403, "DeviceMismatch", e.what());
        } catch (const SubscriberRevoked& e) {
            send_error(res, 403, "SubscriberRevoked", e.what());
        } catch (const SubscriberSuspended& e) {
            send_error(res, 403, "SubscriberSuspended", e.what());
        }
    });

    server.Post("/v1/tokens", [this, authenticate](const httplib::Request& req,
                                                   httplib::Response& res) {
        std::string client_id;
        if (!authenticate(req, res, &client_id)) return;
        json body = json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.contains("session_id")) {
            send_error(res, 400, "malformed", "expected session_id");
            return;
        }
        auto session_id = session_id_from_hex(body["session_id"].get<std::string>());
        if (!session_id) {
            send_error(res, 400, "malformed", "session_id must be 32 hex chars");
            return;
        }
        Seconds lifetime = body.value("lifetime_s", Seconds{60});
        std::string mode = body.value("mode", std::string("plain"));

        auto session = registry_.find_session(*session_id);
        if (!session) {
            send_error(res, 404, "UnknownSession", "no such session");
            return;
        }
        try {
            if (mode == "blinded") {
                auto blinded = base64url_decode(body.value("blinded_message", ""));
                if (!blinded || blinded->empty()) {
                    send_error(res, 400, "malformed",
                               "blinded mode requires blinded_message (base64url)");
                    return;
                }
                if (session->expired(clock_.now())) throw SessionExpired();
                ProvenanceToken token =
                    issuer_.issue_blinded(*blinded, clock_.now(), lifetime);
                Bytes credential = issuer_.blind_sign(*blinded);
                res.set_content(
                    json{{"token", base64url_encode(wire_encode(token))},
                         {"mode", "blinded"},
                         {"blinded_signature", base64url_encode(credential)},
                         {"expires_at", token.expires_at}}
                        .dump(),
                    "application/json");
            } else {
                ProvenanceToken token = issuer_.issue(*session, clock_.now(), lifetime);
                res.set_content(
                    json{{"token", base64url_encode(wire_encode(token))},
                         {"mode", "plain"},
                         {"expires_at", token.expires_at}}
                        .dump(),
                    "application/json");
            }
        } catch (const SessionExpired& e) {
            send_error(res, 410, "SessionExpired", e.what());
        } catch (const LifetimeTooLong& e) {
            send_error(res, 422, "LifetimeTooLong", e.what());
        } catch (const NotBlindCapable& e) {
            send_error(res, 422, "NotBlindCapable", e.what());
        }
    });

    server.Post("/v1/verify", [this](const httplib::Request& req,
                                     httplib::Response& res) {
        json body = json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.contains("token") ||
            !body["token"].is_string()) {
            send_error(res, 400, "malformed", "expected token (base64url)");
            return;
        }
        auto wire = base64url_decode(body["token"].get<std::string>());
        if (!wire) {
            send_error(res, 400, "malformed", "token is not valid base64url");
            return;
        }
        Verdict verdict = verify_token_with_store(*wire, edge_.keys(), clock_.now(),
                                                  replay_cache_);
        res.set_content(json{{"verdict", to_string(verdict)}}.dump(),
                        "application/json");
    });

    server.Get(R"(/v1/sessions/([0-9a-f]{32})/poh)",
               [this, authenticate](const httplib::Request& req,
                                    httplib::Response& res) {
                   std::string client_id;
                   if (!authenticate(req, res, &client_id)) return;
                   auto session_id = session_id_from_hex(req.matches[1]);
                   if (!session_id || !registry_.find_session(*session_id)) {
                       send_error(res, 404, "UnknownSession", "no such session");
                       return;
                   }
                   SessionProofState state = edge_.poh_status(*session_id, clock_.now());
                   std::string verdict_str =
                       state.last_token_verdict ? to_string(*state.last_token_verdict)
                                                : "";
                   Seconds issued_at = to_seconds(clock_.now());
                   Bytes signing = status_signing_bytes(
                       state.session_id, to_string(state.state), state.confidence,
                       verdict_str, state.mean_flow_score, issued_at);
                   Signature sig = service_key_.sign(signing);

                   json out{{"session_id", state.session_id},
                            {"state", to_string(state.state)},
                            {"confidence", state.confidence},
                            {"mean_flow_score", state.mean_flow_score},
                            {"issued_at", issued_at},
                            {"signature", base64url_encode(sig)}};
                   if (state.last_token_verdict) out["last_verdict"] = verdict_str;
                   else out["last_verdict"] = nullptr;
                   res.set_content(out.dump(), "application/json");
               });

    server.Get("/v1/service-key", [this](const httplib::Request&,
                                         httplib::Response& res) {
        json keys{{"service_key", base64url_encode(service_key_.public_key().raw())}};
        json issuer_keys = json::object();
        issuer_keys[issuer_.config().key_id] =
            base64url_encode(issuer_.public_key().raw());
        keys["issuer_keys"] = issuer_keys;
        if (issuer_.config().blind_capable) {
            BlindPublicKey bpk = issuer_.blind_public_key();
            keys["blind_key"] = {{"modulus", base64url_encode(bpk.modulus)},
                                 {"exponent", base64url_encode(bpk.exponent)}};
        }
        res.set_content(keys.dump(), "application/json");
    });

    if (config_.port == 0) {
        bound_port_ = server.bind_to_any_port(config_.host);
        if (bound_port_ <= 0) throw PortInUse(0);
    } else {
        if (!server.bind_to_port(config_.host, config_.port))
            throw PortInUse(config_.port);
        bound_port_ = config_.port;
    }

    server_thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void AttestationApiServer::stop() {
    if (server_thread_.joinable()) {
        impl_->server.stop();
        server_thread_.join();
    }
}

}  // namespace poh
