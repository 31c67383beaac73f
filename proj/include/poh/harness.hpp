#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "poh/edge.hpp"
#include "poh/flow.hpp"
#include "poh/isolation_forest.hpp"
#include "poh/packet.hpp"

namespace poh {

struct ConfigInvalid : std::runtime_error {
    explicit ConfigInvalid(const std::string& what) : std::runtime_error(what) {}
};

// Printed in every run report next to the measured verification latency.
inline constexpr const char* kLatencyCaveat =
    "Latency figures are desk-scale software measurements of single-token "
    "verification; sub-10us inline-verification numbers reported for P4 "
    "hardware pipelines are NOT reproducible in this environment and are not "
    "comparable.";

struct AdversarySchedule {
    HopBehavior behavior = HopBehavior::Honest;
    std::size_t hop = 0;
    Seconds start_s = 0;                   // relative to scenario start
    std::optional<Seconds> stop_s;         // absent = whole run
    bool colliding_key_id = false;         // Injector: reuse the telco key id
    std::size_t replays_per_token = 1;     // ReplayRecorder re-injection count
};

struct ScenarioConfig {
    std::string name = "unnamed";
    std::uint64_t seed = 0;
    std::size_t subscribers = 10;
    std::size_t sessions = 50;

    double human_fraction = 0.5;
    double bot_fraction = 0.5;
    std::size_t packets_per_flow = 100;

    std::size_t hops = 5;
    Micros hop_delay_us = 500;
    Micros hop_jitter_us = 0;
    std::vector<AdversarySchedule> adversaries;

    double theta_lo = 0.4;
    double theta_hi = 0.6;
    std::size_t forest_trees = 100;
    std::size_t forest_subsample = 256;
    std::size_t training_flows_per_class = 150;

    Seconds token_lifetime_s = 300;
    Seconds token_refresh_s = 60;
    Seconds session_lifetime_s = 3600;
    EdgeConfig edge;

    Seconds duration_s = 60;

    // Scenario exit assertions; run() returns nonzero when any fails.
    std::optional<double> assert_min_verified_fraction;
    std::optional<std::size_t> assert_max_escalations;
    std::optional<double> assert_min_auc;
    bool assert_replayed_equals_injected = false;
};

ScenarioConfig load_scenario(const std::filesystem::path& path);
ScenarioConfig scenario_from_json(const nlohmann::json& doc);

struct RunReport {
    std::string scenario;
    std::uint64_t seed = 0;
    std::size_t sessions = 0;
    std::size_t flows = 0;
    std::size_t packets = 0;

    std::map<std::string, std::size_t> verdict_counts;
    std::size_t verdict_total = 0;

    // construction label (human/bot) × predicted label
    std::map<std::string, std::size_t> confusion;
    double auc = 0.0;
    std::string model_id;

    std::size_t escalations = 0;
    std::map<std::string, std::size_t> final_states;

    double latency_median_us = 0.0;
    double latency_p99_us = 0.0;
    std::size_t latency_samples = 0;
    std::string latency_caveat = kLatencyCaveat;

    bool audit_valid = false;
    std::size_t audit_entries = 0;

    std::size_t tokens_issued = 0;
    std::size_t issue_events = 0;
    bool issue_events_match = false;       // audit issue set == issued set
    std::size_t verification_events = 0;
    std::size_t tokens_presented = 0;      // token-bearing packets at egress
    std::size_t verified_duplicate_nonces = 0;
    std::size_t replays_injected = 0;

    std::vector<std::string> assertion_failures;
    bool assertions_passed = true;

    nlohmann::json to_json() const;
    // Determinism view: everything except the environment-dependent latency.
    nlohmann::json deterministic_json() const;
    std::string summary() const;
};

// Runs the scenario on a virtual clock; fully deterministic given the seed
// except for the latency fields. Optionally mirrors the audit log to a file.
RunReport run_scenario(const ScenarioConfig& config,
                       const std::optional<std::filesystem::path>& audit_file =
                           std::nullopt,
                       const std::optional<std::filesystem::path>& trace_file =
                           std::nullopt);

}  // namespace poh
