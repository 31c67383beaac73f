#pragma once

#include <deque>
#include <filesystem>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "poh/clock.hpp"
#include "poh/packet.hpp"

namespace poh {

struct InvalidParams : std::invalid_argument {
    explicit InvalidParams(const std::string& what) : std::invalid_argument(what) {}
};

// Payload-free observation of one flow: arrival times and sizes only.
struct FlowRecord {
    FlowId flow_id;
    std::vector<Micros> packet_times;  // sorted ascending
    std::vector<std::size_t> byte_counts;

    Micros start() const { return packet_times.empty() ? 0 : packet_times.front(); }
    Micros end() const { return packet_times.empty() ? 0 : packet_times.back(); }
};

FlowRecord record_from_packets(std::span<const SimPacket> packets);

struct FeatureConfig {
    std::size_t entropy_bins = 16;
    Micros bin_min = 100;           // 0.1 ms
    Micros bin_max = 10'000'000;    // 10 s
    Micros burst_gap = 10'000;      // 10 ms
    Micros context_window = 60 * kMicrosPerSecond;
};

struct FlowFeatures {
    double iat_variance = 0.0;   // µs², sample variance of inter-arrivals
    double iat_entropy = 0.0;    // bits over the log-binned IAT histogram
    double burst_density = 0.0;  // bursts per second of flow lifetime
    double flow_lifetime = 0.0;  // seconds
    double reuse_ratio = 0.0;    // 1 - distinct/total over the context window

    std::array<double, 5> as_vector() const {
        return {iat_variance, iat_entropy, burst_density, flow_lifetime, reuse_ratio};
    }
};

// Binned IAT histogram; exposed so the entropy-depends-only-on-histogram
// property is testable directly.
std::vector<std::size_t> iat_histogram(const FlowRecord& flow,
                                       const FeatureConfig& config);
double entropy_bits(std::span<const std::size_t> histogram);

// Maximal runs of consecutive inter-arrivals below burst_gap.
std::size_t count_bursts(const FlowRecord& flow, const FeatureConfig& config);

// Shared sliding window of flow observations per endpoint pair, backing the
// connection reuse ratio. Safe for concurrent observe/ratio calls.
class FlowContextStore {
public:
    void observe(const FlowId& flow, Micros at);
    // 1 - (distinct flow tuples / total observations) for the endpoint pair
    // within [now - window, now]; 0 when the window is empty.
    double reuse_ratio(const FlowId& flow, Micros now, Micros window) const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::deque<std::pair<Micros, std::string>>> by_pair_;
};

// Flows with fewer than two packets get the degenerate all-zero features.
FlowFeatures compute_features(const FlowRecord& flow,
                              const FeatureConfig& config = FeatureConfig());
FlowFeatures compute_features(const FlowRecord& flow, const FeatureConfig& config,
                              const FlowContextStore& context, Micros now);

enum class TraceKind { Human, Bot };

struct HumanTraceParams {
    std::size_t packets = 200;
    double think_log_mean = 12.3;   // ln(µs); e^12.3 ≈ 220 ms median think time
    double think_log_sigma = 1.4;
    double cluster_prob = 0.35;     // chance to emit an interaction cluster
    std::size_t cluster_min = 2;
    std::size_t cluster_max = 8;
    Micros cluster_gap_min = 800;       // intra-cluster gaps, µs
    Micros cluster_gap_max = 60'000;
};

struct BotTraceParams {
    enum class Kind { Heartbeat, UniformBurst };
    Kind kind = Kind::Heartbeat;
    std::size_t packets = 200;
    Micros period = 50'000;      // heartbeat period
    Micros jitter = 500;         // ≤ 1 ms by contract
    Micros burst_gap = 200;      // UniformBurst intra-gap
    std::size_t burst_len = 20;  // UniformBurst packets per burst
    Micros burst_pause = 1'000'000;
};

FlowRecord generate_human_trace(const HumanTraceParams& params, std::uint64_t seed,
                                const FlowId& flow = FlowId{"ue", "srv", 40000, 443});
FlowRecord generate_bot_trace(const BotTraceParams& params, std::uint64_t seed,
                              const FlowId& flow = FlowId{"bot", "srv", 40001, 443});

enum class ScoreLabel { LikelyHuman, LikelySynthetic, Indeterminate };

std::string to_string(ScoreLabel label);

struct HumanLikelihoodScore {
    double score = 0.0;  // [0,1], higher = more human-typical
    ScoreLabel label = ScoreLabel::Indeterminate;
    std::string model_id;
};

// label = LikelyHuman iff score ≥ hi; LikelySynthetic iff score ≤ lo.
ScoreLabel label_for_score(double score, double theta_lo, double theta_hi);

// DSCP-like class mark: LikelyHuman→1, Indeterminate→0, LikelySynthetic→2.
int tag_session(const ScoreLabel& label);
SimPacket apply_tag(const SimPacket& packet, int tag);

// Corpus files: one flow per line, flow id, label, comma-joined µs timestamps.
struct LabeledFlow {
    FlowRecord flow;
    bool is_human = false;
};

void save_corpus(const std::filesystem::path& path,
                 std::span<const LabeledFlow> corpus);
std::vector<LabeledFlow> load_corpus(const std::filesystem::path& path);

}  // namespace poh
