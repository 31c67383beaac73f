#include "poh/flow.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace poh {

FlowRecord record_from_packets(std::span<const SimPacket> packets) {
    FlowRecord record;
    if (!packets.empty()) record.flow_id = packets.front().flow_id;
    record.packet_times.reserve(packets.size());
    record.byte_counts.reserve(packets.size());
    for (const SimPacket& p : packets) {
        record.packet_times.push_back(p.sent_at);
        record.byte_counts.push_back(p.payload_len);
    }
    std::sort(record.packet_times.begin(), record.packet_times.end());
    return record;
}

static std::vector<Micros> inter_arrivals(const FlowRecord& flow) {
    std::vector<Micros> iats;
    if (flow.packet_times.size() < 2) return iats;
    iats.reserve(flow.packet_times.size() - 1);
    for (std::size_t i = 1; i < flow.packet_times.size(); ++i)
        iats.push_back(flow.packet_times[i] - flow.packet_times[i - 1]);
    return iats;
}

std::vector<std::size_t> iat_histogram(const FlowRecord& flow,
                                       const FeatureConfig& config) {
    std::vector<std::size_t> bins(config.entropy_bins, 0);
    const double log_min = std::log(static_cast<double>(config.bin_min));
    const double log_span =
        std::log(static_cast<double>(config.bin_max)) - log_min;
    for (Micros iat : inter_arrivals(flow)) {
        std::size_t idx;
        if (iat <= config.bin_min) {
            idx = 0;
        } else if (iat >= config.bin_max) {
            idx = config.entropy_bins - 1;
        } else {
            double frac = (std::log(static_cast<double>(iat)) - log_min) / log_span;
            idx = std::min(config.entropy_bins - 1,
                           static_cast<std::size_t>(frac * config.entropy_bins));
        }
        ++bins[idx];
    }
    return bins;
}

double entropy_bits(std::span<const std::size_t> histogram) {
    std::size_t total = 0;
    for (std::size_t count : histogram) total += count;
    if (total == 0) return 0.0;
    double entropy = 0.0;
    for (std::size_t count : histogram) {
        if (count == 0) continue;
        double p = static_cast<double>(count) / static_cast<double>(total);
        entropy -= p * std::log2(p);
    }
    // A single occupied bin gives -1*log2(1) which must be exactly zero.
    return entropy == 0.0 ? 0.0 : entropy;
}

std::size_t count_bursts(const FlowRecord& flow, const FeatureConfig& config) {
    std::size_t bursts = 0;
    bool in_burst = false;
    for (Micros iat : inter_arrivals(flow)) {
        if (iat < config.burst_gap) {
            if (!in_burst) {
                ++bursts;
                in_burst = true;
            }
        } else {
            in_burst = false;
        }
    }
    return bursts;
}

void FlowContextStore::observe(const FlowId& flow, Micros at) {
    std::lock_guard lock(mutex_);
    by_pair_[flow.endpoint_pair()].emplace_back(at, flow.to_string());
}

double FlowContextStore::reuse_ratio(const FlowId& flow, Micros now,
                                     Micros window) const {
    std::lock_guard lock(mutex_);
    auto it = by_pair_.find(flow.endpoint_pair());
    if (it == by_pair_.end()) return 0.0;
    Micros cutoff = now >= window ? now - window : 0;

    std::size_t total = 0;
    std::vector<std::string> tuples;
    for (const auto& [at, tuple] : it->second) {
        if (at < cutoff || at > now) continue;
        ++total;
        tuples.push_back(tuple);
    }
    if (total == 0) return 0.0;
    std::sort(tuples.begin(), tuples.end());
    std::size_t distinct = static_cast<std::size_t>(
        std::unique(tuples.begin(), tuples.end()) - tuples.begin());
    return 1.0 - static_cast<double>(distinct) / static_cast<double>(total);
}

static FlowFeatures features_impl(const FlowRecord& flow,
                                  const FeatureConfig& config,
                                  double reuse_ratio) {
    FlowFeatures f;
    f.reuse_ratio = reuse_ratio;
    if (flow.packet_times.size() < 2) return f;

    std::vector<Micros> iats = inter_arrivals(flow);
    double mean = 0.0;
    for (Micros v : iats) mean += static_cast<double>(v);
    mean /= static_cast<double>(iats.size());
    if (iats.size() >= 2) {
        double ss = 0.0;
        for (Micros v : iats) {
            double d = static_cast<double>(v) - mean;
            ss += d * d;
        }
        f.iat_variance = ss / static_cast<double>(iats.size() - 1);
    }

    f.iat_entropy = entropy_bits(iat_histogram(flow, config));
    f.flow_lifetime = static_cast<double>(flow.end() - flow.start()) /
                      static_cast<double>(kMicrosPerSecond);
    std::size_t bursts = count_bursts(flow, config);
    f.burst_density =
        f.flow_lifetime > 0.0 ? static_cast<double>(bursts) / f.flow_lifetime : 0.0;
    return f;
}

FlowFeatures compute_features(const FlowRecord& flow, const FeatureConfig& config) {
    return features_impl(flow, config, 0.0);
}

FlowFeatures compute_features(const FlowRecord& flow, const FeatureConfig& config,
                              const FlowContextStore& context, Micros now) {
    return features_impl(flow, config,
                         context.reuse_ratio(flow.flow_id, now, config.context_window));
}

FlowRecord generate_human_trace(const HumanTraceParams& params, std::uint64_t seed,
                                const FlowId& flow) {
    if (params.packets < 2 || params.think_log_sigma <= 0.0 ||
        params.cluster_max < params.cluster_min ||
        params.cluster_gap_max < params.cluster_gap_min) {
        throw InvalidParams("human trace parameters out of range");
    }
    DeterministicRng rng(seed, "poh/trace-human");
    FlowRecord record;
    record.flow_id = flow;
    Micros t = 1'000'000;
    record.packet_times.push_back(t);
    record.byte_counts.push_back(400 + rng.uniform_u64(1000));

    while (record.packet_times.size() < params.packets) {
        if (rng.uniform() < params.cluster_prob) {
            // Interaction cluster: a short run of tightly spaced packets.
            std::size_t len = params.cluster_min +
                              rng.uniform_u64(params.cluster_max - params.cluster_min + 1);
            for (std::size_t i = 0;
                 i < len && record.packet_times.size() < params.packets; ++i) {
                Micros gap = params.cluster_gap_min +
                             rng.uniform_u64(params.cluster_gap_max -
                                             params.cluster_gap_min + 1);
                t += gap;
                record.packet_times.push_back(t);
                record.byte_counts.push_back(200 + rng.uniform_u64(1200));
            }
        } else {
            // Think time: log-normal via Box–Muller on deterministic uniforms.
            double u1 = std::max(rng.uniform(), 1e-12);
            double u2 = rng.uniform();
            double z = std::sqrt(-2.0 * std::log(u1)) *
                       std::cos(2.0 * std::numbers::pi * u2);
            double gap = std::exp(params.think_log_mean + params.think_log_sigma * z);
            gap = std::clamp(gap, 1e3, 3e7);
            t += static_cast<Micros>(gap);
            record.packet_times.push_back(t);
            record.byte_counts.push_back(200 + rng.uniform_u64(1200));
        }
    }
    return record;
}

FlowRecord generate_bot_trace(const BotTraceParams& params, std::uint64_t seed,
                              const FlowId& flow) {
    if (params.packets < 2 || params.period == 0 || params.jitter > 1000 ||
        params.burst_len == 0) {
        throw InvalidParams("bot trace parameters out of range");
    }
    DeterministicRng rng(seed, "poh/trace-bot");
    FlowRecord record;
    record.flow_id = flow;
    Micros t = 1'000'000;

    if (params.kind == BotTraceParams::Kind::Heartbeat) {
        for (std::size_t i = 0; i < params.packets; ++i) {
            record.packet_times.push_back(t + (params.jitter > 0
                                                   ? rng.uniform_u64(params.jitter + 1)
                                                   : 0));
            record.byte_counts.push_back(64);
            t += params.period;
        }
        std::sort(record.packet_times.begin(), record.packet_times.end());
    } else {
        while (record.packet_times.size() < params.packets) {
            for (std::size_t i = 0;
                 i < params.burst_len && record.packet_times.size() < params.packets;
                 ++i) {
                record.packet_times.push_back(t);
                record.byte_counts.push_back(1400);
                t += params.burst_gap;
            }
            t += params.burst_pause;
        }
    }
    return record;
}

std::string to_string(ScoreLabel label) {
    switch (label) {
        case ScoreLabel::LikelyHuman: return "LikelyHuman";
        case ScoreLabel::LikelySynthetic: return "LikelySynthetic";
        case ScoreLabel::Indeterminate: return "Indeterminate";
    }
    return "?";
}

ScoreLabel label_for_score(double score, double theta_lo, double theta_hi) {
    if (score >= theta_hi) return ScoreLabel::LikelyHuman;
    if (score <= theta_lo) return ScoreLabel::LikelySynthetic;
    return ScoreLabel::Indeterminate;
}

int tag_session(const ScoreLabel& label) {
    switch (label) {
        case ScoreLabel::LikelyHuman: return 1;
        case ScoreLabel::LikelySynthetic: return 2;
        case ScoreLabel::Indeterminate: return 0;
    }
    return 0;
}

SimPacket apply_tag(const SimPacket& packet, int tag) {
    SimPacket out = packet;
    out.session_tag = tag;
    return out;
}

void save_corpus(const std::filesystem::path& path,
                 std::span<const LabeledFlow> corpus) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open corpus file: " + path.string());
    for (const LabeledFlow& lf : corpus) {
        out << lf.flow.flow_id.to_string() << '\t'
            << (lf.is_human ? "human" : "bot") << '\t';
        for (std::size_t i = 0; i < lf.flow.packet_times.size(); ++i) {
            if (i > 0) out << ',';
            out << lf.flow.packet_times[i];
        }
        out << '\n';
    }
}

std::vector<LabeledFlow> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open corpus file: " + path.string());
    std::vector<LabeledFlow> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream is(line);
        std::string flow_str, label, times;
        if (!std::getline(is, flow_str, '\t') || !std::getline(is, label, '\t') ||
            !std::getline(is, times)) {
            throw std::runtime_error("corpus line " + std::to_string(line_no) +
                                     ": expected 3 fields");
        }
        if (label != "human" && label != "bot")
            throw std::runtime_error("corpus line " + std::to_string(line_no) +
                                     ": label must be human or bot");
        LabeledFlow lf;
        lf.is_human = label == "human";
        lf.flow.flow_id.src = flow_str;  // opaque; round-trips as a name only
        std::istringstream ts(times);
        std::string tok;
        while (std::getline(ts, tok, ','))
            lf.flow.packet_times.push_back(std::stoull(tok));
        lf.flow.byte_counts.assign(lf.flow.packet_times.size(), 0);
        out.push_back(std::move(lf));
    }
    return out;
}

}  // namespace poh
