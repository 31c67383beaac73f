#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "poh/flow.hpp"
#include "poh/isolation_forest.hpp"

using namespace poh;

namespace {

FlowRecord constant_cadence(std::size_t packets, Micros gap) {
    FlowRecord flow;
    flow.flow_id = {"a", "b", 1, 2, 17};
    Micros t = 1'000'000;
    for (std::size_t i = 0; i < packets; ++i) {
        flow.packet_times.push_back(t);
        flow.byte_counts.push_back(100);
        t += gap;
    }
    return flow;
}

// Rank-based AUC (Mann–Whitney), independent of evaluate_auc's pairwise sweep.
double rank_auc(std::span<const double> human, std::span<const double> bot) {
    struct Scored {
        double value;
        bool is_human;
    };
    std::vector<Scored> all;
    for (double v : human) all.push_back({v, true});
    for (double v : bot) all.push_back({v, false});
    std::sort(all.begin(), all.end(),
              [](const Scored& a, const Scored& b) { return a.value < b.value; });

    double rank_sum = 0.0;
    std::size_t i = 0;
    while (i < all.size()) {
        std::size_t j = i;
        while (j < all.size() && all[j].value == all[i].value) ++j;
        double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (all[k].is_human) rank_sum += mean_rank;
        i = j;
    }
    double nh = static_cast<double>(human.size());
    double nb = static_cast<double>(bot.size());
    return (rank_sum - nh * (nh + 1) / 2.0) / (nh * nb);
}

std::vector<LabeledFeatures> build_corpus(std::size_t per_class, std::uint64_t seed) {
    std::vector<LabeledFeatures> corpus;
    FeatureConfig config;
    for (std::size_t i = 0; i < per_class; ++i) {
        FlowRecord human = generate_human_trace(HumanTraceParams{}, seed + i);
        corpus.push_back({compute_features(human, config), true});

        BotTraceParams bp;
        if (i % 2 == 0) {
            bp.kind = BotTraceParams::Kind::Heartbeat;
            bp.period = 20'000 + (i % 7) * 10'000;
        } else {
            bp.kind = BotTraceParams::Kind::UniformBurst;
        }
        FlowRecord bot = generate_bot_trace(bp, seed + 100'000 + i);
        corpus.push_back({compute_features(bot, config), false});
    }
    return corpus;
}

}  // namespace

TEST_CASE("constant cadence has exactly zero variance and entropy") {
    FlowRecord flow = constant_cadence(101, 100'000);  // 100 ms
    FlowFeatures f = compute_features(flow);
    REQUIRE(f.iat_variance == 0.0);
    REQUIRE(f.iat_entropy == 0.0);
    REQUIRE(f.burst_density == 0.0);  // no gap below 10 ms
    REQUIRE(f.flow_lifetime == Catch::Approx(10.0));
}

TEST_CASE("flows with fewer than two packets use the degenerate convention") {
    FlowRecord empty;
    FlowFeatures f0 = compute_features(empty);
    REQUIRE(f0.iat_variance == 0.0);
    REQUIRE(f0.iat_entropy == 0.0);
    REQUIRE(f0.burst_density == 0.0);

    FlowRecord one = constant_cadence(1, 0);
    FlowFeatures f1 = compute_features(one);
    REQUIRE(f1.iat_variance == 0.0);
    REQUIRE(f1.iat_entropy == 0.0);
}

TEST_CASE("uniform-over-bins inter-arrivals approach 4 bits of entropy") {
    FeatureConfig config;
    DeterministicRng rng(2024, "uniform-bins");
    const double ratio = std::pow(
        static_cast<double>(config.bin_max) / static_cast<double>(config.bin_min),
        1.0 / static_cast<double>(config.entropy_bins));

    FlowRecord flow;
    flow.flow_id = {"a", "b", 1, 2, 17};
    Micros t = 1'000'000;
    flow.packet_times.push_back(t);
    std::vector<std::size_t> drawn_bins(config.entropy_bins, 0);
    constexpr std::size_t kSamples = 100'000;
    for (std::size_t i = 0; i < kSamples; ++i) {
        std::size_t bin = rng.uniform_u64(config.entropy_bins);
        double u = 0.05 + 0.9 * rng.uniform();  // stay inside the bin
        double value = static_cast<double>(config.bin_min) *
                       std::pow(ratio, static_cast<double>(bin) + u);
        t += static_cast<Micros>(value);
        flow.packet_times.push_back(t);
        ++drawn_bins[bin];
    }
    flow.byte_counts.assign(flow.packet_times.size(), 100);

    // Law-of-large-numbers oracle: entropy of the drawn histogram.
    double oracle = entropy_bits(drawn_bins);
    FlowFeatures f = compute_features(flow, config);
    REQUIRE(f.iat_entropy == Catch::Approx(oracle).margin(1e-9));
    REQUIRE(f.iat_entropy >= 0.95 * 4.0);
    REQUIRE(f.iat_entropy <= 4.0);
}

TEST_CASE("entropy respects its bounds for arbitrary generated flows") {
    FeatureConfig config;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        FlowRecord human = generate_human_trace(HumanTraceParams{}, seed);
        FlowFeatures f = compute_features(human, config);
        REQUIRE(f.iat_entropy >= 0.0);
        REQUIRE(f.iat_entropy <= std::log2(static_cast<double>(config.entropy_bins)));
    }
}

TEST_CASE("entropy is a function of the bin histogram alone") {
    FeatureConfig config;
    FlowRecord flow = generate_human_trace(HumanTraceParams{}, 5);
    auto histogram = iat_histogram(flow, config);
    FlowFeatures f = compute_features(flow, config);
    REQUIRE(f.iat_entropy == Catch::Approx(entropy_bits(histogram)).margin(1e-12));

    // Any flow with the same histogram has the same entropy: permute the IATs.
    std::vector<Micros> iats;
    for (std::size_t i = 1; i < flow.packet_times.size(); ++i)
        iats.push_back(flow.packet_times[i] - flow.packet_times[i - 1]);
    std::reverse(iats.begin(), iats.end());
    FlowRecord permuted;
    permuted.flow_id = flow.flow_id;
    Micros t = 500;
    permuted.packet_times.push_back(t);
    for (Micros gap : iats) permuted.packet_times.push_back(t += gap);
    permuted.byte_counts.assign(permuted.packet_times.size(), 0);

    REQUIRE(iat_histogram(permuted, config) == histogram);
    REQUIRE(compute_features(permuted, config).iat_entropy ==
            Catch::Approx(f.iat_entropy).margin(1e-12));
}

TEST_CASE("burst density matches the worked example") {
    // 10 bursts of 5 packets, 1 ms intra-burst gaps, 2 s between bursts.
    FlowRecord flow;
    flow.flow_id = {"a", "b", 1, 2, 17};
    Micros t = 1'000'000;
    for (int burst = 0; burst < 10; ++burst) {
        for (int p = 0; p < 5; ++p) {
            flow.packet_times.push_back(t);
            t += 1'000;
        }
        t -= 1'000;
        t += 2'000'000;
    }
    flow.byte_counts.assign(flow.packet_times.size(), 100);

    FeatureConfig config;
    // Brute-force oracle straight from the run definition.
    std::size_t oracle = 0;
    bool in_run = false;
    for (std::size_t i = 1; i < flow.packet_times.size(); ++i) {
        bool small = flow.packet_times[i] - flow.packet_times[i - 1] < config.burst_gap;
        if (small && !in_run) ++oracle;
        in_run = small;
    }
    REQUIRE(oracle == 10);
    REQUIRE(count_bursts(flow, config) == oracle);

    FlowFeatures f = compute_features(flow, config);
    REQUIRE(f.flow_lifetime == Catch::Approx(18.04).margin(0.01));
    REQUIRE(f.burst_density == Catch::Approx(0.554).margin(0.01));
}

TEST_CASE("reuse ratio counts duplicate tuples within the window") {
    FlowContextStore store;
    FlowId a{"ue1", "srv", 1000, 443, 17};
    FlowId b{"ue1", "srv", 1001, 443, 17};

    Micros t0 = 100 * kMicrosPerSecond;
    store.observe(a, t0);
    REQUIRE(store.reuse_ratio(a, t0, 60 * kMicrosPerSecond) == 0.0);

    store.observe(a, t0 + kMicrosPerSecond);      // same tuple again
    store.observe(b, t0 + 2 * kMicrosPerSecond);  // sibling tuple
    // 3 observations, 2 distinct tuples -> 1 - 2/3
    REQUIRE(store.reuse_ratio(a, t0 + 3 * kMicrosPerSecond, 60 * kMicrosPerSecond) ==
            Catch::Approx(1.0 / 3.0));

    // Outside the window everything ages out.
    REQUIRE(store.reuse_ratio(a, t0 + 400 * kMicrosPerSecond,
                              60 * kMicrosPerSecond) == 0.0);

    FlowId other_pair{"ue2", "srv", 1000, 443, 17};
    REQUIRE(store.reuse_ratio(other_pair, t0, 60 * kMicrosPerSecond) == 0.0);
}

TEST_CASE("generators are deterministic and respect their contracts") {
    FlowRecord h1 = generate_human_trace(HumanTraceParams{}, 11);
    FlowRecord h2 = generate_human_trace(HumanTraceParams{}, 11);
    REQUIRE(h1.packet_times == h2.packet_times);

    FlowRecord b1 = generate_bot_trace(BotTraceParams{}, 13);
    FlowRecord b2 = generate_bot_trace(BotTraceParams{}, 13);
    REQUIRE(b1.packet_times == b2.packet_times);

    // Bot(period = 50 ms) -> iat variance within (1 ms)^2 by construction.
    BotTraceParams hb;
    hb.period = 50'000;
    FlowFeatures bot_features = compute_features(generate_bot_trace(hb, 17));
    REQUIRE(bot_features.iat_variance <= 1e6);

    // Regression floor measured once on the seeded generator.
    HumanTraceParams hp;
    hp.packets = 10'000;
    FlowFeatures human_features = compute_features(generate_human_trace(hp, 23));
    REQUIRE(human_features.iat_entropy >= 2.5);

    REQUIRE_THROWS_AS(generate_bot_trace(BotTraceParams{.packets = 1}, 1),
                      InvalidParams);
    BotTraceParams bad_jitter;
    bad_jitter.jitter = 5'000;
    REQUIRE_THROWS_AS(generate_bot_trace(bad_jitter, 1), InvalidParams);
    REQUIRE_THROWS_AS(generate_human_trace(HumanTraceParams{.packets = 0}, 1),
                      InvalidParams);
}

TEST_CASE("labels follow the threshold rule exactly") {
    REQUIRE(label_for_score(0.6, 0.4, 0.6) == ScoreLabel::LikelyHuman);
    REQUIRE(label_for_score(0.61, 0.4, 0.6) == ScoreLabel::LikelyHuman);
    REQUIRE(label_for_score(0.4, 0.4, 0.6) == ScoreLabel::LikelySynthetic);
    REQUIRE(label_for_score(0.39, 0.4, 0.6) == ScoreLabel::LikelySynthetic);
    REQUIRE(label_for_score(0.5, 0.4, 0.6) == ScoreLabel::Indeterminate);
    REQUIRE(label_for_score(0.41, 0.4, 0.6) == ScoreLabel::Indeterminate);
    REQUIRE(label_for_score(0.59, 0.4, 0.6) == ScoreLabel::Indeterminate);
}

TEST_CASE("session tags map labels to DSCP-like classes") {
    REQUIRE(tag_session(ScoreLabel::LikelyHuman) == 1);
    REQUIRE(tag_session(ScoreLabel::Indeterminate) == 0);
    REQUIRE(tag_session(ScoreLabel::LikelySynthetic) == 2);

    SimPacket p;
    SimPacket tagged = apply_tag(p, 1);
    REQUIRE(tagged.session_tag == 1);
}

TEST_CASE("training is deterministic and ids the model by corpus digest") {
    auto corpus = build_corpus(40, 500);
    AnomalyModel m1 = AnomalyModel::train(corpus, 99);
    AnomalyModel m2 = AnomalyModel::train(corpus, 99);
    REQUIRE(m1.model_id() == m2.model_id());
    FlowFeatures probe = corpus[0].features;
    REQUIRE(m1.human_score(probe) == m2.human_score(probe));

    AnomalyModel m3 = AnomalyModel::train(corpus, 100);
    REQUIRE(m3.model_id() != m1.model_id());

    REQUIRE_THROWS_AS(AnomalyModel::train({}, 1), EmptyCorpus);
    AnomalyModel not_ready;
    REQUIRE_THROWS_AS(not_ready.classify(probe), ModelNotReady);
}

TEST_CASE("a corpus of identical points scores that point as maximally normal") {
    FlowFeatures point;
    point.iat_variance = 5e5;
    point.iat_entropy = 3.0;
    point.burst_density = 0.2;
    point.flow_lifetime = 12.0;
    point.reuse_ratio = 0.1;
    std::vector<LabeledFeatures> corpus(64, {point, true});
    AnomalyModel model = AnomalyModel::train(corpus, 7);

    double trained = model.human_score(point);
    REQUIRE(model.classify(point).label == ScoreLabel::LikelyHuman);

    DeterministicRng rng(9, "probes");
    for (int i = 0; i < 50; ++i) {
        FlowFeatures probe;
        probe.iat_variance = rng.uniform() * 1e9;
        probe.iat_entropy = rng.uniform() * 4.0;
        probe.burst_density = rng.uniform() * 5.0;
        probe.flow_lifetime = rng.uniform() * 100.0;
        probe.reuse_ratio = rng.uniform();
        REQUIRE(model.human_score(probe) <= trained + 1e-12);
    }
}

TEST_CASE("corpus-level separation: humans high, bots low") {
    auto corpus = build_corpus(120, 900);
    AnomalyModel model = AnomalyModel::train(corpus, 42);

    std::size_t human_ok = 0, human_total = 0, bot_ok = 0, bot_total = 0;
    for (const LabeledFeatures& lf : corpus) {
        ScoreLabel label = model.classify(lf.features).label;
        if (lf.is_human) {
            ++human_total;
            if (label == ScoreLabel::LikelyHuman) ++human_ok;
        } else {
            ++bot_total;
            if (label == ScoreLabel::LikelySynthetic) ++bot_ok;
        }
    }
    REQUIRE(human_ok >= human_total * 8 / 10);
    REQUIRE(bot_ok >= bot_total * 9 / 10);
}

TEST_CASE("evaluator AUC agrees with the independent rank-based oracle") {
    auto corpus = build_corpus(80, 1234);
    // Train on half, evaluate on the held-out half.
    std::vector<LabeledFeatures> train_half(corpus.begin(),
                                            corpus.begin() + corpus.size() / 2);
    std::vector<LabeledFeatures> held_out(corpus.begin() + corpus.size() / 2,
                                          corpus.end());
    AnomalyModel model = AnomalyModel::train(train_half, 31);

    double reported = evaluate_auc(model, held_out);

    std::vector<double> human_scores, bot_scores;
    for (const LabeledFeatures& lf : held_out) {
        double s = model.human_score(lf.features);
        (lf.is_human ? human_scores : bot_scores).push_back(s);
    }
    double oracle = rank_auc(human_scores, bot_scores);
    REQUIRE(reported == Catch::Approx(oracle).margin(1e-9));
    REQUIRE(reported >= 0.95);
}

TEST_CASE("model files round trip with identical scoring") {
    auto corpus = build_corpus(30, 77);
    AnomalyModel model = AnomalyModel::train(corpus, 5);
    auto path = std::filesystem::temp_directory_path() / "poh_model.bin";
    model.save(path);

    AnomalyModel loaded = AnomalyModel::load(path);
    REQUIRE(loaded.model_id() == model.model_id());
    for (const LabeledFeatures& lf : corpus)
        REQUIRE(loaded.human_score(lf.features) ==
                Catch::Approx(model.human_score(lf.features)).margin(1e-15));
    std::filesystem::remove(path);
}

TEST_CASE("corpus files round trip") {
    std::vector<LabeledFlow> corpus;
    corpus.push_back({generate_human_trace(HumanTraceParams{.packets = 20}, 3), true});
    corpus.push_back({generate_bot_trace(BotTraceParams{.packets = 20}, 4), false});

    auto path = std::filesystem::temp_directory_path() / "poh_corpus.tsv";
    save_corpus(path, corpus);
    auto loaded = load_corpus(path);
    REQUIRE(loaded.size() == 2);
    REQUIRE(loaded[0].is_human);
    REQUIRE_FALSE(loaded[1].is_human);
    REQUIRE(loaded[0].flow.packet_times == corpus[0].flow.packet_times);
    REQUIRE(loaded[1].flow.packet_times == corpus[1].flow.packet_times);
    std::filesystem::remove(path);
}

TEST_CASE("feature extraction never touches payload bytes") {
    std::vector<SimPacket> packets;
    for (int i = 0; i < 10; ++i) {
        SimPacket p;
        p.flow_id = {"a", "b", 1, 2, 17};
        p.seq = static_cast<std::uint64_t>(i);
        p.sent_at = 1'000'000 + static_cast<Micros>(i) * 30'000;
        p.payload_len = 500;
        p.payload = std::make_shared<PoisonedPayloadSource>();
        packets.push_back(std::move(p));
    }
    FlowRecord record = record_from_packets(packets);
    FlowFeatures f = compute_features(record);
    REQUIRE(f.flow_lifetime > 0.0);
    SUCCEED("no payload read occurred");
}
