#include "poh/isolation_forest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "poh/hash.hpp"
#include "poh/rng.hpp"

namespace poh {

namespace {

constexpr std::size_t kDims = 5;

// Average unsuccessful-search path length in a BST of n nodes.
double c_factor(std::size_t n) {
    if (n <= 1) return 0.0;
    if (n == 2) return 1.0;
    double nd = static_cast<double>(n);
    constexpr double kEulerGamma = 0.5772156649015329;
    return 2.0 * (std::log(nd - 1.0) + kEulerGamma) - 2.0 * (nd - 1.0) / nd;
}

double median_of(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + mid, values.end());
    return values[mid];
}

}  // namespace

std::array<double, 5> AnomalyModel::transform(const FlowFeatures& f) {
    auto v = f.as_vector();
    // Compress the heavy-tailed dimensions.
    v[0] = std::log1p(v[0]);  // iat_variance
    v[3] = std::log1p(v[3]);  // flow_lifetime
    return v;
}

AnomalyModel AnomalyModel::train(std::span<const LabeledFeatures> corpus,
                                 std::uint64_t seed,
                                 const ForestHyperparams& params) {
    if (corpus.empty()) throw EmptyCorpus();

    std::vector<std::array<double, 5>> human_points;
    for (const LabeledFeatures& lf : corpus)
        if (lf.is_human) human_points.push_back(transform(lf.features));
    // An unlabeled-human corpus still trains: fall back to all points.
    if (human_points.empty())
        for (const LabeledFeatures& lf : corpus)
            human_points.push_back(transform(lf.features));

    AnomalyModel model;
    model.params_ = params;
    model.sample_size_ = std::min(params.subsample, human_points.size());

    DeterministicRng rng(seed, "poh/iforest");
    const std::size_t height_limit = static_cast<std::size_t>(
        std::ceil(std::log2(std::max<std::size_t>(model.sample_size_, 2))));

    for (std::size_t t = 0; t < params.trees; ++t) {
        // Subsample without replacement (Fisher–Yates prefix).
        std::vector<std::size_t> idx(human_points.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        for (std::size_t i = 0; i < model.sample_size_; ++i) {
            std::size_t j = i + rng.uniform_u64(idx.size() - i);
            std::swap(idx[i], idx[j]);
        }
        idx.resize(model.sample_size_);

        Tree tree;
        // Iterative build; children link back through parent indices.
        struct Work {
            std::vector<std::size_t> points;
            std::size_t depth;
            std::int32_t parent;
            bool is_left;
        };
        std::vector<Work> stack;
        stack.push_back({std::move(idx), 0, -1, false});
        while (!stack.empty()) {
            Work work = std::move(stack.back());
            stack.pop_back();
            std::int32_t node_index = static_cast<std::int32_t>(tree.nodes.size());
            if (work.parent >= 0) {
                Node& parent = tree.nodes[static_cast<std::size_t>(work.parent)];
                (work.is_left ? parent.left : parent.right) = node_index;
            }
            tree.nodes.emplace_back();

            // Dimensions with spread in this partition.
            std::array<double, kDims> lo{}, hi{};
            lo.fill(std::numeric_limits<double>::infinity());
            hi.fill(-std::numeric_limits<double>::infinity());
            for (std::size_t p : work.points) {
                for (std::size_t d = 0; d < kDims; ++d) {
                    lo[d] = std::min(lo[d], human_points[p][d]);
                    hi[d] = std::max(hi[d], human_points[p][d]);
                }
            }
            std::vector<std::size_t> split_dims;
            for (std::size_t d = 0; d < kDims; ++d)
                if (hi[d] > lo[d]) split_dims.push_back(d);

            if (work.points.size() <= 1 || work.depth >= height_limit ||
                split_dims.empty()) {
                tree.nodes[node_index].dim = -1;
                tree.nodes[node_index].size =
                    static_cast<std::uint32_t>(work.points.size());
                continue;
            }

            std::size_t d = split_dims[rng.uniform_u64(split_dims.size())];
            double split = lo[d] + rng.uniform() * (hi[d] - lo[d]);
            std::vector<std::size_t> left, right;
            for (std::size_t p : work.points) {
                (human_points[p][d] < split ? left : right).push_back(p);
            }
            if (left.empty() || right.empty()) {
                tree.nodes[node_index].dim = -1;
                tree.nodes[node_index].size =
                    static_cast<std::uint32_t>(work.points.size());
                continue;
            }
            tree.nodes[node_index].dim = static_cast<int>(d);
            tree.nodes[node_index].split = split;
            stack.push_back({std::move(left), work.depth + 1, node_index, true});
            stack.push_back({std::move(right), work.depth + 1, node_index, false});
        }
        model.trees_.push_back(std::move(tree));
    }
    model.ready_ = true;

    // Calibration: centre the logistic between human and bot medians when
    // both are present, otherwise just above the human median.
    std::vector<double> human_raw, bot_raw;
    for (const LabeledFeatures& lf : corpus) {
        double a = model.anomaly_score(lf.features);
        (lf.is_human ? human_raw : bot_raw).push_back(a);
    }
    double human_med = median_of(human_raw.empty() ? bot_raw : human_raw);
    if (!bot_raw.empty() && !human_raw.empty()) {
        double bot_med = median_of(bot_raw);
        model.calib_mid_ = (human_med + bot_med) / 2.0;
        model.calib_scale_ = std::max((bot_med - human_med) / 8.0, 1e-6);
    } else {
        model.calib_mid_ = human_med + 0.05;
        model.calib_scale_ = 0.02;
    }

    // model id = hash of hyperparameters + corpus digest
    ByteWriter digest;
    digest.var_string("poh/model/v1");
    digest.u64(seed);
    digest.u64(params.trees);
    digest.u64(params.subsample);
    digest.u64(std::bit_cast<std::uint64_t>(params.theta_lo));
    digest.u64(std::bit_cast<std::uint64_t>(params.theta_hi));
    for (const LabeledFeatures& lf : corpus) {
        digest.u8(lf.is_human ? 1 : 0);
        for (double v : lf.features.as_vector())
            digest.u64(std::bit_cast<std::uint64_t>(v));
    }
    model.model_id_ = to_hex(sha256(digest.bytes()));
    return model;
}

double AnomalyModel::path_length(const Tree& tree,
                                 const std::array<double, 5>& x) const {
    std::size_t depth = 0;
    std::int32_t node = 0;
    for (;;) {
        const Node& n = tree.nodes[static_cast<std::size_t>(node)];
        if (n.dim < 0) return static_cast<double>(depth) + c_factor(n.size);
        node = x[static_cast<std::size_t>(n.dim)] < n.split ? n.left : n.right;
        ++depth;
    }
}

double AnomalyModel::anomaly_score(const FlowFeatures& features) const {
    if (!ready_) throw ModelNotReady();
    auto x = transform(features);
    double total = 0.0;
    for (const Tree& tree : trees_) total += path_length(tree, x);
    double mean_path = total / static_cast<double>(trees_.size());
    double norm = c_factor(sample_size_);
    if (norm <= 0.0) return 0.5;
    return std::exp2(-mean_path / norm);
}

double AnomalyModel::human_score(const FlowFeatures& features) const {
    double a = anomaly_score(features);
    return 1.0 / (1.0 + std::exp((a - calib_mid_) / calib_scale_));
}

HumanLikelihoodScore AnomalyModel::classify(const FlowFeatures& features) const {
    HumanLikelihoodScore score;
    score.score = human_score(features);
    score.label = label_for_score(score.score, params_.theta_lo, params_.theta_hi);
    score.model_id = model_id_;
    return score;
}

namespace {
constexpr char kModelMagic[4] = {'P', 'O', 'H', 'M'};
constexpr std::uint8_t kModelVersion = 1;
}  // namespace

void AnomalyModel::save(const std::filesystem::path& path) const {
    if (!ready_) throw ModelNotReady();
    ByteWriter w;
    w.raw(std::span(reinterpret_cast<const std::uint8_t*>(kModelMagic), 4));
    w.u8(kModelVersion);
    w.var_string(model_id_);
    w.u64(params_.trees);
    w.u64(params_.subsample);
    w.u64(std::bit_cast<std::uint64_t>(params_.theta_lo));
    w.u64(std::bit_cast<std::uint64_t>(params_.theta_hi));
    w.u64(sample_size_);
    w.u64(std::bit_cast<std::uint64_t>(calib_mid_));
    w.u64(std::bit_cast<std::uint64_t>(calib_scale_));
    w.u32(static_cast<std::uint32_t>(trees_.size()));
    for (const Tree& tree : trees_) {
        w.u32(static_cast<std::uint32_t>(tree.nodes.size()));
        for (const Node& n : tree.nodes) {
            w.u8(n.dim < 0 ? 0 : 1);
            if (n.dim < 0) {
                w.u32(n.size);
            } else {
                w.u8(static_cast<std::uint8_t>(n.dim));
                w.u64(std::bit_cast<std::uint64_t>(n.split));
                w.u32(static_cast<std::uint32_t>(n.left));
                w.u32(static_cast<std::uint32_t>(n.right));
            }
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open model file: " + path.string());
    out.write(reinterpret_cast<const char*>(w.bytes().data()),
              static_cast<std::streamsize>(w.bytes().size()));
}

AnomalyModel AnomalyModel::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path.string());
    Bytes data((std::istreambuf_iterator<char>(in)),
               std::istreambuf_iterator<char>());
    ByteReader r(data);

    std::array<std::uint8_t, 4> magic{};
    if (!r.raw(magic) || std::memcmp(magic.data(), kModelMagic, 4) != 0)
        throw std::runtime_error("not a model file: " + path.string());
    if (r.u8() != kModelVersion)
        throw std::runtime_error("unsupported model version");

    AnomalyModel model;
    auto id = r.var_string();
    if (!id) throw std::runtime_error("model file truncated");
    model.model_id_ = *id;
    model.params_.trees = r.u64();
    model.params_.subsample = r.u64();
    model.params_.theta_lo = std::bit_cast<double>(r.u64());
    model.params_.theta_hi = std::bit_cast<double>(r.u64());
    model.sample_size_ = r.u64();
    model.calib_mid_ = std::bit_cast<double>(r.u64());
    model.calib_scale_ = std::bit_cast<double>(r.u64());
    std::uint32_t tree_count = r.u32();
    for (std::uint32_t t = 0; t < tree_count && r.ok(); ++t) {
        Tree tree;
        std::uint32_t node_count = r.u32();
        for (std::uint32_t i = 0; i < node_count && r.ok(); ++i) {
            Node n;
            if (r.u8() == 0) {
                n.dim = -1;
                n.size = r.u32();
            } else {
                n.dim = r.u8();
                n.split = std::bit_cast<double>(r.u64());
                n.left = static_cast<std::int32_t>(r.u32());
                n.right = static_cast<std::int32_t>(r.u32());
            }
            tree.nodes.push_back(n);
        }
        model.trees_.push_back(std::move(tree));
    }
    if (!r.ok() || !r.exhausted())
        throw std::runtime_error("model file corrupt: " + path.string());
    model.ready_ = true;
    return model;
}

double evaluate_auc(const AnomalyModel& model,
                    std::span<const LabeledFeatures> corpus) {
    std::vector<double> human_scores, bot_scores;
    for (const LabeledFeatures& lf : corpus) {
        double s = model.human_score(lf.features);
        (lf.is_human ? human_scores : bot_scores).push_back(s);
    }
    if (human_scores.empty() || bot_scores.empty()) return 0.0;
    double wins = 0.0;
    for (double h : human_scores) {
        for (double b : bot_scores) {
            if (h > b) wins += 1.0;
            else if (h == b) wins += 0.5;
        }
    }
    return wins / (static_cast<double>(human_scores.size()) *
                   static_cast<double>(bot_scores.size()));
}

}  // namespace poh
