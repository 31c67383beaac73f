#pragma once

#include <filesystem>
#include <vector>

#include "poh/flow.hpp"

namespace poh {

struct EmptyCorpus : std::runtime_error {
    EmptyCorpus() : std::runtime_error("training corpus is empty") {}
};
struct ModelNotReady : std::runtime_error {
    ModelNotReady() : std::runtime_error("anomaly model is not trained/loaded") {}
};

struct LabeledFeatures {
    FlowFeatures features;
    bool is_human = false;
};

struct ForestHyperparams {
    std::size_t trees = 100;
    std::size_t subsample = 256;
    double theta_lo = 0.4;
    double theta_hi = 0.6;
};

// Isolation-forest ensemble over the five flow features, trained on the
// human-labeled corpus subset. Raw anomaly scores are mapped through a
// logistic calibrated on corpus medians so that the human score is in [0,1]
// with higher = more human-typical; the mapping is monotone, so ranking
// metrics are unaffected.
class AnomalyModel {
public:
    AnomalyModel() = default;

    static AnomalyModel train(std::span<const LabeledFeatures> corpus,
                              std::uint64_t seed,
                              const ForestHyperparams& params = ForestHyperparams());

    bool ready() const { return ready_; }
    const std::string& model_id() const { return model_id_; }
    const ForestHyperparams& params() const { return params_; }

    // Raw ensemble anomaly score in (0,1]; higher = more isolated.
    double anomaly_score(const FlowFeatures& features) const;
    // Calibrated human-typicality score in [0,1].
    double human_score(const FlowFeatures& features) const;
    HumanLikelihoodScore classify(const FlowFeatures& features) const;

    // Versioned binary with the hyperparameter+corpus digest embedded.
    void save(const std::filesystem::path& path) const;
    static AnomalyModel load(const std::filesystem::path& path);

private:
    struct Node {
        // leaf when dim < 0; size is the training-sample count in the leaf
        int dim = -1;
        double split = 0.0;
        std::uint32_t size = 0;
        std::int32_t left = -1;
        std::int32_t right = -1;
    };
    struct Tree {
        std::vector<Node> nodes;
    };

    static std::array<double, 5> transform(const FlowFeatures& f);
    double path_length(const Tree& tree, const std::array<double, 5>& x) const;

    bool ready_ = false;
    ForestHyperparams params_;
    std::vector<Tree> trees_;
    std::size_t sample_size_ = 0;   // ψ, normalisation constant input
    double calib_mid_ = 0.5;
    double calib_scale_ = 0.02;
    std::string model_id_;
};

// Pairwise human-vs-bot score comparison (the evaluator half of the
// dual-route AUC check; tests recompute it independently by rank).
double evaluate_auc(const AnomalyModel& model,
                    std::span<const LabeledFeatures> corpus);

}  // namespace poh
