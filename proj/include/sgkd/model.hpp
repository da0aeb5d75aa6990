#pragma once

#include "sgkd/core.hpp"
#include "sgkd/rng.hpp"

#include <vector>

namespace sgkd {

enum class L2Mode { normalized, raw };

struct HypersphereConfig {
    double gamma = 12.0;  // sphere radius
    int d_ctx = 16;
    int d_feat = 32;
    // `raw` skips L2 normalization of the class rows and the fused feature;
    // it exists to reproduce the un-normalized baseline ablation.
    L2Mode l2_mode = L2Mode::normalized;

    void validate() const;
};

struct PairActivation {
    std::vector<double> fused;   // g, length d_feat
    std::vector<double> logits;  // |R| for F, |R'| for G
    RelationDistribution distribution;
};

// Intermediates of one pair's forward pass, kept for hand-derived backprop.
struct PairForwardCache {
    std::vector<double> subject_rep;   // W_s * c_i
    std::vector<double> object_rep;    // W_o * c_j
    std::vector<double> concat_rep;    // [subject_rep, object_rep]
    std::vector<double> pre_gate;      // W_c * concat_rep
    std::vector<double> fused;         // pre_gate (.) f_ij
    std::vector<double> fused_hat;     // normalized fused (or fused in raw mode)
    double fused_norm = 0.0;
    std::vector<double> row_norms;     // per class row of W
    std::vector<double> cosines;       // normalized-mode class scores
    std::vector<double> logits;
    RelationDistribution distribution;
};

// g = (W_c * [W_s c_i, W_o c_j]) (.) f_ij
std::vector<double> fuse_pair(const LearnerParameters& params,
                              const std::vector<double>& context_subject,
                              const std::vector<double>& context_object,
                              const std::vector<double>& union_feature);

// Learner F over R: gamma * cos(W, g) + prior row, softmaxed.
PairActivation forward_F(const LearnerParameters& params_f,
                         const std::vector<double>& prior_row,
                         const std::vector<double>& context_subject,
                         const std::vector<double>& context_object,
                         const std::vector<double>& union_feature,
                         const HypersphereConfig& cfg);

// Learner G over R': same geometry, no prior term.
PairActivation forward_G(const LearnerParameters& params_g,
                         const std::vector<double>& context_subject,
                         const std::vector<double>& context_object,
                         const std::vector<double>& union_feature,
                         const HypersphereConfig& cfg);

// softmax(logits_G / T); equals forward_G's distribution exactly at T = 1.
RelationDistribution forward_G_tempered(const LearnerParameters& params_g,
                                        const std::vector<double>& context_subject,
                                        const std::vector<double>& context_object,
                                        const std::vector<double>& union_feature,
                                        const HypersphereConfig& cfg, double temperature);

// Full-cache forward shared by the public entry points and the loss module.
// Pass nullptr for prior_row to get learner-G behavior.
PairForwardCache forward_with_cache(const LearnerParameters& params,
                                    const std::vector<double>* prior_row,
                                    const std::vector<double>& context_subject,
                                    const std::vector<double>& context_object,
                                    const std::vector<double>& union_feature,
                                    const HypersphereConfig& cfg, Arity arity);

// Uniform init on [-1/sqrt(fan_in), 1/sqrt(fan_in)] per matrix.
LearnerParameters init_parameters(int d_ctx, int d_feat, int num_classes,
                                  RngStream& rng);

}  // namespace sgkd
