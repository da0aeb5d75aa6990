#pragma once

#include "sgkd/core.hpp"
#include "sgkd/model.hpp"
#include "sgkd/prior.hpp"

#include <utility>
#include <vector>

namespace sgkd {

enum class KDScheme { uKD, cKD };

struct KDConfig {
    KDScheme scheme = KDScheme::cKD;
    double temperature = 1.5;
    double lambda_gf = 0.1;       // KD loss weight
    double lambda_g = 0.1;        // entropy term weight in L_G
    long kd_start_iteration = 10000;
    double entropy_floor = 1e-6;  // cKD guard against one-hot teachers
    // Renormalize the first |R'| elements of p before the KL (default), or
    // compare against the raw prefix.
    bool renormalize_student = true;
    // Optional variants, both off by default: divide the student logits by T
    // inside the KD term, and scale the KD terms by T^2.
    bool temper_student = false;
    bool kd_t_squared = false;

    void validate() const;
};

struct LossBreakdown {
    double loss_f = 0.0;
    double loss_g_supervised = 0.0;
    double loss_g_entropy = 0.0;
    // Raw per-set sums of w * KL (T^2-scaled when that variant is on);
    // lambda_gf enters only through `total`.
    double kd_labeled = 0.0;
    double kd_unlabeled = 0.0;
    double total = 0.0;
};

struct GradientSet {
    LearnerParameters f;
    LearnerParameters g;
};

GradientSet make_zero_gradients(const LearnerParameters& params_f,
                                const LearnerParameters& params_g);

// ---------------------------------------------------------------------------
// Per-image loss terms
// ---------------------------------------------------------------------------

// Negative log likelihood over all pairs of one image; UNANNOTATED pairs
// target the no-relation index (the distribution's last slot).
double loss_F(const std::vector<std::pair<PairExample, RelationDistribution>>& predictions);

// Supervised NLL over R^L and mean entropy over R^U, both unscaled; the
// caller combines them as supervised - lambda_g * entropy_term.
std::pair<double, double> loss_G(
    const std::vector<std::pair<PairExample, RelationDistribution>>& labeled,
    const std::vector<RelationDistribution>& unlabeled);

// Per-pair KD weights over one set: uniform 1/n, or certainty-based
// sum_m max(H_m, floor) / max(H_k, floor).
std::vector<double> kd_weights(const std::vector<RelationDistribution>& distributions,
                               KDScheme scheme, double entropy_floor);

// The first |R'| elements of an F-space distribution, optionally renormalized.
RelationDistribution student_prefix(const RelationDistribution& p_full, bool renormalize);

// lambda_gf * sum_k w_k KL(q_k || p_k), separately for the labeled and
// unlabeled sets.
std::pair<double, double> loss_KD(const std::vector<RelationDistribution>& q_labeled,
                                  const std::vector<RelationDistribution>& p_labeled,
                                  const std::vector<double>& weights_labeled,
                                  const std::vector<RelationDistribution>& q_unlabeled,
                                  const std::vector<RelationDistribution>& p_unlabeled,
                                  const std::vector<double>& weights_unlabeled,
                                  double lambda_gf);

// ---------------------------------------------------------------------------
// Combined objective
// ---------------------------------------------------------------------------

// Teacher-side KD quantities captured at a fixed parameter point. The KD loss
// treats them as constants (no gradient reaches G); the finite-difference
// harness uses this to probe the loss under the same stop-gradient semantics.
struct FrozenTeacher {
    // Indexed [image][pair]; weight is the pair's KD weight within its set.
    std::vector<std::vector<RelationDistribution>> tempered;
    std::vector<std::vector<double>> weights;
};

FrozenTeacher capture_teacher(const std::vector<SceneSample>& batch,
                              const LearnerParameters& params_g,
                              const HypersphereConfig& model_cfg,
                              const KDConfig& kd_cfg);

// Mean over images of the per-image combined loss
//   L_F + (L_G_sup - lambda_g * L_G_ent) + lambda_gf * (KD_L + KD_U).
// KD terms are exactly zero before kd_start_iteration or when lambda_gf = 0.
// When `frozen` is non-null its teacher values replace the live ones.
LossBreakdown evaluate_total_loss(const std::vector<SceneSample>& batch,
                                  const LearnerParameters& params_f,
                                  const LearnerParameters& params_g,
                                  const FrequencyPrior& prior,
                                  const HypersphereConfig& model_cfg,
                                  const KDConfig& kd_cfg, long iteration,
                                  const FrozenTeacher* frozen = nullptr);

// Same loss plus analytic gradients for all eight matrices. KD gradients
// touch only F; L_G gradients touch only G; the prior receives none.
std::pair<LossBreakdown, GradientSet> total_loss_and_gradients(
    const std::vector<SceneSample>& batch, const LearnerParameters& params_f,
    const LearnerParameters& params_g, const FrequencyPrior& prior,
    const HypersphereConfig& model_cfg, const KDConfig& kd_cfg, long iteration);

}  // namespace sgkd
