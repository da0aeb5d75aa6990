#include "sgkd/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgkd {

namespace {

constexpr double kLogGuard = 1e-300;

double safe_nll(double p) { return -std::log(std::max(p, kLogGuard)); }

}  // namespace

void KDConfig::validate() const {
    if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be > 0");
    if (lambda_gf < 0.0) throw std::invalid_argument("lambda_gf must be >= 0");
    if (lambda_g < 0.0) throw std::invalid_argument("lambda_g must be >= 0");
    if (kd_start_iteration < 0)
        throw std::invalid_argument("kd_start_iteration must be >= 0");
    if (!(entropy_floor > 0.0)) throw std::invalid_argument("entropy_floor must be > 0");
}

GradientSet make_zero_gradients(const LearnerParameters& params_f,
                                const LearnerParameters& params_g) {
    GradientSet grads;
    auto zero_like = [](const LearnerParameters& p) {
        LearnerParameters z;
        z.w_subject = Matrix(p.w_subject.rows, p.w_subject.cols);
        z.w_object = Matrix(p.w_object.rows, p.w_object.cols);
        z.w_fuse = Matrix(p.w_fuse.rows, p.w_fuse.cols);
        z.w_classes = Matrix(p.w_classes.rows, p.w_classes.cols);
        return z;
    };
    grads.f = zero_like(params_f);
    grads.g = zero_like(params_g);
    return grads;
}

// ---------------------------------------------------------------------------
// Per-image loss terms
// ---------------------------------------------------------------------------

double loss_F(
    const std::vector<std::pair<PairExample, RelationDistribution>>& predictions) {
    if (predictions.empty()) throw std::runtime_error("no pairs");
    double sum = 0.0;
    for (const auto& [pair, dist] : predictions) {
        const int no_rel = dist.size() - 1;
        const int target = pair.is_annotated() ? pair.label : no_rel;
        if (target < 0 || target >= dist.size())
            throw std::invalid_argument("loss_F: target out of range");
        sum += safe_nll(dist.probs[target]);
    }
    return sum / static_cast<double>(predictions.size());
}

std::pair<double, double> loss_G(
    const std::vector<std::pair<PairExample, RelationDistribution>>& labeled,
    const std::vector<RelationDistribution>& unlabeled) {
    if (labeled.empty() && unlabeled.empty()) throw std::runtime_error("no pairs");
    double supervised = 0.0;
    for (const auto& [pair, dist] : labeled) {
        if (pair.label < 0 || pair.label >= dist.size())
            throw std::invalid_argument("loss_G: labeled target out of R'");
        supervised += safe_nll(dist.probs[pair.label]);
    }
    if (!labeled.empty()) supervised /= static_cast<double>(labeled.size());
    double entropy_term = 0.0;
    for (const auto& dist : unlabeled) entropy_term += entropy(dist);
    if (!unlabeled.empty()) entropy_term /= static_cast<double>(unlabeled.size());
    return {supervised, entropy_term};
}

std::vector<double> kd_weights(const std::vector<RelationDistribution>& distributions,
                               KDScheme scheme, double entropy_floor) {
    if (distributions.empty()) throw std::invalid_argument("kd_weights: empty list");
    const size_t n = distributions.size();
    if (scheme == KDScheme::uKD)
        return std::vector<double>(n, 1.0 / static_cast<double>(n));
    std::vector<double> floored(n);
    double sum = 0.0;
    for (size_t k = 0; k < n; ++k) {
        floored[k] = std::max(entropy(distributions[k]), entropy_floor);
        sum += floored[k];
    }
    std::vector<double> weights(n);
    for (size_t k = 0; k < n; ++k) weights[k] = sum / floored[k];
    return weights;
}

RelationDistribution student_prefix(const RelationDistribution& p_full,
                                    bool renormalize) {
    if (p_full.size() < 2)
        throw std::invalid_argument("student_prefix: need at least 2 classes");
    RelationDistribution prefix;
    prefix.arity = Arity::GSpace;
    prefix.probs.assign(p_full.probs.begin(), p_full.probs.end() - 1);
    if (renormalize) {
        double mass = 0.0;
        for (double p : prefix.probs) mass += p;
        if (mass > 0.0)
            for (double& p : prefix.probs) p /= mass;
        else
            for (double& p : prefix.probs)
                p = 1.0 / static_cast<double>(prefix.probs.size());
    }
    return prefix;
}

std::pair<double, double> loss_KD(const std::vector<RelationDistribution>& q_labeled,
                                  const std::vector<RelationDistribution>& p_labeled,
                                  const std::vector<double>& weights_labeled,
                                  const std::vector<RelationDistribution>& q_unlabeled,
                                  const std::vector<RelationDistribution>& p_unlabeled,
                                  const std::vector<double>& weights_unlabeled,
                                  double lambda_gf) {
    auto term = [lambda_gf](const std::vector<RelationDistribution>& qs,
                            const std::vector<RelationDistribution>& ps,
                            const std::vector<double>& ws) {
        if (qs.size() != ps.size() || qs.size() != ws.size())
            throw std::invalid_argument("loss_KD: list length mismatch");
        double sum = 0.0;
        for (size_t k = 0; k < qs.size(); ++k)
            sum += ws[k] * kl_divergence(qs[k], ps[k]);
        return lambda_gf * sum;
    };
    return {term(q_labeled, p_labeled, weights_labeled),
            term(q_unlabeled, p_unlabeled, weights_unlabeled)};
}

// ---------------------------------------------------------------------------
// Combined objective with hand-derived gradients
// ---------------------------------------------------------------------------

namespace {

// Backpropagates d(loss)/d(logits) of one pair through the learner.
void accumulate_pair_gradients(const LearnerParameters& params,
                               const HypersphereConfig& cfg,
                               const PairForwardCache& cache, const PairExample& pair,
                               const std::vector<double>& dz,
                               LearnerParameters& grad) {
    const int num_classes = params.num_classes();
    const int d_feat = cfg.d_feat;
    const int d_ctx = cfg.d_ctx;
    std::vector<double> dg(d_feat, 0.0);

    if (cfg.l2_mode == L2Mode::normalized) {
        std::vector<double> dghat(d_feat, 0.0);
        for (int k = 0; k < num_classes; ++k) {
            const double coef = cfg.gamma * dz[k];
            if (coef == 0.0) continue;
            const double* row = params.w_classes.row(k);
            const double rn = cache.row_norms[k];
            if (rn > kNormEps) {
                const double cosv = cache.cosines[k];
                for (int d = 0; d < d_feat; ++d) {
                    const double w_hat = row[d] / rn;
                    grad.w_classes(k, d) += coef * (cache.fused_hat[d] - cosv * w_hat) / rn;
                    dghat[d] += coef * w_hat;
                }
            } else {
                // Degenerate row: normalization is a pass-through.
                for (int d = 0; d < d_feat; ++d) {
                    grad.w_classes(k, d) += coef * cache.fused_hat[d];
                    dghat[d] += coef * row[d];
                }
            }
        }
        if (cache.fused_norm > kNormEps) {
            const double proj = dot(dghat, cache.fused_hat);
            for (int d = 0; d < d_feat; ++d)
                dg[d] = (dghat[d] - proj * cache.fused_hat[d]) / cache.fused_norm;
        } else {
            dg = dghat;
        }
    } else {
        for (int k = 0; k < num_classes; ++k) {
            if (dz[k] == 0.0) continue;
            const double* row = params.w_classes.row(k);
            for (int d = 0; d < d_feat; ++d) {
                grad.w_classes(k, d) += dz[k] * cache.fused[d];
                dg[d] += dz[k] * row[d];
            }
        }
    }

    // g = pre_gate (.) f
    std::vector<double> dm(d_feat);
    for (int d = 0; d < d_feat; ++d) dm[d] = dg[d] * pair.union_feature[d];
    // pre_gate = W_c h
    std::vector<double> dh(2 * d_ctx, 0.0);
    for (int r = 0; r < d_feat; ++r) {
        if (dm[r] == 0.0) continue;
        const double* row = params.w_fuse.row(r);
        double* grad_row = grad.w_fuse.row(r);
        for (int c = 0; c < 2 * d_ctx; ++c) {
            grad_row[c] += dm[r] * cache.concat_rep[c];
            dh[c] += dm[r] * row[c];
        }
    }
    // subject_rep = W_s c_i; object_rep = W_o c_j
    for (int r = 0; r < d_ctx; ++r) {
        double* gs = grad.w_subject.row(r);
        double* go = grad.w_object.row(r);
        for (int c = 0; c < d_ctx; ++c) {
            gs[c] += dh[r] * pair.context_subject[c];
            go[c] += dh[d_ctx + r] * pair.context_object[c];
        }
    }
}

// d(-H(q))/dz_k = q_k (ln q_k + H)
double neg_entropy_dz(double qk, double h) {
    return qk > 0.0 ? qk * (std::log(qk) + h) : 0.0;
}

struct KDPairTerm {
    double kl = 0.0;
    std::vector<double> dz_f;  // d(w*KL)/d(z_F), unscaled by lambda_gf
};

// KL(q_tilde || student prefix of p) for one pair plus its gradient to F's
// logits, with the teacher constant. `p_kd` is the F distribution the KD term
// sees (tempered when that variant is on). In the non-renormalized variant
// the raw prefix is not a distribution, so the divergence is evaluated
// directly instead of through kl_divergence (which renormalizes its second
// argument).
KDPairTerm kd_pair_term(const RelationDistribution& q_tilde,
                        const RelationDistribution& p_kd, double weight,
                        double dz_scale, bool renormalize) {
    const int num_real = q_tilde.size();
    KDPairTerm out;
    out.dz_f.assign(num_real + 1, 0.0);
    if (renormalize) {
        RelationDistribution prefix = student_prefix(p_kd, true);
        out.kl = weight * kl_divergence(q_tilde, prefix);
        for (int a = 0; a < num_real; ++a)
            out.dz_f[a] = weight * dz_scale * (prefix.probs[a] - q_tilde.probs[a]);
    } else {
        double div = 0.0;
        for (int a = 0; a < num_real; ++a) {
            const double qa = q_tilde.probs[a];
            if (qa > 0.0)
                div += qa * (std::log(qa) - std::log(std::max(p_kd.probs[a], kProbEps)));
        }
        out.kl = weight * div;
        for (int a = 0; a <= num_real; ++a) {
            const double qa = a < num_real ? q_tilde.probs[a] : 0.0;
            out.dz_f[a] = weight * dz_scale * (p_kd.probs[a] - qa);
        }
    }
    return out;
}

}  // namespace

FrozenTeacher capture_teacher(const std::vector<SceneSample>& batch,
                              const LearnerParameters& params_g,
                              const HypersphereConfig& model_cfg,
                              const KDConfig& kd_cfg) {
    FrozenTeacher frozen;
    frozen.tempered.resize(batch.size());
    frozen.weights.resize(batch.size());
    for (size_t img = 0; img < batch.size(); ++img) {
        const auto& sample = batch[img];
        const size_t n = sample.pairs.size();
        frozen.tempered[img].resize(n);
        frozen.weights[img].assign(n, 0.0);
        std::vector<RelationDistribution> q_labeled, q_unlabeled;
        std::vector<size_t> idx_labeled, idx_unlabeled;
        for (size_t p = 0; p < n; ++p) {
            const auto& pair = sample.pairs[p];
            PairActivation act = forward_G(params_g, pair.context_subject,
                                           pair.context_object, pair.union_feature,
                                           model_cfg);
            std::vector<double> scaled(act.logits.size());
            for (size_t k = 0; k < act.logits.size(); ++k)
                scaled[k] = act.logits[k] / kd_cfg.temperature;
            frozen.tempered[img][p] = softmax(scaled, Arity::GSpace);
            if (pair.is_annotated()) {
                q_labeled.push_back(act.distribution);
                idx_labeled.push_back(p);
            } else {
                q_unlabeled.push_back(act.distribution);
                idx_unlabeled.push_back(p);
            }
        }
        if (!q_labeled.empty()) {
            auto w = kd_weights(q_labeled, kd_cfg.scheme, kd_cfg.entropy_floor);
            for (size_t k = 0; k < w.size(); ++k) frozen.weights[img][idx_labeled[k]] = w[k];
        }
        if (!q_unlabeled.empty()) {
            auto w = kd_weights(q_unlabeled, kd_cfg.scheme, kd_cfg.entropy_floor);
            for (size_t k = 0; k < w.size(); ++k)
                frozen.weights[img][idx_unlabeled[k]] = w[k];
        }
    }
    return frozen;
}

namespace {

LossBreakdown compute_total(const std::vector<SceneSample>& batch,
                            const LearnerParameters& params_f,
                            const LearnerParameters& params_g,
                            const FrequencyPrior& prior,
                            const HypersphereConfig& model_cfg, const KDConfig& kd_cfg,
                            long iteration, const FrozenTeacher* frozen,
                            GradientSet* grads_out) {
    if (batch.empty()) throw std::runtime_error("no pairs");
    if (iteration < 0) throw std::invalid_argument("iteration must be >= 0");
    model_cfg.validate();
    kd_cfg.validate();

    const bool kd_active =
        iteration >= kd_cfg.kd_start_iteration && kd_cfg.lambda_gf > 0.0;
    const double batch_scale = 1.0 / static_cast<double>(batch.size());
    const int num_full = params_f.num_classes();
    const int num_real = params_g.num_classes();
    if (num_full != num_real + 1)
        throw std::invalid_argument("F and G arities must differ by exactly 1");

    // KD gradient scale per unit (w * KL): lambda, optional T^2, optional
    // student-side 1/T from the tempered-logit chain. The T^2 factor also
    // multiplies the stored KD loss terms so the breakdown identity holds.
    const double t2 = kd_cfg.kd_t_squared
                          ? kd_cfg.temperature * kd_cfg.temperature
                          : 1.0;
    const double kd_dz_scale =
        kd_cfg.temper_student ? 1.0 / kd_cfg.temperature : 1.0;

    LossBreakdown sum;
    for (size_t img = 0; img < batch.size(); ++img) {
        const auto& sample = batch[img];
        if (sample.pairs.empty()) throw std::runtime_error("no pairs");
        const size_t n = sample.pairs.size();

        size_t num_labeled = 0;
        for (const auto& pair : sample.pairs) num_labeled += pair.is_annotated();
        const size_t num_unlabeled = n - num_labeled;

        std::vector<RelationDistribution> q_labeled, q_unlabeled;
        std::vector<size_t> idx_labeled, idx_unlabeled;
        std::vector<PairForwardCache> caches_f(n);
        std::vector<PairForwardCache> caches_g(n);

        double img_loss_f = 0.0, img_sup = 0.0, img_ent = 0.0;
        for (size_t p = 0; p < n; ++p) {
            const auto& pair = sample.pairs[p];
            const std::vector<double> prior_row =
                lookup_prior(prior, pair.subject_class, pair.object_class);
            caches_f[p] = forward_with_cache(params_f, &prior_row, pair.context_subject,
                                             pair.context_object, pair.union_feature,
                                             model_cfg, Arity::FSpace);
            caches_g[p] = forward_with_cache(params_g, nullptr, pair.context_subject,
                                             pair.context_object, pair.union_feature,
                                             model_cfg, Arity::GSpace);
            const int target_f = pair.is_annotated() ? pair.label : num_real;
            img_loss_f += safe_nll(caches_f[p].distribution.probs[target_f]);
            if (pair.is_annotated()) {
                img_sup += safe_nll(caches_g[p].distribution.probs[pair.label]);
                q_labeled.push_back(caches_g[p].distribution);
                idx_labeled.push_back(p);
            } else {
                img_ent += entropy(caches_g[p].distribution);
                q_unlabeled.push_back(caches_g[p].distribution);
                idx_unlabeled.push_back(p);
            }
        }
        img_loss_f /= static_cast<double>(n);
        if (num_labeled > 0) img_sup /= static_cast<double>(num_labeled);
        if (num_unlabeled > 0) img_ent /= static_cast<double>(num_unlabeled);
        sum.loss_f += img_loss_f * batch_scale;
        sum.loss_g_supervised += img_sup * batch_scale;
        sum.loss_g_entropy += img_ent * batch_scale;

        // KD weights and teacher distributions (frozen ones when provided).
        std::vector<double> pair_weight(n, 0.0);
        std::vector<const RelationDistribution*> pair_teacher(n, nullptr);
        std::vector<RelationDistribution> tempered_live(n);
        if (kd_active) {
            if (frozen) {
                for (size_t p = 0; p < n; ++p) {
                    pair_weight[p] = frozen->weights[img][p];
                    pair_teacher[p] = &frozen->tempered[img][p];
                }
            } else {
                for (size_t p = 0; p < n; ++p) {
                    std::vector<double> scaled(caches_g[p].logits.size());
                    for (size_t k = 0; k < scaled.size(); ++k)
                        scaled[k] = caches_g[p].logits[k] / kd_cfg.temperature;
                    tempered_live[p] = softmax(scaled, Arity::GSpace);
                    pair_teacher[p] = &tempered_live[p];
                }
                if (!q_labeled.empty()) {
                    auto w = kd_weights(q_labeled, kd_cfg.scheme, kd_cfg.entropy_floor);
                    for (size_t k = 0; k < w.size(); ++k)
                        pair_weight[idx_labeled[k]] = w[k];
                }
                if (!q_unlabeled.empty()) {
                    auto w = kd_weights(q_unlabeled, kd_cfg.scheme, kd_cfg.entropy_floor);
                    for (size_t k = 0; k < w.size(); ++k)
                        pair_weight[idx_unlabeled[k]] = w[k];
                }
            }
        }

        for (size_t p = 0; p < n; ++p) {
            const auto& pair = sample.pairs[p];

            KDPairTerm kd{};
            if (kd_active) {
                RelationDistribution p_kd;
                if (kd_cfg.temper_student) {
                    std::vector<double> scaled(caches_f[p].logits.size());
                    for (size_t k = 0; k < scaled.size(); ++k)
                        scaled[k] = caches_f[p].logits[k] / kd_cfg.temperature;
                    p_kd = softmax(scaled, Arity::FSpace);
                } else {
                    p_kd = caches_f[p].distribution;
                }
                kd = kd_pair_term(*pair_teacher[p], p_kd, pair_weight[p], kd_dz_scale,
                                  kd_cfg.renormalize_student);
                if (pair.is_annotated())
                    sum.kd_labeled += t2 * kd.kl * batch_scale;
                else
                    sum.kd_unlabeled += t2 * kd.kl * batch_scale;
            }

            if (!grads_out) continue;

            // d(batch loss)/d(z_F)
            std::vector<double> dz_f(num_full, 0.0);
            const int target_f = pair.is_annotated() ? pair.label : num_real;
            const double f_scale = batch_scale / static_cast<double>(n);
            for (int k = 0; k < num_full; ++k)
                dz_f[k] = f_scale * (caches_f[p].distribution.probs[k] -
                                     (k == target_f ? 1.0 : 0.0));
            if (kd_active) {
                const double kd_scale = kd_cfg.lambda_gf * t2 * batch_scale;
                for (int k = 0; k < num_full; ++k) dz_f[k] += kd_scale * kd.dz_f[k];
            }
            accumulate_pair_gradients(params_f, model_cfg, caches_f[p], pair, dz_f,
                                      grads_out->f);

            // d(batch loss)/d(z_G)
            std::vector<double> dz_g(num_real, 0.0);
            const auto& q = caches_g[p].distribution.probs;
            if (pair.is_annotated()) {
                const double g_scale = batch_scale / static_cast<double>(num_labeled);
                for (int k = 0; k < num_real; ++k)
                    dz_g[k] = g_scale * (q[k] - (k == pair.label ? 1.0 : 0.0));
            } else if (kd_cfg.lambda_g > 0.0) {
                const double h = entropy(caches_g[p].distribution);
                const double g_scale =
                    kd_cfg.lambda_g * batch_scale / static_cast<double>(num_unlabeled);
                for (int k = 0; k < num_real; ++k)
                    dz_g[k] = g_scale * neg_entropy_dz(q[k], h);
            }
            accumulate_pair_gradients(params_g, model_cfg, caches_g[p], pair, dz_g,
                                      grads_out->g);
        }
    }

    sum.total = sum.loss_f + sum.loss_g_supervised - kd_cfg.lambda_g * sum.loss_g_entropy +
                kd_cfg.lambda_gf * (sum.kd_labeled + sum.kd_unlabeled);
    return sum;
}

}  // namespace

LossBreakdown evaluate_total_loss(const std::vector<SceneSample>& batch,
                                  const LearnerParameters& params_f,
                                  const LearnerParameters& params_g,
                                  const FrequencyPrior& prior,
                                  const HypersphereConfig& model_cfg,
                                  const KDConfig& kd_cfg, long iteration,
                                  const FrozenTeacher* frozen) {
    return compute_total(batch, params_f, params_g, prior, model_cfg, kd_cfg, iteration,
                         frozen, nullptr);
}

std::pair<LossBreakdown, GradientSet> total_loss_and_gradients(
    const std::vector<SceneSample>& batch, const LearnerParameters& params_f,
    const LearnerParameters& params_g, const FrequencyPrior& prior,
    const HypersphereConfig& model_cfg, const KDConfig& kd_cfg, long iteration) {
    GradientSet grads = make_zero_gradients(params_f, params_g);
    LossBreakdown breakdown = compute_total(batch, params_f, params_g, prior, model_cfg,
                                            kd_cfg, iteration, nullptr, &grads);
    return {breakdown, grads};
}

}  // namespace sgkd
