#include "sgkd/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sgkd {

void HypersphereConfig::validate() const {
    if (!std::isfinite(gamma) || gamma < 0.0)
        throw std::invalid_argument("gamma must be finite and >= 0");
    if (d_ctx <= 0 || d_feat <= 0)
        throw std::invalid_argument("d_ctx and d_feat must be positive");
}

namespace {

void check_dims(const LearnerParameters& params, const std::vector<double>& ci,
                const std::vector<double>& cj, const std::vector<double>& f,
                const HypersphereConfig& cfg) {
    if (params.d_ctx() != cfg.d_ctx || params.d_feat() != cfg.d_feat ||
        params.w_fuse.cols != 2 * cfg.d_ctx || params.w_classes.cols != cfg.d_feat)
        throw std::invalid_argument("parameter shapes inconsistent with config");
    if (static_cast<int>(ci.size()) != cfg.d_ctx ||
        static_cast<int>(cj.size()) != cfg.d_ctx ||
        static_cast<int>(f.size()) != cfg.d_feat)
        throw std::invalid_argument("input dimensions inconsistent with config");
    for (double x : ci)
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite context input");
    for (double x : cj)
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite context input");
    for (double x : f)
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite union feature");
}

PairActivation to_activation(PairForwardCache&& cache) {
    PairActivation act;
    act.fused = std::move(cache.fused);
    act.logits = std::move(cache.logits);
    act.distribution = std::move(cache.distribution);
    return act;
}

}  // namespace

std::vector<double> fuse_pair(const LearnerParameters& params,
                              const std::vector<double>& context_subject,
                              const std::vector<double>& context_object,
                              const std::vector<double>& union_feature) {
    if (static_cast<int>(context_subject.size()) != params.w_subject.cols ||
        static_cast<int>(context_object.size()) != params.w_object.cols)
        throw std::invalid_argument("fuse_pair: context dimension mismatch");
    if (static_cast<int>(union_feature.size()) != params.w_fuse.rows ||
        params.w_fuse.cols != params.w_subject.rows + params.w_object.rows)
        throw std::invalid_argument("fuse_pair: fuse dimension mismatch");

    std::vector<double> u = matvec(params.w_subject, context_subject);
    std::vector<double> v = matvec(params.w_object, context_object);
    std::vector<double> h;
    h.reserve(u.size() + v.size());
    h.insert(h.end(), u.begin(), u.end());
    h.insert(h.end(), v.begin(), v.end());
    std::vector<double> g = matvec(params.w_fuse, h);
    for (size_t d = 0; d < g.size(); ++d) g[d] *= union_feature[d];
    return g;
}

PairForwardCache forward_with_cache(const LearnerParameters& params,
                                    const std::vector<double>* prior_row,
                                    const std::vector<double>& context_subject,
                                    const std::vector<double>& context_object,
                                    const std::vector<double>& union_feature,
                                    const HypersphereConfig& cfg, Arity arity) {
    check_dims(params, context_subject, context_object, union_feature, cfg);
    if (prior_row && static_cast<int>(prior_row->size()) != params.num_classes())
        throw std::invalid_argument("prior row length mismatch");

    PairForwardCache cache;
    cache.subject_rep = matvec(params.w_subject, context_subject);
    cache.object_rep = matvec(params.w_object, context_object);
    cache.concat_rep.reserve(2 * cfg.d_ctx);
    cache.concat_rep.insert(cache.concat_rep.end(), cache.subject_rep.begin(),
                            cache.subject_rep.end());
    cache.concat_rep.insert(cache.concat_rep.end(), cache.object_rep.begin(),
                            cache.object_rep.end());
    cache.pre_gate = matvec(params.w_fuse, cache.concat_rep);
    cache.fused = cache.pre_gate;
    for (int d = 0; d < cfg.d_feat; ++d) cache.fused[d] *= union_feature[d];

    const int num_classes = params.num_classes();
    cache.logits.resize(num_classes);
    if (cfg.l2_mode == L2Mode::normalized) {
        cache.fused_norm = norm2(cache.fused);
        cache.fused_hat = l2_normalize(cache.fused);
        cache.row_norms.resize(num_classes);
        cache.cosines.resize(num_classes);
        for (int k = 0; k < num_classes; ++k) {
            const double* row = params.w_classes.row(k);
            const double rn = norm2(row, cfg.d_feat);
            cache.row_norms[k] = rn;
            double c = dot(row, cache.fused_hat.data(), cfg.d_feat);
            if (rn > kNormEps) c /= rn;
            // Both sides unit vectors: clamp away rounding excursions so the
            // cosine bound |logit| <= gamma holds exactly.
            if (rn > kNormEps && cache.fused_norm > kNormEps)
                c = std::clamp(c, -1.0, 1.0);
            cache.cosines[k] = c;
            cache.logits[k] = cfg.gamma * c;
        }
    } else {
        for (int k = 0; k < num_classes; ++k)
            cache.logits[k] = dot(params.w_classes.row(k), cache.fused.data(), cfg.d_feat);
    }
    if (prior_row)
        for (int k = 0; k < num_classes; ++k) cache.logits[k] += (*prior_row)[k];
    cache.distribution = softmax(cache.logits, arity);
    return cache;
}

PairActivation forward_F(const LearnerParameters& params_f,
                         const std::vector<double>& prior_row,
                         const std::vector<double>& context_subject,
                         const std::vector<double>& context_object,
                         const std::vector<double>& union_feature,
                         const HypersphereConfig& cfg) {
    return to_activation(forward_with_cache(params_f, &prior_row, context_subject,
                                            context_object, union_feature, cfg,
                                            Arity::FSpace));
}

PairActivation forward_G(const LearnerParameters& params_g,
                         const std::vector<double>& context_subject,
                         const std::vector<double>& context_object,
                         const std::vector<double>& union_feature,
                         const HypersphereConfig& cfg) {
    return to_activation(forward_with_cache(params_g, nullptr, context_subject,
                                            context_object, union_feature, cfg,
                                            Arity::GSpace));
}

RelationDistribution forward_G_tempered(const LearnerParameters& params_g,
                                        const std::vector<double>& context_subject,
                                        const std::vector<double>& context_object,
                                        const std::vector<double>& union_feature,
                                        const HypersphereConfig& cfg,
                                        double temperature) {
    if (!(temperature > 0.0))
        throw std::invalid_argument("temperature must be > 0");
    PairActivation act = forward_G(params_g, context_subject, context_object,
                                   union_feature, cfg);
    std::vector<double> scaled(act.logits.size());
    for (size_t k = 0; k < act.logits.size(); ++k)
        scaled[k] = act.logits[k] / temperature;
    return softmax(scaled, Arity::GSpace);
}

LearnerParameters init_parameters(int d_ctx, int d_feat, int num_classes,
                                  RngStream& rng) {
    auto fill = [&rng](Matrix& m, int fan_in) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (double& x : m.a) x = rng.uniform(-bound, bound);
    };
    LearnerParameters p;
    p.w_subject = Matrix(d_ctx, d_ctx);
    p.w_object = Matrix(d_ctx, d_ctx);
    p.w_fuse = Matrix(d_feat, 2 * d_ctx);
    p.w_classes = Matrix(num_classes, d_feat);
    fill(p.w_subject, d_ctx);
    fill(p.w_object, d_ctx);
    fill(p.w_fuse, 2 * d_ctx);
    fill(p.w_classes, d_feat);
    return p;
}

}  // namespace sgkd
