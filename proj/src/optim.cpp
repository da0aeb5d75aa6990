#include "sgkd/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sgkd {

void ScheduleConfig::validate() const {
    if (!(base_lr > 0.0) || !(peak_lr >= base_lr))
        throw std::invalid_argument("require 0 < base_lr <= peak_lr");
    if (!(decay_factor > 0.0 && decay_factor < 1.0))
        throw std::invalid_argument("decay_factor must be in (0, 1)");
    if (warmup_iterations <= 0 || validation_interval <= 0 || patience_rounds <= 0 ||
        max_decays <= 0 || max_iterations <= 0 || batch_size <= 0)
        throw std::invalid_argument("schedule counters must be positive");
    if (momentum < 0.0 || momentum >= 1.0)
        throw std::invalid_argument("momentum must be in [0, 1)");
}

double lr_at(long iteration, int decay_count, const ScheduleConfig& cfg) {
    if (iteration < 0) throw std::invalid_argument("iteration must be >= 0");
    if (iteration < cfg.warmup_iterations)
        return cfg.base_lr + (cfg.peak_lr - cfg.base_lr) *
                                 static_cast<double>(iteration) /
                                 static_cast<double>(cfg.warmup_iterations);
    return cfg.peak_lr * std::pow(cfg.decay_factor, decay_count);
}

namespace {

void step_matrix(Matrix& param, Matrix& buffer, const Matrix& grad, double lr,
                 double momentum, const char* name) {
    if (!grad.all_finite())
        throw std::runtime_error(std::string("gradient blowup in ") + name);
    for (size_t i = 0; i < param.a.size(); ++i) {
        buffer.a[i] = momentum * buffer.a[i] + grad.a[i];
        param.a[i] -= lr * buffer.a[i];
    }
}

}  // namespace

void sgd_step(TrainState& state, const GradientSet& grads, const ScheduleConfig& cfg) {
    step_matrix(state.params_f.w_subject, state.momentum_buffers.f.w_subject,
                grads.f.w_subject, state.lr, cfg.momentum, "F.W_s");
    step_matrix(state.params_f.w_object, state.momentum_buffers.f.w_object,
                grads.f.w_object, state.lr, cfg.momentum, "F.W_o");
    step_matrix(state.params_f.w_fuse, state.momentum_buffers.f.w_fuse, grads.f.w_fuse,
                state.lr, cfg.momentum, "F.W_c");
    step_matrix(state.params_f.w_classes, state.momentum_buffers.f.w_classes,
                grads.f.w_classes, state.lr, cfg.momentum, "F.W");
    step_matrix(state.params_g.w_subject, state.momentum_buffers.g.w_subject,
                grads.g.w_subject, state.lr, cfg.momentum, "G.W_s");
    step_matrix(state.params_g.w_object, state.momentum_buffers.g.w_object,
                grads.g.w_object, state.lr, cfg.momentum, "G.W_o");
    step_matrix(state.params_g.w_fuse, state.momentum_buffers.g.w_fuse, grads.g.w_fuse,
                state.lr, cfg.momentum, "G.W_c");
    step_matrix(state.params_g.w_classes, state.momentum_buffers.g.w_classes,
                grads.g.w_classes, state.lr, cfg.momentum, "G.W");
    state.iteration++;
}

bool maybe_decay_and_stop(TrainState& state, double validation_recall,
                          const ScheduleConfig& cfg) {
    const bool improved = validation_recall > state.best_validation_recall + 1e-6;
    if (improved) {
        state.best_validation_recall = validation_recall;
        state.rounds_since_improvement = 0;
    } else {
        state.rounds_since_improvement++;
        if (state.rounds_since_improvement >= cfg.patience_rounds) {
            state.decay_count++;
            state.rounds_since_improvement = 0;
        }
    }
    return state.decay_count > cfg.max_decays || state.iteration >= cfg.max_iterations;
}

namespace {

void add_breakdown(LossBreakdown& acc, const LossBreakdown& x) {
    acc.loss_f += x.loss_f;
    acc.loss_g_supervised += x.loss_g_supervised;
    acc.loss_g_entropy += x.loss_g_entropy;
    acc.kd_labeled += x.kd_labeled;
    acc.kd_unlabeled += x.kd_unlabeled;
    acc.total += x.total;
}

void scale_breakdown(LossBreakdown& acc, double s) {
    acc.loss_f *= s;
    acc.loss_g_supervised *= s;
    acc.loss_g_entropy *= s;
    acc.kd_labeled *= s;
    acc.kd_unlabeled *= s;
    acc.total *= s;
}

}  // namespace

TrainResult train(const std::vector<SceneSample>& dataset_train,
                  const std::vector<SceneSample>& dataset_val,
                  const EntityVocabulary& entities, const RelationVocabulary& relations,
                  const TrainOptions& options, const TrainState* resume_from,
                  const ValidationHook& on_validation) {
    if (dataset_train.empty() || dataset_val.empty())
        throw std::runtime_error("datasets must be nonempty");
    options.schedule.validate();
    options.kd.validate();
    options.model.validate();
    const auto k_it = std::find(options.eval_ks.begin(), options.eval_ks.end(),
                                options.scheduling_k);
    if (k_it == options.eval_ks.end())
        throw std::invalid_argument("scheduling_k must be one of eval_ks");
    const size_t scheduling_k_index = k_it - options.eval_ks.begin();

    for (const auto& sample : dataset_train) validate_sample(sample, entities, relations);
    for (const auto& sample : dataset_val) validate_sample(sample, entities, relations);

    TrainResult result;
    result.prior = build_frequency_prior(dataset_train, options.prior_alpha, entities,
                                         relations);
    result.log.ks = options.eval_ks;

    TrainState& state = result.state;
    if (resume_from) {
        state = *resume_from;
    } else {
        RngStream init_f(options.seed, "init.F");
        RngStream init_g(options.seed, "init.G");
        state.params_f = init_parameters(options.model.d_ctx, options.model.d_feat,
                                         relations.num_with_norel(), init_f);
        state.params_g = init_parameters(options.model.d_ctx, options.model.d_feat,
                                         relations.num_real(), init_g);
        state.momentum_buffers = make_zero_gradients(state.params_f, state.params_g);
        state.rng_seed = options.seed;
    }

    const long num_train = static_cast<long>(dataset_train.size());
    const long batches_per_epoch =
        (num_train + options.schedule.batch_size - 1) / options.schedule.batch_size;

    LossBreakdown loss_acc;
    long loss_acc_count = 0;
    std::vector<size_t> order(dataset_train.size());
    long shuffled_epoch = -1;

    auto run_validation = [&]() {
        std::vector<ScoredTriplet> triplets;
        for (const auto& sample : dataset_val) {
            auto t = score_triplets(sample, state.params_f, result.prior, options.model,
                                    PredictionMode::constrained);
            triplets.insert(triplets.end(), t.begin(), t.end());
        }
        RecallReport report = recall_at_k(triplets, annotated_ground_truth(dataset_val),
                                          options.eval_ks, relations.num_real());
        ValidationRound round;
        round.iteration = state.iteration;
        round.lr = state.lr;
        round.decay_count = state.decay_count;
        round.mean_loss = loss_acc;
        if (loss_acc_count > 0)
            scale_breakdown(round.mean_loss, 1.0 / static_cast<double>(loss_acc_count));
        round.recall = report.recall;
        round.mean_recall = report.mean_recall;
        result.log.rounds.push_back(round);
        loss_acc = LossBreakdown{};
        loss_acc_count = 0;
        return report.recall[scheduling_k_index];
    };

    while (state.iteration < options.schedule.max_iterations) {
        const long epoch = state.iteration / batches_per_epoch;
        const long pos = state.iteration % batches_per_epoch;
        if (epoch != shuffled_epoch) {
            std::iota(order.begin(), order.end(), 0);
            RngStream shuffle_rng(options.seed, "shuffle", static_cast<uint64_t>(epoch));
            for (size_t i = order.size() - 1; i > 0; --i) {
                const size_t j = shuffle_rng.below(i + 1);
                std::swap(order[i], order[j]);
            }
            shuffled_epoch = epoch;
        }

        const long begin = pos * options.schedule.batch_size;
        const long end = std::min<long>(begin + options.schedule.batch_size, num_train);
        std::vector<SceneSample> batch;
        batch.reserve(end - begin);
        for (long b = begin; b < end; ++b) batch.push_back(dataset_train[order[b]]);

        state.lr = lr_at(state.iteration, state.decay_count, options.schedule);
        result.log.lr_trace.push_back(state.lr);
        result.log.decay_trace.push_back(state.decay_count);

        auto [breakdown, grads] =
            total_loss_and_gradients(batch, state.params_f, state.params_g, result.prior,
                                     options.model, options.kd, state.iteration);
        add_breakdown(loss_acc, breakdown);
        loss_acc_count++;
        sgd_step(state, grads, options.schedule);

        if (state.iteration % options.schedule.validation_interval == 0) {
            const double validation_recall = run_validation();
            const bool stop =
                maybe_decay_and_stop(state, validation_recall, options.schedule);
            if (on_validation) on_validation(state, result.log, result.prior);
            if (stop) break;
        }
    }
    state.lr = lr_at(state.iteration, state.decay_count, options.schedule);
    return result;
}

}  // namespace sgkd
