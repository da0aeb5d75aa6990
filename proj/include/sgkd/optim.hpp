#pragma once

#include "sgkd/core.hpp"
#include "sgkd/eval.hpp"
#include "sgkd/loss.hpp"
#include "sgkd/model.hpp"
#include "sgkd/prior.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace sgkd {

struct ScheduleConfig {
    double base_lr = 0.01;
    double peak_lr = 0.12;
    long warmup_iterations = 500;
    double decay_factor = 0.1;
    long validation_interval = 2000;
    int patience_rounds = 2;
    int max_decays = 3;
    long max_iterations = 50000;
    int batch_size = 12;
    double momentum = 0.9;

    void validate() const;
};

struct TrainState {
    LearnerParameters params_f;
    LearnerParameters params_g;
    GradientSet momentum_buffers;
    double lr = 0.0;
    long iteration = 0;
    int decay_count = 0;
    double best_validation_recall = -1.0;
    int rounds_since_improvement = 0;
    std::uint64_t rng_seed = 0;
};

// Linear warmup from base_lr to peak_lr over warmup_iterations, then
// peak_lr * decay_factor^decay_count.
double lr_at(long iteration, int decay_count, const ScheduleConfig& cfg);

// buffer <- momentum * buffer + grad; param <- param - lr * buffer.
// Throws "gradient blowup in <matrix>" on non-finite gradients.
void sgd_step(TrainState& state, const GradientSet& grads, const ScheduleConfig& cfg);

// Plateau logic on validation R@100: after patience_rounds consecutive
// non-improvements the decay counter advances; returns true once the counter
// exceeds max_decays or the iteration budget is exhausted.
bool maybe_decay_and_stop(TrainState& state, double validation_recall,
                          const ScheduleConfig& cfg);

struct ValidationRound {
    long iteration = 0;
    double lr = 0.0;
    int decay_count = 0;
    LossBreakdown mean_loss;          // mean over iterations since last round
    std::vector<double> recall;       // constrained R@K per configured K
    std::vector<double> mean_recall;  // constrained mR@K per configured K
};

struct TrainLog {
    std::vector<int> ks;
    std::vector<ValidationRound> rounds;
    // Per-iteration schedule trace, index = iteration at step time.
    std::vector<double> lr_trace;
    std::vector<int> decay_trace;
};

struct TrainOptions {
    ScheduleConfig schedule;
    KDConfig kd;
    HypersphereConfig model;
    double prior_alpha = 1.0;
    std::vector<int> eval_ks = {20, 50, 100};
    int scheduling_k = 100;  // the K whose constrained R drives the plateau logic
    std::uint64_t seed = 0;
};

struct TrainResult {
    TrainState state;
    TrainLog log;
    FrequencyPrior prior;
};

// Full training loop: seeded init, per-epoch Fisher-Yates shuffling from a
// dedicated stream, batched steps, periodic validation with plateau decay and
// early stop. Deterministic given the options. `resume_from` (when non-null)
// supplies parameters and counters from a checkpoint; the schedule position
// is recomputed from the stored iteration. `on_validation` runs after each
// validation round (checkpoint writing hooks in here).
using ValidationHook =
    std::function<void(const TrainState&, const TrainLog&, const FrequencyPrior&)>;

TrainResult train(const std::vector<SceneSample>& dataset_train,
                  const std::vector<SceneSample>& dataset_val,
                  const EntityVocabulary& entities, const RelationVocabulary& relations,
                  const TrainOptions& options, const TrainState* resume_from = nullptr,
                  const ValidationHook& on_validation = nullptr);

}  // namespace sgkd
