#pragma once

#include "sgkd/eval.hpp"
#include "sgkd/loss.hpp"
#include "sgkd/model.hpp"
#include "sgkd/optim.hpp"
#include "sgkd/synth.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace sgkd {

enum class ModelVariant { baseline, l2, l2_ukd, l2_ckd };

std::string variant_name(ModelVariant variant);
ModelVariant parse_variant(const std::string& name);

struct RunConfig {
    ModelVariant variant = ModelVariant::l2_ckd;
    GeneratorConfig generator;
    HypersphereConfig model;
    KDConfig kd;
    ScheduleConfig schedule;
    double prior_alpha = 1.0;
    std::vector<int> eval_ks = {20, 50, 100};
    int scheduling_k = 100;
    PredictionMode eval_mode = PredictionMode::constrained;
    std::uint64_t seed = 0;

    // Enforces the variant's constraints: `baseline` forces raw mode and
    // lambda_gf = 0, `L2` forces normalized mode and lambda_gf = 0, the KD
    // variants force normalized mode, their scheme, and lambda_gf > 0.
    void apply_variant();
    void validate() const;

    TrainOptions train_options() const;
};

// Parses the JSON run configuration, applies the variant rules, and
// validates. Out-of-bounds fields raise errors naming the field.
RunConfig load_run_config(const std::string& path);

}  // namespace sgkd
