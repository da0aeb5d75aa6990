#include "sgkd/config.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>

namespace sgkd {

using nlohmann::json;

std::string variant_name(ModelVariant variant) {
    switch (variant) {
        case ModelVariant::baseline: return "baseline";
        case ModelVariant::l2: return "L2";
        case ModelVariant::l2_ukd: return "L2+uKD";
        case ModelVariant::l2_ckd: return "L2+cKD";
    }
    return "?";
}

ModelVariant parse_variant(const std::string& name) {
    if (name == "baseline") return ModelVariant::baseline;
    if (name == "L2") return ModelVariant::l2;
    if (name == "L2+uKD") return ModelVariant::l2_ukd;
    if (name == "L2+cKD") return ModelVariant::l2_ckd;
    throw std::invalid_argument("unknown variant: " + name +
                                " (expected baseline|L2|L2+uKD|L2+cKD)");
}

void RunConfig::apply_variant() {
    switch (variant) {
        case ModelVariant::baseline:
            model.l2_mode = L2Mode::raw;
            kd.lambda_gf = 0.0;
            break;
        case ModelVariant::l2:
            model.l2_mode = L2Mode::normalized;
            kd.lambda_gf = 0.0;
            break;
        case ModelVariant::l2_ukd:
            model.l2_mode = L2Mode::normalized;
            kd.scheme = KDScheme::uKD;
            if (!(kd.lambda_gf > 0.0))
                throw std::invalid_argument("variant L2+uKD requires lambda_gf > 0");
            break;
        case ModelVariant::l2_ckd:
            model.l2_mode = L2Mode::normalized;
            kd.scheme = KDScheme::cKD;
            if (!(kd.lambda_gf > 0.0))
                throw std::invalid_argument("variant L2+cKD requires lambda_gf > 0");
            break;
    }
}

void RunConfig::validate() const {
    generator.validate();
    model.validate();
    kd.validate();
    schedule.validate();
    if (prior_alpha < 0.0) throw std::invalid_argument("prior_alpha must be >= 0");
    if (eval_ks.empty()) throw std::invalid_argument("eval_ks must be nonempty");
    for (int k : eval_ks)
        if (k <= 0) throw std::invalid_argument("eval_ks entries must be > 0");
    if (std::find(eval_ks.begin(), eval_ks.end(), scheduling_k) == eval_ks.end())
        throw std::invalid_argument("scheduling_k must be one of eval_ks");
    if (generator.d_ctx != model.d_ctx || generator.d_feat != model.d_feat)
        throw std::invalid_argument("generator and model dims must agree");
}

TrainOptions RunConfig::train_options() const {
    TrainOptions options;
    options.schedule = schedule;
    options.kd = kd;
    options.model = model;
    options.prior_alpha = prior_alpha;
    options.eval_ks = eval_ks;
    options.scheduling_k = scheduling_k;
    options.seed = seed;
    return options;
}

namespace {

// Read a field if present, with a bounds-style error naming the field.
template <typename T>
void get_to(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        j.at(key).get_to(out);
    } catch (const json::exception&) {
        throw std::invalid_argument(std::string("config field has wrong type: ") + key);
    }
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error("config parse error in " + path + ": " + e.what());
    }

    RunConfig cfg;
    if (j.contains("variant")) cfg.variant = parse_variant(j.at("variant").get<std::string>());
    get_to(j, "seed", cfg.seed);
    get_to(j, "prior_alpha", cfg.prior_alpha);
    get_to(j, "eval_ks", cfg.eval_ks);
    get_to(j, "scheduling_k", cfg.scheduling_k);
    if (j.contains("eval_mode")) {
        const std::string mode = j.at("eval_mode").get<std::string>();
        if (mode == "constrained")
            cfg.eval_mode = PredictionMode::constrained;
        else if (mode == "unconstrained")
            cfg.eval_mode = PredictionMode::unconstrained;
        else
            throw std::invalid_argument("eval_mode must be constrained|unconstrained");
    }

    if (j.contains("generator")) {
        const json& g = j.at("generator");
        get_to(g, "num_images", cfg.generator.num_images);
        get_to(g, "entities_min", cfg.generator.entities_min);
        get_to(g, "entities_max", cfg.generator.entities_max);
        get_to(g, "num_entity_classes", cfg.generator.num_entity_classes);
        get_to(g, "num_relation_classes", cfg.generator.num_relation_classes);
        get_to(g, "zipf_s", cfg.generator.zipf_s);
        get_to(g, "pairs_per_image", cfg.generator.pairs_per_image);
        get_to(g, "afn_rate", cfg.generator.afn_rate);
        get_to(g, "aptp_multi_rate", cfg.generator.aptp_multi_rate);
        get_to(g, "majority_bias", cfg.generator.majority_bias);
        get_to(g, "noise_sigma", cfg.generator.noise_sigma);
    }
    if (j.contains("model")) {
        const json& m = j.at("model");
        get_to(m, "gamma", cfg.model.gamma);
        get_to(m, "d_ctx", cfg.model.d_ctx);
        get_to(m, "d_feat", cfg.model.d_feat);
        if (m.contains("l2_mode")) {
            const std::string mode = m.at("l2_mode").get<std::string>();
            if (mode == "normalized")
                cfg.model.l2_mode = L2Mode::normalized;
            else if (mode == "raw")
                cfg.model.l2_mode = L2Mode::raw;
            else
                throw std::invalid_argument("l2_mode must be normalized|raw");
        }
    }
    if (j.contains("kd")) {
        const json& k = j.at("kd");
        get_to(k, "temperature", cfg.kd.temperature);
        get_to(k, "lambda_gf", cfg.kd.lambda_gf);
        get_to(k, "lambda_g", cfg.kd.lambda_g);
        get_to(k, "kd_start_iteration", cfg.kd.kd_start_iteration);
        get_to(k, "entropy_floor", cfg.kd.entropy_floor);
        get_to(k, "renormalize_student", cfg.kd.renormalize_student);
        get_to(k, "temper_student", cfg.kd.temper_student);
        get_to(k, "kd_t_squared", cfg.kd.kd_t_squared);
        if (k.contains("scheme")) {
            const std::string scheme = k.at("scheme").get<std::string>();
            if (scheme == "uKD")
                cfg.kd.scheme = KDScheme::uKD;
            else if (scheme == "cKD")
                cfg.kd.scheme = KDScheme::cKD;
            else
                throw std::invalid_argument("kd scheme must be uKD|cKD");
        }
    }
    if (j.contains("schedule")) {
        const json& s = j.at("schedule");
        get_to(s, "base_lr", cfg.schedule.base_lr);
        get_to(s, "peak_lr", cfg.schedule.peak_lr);
        get_to(s, "warmup_iterations", cfg.schedule.warmup_iterations);
        get_to(s, "decay_factor", cfg.schedule.decay_factor);
        get_to(s, "validation_interval", cfg.schedule.validation_interval);
        get_to(s, "patience_rounds", cfg.schedule.patience_rounds);
        get_to(s, "max_decays", cfg.schedule.max_decays);
        get_to(s, "max_iterations", cfg.schedule.max_iterations);
        get_to(s, "batch_size", cfg.schedule.batch_size);
        get_to(s, "momentum", cfg.schedule.momentum);
    }

    // The generator inherits the master seed and the model dims.
    cfg.generator.seed = cfg.seed;
    cfg.generator.d_ctx = cfg.model.d_ctx;
    cfg.generator.d_feat = cfg.model.d_feat;

    cfg.apply_variant();
    cfg.validate();
    return cfg;
}

}  // namespace sgkd
