// Acceptance suite: one criterion per run_criterion call, one PASS/FAIL line
// each, nonzero exit when any fail. `./acceptance 6 9` runs a subset.

#include "gradient_check.hpp"
#include "metric_reference.hpp"
#include "sgkd/commands.hpp"
#include "sgkd/config.hpp"
#include "sgkd/io.hpp"
#include "sgkd/loss.hpp"
#include "sgkd/optim.hpp"
#include "sgkd/synth.hpp"

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>

using namespace sgkd;
using namespace sgkd::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int g_failures = 0;

template <typename Fn>
void run_criterion(const std::set<int>& selected, int id, const std::string& name,
                   Fn&& fn) {
    if (!selected.empty() && !selected.count(id)) return;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
        outcome = fn();
    } catch (const std::exception& e) {
        outcome.pass = false;
        outcome.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d: %s (%s; %.1f s)\n", outcome.pass ? "PASS" : "FAIL",
                id, name.c_str(), outcome.detail.c_str(), seconds);
    std::fflush(stdout);
    if (!outcome.pass) g_failures++;
}

// Reference synthetic corpus (desk scale).
GeneratorConfig reference_generator(std::uint64_t seed) {
    GeneratorConfig cfg;
    cfg.num_images = 500;
    cfg.entities_min = 6;
    cfg.entities_max = 10;
    cfg.num_entity_classes = 20;
    cfg.num_relation_classes = 10;
    cfg.zipf_s = 1.5;
    cfg.afn_rate = 0.5;
    cfg.aptp_multi_rate = 0.4;
    cfg.majority_bias = 2.0;
    cfg.noise_sigma = 0.3;
    cfg.d_ctx = 16;
    cfg.d_feat = 32;
    cfg.seed = seed;
    return cfg;
}

// Desk-scale schedule: the paper recipe scaled down by 10x.
TrainOptions reference_options(std::uint64_t seed) {
    TrainOptions options;
    options.schedule.validation_interval = 200;
    options.schedule.max_iterations = 5000;
    options.kd.kd_start_iteration = 1000;
    options.seed = seed;
    return options;
}

struct VariantMetrics {
    double oracle_mean_recall_50 = 0.0;  // unconstrained oracle mR@50
    double recall_50 = 0.0;              // unconstrained annotated R@50
};

VariantMetrics eval_variant(const SynthCorpus& corpus, const TrainResult& result,
                            const HypersphereConfig& model_cfg) {
    std::vector<ScoredTriplet> triplets;
    for (const auto& sample : corpus.test) {
        auto t = score_triplets(sample, result.state.params_f, result.prior, model_cfg,
                                PredictionMode::unconstrained);
        triplets.insert(triplets.end(), t.begin(), t.end());
    }
    VariantMetrics metrics;
    auto oracle = oracle_multilabel_recall(triplets, corpus.test, {50},
                                           corpus.relations.num_real());
    metrics.oracle_mean_recall_50 = oracle.mean_recall[0];
    auto annotated = recall_at_k(triplets, annotated_ground_truth(corpus.test), {50},
                                 corpus.relations.num_real());
    metrics.recall_50 = annotated.recall[0];
    return metrics;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("sgkd_acceptance_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return std::string(buf);
}

}  // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int a = 1; a < argc; ++a) selected.insert(std::atoi(argv[a]));

    run_criterion(selected, 1, "gradient oracle vs central finite differences", [] {
        double worst = 0.0;
        std::string worst_entry;
        for (int index = 0; index < 20; ++index) {
            auto result = check_gradients(pinned_instance(index));
            if (result.max_relative_error > worst) {
                worst = result.max_relative_error;
                worst_entry = "instance " + std::to_string(index) + " " +
                              result.worst_entry;
            }
        }
        return Outcome{worst < 1e-4,
                       fmt("max rel err %.3g at %s, threshold 1e-4", worst,
                           worst_entry.c_str())};
    });

    run_criterion(selected, 2, "stop-gradient contract over 100 training steps", [] {
        GeneratorConfig gen = reference_generator(2);
        gen.num_images = 60;
        auto corpus = generate_corpus(gen);
        TrainOptions options = reference_options(2);
        options.schedule.max_iterations = 100;
        options.schedule.validation_interval = 50;
        options.kd.kd_start_iteration = 0;

        auto with_kd = options;
        with_kd.kd.lambda_gf = 0.1;
        auto without_kd = options;
        without_kd.kd.lambda_gf = 0.0;
        auto a = train(corpus.train, corpus.val, corpus.entities, corpus.relations,
                       with_kd);
        auto b = train(corpus.train, corpus.val, corpus.entities, corpus.relations,
                       without_kd);
        const bool g_identical =
            a.state.params_g.w_subject.a == b.state.params_g.w_subject.a &&
            a.state.params_g.w_object.a == b.state.params_g.w_object.a &&
            a.state.params_g.w_fuse.a == b.state.params_g.w_fuse.a &&
            a.state.params_g.w_classes.a == b.state.params_g.w_classes.a;
        const bool f_differs =
            a.state.params_f.w_classes.a != b.state.params_f.w_classes.a;
        return Outcome{g_identical && f_differs,
                       fmt("G bit-identical: %s, F diverged under KD: %s",
                           g_identical ? "yes" : "no", f_differs ? "yes" : "no")};
    });

    run_criterion(selected, 3, "algebraic identities", [] {
        RngStream rng(3, "acceptance.identities");
        HypersphereConfig cfg;
        cfg.gamma = 12.0;
        cfg.d_ctx = 4;
        cfg.d_feat = 6;
        std::string failure;

        for (int trial = 0; trial < 10000 && failure.empty(); ++trial) {
            auto params = init_parameters(cfg.d_ctx, cfg.d_feat, 5, rng);
            std::vector<double> ci(cfg.d_ctx), cj(cfg.d_ctx), f(cfg.d_feat);
            for (double& x : ci) x = rng.normal(0, 2);
            for (double& x : cj) x = rng.normal(0, 2);
            for (double& x : f) x = rng.normal(0, 2);

            // Cosine bound on every logit.
            auto act = forward_G(params, ci, cj, f, cfg);
            for (double logit : act.logits)
                if (logit > cfg.gamma || logit < -cfg.gamma) failure = "cosine bound";

            if (trial % 100 != 0) continue;  // the remaining identities sample less

            // T = 1 temperature scaling equals the plain forward exactly.
            auto tempered = forward_G_tempered(params, ci, cj, f, cfg, 1.0);
            for (size_t k = 0; k < tempered.probs.size(); ++k)
                if (tempered.probs[k] != act.distribution.probs[k])
                    failure = "T=1 equality";

            // softmax normalization and entropy bounds.
            double sum = 0.0;
            for (double p : act.distribution.probs) sum += p;
            if (std::abs(sum - 1.0) > 1e-9) failure = "softmax normalization";
            const double h = entropy(act.distribution);
            if (h < 0.0 || h > std::log(5.0) + 1e-12) failure = "entropy bounds";

            // KL identity at strictly positive p.
            if (kl_divergence(act.distribution, act.distribution) != 0.0)
                failure = "KL(p,p)=0";

            // gamma = 0 reduces F to the frequency-prior baseline.
            HypersphereConfig prior_cfg = cfg;
            prior_cfg.gamma = 0.0;
            std::vector<double> prior_row(6);
            for (double& x : prior_row) x = rng.uniform(-4.0, 0.0);
            auto params_f = init_parameters(cfg.d_ctx, cfg.d_feat, 6, rng);
            auto baseline = forward_F(params_f, prior_row, ci, cj, f, prior_cfg);
            auto expected = softmax(prior_row);
            for (size_t k = 0; k < expected.probs.size(); ++k)
                if (baseline.distribution.probs[k] != expected.probs[k])
                    failure = "gamma=0 prior baseline";
        }
        return Outcome{failure.empty(),
                       failure.empty() ? "all identities hold over 1e4 draws"
                                       : "violated: " + failure};
    });

    run_criterion(selected, 4, "entropy regularizer drives G to maximum entropy", [] {
        GeneratorConfig gen = reference_generator(4);
        gen.num_images = 12;
        gen.afn_rate = 1.0;  // every pair unannotated: the loss is entropy-only
        auto corpus = generate_corpus(gen);
        std::vector<SceneSample> batch(corpus.train.begin(), corpus.train.begin() + 4);

        TrainOptions options = reference_options(4);
        options.kd.lambda_gf = 0.0;
        options.kd.lambda_g = 1.0;
        FrequencyPrior prior = build_frequency_prior(batch, 1.0, corpus.entities,
                                                     corpus.relations);
        RngStream init_f(4, "init.F"), init_g(4, "init.G");
        TrainState state;
        state.params_f = init_parameters(16, 32, 11, init_f);
        state.params_g = init_parameters(16, 32, 10, init_g);
        state.momentum_buffers = make_zero_gradients(state.params_f, state.params_g);
        state.lr = 2.0;

        const double target = std::log(10.0) - 0.01;
        auto mean_entropy = [&] {
            double h = 0.0;
            long n = 0;
            for (const auto& sample : batch)
                for (const auto& pair : sample.pairs) {
                    h += entropy(forward_G(state.params_g, pair.context_subject,
                                           pair.context_object, pair.union_feature,
                                           options.model)
                                     .distribution);
                    n++;
                }
            return h / static_cast<double>(n);
        };

        const double initial = mean_entropy();
        long steps = 0;
        double reached = initial;
        ScheduleConfig schedule;  // momentum 0.9
        while (steps < 2000) {
            auto [breakdown, grads] =
                total_loss_and_gradients(batch, state.params_f, state.params_g, prior,
                                         options.model, options.kd, 0);
            sgd_step(state, grads, schedule);
            steps++;
            if (steps % 25 == 0) {
                reached = mean_entropy();
                if (reached >= target) break;
            }
        }
        return Outcome{reached >= target,
                       fmt("mean H %.4f (target %.4f, ln|R'| %.4f) after %ld steps, "
                           "initial %.4f",
                           reached, target, std::log(10.0), steps, initial)};
    });

    run_criterion(selected, 5, "metric oracle on 100 random instances", [] {
        const std::vector<int> agreement_ks = {1, 2, 3, 5, 20, 50, 100};
        const std::vector<int> sgg_ks = {20, 50, 100};
        int instances = 0;
        for (int trial = 0; trial < 100; ++trial) {
            auto inst = make_metric_instance(5000 + trial);
            if (inst.samples.empty()) continue;
            auto gt = annotated_ground_truth(inst.samples);
            if (gt.empty()) continue;
            instances++;
            for (auto mode :
                 {PredictionMode::constrained, PredictionMode::unconstrained}) {
                auto triplets = score_all(inst, mode);
                auto report = recall_at_k(triplets, gt, agreement_ks, inst.num_real);
                for (size_t ki = 0; ki < agreement_ks.size(); ++ki) {
                    auto ref = ref_recall(triplets, gt, agreement_ks[ki], inst.num_real);
                    if (std::abs(report.recall[ki] - ref.recall) > 1e-12 ||
                        std::abs(report.mean_recall[ki] - ref.mean_recall) > 1e-12)
                        return Outcome{false,
                                       fmt("disagrees with brute force on trial %d",
                                           trial)};
                    if (ki > 0 && (report.recall[ki] < report.recall[ki - 1] - 1e-12 ||
                                   report.mean_recall[ki] <
                                       report.mean_recall[ki - 1] - 1e-12))
                        return Outcome{false, fmt("monotonicity broken on trial %d",
                                                  trial)};
                }
            }
            auto constrained = recall_at_k(score_all(inst, PredictionMode::constrained),
                                           gt, sgg_ks, inst.num_real);
            auto unconstrained =
                recall_at_k(score_all(inst, PredictionMode::unconstrained), gt, sgg_ks,
                            inst.num_real);
            for (size_t ki = 0; ki < sgg_ks.size(); ++ki) {
                if (unconstrained.recall[ki] < constrained.recall[ki] - 1e-12 ||
                    unconstrained.mean_recall[ki] < constrained.mean_recall[ki] - 1e-12)
                    return Outcome{false,
                                   fmt("unconstrained < constrained on trial %d",
                                       trial)};
            }
        }
        return Outcome{instances >= 90,
                       fmt("exact agreement on %d instances, both modes", instances)};
    });

    run_criterion(selected, 6, "directional debiasing on the reference corpus", [] {
        double base_mr = 0.0, l2_mr = 0.0, ckd_mr = 0.0;
        double base_r = 0.0, ckd_r = 0.0;
        const int num_seeds = 5;
        for (int seed = 1; seed <= num_seeds; ++seed) {
            auto corpus = generate_corpus(reference_generator(seed));

            TrainOptions baseline = reference_options(seed);
            baseline.model.l2_mode = L2Mode::raw;
            baseline.kd.lambda_gf = 0.0;
            TrainOptions l2 = reference_options(seed);
            l2.kd.lambda_gf = 0.0;
            TrainOptions ckd = reference_options(seed);
            ckd.kd.scheme = KDScheme::cKD;

            auto run = [&](const TrainOptions& options) {
                auto result = train(corpus.train, corpus.val, corpus.entities,
                                    corpus.relations, options);
                return eval_variant(corpus, result, options.model);
            };
            auto m_base = run(baseline);
            auto m_l2 = run(l2);
            auto m_ckd = run(ckd);
            base_mr += m_base.oracle_mean_recall_50 / num_seeds;
            l2_mr += m_l2.oracle_mean_recall_50 / num_seeds;
            ckd_mr += m_ckd.oracle_mean_recall_50 / num_seeds;
            base_r += m_base.recall_50 / num_seeds;
            ckd_r += m_ckd.recall_50 / num_seeds;
        }
        const double ckd_mr_gain = (ckd_mr - base_mr) / base_mr * 100.0;
        const double ckd_r_change = (ckd_r - base_r) / base_r * 100.0;
        const double l2_mr_gain = (l2_mr - base_mr) / base_mr * 100.0;
        const bool pass =
            ckd_mr_gain >= 5.0 && ckd_r_change >= -5.0 && ckd_r_change <= 5.0 &&
            l2_mr_gain >= 0.0;
        return Outcome{pass,
                       fmt("cKD oracle mR@50 %+.1f%% (need >= +5%%), cKD R@50 %+.1f%% "
                           "(need within +-5%%), L2 mR@50 %+.1f%% (need >= 0%%); "
                           "baseline mR %.4f R %.4f",
                           ckd_mr_gain, ckd_r_change, l2_mr_gain, base_mr, base_r)};
    });

    run_criterion(selected, 7, "frequency prior beats uniform random predictions", [] {
        auto corpus = generate_corpus(reference_generator(1));
        FrequencyPrior prior = build_frequency_prior(corpus.train, 1.0, corpus.entities,
                                                     corpus.relations);
        HypersphereConfig prior_only;
        prior_only.gamma = 0.0;  // logits are exactly the prior row
        RngStream init(7, "acceptance.prior");
        auto params = init_parameters(prior_only.d_ctx, prior_only.d_feat,
                                      corpus.relations.num_with_norel(), init);

        std::vector<ScoredTriplet> prior_triplets;
        for (const auto& sample : corpus.test) {
            auto t = score_triplets(sample, params, prior, prior_only,
                                    PredictionMode::constrained);
            prior_triplets.insert(prior_triplets.end(), t.begin(), t.end());
        }
        auto gt = annotated_ground_truth(corpus.test);
        const double prior_recall =
            recall_at_k(prior_triplets, gt, {20}, corpus.relations.num_real()).recall[0];

        RngStream random_stream(7, "acceptance.random");
        double random_recall = 0.0;
        const int trials = 20;
        for (int trial = 0; trial < trials; ++trial) {
            std::vector<ScoredTriplet> random_triplets;
            for (const auto& sample : corpus.test)
                for (const auto& pair : sample.pairs)
                    random_triplets.push_back(
                        {sample.image_id, pair.subject_index, pair.object_index,
                         static_cast<int>(
                             random_stream.below(corpus.relations.num_real())),
                         random_stream.u01()});
            random_recall +=
                recall_at_k(random_triplets, gt, {20}, corpus.relations.num_real())
                    .recall[0] /
                trials;
        }
        const double factor = prior_recall / random_recall;
        return Outcome{factor >= 2.0,
                       fmt("prior R@20 %.4f vs random %.4f, factor %.2f (need >= 2)",
                           prior_recall, random_recall, factor)};
    });

    run_criterion(selected, 8, "schedule conformance", [] {
        // Closed-form lr trace and KD gating on a real short run.
        GeneratorConfig gen = reference_generator(8);
        gen.num_images = 60;
        auto corpus = generate_corpus(gen);
        TrainOptions options = reference_options(8);
        options.schedule.warmup_iterations = 40;
        options.schedule.validation_interval = 50;
        options.schedule.max_iterations = 300;
        options.kd.kd_start_iteration = 120;
        auto result = train(corpus.train, corpus.val, corpus.entities, corpus.relations,
                            options);
        for (size_t it = 0; it < result.log.lr_trace.size(); ++it)
            if (result.log.lr_trace[it] !=
                lr_at(static_cast<long>(it), result.log.decay_trace[it],
                      options.schedule))
                return Outcome{false, fmt("lr trace deviates at iteration %zu", it)};
        for (const auto& round : result.log.rounds)
            if (round.iteration <= options.kd.kd_start_iteration &&
                (round.mean_loss.kd_labeled != 0.0 ||
                 round.mean_loss.kd_unlabeled != 0.0))
                return Outcome{false, fmt("KD terms nonzero before kd_start at %ld",
                                          round.iteration)};

        // Plateau logic: with a flat validation metric and patience 2, the
        // decay triggers on rounds 3, 5, 7, 9; the fourth trigger stops.
        ScheduleConfig schedule;
        TrainState state;
        int stop_round = 0;
        for (int round = 1; round <= 12; ++round) {
            if (maybe_decay_and_stop(state, 1.0, schedule)) {
                stop_round = round;
                break;
            }
        }
        if (stop_round != 9 || state.decay_count != schedule.max_decays + 1)
            return Outcome{false, fmt("plateau stop at round %d with %d decays",
                                      stop_round, state.decay_count)};
        return Outcome{true,
                       "lr trace exact, KD gated, stop after the 4th decay trigger"};
    });

    run_criterion(selected, 9, "temperature sweep table", [] {
        TempDir dir("ablate");
        const std::string config = R"({
          "variant": "L2+cKD", "seed": 9,
          "generator": {"num_images": 60, "entities_min": 5, "entities_max": 7,
                        "num_entity_classes": 10, "num_relation_classes": 6,
                        "zipf_s": 1.5, "afn_rate": 0.5, "aptp_multi_rate": 0.4,
                        "majority_bias": 2.0, "noise_sigma": 0.3},
          "model": {"gamma": 12.0, "d_ctx": 8, "d_feat": 16},
          "kd": {"temperature": 1.5, "kd_start_iteration": 100},
          "schedule": {"warmup_iterations": 50, "peak_lr": 0.08,
                       "validation_interval": 100, "max_iterations": 400,
                       "batch_size": 8}
        })";
        write_text_file(dir.file("config.json"), config);
        if (cmd_generate(dir.file("config.json"), dir.file("data")) != 0)
            return Outcome{false, "cmd_generate failed"};
        if (cmd_ablate_temperature(dir.file("config.json"), dir.file("data"),
                                   {1.0, 1.25, 1.5, 1.75}, dir.file("ablate")) != 0)
            return Outcome{false, "cmd_ablate_temperature failed"};

        const std::string table = read_text_file(dir.file("ablate/ablation.csv"));
        std::istringstream lines(table);
        std::string header;
        std::getline(lines, header);
        if (header !=
            "T,R@20,R@50,R@100,mR@20,mR@50,mR@100,R@50_noconstraint,"
            "R@100_noconstraint,mR@50_noconstraint,mR@100_noconstraint")
            return Outcome{false, "unexpected header: " + header};
        int rows = 0;
        std::string line;
        while (std::getline(lines, line)) {
            if (line.empty()) continue;
            rows++;
            int columns = 0;
            std::istringstream cells(line);
            std::string cell;
            while (std::getline(cells, cell, ',')) {
                const double value = std::stod(cell);
                if (!std::isfinite(value) || (columns > 0 && (value < 0 || value > 1)))
                    return Outcome{false, "bad cell: " + cell};
                columns++;
            }
            if (columns != 11) return Outcome{false, fmt("row has %d columns", columns)};
        }
        if (rows != 4) return Outcome{false, fmt("expected 4 rows, got %d", rows)};
        return Outcome{true, "4 temperatures x 10 metrics emitted for inspection"};
    });

    run_criterion(selected, 10, "determinism and file-format round-trips", [] {
        TempDir dir("determinism");
        const std::string config = R"({
          "variant": "L2+cKD", "seed": 10,
          "generator": {"num_images": 40, "entities_min": 4, "entities_max": 5,
                        "num_entity_classes": 6, "num_relation_classes": 5,
                        "zipf_s": 1.5, "afn_rate": 0.4, "aptp_multi_rate": 0.3,
                        "majority_bias": 1.5, "noise_sigma": 0.3},
          "model": {"gamma": 12.0, "d_ctx": 6, "d_feat": 10},
          "kd": {"kd_start_iteration": 20},
          "schedule": {"warmup_iterations": 10, "peak_lr": 0.05,
                       "validation_interval": 25, "max_iterations": 75,
                       "batch_size": 8}
        })";
        write_text_file(dir.file("config.json"), config);
        if (cmd_generate(dir.file("config.json"), dir.file("data")) != 0 ||
            cmd_generate(dir.file("config.json"), dir.file("data2")) != 0)
            return Outcome{false, "cmd_generate failed"};
        for (const char* name : {"train.sgkd", "val.sgkd", "test.sgkd"})
            if (read_text_file(dir.file(std::string("data/") + name)) !=
                read_text_file(dir.file(std::string("data2/") + name)))
                return Outcome{false, std::string("dataset differs: ") + name};

        if (cmd_train(dir.file("config.json"), dir.file("data"), dir.file("run")) != 0 ||
            cmd_train(dir.file("config.json"), dir.file("data"), dir.file("run2")) != 0)
            return Outcome{false, "cmd_train failed"};
        if (read_text_file(dir.file("run/checkpoint_final.txt")) !=
                read_text_file(dir.file("run2/checkpoint_final.txt")) ||
            read_text_file(dir.file("run/metrics.csv")) !=
                read_text_file(dir.file("run2/metrics.csv")))
            return Outcome{false, "same-seed training runs differ"};

        // Write -> read -> write byte equality for both formats.
        Dataset dataset = read_dataset(dir.file("data/test.sgkd"));
        write_dataset(dir.file("roundtrip.sgkd"), dataset.samples,
                      dataset.entities.size(), dataset.relations.num_real(),
                      dataset.d_ctx, dataset.d_feat, true);
        if (read_text_file(dir.file("data/test.sgkd")) !=
            read_text_file(dir.file("roundtrip.sgkd")))
            return Outcome{false, "dataset round-trip not byte-identical"};

        Checkpoint checkpoint = read_checkpoint(dir.file("run/checkpoint_final.txt"));
        write_checkpoint(dir.file("roundtrip_ckpt.txt"), checkpoint);
        if (read_text_file(dir.file("run/checkpoint_final.txt")) !=
            read_text_file(dir.file("roundtrip_ckpt.txt")))
            return Outcome{false, "checkpoint round-trip not byte-identical"};

        if (cmd_eval(dir.file("run/checkpoint_final.txt"), dir.file("data/test.sgkd"),
                     {20, 50, 100}, PredictionMode::constrained, true,
                     dir.file("eval")) != 0 ||
            cmd_eval(dir.file("run/checkpoint_final.txt"), dir.file("data/test.sgkd"),
                     {20, 50, 100}, PredictionMode::constrained, true,
                     dir.file("eval2")) != 0)
            return Outcome{false, "cmd_eval failed"};
        if (read_text_file(dir.file("eval/report.txt")) !=
            read_text_file(dir.file("eval2/report.txt")))
            return Outcome{false, "evaluation reports differ"};
        return Outcome{true, "datasets, checkpoints, logs and reports all bit-stable"};
    });

    if (g_failures > 0) {
        std::printf("%d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
