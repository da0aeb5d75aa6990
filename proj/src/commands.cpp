#include "sgkd/commands.hpp"

#include "sgkd/config.hpp"
#include "sgkd/io.hpp"
#include "sgkd/loss.hpp"
#include "sgkd/optim.hpp"
#include "sgkd/synth.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <stdexcept>

namespace sgkd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int report_error(const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
}

json stats_to_json(const CorpusStatistics& stats) {
    json j;
    j["num_pairs"] = stats.num_pairs;
    j["num_annotated"] = stats.num_annotated;
    j["annotated_histogram"] = stats.annotated_histogram;
    j["has_oracle"] = stats.has_oracle;
    if (stats.has_oracle) {
        j["num_related"] = stats.num_related;
        j["num_unannotated_related"] = stats.num_unannotated_related;
        j["fraction_unannotated_related"] = stats.fraction_unannotated_related;
        j["mean_true_set_size"] = stats.mean_true_set_size;
        j["true_histogram"] = stats.true_histogram;
    }
    return j;
}

void check_dataset_matches(const Dataset& dataset, const RunConfig& cfg,
                           const char* name) {
    auto mismatch = [&](const char* field, long file_value, long config_value) {
        throw std::runtime_error(std::string(name) + " " + field + "=" +
                                 std::to_string(file_value) + " but config expects " +
                                 std::to_string(config_value));
    };
    if (dataset.d_ctx != cfg.model.d_ctx)
        mismatch("d_ctx", dataset.d_ctx, cfg.model.d_ctx);
    if (dataset.d_feat != cfg.model.d_feat)
        mismatch("d_feat", dataset.d_feat, cfg.model.d_feat);
    if (dataset.entities.size() != cfg.generator.num_entity_classes)
        mismatch("num_entity_classes", dataset.entities.size(),
                 cfg.generator.num_entity_classes);
    if (dataset.relations.num_real() != cfg.generator.num_relation_classes)
        mismatch("num_relation_classes", dataset.relations.num_real(),
                 cfg.generator.num_relation_classes);
}

Checkpoint make_checkpoint(const RunConfig& cfg, const TrainState& state,
                           const FrequencyPrior& prior) {
    Checkpoint checkpoint;
    checkpoint.d_ctx = cfg.model.d_ctx;
    checkpoint.d_feat = cfg.model.d_feat;
    checkpoint.num_entity_classes = cfg.generator.num_entity_classes;
    checkpoint.num_real_relations = cfg.generator.num_relation_classes;
    checkpoint.gamma = cfg.model.gamma;
    checkpoint.l2_mode = cfg.model.l2_mode;
    checkpoint.prior = prior;
    checkpoint.state = state;
    return checkpoint;
}

TrainResult run_training(const RunConfig& cfg, const Dataset& train_data,
                         const Dataset& val_data, const std::string& out_dir,
                         const TrainState* resume_state) {
    const fs::path out(out_dir);
    TrainResult result = train(
        train_data.samples, val_data.samples, train_data.entities,
        train_data.relations, cfg.train_options(), resume_state,
        [&cfg, &out](const TrainState& state, const TrainLog& log,
                     const FrequencyPrior& prior) {
            write_checkpoint((out / "checkpoint_latest.txt").string(),
                             make_checkpoint(cfg, state, prior));
            write_metrics_log((out / "metrics.csv").string(), log);
        });
    write_checkpoint((out / "checkpoint_final.txt").string(),
                     make_checkpoint(cfg, result.state, result.prior));
    write_metrics_log((out / "metrics.csv").string(), result.log);
    return result;
}

}  // namespace

int cmd_generate(const std::string& config_path, const std::string& out_dir) {
    try {
        RunConfig cfg = load_run_config(config_path);
        fs::create_directories(out_dir);
        SynthCorpus corpus = generate_corpus(cfg.generator);
        const fs::path out(out_dir);
        const int no = cfg.generator.num_entity_classes;
        const int nr = cfg.generator.num_relation_classes;
        write_dataset((out / "train.sgkd").string(), corpus.train, no, nr,
                      cfg.model.d_ctx, cfg.model.d_feat, /*include_oracle=*/false);
        write_dataset((out / "val.sgkd").string(), corpus.val, no, nr, cfg.model.d_ctx,
                      cfg.model.d_feat, /*include_oracle=*/false);
        write_dataset((out / "test.sgkd").string(), corpus.test, no, nr,
                      cfg.model.d_ctx, cfg.model.d_feat, /*include_oracle=*/true);

        std::vector<SceneSample> all;
        all.insert(all.end(), corpus.train.begin(), corpus.train.end());
        all.insert(all.end(), corpus.val.begin(), corpus.val.end());
        all.insert(all.end(), corpus.test.begin(), corpus.test.end());
        json j = stats_to_json(corpus_statistics(all, nr));
        j["num_train_images"] = corpus.train.size();
        j["num_val_images"] = corpus.val.size();
        j["num_test_images"] = corpus.test.size();
        write_text_file((out / "stats.json").string(), j.dump(2) + "\n");
        return 0;
    } catch (const std::exception& e) {
        return report_error(e);
    }
}

int cmd_train(const std::string& config_path, const std::string& data_dir,
              const std::string& out_dir, const std::string& resume_path,
              std::optional<std::uint64_t> seed_override) {
    try {
        RunConfig cfg = load_run_config(config_path);
        if (seed_override) {
            cfg.seed = *seed_override;
            cfg.generator.seed = *seed_override;
        }
        const fs::path data(data_dir);
        Dataset train_data = read_dataset((data / "train.sgkd").string());
        Dataset val_data = read_dataset((data / "val.sgkd").string());
        check_dataset_matches(train_data, cfg, "train.sgkd");
        check_dataset_matches(val_data, cfg, "val.sgkd");
        fs::create_directories(out_dir);

        TrainState resume_state;
        const TrainState* resume_ptr = nullptr;
        if (!resume_path.empty()) {
            Checkpoint checkpoint = read_checkpoint(resume_path);
            if (checkpoint.d_ctx != cfg.model.d_ctx ||
                checkpoint.d_feat != cfg.model.d_feat ||
                checkpoint.num_real_relations != cfg.generator.num_relation_classes)
                throw std::runtime_error("checkpoint dims do not match config");
            resume_state = checkpoint.state;
            resume_ptr = &resume_state;
        }

        TrainResult result = run_training(cfg, train_data, val_data, out_dir, resume_ptr);
        if (!result.log.rounds.empty()) {
            const auto& last = result.log.rounds.back();
            for (size_t ki = 0; ki < result.log.ks.size(); ++ki) {
                std::printf("validation R@%d %.6f mR@%d %.6f\n", result.log.ks[ki],
                            last.recall[ki], result.log.ks[ki], last.mean_recall[ki]);
            }
        }
        return 0;
    } catch (const std::exception& e) {
        return report_error(e);
    }
}

int cmd_eval(const std::string& checkpoint_path, const std::string& data_path,
             const std::vector<int>& ks, PredictionMode mode, bool use_oracle,
             const std::string& out_dir) {
    try {
        Checkpoint checkpoint = read_checkpoint(checkpoint_path);
        Dataset dataset = read_dataset(data_path);
        if (dataset.d_ctx != checkpoint.d_ctx || dataset.d_feat != checkpoint.d_feat ||
            dataset.relations.num_real() != checkpoint.num_real_relations)
            throw std::runtime_error("checkpoint and dataset dims do not match");
        fs::create_directories(out_dir);

        HypersphereConfig model_cfg;
        model_cfg.gamma = checkpoint.gamma;
        model_cfg.d_ctx = checkpoint.d_ctx;
        model_cfg.d_feat = checkpoint.d_feat;
        model_cfg.l2_mode = checkpoint.l2_mode;

        std::vector<ScoredTriplet> triplets;
        for (const auto& sample : dataset.samples) {
            auto t = score_triplets(sample, checkpoint.state.params_f, checkpoint.prior,
                                    model_cfg, mode);
            triplets.insert(triplets.end(), t.begin(), t.end());
        }

        const fs::path out(out_dir);
        RecallReport report = recall_at_k(triplets, annotated_ground_truth(dataset.samples),
                                          ks, dataset.relations.num_real());
        write_text_file((out / "report.txt").string(), format_recall_report(report));
        write_text_file((out / "per_class.csv").string(),
                        per_class_report(report, dataset.relations));
        std::printf("%s", format_recall_report(report).c_str());

        if (use_oracle) {
            RecallReport oracle = oracle_multilabel_recall(triplets, dataset.samples, ks,
                                                           dataset.relations.num_real());
            write_text_file((out / "report_oracle.txt").string(),
                            format_recall_report(oracle));
            write_text_file((out / "per_class_oracle.csv").string(),
                            per_class_report(oracle, dataset.relations));
            std::printf("oracle:\n%s", format_recall_report(oracle).c_str());
        }
        return 0;
    } catch (const std::exception& e) {
        return report_error(e);
    }
}

int cmd_ablate_temperature(const std::string& config_path, const std::string& data_dir,
                           const std::vector<double>& temperatures,
                           const std::string& out_dir) {
    try {
        RunConfig cfg = load_run_config(config_path);
        if (cfg.variant != ModelVariant::l2_ukd && cfg.variant != ModelVariant::l2_ckd)
            throw std::runtime_error("temperature ablation requires a KD variant");
        if (temperatures.empty())
            throw std::runtime_error("temperature list must be nonempty");
        const fs::path data(data_dir);
        Dataset train_data = read_dataset((data / "train.sgkd").string());
        Dataset val_data = read_dataset((data / "val.sgkd").string());
        Dataset test_data = read_dataset((data / "test.sgkd").string());
        check_dataset_matches(train_data, cfg, "train.sgkd");
        fs::create_directories(out_dir);

        const std::vector<int> constrained_ks = {20, 50, 100};
        const std::vector<int> unconstrained_ks = {50, 100};
        std::string table =
            "T,R@20,R@50,R@100,mR@20,mR@50,mR@100,"
            "R@50_noconstraint,R@100_noconstraint,mR@50_noconstraint,"
            "mR@100_noconstraint\n";
        for (double t : temperatures) {
            RunConfig run_cfg = cfg;
            run_cfg.kd.temperature = t;
            TrainResult result = train(train_data.samples, val_data.samples,
                                       train_data.entities, train_data.relations,
                                       run_cfg.train_options());

            auto collect = [&](PredictionMode mode) {
                std::vector<ScoredTriplet> triplets;
                for (const auto& sample : test_data.samples) {
                    auto scored = score_triplets(sample, result.state.params_f,
                                                 result.prior, run_cfg.model, mode);
                    triplets.insert(triplets.end(), scored.begin(), scored.end());
                }
                return triplets;
            };
            RecallReport with_constraint =
                recall_at_k(collect(PredictionMode::constrained),
                            annotated_ground_truth(test_data.samples), constrained_ks,
                            test_data.relations.num_real());
            RecallReport without_constraint =
                recall_at_k(collect(PredictionMode::unconstrained),
                            annotated_ground_truth(test_data.samples), unconstrained_ks,
                            test_data.relations.num_real());

            char buf[512];
            std::snprintf(buf, sizeof(buf),
                          "%g,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", t,
                          with_constraint.recall[0], with_constraint.recall[1],
                          with_constraint.recall[2], with_constraint.mean_recall[0],
                          with_constraint.mean_recall[1], with_constraint.mean_recall[2],
                          without_constraint.recall[0], without_constraint.recall[1],
                          without_constraint.mean_recall[0],
                          without_constraint.mean_recall[1]);
            table += buf;
            std::printf("%s", buf);
        }
        write_text_file((fs::path(out_dir) / "ablation.csv").string(), table);
        return 0;
    } catch (const std::exception& e) {
        return report_error(e);
    }
}

}  // namespace sgkd
