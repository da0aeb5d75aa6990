#pragma once

#include "sgkd/core.hpp"
#include "sgkd/eval.hpp"
#include "sgkd/optim.hpp"
#include "sgkd/prior.hpp"

#include <string>
#include <vector>

namespace sgkd {

// Line-oriented dataset file:
//   SGKD v1 |O| |R'| d_ctx d_feat
//   image <id> <M>
//   <M entity-class ids>
//   pair <i> <j> <label|-1> <c_i..> <c_j..> <f_ij..>
//   oracle <i> <j> <relation ids>      (only when oracle data is kept)
// Floats are printed with 17 significant digits so round-trips are exact.
struct Dataset {
    EntityVocabulary entities;
    RelationVocabulary relations;
    int d_ctx = 0;
    int d_feat = 0;
    std::vector<SceneSample> samples;
};

void write_dataset(const std::string& path, const std::vector<SceneSample>& samples,
                   int num_entity_classes, int num_relation_classes, int d_ctx,
                   int d_feat, bool include_oracle);
Dataset read_dataset(const std::string& path);

// Checkpoint: named sections, each `section <name> <rows> <cols>` followed by
// row-major 17-digit floats. Sections: config, frequency_prior,
// frequency_prior.counts, frequency_prior.alpha, F.W_s..F.W, G.W_s..G.W,
// momentum.*, state.
struct Checkpoint {
    int d_ctx = 0;
    int d_feat = 0;
    int num_entity_classes = 0;
    int num_real_relations = 0;
    double gamma = 12.0;
    L2Mode l2_mode = L2Mode::normalized;
    FrequencyPrior prior;
    TrainState state;
};

void write_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::string& path);

// Comma-separated metrics log, one row per validation round:
// iteration, lr, loss terms, then R@K and mR@K per configured K.
std::string format_metrics_log(const TrainLog& log);
void write_metrics_log(const std::string& path, const TrainLog& log);

// Plain-text recall report: one `R@K <value>` / `mR@K <value>` line per K.
std::string format_recall_report(const RecallReport& report);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace sgkd
