#pragma once

#include "sgkd/core.hpp"
#include "sgkd/model.hpp"
#include "sgkd/prior.hpp"

#include <string>
#include <vector>

namespace sgkd {

enum class PredictionMode { constrained, unconstrained };
enum class RecallAveraging { macro_images, micro_triplets };

struct ScoredTriplet {
    long image_id = 0;
    int subject_index = 0;
    int object_index = 0;
    int relation = 0;  // in R', never no-relation
    double score = 0.0;
};

struct RecallReport {
    std::vector<int> ks;
    std::vector<double> recall;       // R@K per entry of ks
    std::vector<double> mean_recall;  // mR@K per entry of ks
    // Indexed [class][k]; meaningful only where gt_count_per_class > 0.
    std::vector<std::vector<double>> per_class_recall;
    std::vector<long> gt_count_per_class;
    int num_relation_classes = 0;
};

struct GroundTruthTriplet {
    long image_id = 0;
    int subject_index = 0;
    int object_index = 0;
    int relation = 0;
};

// Constrained: one triplet per pair, the argmax of p over the R' prefix.
// Unconstrained: |R'| triplets per pair, one per relation. Ties break toward
// the lower relation index.
std::vector<ScoredTriplet> score_triplets(const SceneSample& sample,
                                          const LearnerParameters& params_f,
                                          const FrequencyPrior& prior,
                                          const HypersphereConfig& cfg,
                                          PredictionMode mode);

// Annotated pairs of each sample form its ground-truth triplet set.
std::vector<GroundTruthTriplet> annotated_ground_truth(
    const std::vector<SceneSample>& samples);

// Every (i, j, r) with r in the pair's true_relations; throws
// "no oracle ground truth" when a sample lacks oracle data.
std::vector<GroundTruthTriplet> oracle_ground_truth(
    const std::vector<SceneSample>& samples);

// Per image: sort triplets by (score desc, subject asc, object asc, relation
// asc), take the top K, count exact (i, j, r) matches. Image recalls are
// averaged over images with nonempty ground truth (macro), or triplet counts
// are pooled across images (micro). mR averages per-class recalls over
// classes with at least one ground-truth triplet.
RecallReport recall_at_k(const std::vector<ScoredTriplet>& triplets,
                         const std::vector<GroundTruthTriplet>& ground_truth,
                         const std::vector<int>& ks, int num_relation_classes,
                         RecallAveraging averaging = RecallAveraging::macro_images);

// recall_at_k against the expanded multi-label oracle set.
RecallReport oracle_multilabel_recall(const std::vector<ScoredTriplet>& triplets,
                                      const std::vector<SceneSample>& samples,
                                      const std::vector<int>& ks,
                                      int num_relation_classes,
                                      RecallAveraging averaging =
                                          RecallAveraging::macro_images);

// Plot-ready per-class rows sorted by descending ground-truth count; classes
// with zero ground truth are omitted. Comma-separated with a header line.
std::string per_class_report(const RecallReport& report,
                             const RelationVocabulary& relations);

}  // namespace sgkd
