#pragma once

#include "sgkd/core.hpp"

#include <cstdint>
#include <vector>

namespace sgkd {

// Knobs for the synthetic scene-graph generator. Three bias mechanisms are
// independently tunable: the Zipf long tail over relation classes, aFN
// dropping (related pairs left unannotated), and aPTP collapse (multi-relation
// pairs annotated with a single, majority-leaning label).
struct GeneratorConfig {
    int num_images = 500;
    int entities_min = 6;
    int entities_max = 10;
    int num_entity_classes = 20;   // |O|
    int num_relation_classes = 10; // |R'|
    double zipf_s = 1.5;
    // 0 keeps all ordered pairs; otherwise a per-image random subset.
    int pairs_per_image = 0;
    double afn_rate = 0.5;
    double aptp_multi_rate = 0.4;
    double majority_bias = 2.0;  // beta; annotation prob ~ exp(-beta * rank)
    double noise_sigma = 0.3;
    int d_ctx = 16;
    int d_feat = 32;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SynthCorpus {
    EntityVocabulary entities;
    RelationVocabulary relations;
    std::vector<SceneSample> train;
    std::vector<SceneSample> val;
    std::vector<SceneSample> test;
};

// Generative process per image: uniform entity classes; per ordered pair a
// class-pair-dependent relatedness draw, a Zipf primary relation plus
// compatible extras (adjacent Zipf ranks); context vectors are noisy class
// embeddings and union features noisy relation-prototype means, so labels are
// learnable from f_ij alone. The annotation pass drops related pairs with
// probability afn_rate and otherwise keeps exactly one relation, biased
// toward frequent classes. Split 70/10/20 by image. All splits carry
// true_relations here; writers withhold them from the trainer's files.
SynthCorpus generate_corpus(const GeneratorConfig& cfg);

// Zipf(s) probability over ranks 1..n; relation id r has rank r + 1.
std::vector<double> zipf_probabilities(double s, int n);

struct CorpusStatistics {
    long num_pairs = 0;
    long num_annotated = 0;
    std::vector<long> annotated_histogram;  // per relation id
    bool has_oracle = false;
    // Oracle-based fields, valid only when has_oracle:
    long num_related = 0;
    long num_unannotated_related = 0;
    double fraction_unannotated_related = 0.0;
    double mean_true_set_size = 0.0;  // among related pairs
    std::vector<long> true_histogram; // ids across all true sets
};

CorpusStatistics corpus_statistics(const std::vector<SceneSample>& corpus,
                                   int num_relation_classes);

}  // namespace sgkd
