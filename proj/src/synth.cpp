#include "sgkd/synth.hpp"

#include "sgkd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sgkd {

void GeneratorConfig::validate() const {
    auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (num_relation_classes < 2)
        throw std::invalid_argument("num_relation_classes must be >= 2");
    if (num_entity_classes < 2)
        throw std::invalid_argument("num_entity_classes must be >= 2");
    if (num_images < 10)
        throw std::invalid_argument("num_images too small for a 70/10/20 split");
    if (entities_min < 2 || entities_max < entities_min)
        throw std::invalid_argument("require 2 <= entities_min <= entities_max");
    if (!in_unit(afn_rate)) throw std::invalid_argument("afn_rate out of [0,1]");
    if (!in_unit(aptp_multi_rate))
        throw std::invalid_argument("aptp_multi_rate out of [0,1]");
    if (zipf_s < 0.0) throw std::invalid_argument("zipf_s must be >= 0");
    if (majority_bias < 0.0) throw std::invalid_argument("majority_bias must be >= 0");
    if (noise_sigma < 0.0) throw std::invalid_argument("noise_sigma must be >= 0");
    if (pairs_per_image < 0) throw std::invalid_argument("pairs_per_image must be >= 0");
    if (d_ctx <= 0 || d_feat <= 0)
        throw std::invalid_argument("d_ctx and d_feat must be positive");
}

std::vector<double> zipf_probabilities(double s, int n) {
    std::vector<double> p(n);
    double z = 0.0;
    for (int k = 1; k <= n; ++k) z += std::pow(static_cast<double>(k), -s);
    for (int k = 1; k <= n; ++k) p[k - 1] = std::pow(static_cast<double>(k), -s) / z;
    return p;
}

namespace {

std::vector<double> random_unit_vector(int dim, RngStream& rng) {
    std::vector<double> v(dim);
    for (double& x : v) x = rng.normal();
    return l2_normalize(v);
}

int sample_from(const std::vector<double>& probs, RngStream& rng) {
    const double u = rng.u01();
    double acc = 0.0;
    for (size_t k = 0; k < probs.size(); ++k) {
        acc += probs[k];
        if (u < acc) return static_cast<int>(k);
    }
    return static_cast<int>(probs.size()) - 1;
}

}  // namespace

SynthCorpus generate_corpus(const GeneratorConfig& cfg) {
    cfg.validate();

    SynthCorpus corpus;
    corpus.entities = EntityVocabulary::make_default(cfg.num_entity_classes);
    corpus.relations = RelationVocabulary::make_default(cfg.num_relation_classes);

    // Corpus-level structure: class embeddings, relation and background
    // prototypes, the class-pair relatedness table, and aPTP compatibility
    // lists (adjacent Zipf ranks, mimicking on/sitting-on style clusters).
    RngStream structure_rng(cfg.seed, "synth.structure");
    std::vector<std::vector<double>> class_embeddings(cfg.num_entity_classes);
    for (auto& e : class_embeddings) e = random_unit_vector(cfg.d_ctx, structure_rng);
    std::vector<std::vector<double>> prototypes(cfg.num_relation_classes);
    for (auto& p : prototypes) p = random_unit_vector(cfg.d_feat, structure_rng);
    const std::vector<double> background = random_unit_vector(cfg.d_feat, structure_rng);
    std::vector<double> related_prob(
        static_cast<size_t>(cfg.num_entity_classes) * cfg.num_entity_classes);
    for (double& p : related_prob) p = structure_rng.uniform(0.10, 0.40);
    std::vector<std::vector<int>> compatible(cfg.num_relation_classes);
    for (int r = 0; r < cfg.num_relation_classes; ++r) {
        if (r > 0) compatible[r].push_back(r - 1);
        if (r + 1 < cfg.num_relation_classes) compatible[r].push_back(r + 1);
    }

    const std::vector<double> zipf = zipf_probabilities(cfg.zipf_s,
                                                        cfg.num_relation_classes);

    std::vector<SceneSample> all;
    all.reserve(cfg.num_images);
    for (int image = 0; image < cfg.num_images; ++image) {
        RngStream rng(cfg.seed, "synth.image", static_cast<uint64_t>(image));
        SceneSample sample;
        sample.image_id = image;
        const int m = cfg.entities_min +
                      static_cast<int>(rng.below(cfg.entities_max - cfg.entities_min + 1));
        sample.entity_classes.resize(m);
        for (int& cls : sample.entity_classes)
            cls = static_cast<int>(rng.below(cfg.num_entity_classes));

        std::vector<std::vector<double>> contexts(m);
        for (int e = 0; e < m; ++e) {
            contexts[e] = class_embeddings[sample.entity_classes[e]];
            for (double& x : contexts[e]) x += rng.normal(0.0, cfg.noise_sigma);
        }

        std::vector<std::pair<int, int>> index_pairs;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                if (i != j) index_pairs.emplace_back(i, j);
        if (cfg.pairs_per_image > 0 &&
            cfg.pairs_per_image < static_cast<int>(index_pairs.size())) {
            for (size_t i = index_pairs.size() - 1; i > 0; --i) {
                const size_t j = rng.below(i + 1);
                std::swap(index_pairs[i], index_pairs[j]);
            }
            index_pairs.resize(cfg.pairs_per_image);
            std::sort(index_pairs.begin(), index_pairs.end());
        }

        for (const auto& [i, j] : index_pairs) {
            PairExample pair;
            pair.subject_index = i;
            pair.object_index = j;
            pair.subject_class = sample.entity_classes[i];
            pair.object_class = sample.entity_classes[j];
            pair.context_subject = contexts[i];
            pair.context_object = contexts[j];

            const double p_rel =
                related_prob[static_cast<size_t>(pair.subject_class) *
                                 cfg.num_entity_classes +
                             pair.object_class];
            std::vector<int> true_set;
            if (rng.u01() < p_rel) {
                const int primary = sample_from(zipf, rng);
                true_set.push_back(primary);
                if (rng.u01() < cfg.aptp_multi_rate && !compatible[primary].empty()) {
                    const auto& compat = compatible[primary];
                    const int extra =
                        compat[static_cast<size_t>(rng.below(compat.size()))];
                    true_set.push_back(extra);
                    if (compat.size() > 1 && rng.u01() < 0.5) {
                        for (int other : compat)
                            if (other != extra) true_set.push_back(other);
                    }
                }
                std::sort(true_set.begin(), true_set.end());
            }

            // f_ij carries the relation signal: prototype mean plus noise.
            if (true_set.empty()) {
                pair.union_feature = background;
            } else {
                pair.union_feature.assign(cfg.d_feat, 0.0);
                for (int r : true_set)
                    for (int d = 0; d < cfg.d_feat; ++d)
                        pair.union_feature[d] += prototypes[r][d];
                for (double& x : pair.union_feature)
                    x /= static_cast<double>(true_set.size());
            }
            for (double& x : pair.union_feature) x += rng.normal(0.0, cfg.noise_sigma);

            // Annotation pass.
            pair.label = kUnannotated;
            if (!true_set.empty() && rng.u01() >= cfg.afn_rate) {
                // One relation survives, majority classes favored: the
                // relation with Zipf rank q gets weight exp(-beta * q).
                std::vector<double> w(true_set.size());
                double wsum = 0.0;
                for (size_t t = 0; t < true_set.size(); ++t) {
                    w[t] = std::exp(-cfg.majority_bias * static_cast<double>(true_set[t]));
                    wsum += w[t];
                }
                for (double& x : w) x /= wsum;
                pair.label = true_set[sample_from(w, rng)];
            }
            pair.true_relations = std::move(true_set);
            sample.pairs.push_back(std::move(pair));
        }
        all.push_back(std::move(sample));
    }

    const int n_train = cfg.num_images * 70 / 100;
    const int n_val = cfg.num_images * 10 / 100;
    corpus.train.assign(all.begin(), all.begin() + n_train);
    corpus.val.assign(all.begin() + n_train, all.begin() + n_train + n_val);
    corpus.test.assign(all.begin() + n_train + n_val, all.end());
    return corpus;
}

CorpusStatistics corpus_statistics(const std::vector<SceneSample>& corpus,
                                   int num_relation_classes) {
    if (corpus.empty()) throw std::runtime_error("empty corpus");
    CorpusStatistics stats;
    stats.annotated_histogram.assign(num_relation_classes, 0);
    stats.true_histogram.assign(num_relation_classes, 0);
    stats.has_oracle = true;
    long true_size_sum = 0;
    for (const auto& sample : corpus) {
        for (const auto& pair : sample.pairs) {
            stats.num_pairs++;
            if (pair.is_annotated()) {
                stats.num_annotated++;
                stats.annotated_histogram[pair.label]++;
            }
            if (!pair.true_relations) {
                stats.has_oracle = false;
                continue;
            }
            for (int r : *pair.true_relations) stats.true_histogram[r]++;
            if (!pair.true_relations->empty()) {
                stats.num_related++;
                true_size_sum += static_cast<long>(pair.true_relations->size());
                if (!pair.is_annotated()) stats.num_unannotated_related++;
            }
        }
    }
    if (stats.has_oracle && stats.num_related > 0) {
        stats.fraction_unannotated_related =
            static_cast<double>(stats.num_unannotated_related) / stats.num_related;
        stats.mean_true_set_size =
            static_cast<double>(true_size_sum) / stats.num_related;
    }
    return stats;
}

}  // namespace sgkd
