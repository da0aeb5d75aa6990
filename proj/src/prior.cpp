#include "sgkd/prior.hpp"

#include <cmath>
#include <stdexcept>

namespace sgkd {

FrequencyPrior build_frequency_prior(const std::vector<SceneSample>& train,
                                     double alpha,
                                     const EntityVocabulary& entities,
                                     const RelationVocabulary& relations) {
    if (train.empty()) throw std::runtime_error("empty corpus");
    if (alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");

    FrequencyPrior prior;
    prior.num_entity_classes = entities.size();
    prior.num_relation_classes = relations.num_with_norel();
    prior.alpha = alpha;
    const size_t total = static_cast<size_t>(prior.num_entity_classes) *
                         prior.num_entity_classes * prior.num_relation_classes;
    prior.counts.assign(total, 0);
    prior.table.assign(total, 0.0);

    const int no_rel = relations.no_relation_index();
    for (const auto& sample : train) {
        for (const auto& pair : sample.pairs) {
            if (pair.subject_class < 0 || pair.subject_class >= entities.size() ||
                pair.object_class < 0 || pair.object_class >= entities.size())
                throw std::invalid_argument("pair class id out of vocabulary bounds");
            const int r = pair.is_annotated() ? pair.label : no_rel;
            if (r < 0 || r >= prior.num_relation_classes)
                throw std::invalid_argument("pair label out of vocabulary bounds");
            prior.counts[prior.cell(pair.subject_class, pair.object_class, r)]++;
        }
    }

    const int nr = prior.num_relation_classes;
    for (int a = 0; a < prior.num_entity_classes; ++a) {
        for (int b = 0; b < prior.num_entity_classes; ++b) {
            const size_t base = prior.cell(a, b, 0);
            double denom = 0.0;
            for (int r = 0; r < nr; ++r) denom += prior.counts[base + r] + alpha;
            for (int r = 0; r < nr; ++r) {
                if (denom <= 0.0) {
                    // Never observed and alpha = 0: fall back to uniform.
                    prior.table[base + r] = -std::log(static_cast<double>(nr));
                } else {
                    const double num = prior.counts[base + r] + alpha;
                    prior.table[base + r] =
                        num > 0.0 ? std::log(num / denom) : kLogZeroFloor;
                }
            }
        }
    }
    return prior;
}

std::vector<double> lookup_prior(const FrequencyPrior& prior, int subject_class,
                                 int object_class) {
    if (subject_class < 0 || subject_class >= prior.num_entity_classes ||
        object_class < 0 || object_class >= prior.num_entity_classes)
        throw std::invalid_argument("lookup_prior: class id out of bounds");
    const size_t base = prior.cell(subject_class, object_class, 0);
    return std::vector<double>(prior.table.begin() + base,
                               prior.table.begin() + base + prior.num_relation_classes);
}

}  // namespace sgkd
