#pragma once

#include "sgkd/core.hpp"

#include <vector>

namespace sgkd {

// Log-space frequency prior over relation classes, conditioned on the
// (subject class, object class) pair and pre-computed from training
// annotations. Serves as a constant additive logit bias for learner F;
// learner G never consumes it.
struct FrequencyPrior {
    int num_entity_classes = 0;
    int num_relation_classes = 0;  // |R|, includes the no-relation slot
    double alpha = 1.0;
    // Flattened |O| x |O| x |R|.
    std::vector<double> table;
    std::vector<long> counts;  // retained for audit

    size_t cell(int subj_class, int obj_class, int relation) const {
        return (static_cast<size_t>(subj_class) * num_entity_classes + obj_class) *
                   num_relation_classes +
               relation;
    }
};

// Tally annotated labels (UNANNOTATED pairs count toward `no-relation`) and
// derive ln((count + alpha) / sum(count + alpha)) per cell. Cells with zero
// total count become uniform; ln(0) is floored at kLogZeroFloor.
FrequencyPrior build_frequency_prior(const std::vector<SceneSample>& train,
                                     double alpha,
                                     const EntityVocabulary& entities,
                                     const RelationVocabulary& relations);

// The log-score row for one class pair; length |R|, constant w.r.t. model
// parameters.
std::vector<double> lookup_prior(const FrequencyPrior& prior, int subject_class,
                                 int object_class);

}  // namespace sgkd
