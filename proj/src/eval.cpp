#include "sgkd/eval.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace sgkd {

namespace {

bool triplet_order(const ScoredTriplet& a, const ScoredTriplet& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.subject_index != b.subject_index) return a.subject_index < b.subject_index;
    if (a.object_index != b.object_index) return a.object_index < b.object_index;
    return a.relation < b.relation;
}

using TripletKey = std::tuple<int, int, int>;  // (i, j, r)

}  // namespace

std::vector<ScoredTriplet> score_triplets(const SceneSample& sample,
                                          const LearnerParameters& params_f,
                                          const FrequencyPrior& prior,
                                          const HypersphereConfig& cfg,
                                          PredictionMode mode) {
    const int num_real = params_f.num_classes() - 1;
    std::vector<ScoredTriplet> out;
    out.reserve(sample.pairs.size() *
                (mode == PredictionMode::constrained ? 1 : num_real));
    for (const auto& pair : sample.pairs) {
        const std::vector<double> prior_row =
            lookup_prior(prior, pair.subject_class, pair.object_class);
        PairActivation act =
            forward_F(params_f, prior_row, pair.context_subject, pair.context_object,
                      pair.union_feature, cfg);
        if (mode == PredictionMode::constrained) {
            int best = 0;
            for (int r = 1; r < num_real; ++r)
                if (act.distribution.probs[r] > act.distribution.probs[best]) best = r;
            out.push_back({sample.image_id, pair.subject_index, pair.object_index, best,
                           act.distribution.probs[best]});
        } else {
            for (int r = 0; r < num_real; ++r)
                out.push_back({sample.image_id, pair.subject_index, pair.object_index, r,
                               act.distribution.probs[r]});
        }
    }
    return out;
}

std::vector<GroundTruthTriplet> annotated_ground_truth(
    const std::vector<SceneSample>& samples) {
    std::vector<GroundTruthTriplet> gt;
    for (const auto& sample : samples)
        for (const auto& pair : sample.pairs)
            if (pair.is_annotated())
                gt.push_back({sample.image_id, pair.subject_index, pair.object_index,
                              pair.label});
    return gt;
}

std::vector<GroundTruthTriplet> oracle_ground_truth(
    const std::vector<SceneSample>& samples) {
    std::vector<GroundTruthTriplet> gt;
    for (const auto& sample : samples) {
        for (const auto& pair : sample.pairs) {
            if (!pair.true_relations) throw std::runtime_error("no oracle ground truth");
            for (int r : *pair.true_relations)
                gt.push_back({sample.image_id, pair.subject_index, pair.object_index, r});
        }
    }
    return gt;
}

RecallReport recall_at_k(const std::vector<ScoredTriplet>& triplets,
                         const std::vector<GroundTruthTriplet>& ground_truth,
                         const std::vector<int>& ks, int num_relation_classes,
                         RecallAveraging averaging) {
    for (int k : ks)
        if (k <= 0) throw std::invalid_argument("recall_at_k: K must be > 0");

    std::map<long, std::vector<ScoredTriplet>> by_image;
    for (const auto& t : triplets) by_image[t.image_id].push_back(t);
    std::map<long, std::set<TripletKey>> gt_by_image;
    for (const auto& g : ground_truth)
        gt_by_image[g.image_id].insert({g.subject_index, g.object_index, g.relation});

    RecallReport report;
    report.ks = ks;
    report.num_relation_classes = num_relation_classes;
    report.recall.assign(ks.size(), 0.0);
    report.mean_recall.assign(ks.size(), 0.0);
    report.per_class_recall.assign(num_relation_classes,
                                   std::vector<double>(ks.size(), 0.0));
    report.gt_count_per_class.assign(num_relation_classes, 0);
    for (const auto& g : ground_truth) {
        if (g.relation < 0 || g.relation >= num_relation_classes)
            throw std::invalid_argument("ground-truth relation out of R'");
        report.gt_count_per_class[g.relation]++;
    }

    // Per K: overall and per-class accumulators.
    std::vector<double> overall_sum(ks.size(), 0.0);
    long overall_images = 0;
    std::vector<long> overall_matches(ks.size(), 0);
    long overall_gt = 0;
    std::vector<std::vector<double>> class_sum(
        num_relation_classes, std::vector<double>(ks.size(), 0.0));
    std::vector<long> class_images(num_relation_classes, 0);
    std::vector<std::vector<long>> class_matches(num_relation_classes,
                                                 std::vector<long>(ks.size(), 0));
    std::vector<long> class_gt(num_relation_classes, 0);

    for (const auto& [image_id, gt_set] : gt_by_image) {
        if (gt_set.empty()) continue;
        std::vector<ScoredTriplet> preds;
        if (auto it = by_image.find(image_id); it != by_image.end()) preds = it->second;
        std::sort(preds.begin(), preds.end(), triplet_order);

        // Ground truth split by relation class for the class-wise recalls.
        std::map<int, std::set<TripletKey>> gt_by_class;
        for (const auto& key : gt_set) gt_by_class[std::get<2>(key)].insert(key);

        for (size_t ki = 0; ki < ks.size(); ++ki) {
            const size_t top = std::min<size_t>(preds.size(), ks[ki]);
            long matches = 0;
            std::map<int, long> matches_by_class;
            for (size_t t = 0; t < top; ++t) {
                TripletKey key{preds[t].subject_index, preds[t].object_index,
                               preds[t].relation};
                if (gt_set.count(key)) {
                    matches++;
                    matches_by_class[preds[t].relation]++;
                }
            }
            overall_sum[ki] += static_cast<double>(matches) / gt_set.size();
            overall_matches[ki] += matches;
            for (const auto& [cls, cls_set] : gt_by_class) {
                class_sum[cls][ki] +=
                    static_cast<double>(matches_by_class[cls]) / cls_set.size();
                class_matches[cls][ki] += matches_by_class[cls];
            }
        }
        overall_images++;
        overall_gt += gt_set.size();
        for (const auto& [cls, cls_set] : gt_by_class) {
            class_gt[cls] += cls_set.size();
            class_images[cls]++;
        }
    }

    for (size_t ki = 0; ki < ks.size(); ++ki) {
        if (averaging == RecallAveraging::macro_images) {
            report.recall[ki] = overall_images > 0 ? overall_sum[ki] / overall_images : 0.0;
        } else {
            report.recall[ki] =
                overall_gt > 0 ? static_cast<double>(overall_matches[ki]) / overall_gt
                               : 0.0;
        }
        double class_total = 0.0;
        int classes_with_gt = 0;
        for (int cls = 0; cls < num_relation_classes; ++cls) {
            if (class_images[cls] == 0) continue;
            double r = 0.0;
            if (averaging == RecallAveraging::macro_images)
                r = class_sum[cls][ki] / class_images[cls];
            else
                r = static_cast<double>(class_matches[cls][ki]) / class_gt[cls];
            report.per_class_recall[cls][ki] = r;
            class_total += r;
            classes_with_gt++;
        }
        report.mean_recall[ki] =
            classes_with_gt > 0 ? class_total / classes_with_gt : 0.0;
    }
    return report;
}

RecallReport oracle_multilabel_recall(const std::vector<ScoredTriplet>& triplets,
                                      const std::vector<SceneSample>& samples,
                                      const std::vector<int>& ks,
                                      int num_relation_classes,
                                      RecallAveraging averaging) {
    return recall_at_k(triplets, oracle_ground_truth(samples), ks,
                       num_relation_classes, averaging);
}

std::string per_class_report(const RecallReport& report,
                             const RelationVocabulary& relations) {
    std::vector<int> order;
    for (int cls = 0; cls < report.num_relation_classes; ++cls)
        if (report.gt_count_per_class[cls] > 0) order.push_back(cls);
    std::stable_sort(order.begin(), order.end(), [&report](int a, int b) {
        return report.gt_count_per_class[a] > report.gt_count_per_class[b];
    });

    std::ostringstream out;
    out << "class,gt_count";
    for (int k : report.ks) out << ",recall@" << k;
    out << "\n";
    for (int cls : order) {
        out << relations.relation_names[cls] << "," << report.gt_count_per_class[cls];
        char buf[64];
        for (size_t ki = 0; ki < report.ks.size(); ++ki) {
            std::snprintf(buf, sizeof(buf), ",%.17g", report.per_class_recall[cls][ki]);
            out << buf;
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace sgkd
