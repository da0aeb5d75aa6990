#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace sgkd {

// Sentinel label for entity pairs without an annotated relation.
constexpr int kUnannotated = -1;
// Below this L2 norm a vector is treated as degenerate and passed through
// normalization unchanged.
constexpr double kNormEps = 1e-12;
// Probabilities are clamped to at least this before logs in KL.
constexpr double kProbEps = 1e-12;
// Stand-in for ln(0) in the frequency prior table.
constexpr double kLogZeroFloor = -50.0;

// ---------------------------------------------------------------------------
// Vocabularies
// ---------------------------------------------------------------------------

// The R' relation classes. The full space R appends one implicit
// `no-relation` class at the last index; it never appears in the name list.
struct RelationVocabulary {
    std::vector<std::string> relation_names;

    int num_real() const { return static_cast<int>(relation_names.size()); }
    int num_with_norel() const { return num_real() + 1; }
    int no_relation_index() const { return num_real(); }

    void validate() const;
    static RelationVocabulary make_default(int num_real_classes);
};

struct EntityVocabulary {
    std::vector<std::string> entity_names;

    int size() const { return static_cast<int>(entity_names.size()); }

    void validate() const;
    static EntityVocabulary make_default(int num_classes);
};

// ---------------------------------------------------------------------------
// Samples
// ---------------------------------------------------------------------------

// One ordered subject-object pair within an image.
struct PairExample {
    int subject_index = 0;
    int object_index = 0;
    int subject_class = 0;
    int object_class = 0;
    std::vector<double> context_subject;   // length d_ctx
    std::vector<double> context_object;    // length d_ctx
    std::vector<double> union_feature;     // length d_feat
    int label = kUnannotated;              // id in R' or kUnannotated
    // Synthetic oracle only: the full set of valid relations (sorted ids).
    std::optional<std::vector<int>> true_relations;

    bool is_annotated() const { return label != kUnannotated; }
};

struct SceneSample {
    long image_id = 0;
    std::vector<int> entity_classes;
    std::vector<PairExample> pairs;
};

void validate_sample(const SceneSample& sample, const EntityVocabulary& entities,
                     const RelationVocabulary& relations);

// ---------------------------------------------------------------------------
// Dense matrix / vector helpers
// ---------------------------------------------------------------------------

// Row-major dense matrix. Small and plain on purpose; every gradient in this
// project is hand-derived, so clarity beats generality.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
    double* row(int r) { return a.data() + static_cast<size_t>(r) * cols; }
    const double* row(int r) const { return a.data() + static_cast<size_t>(r) * cols; }
    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
    bool all_finite() const;
};

std::vector<double> matvec(const Matrix& m, const std::vector<double>& v);
double dot(const double* x, const double* y, int n);
double dot(const std::vector<double>& x, const std::vector<double>& y);
double norm2(const double* x, int n);
double norm2(const std::vector<double>& x);

// ---------------------------------------------------------------------------
// Learner parameters and distributions
// ---------------------------------------------------------------------------

// The four matrices of one relation learner. `w_classes` has |R| rows for the
// supervised learner F and |R'| rows for the semi-supervised learner G.
struct LearnerParameters {
    Matrix w_subject;  // d_ctx x d_ctx
    Matrix w_object;   // d_ctx x d_ctx
    Matrix w_fuse;     // d_feat x 2*d_ctx
    Matrix w_classes;  // K x d_feat

    int d_ctx() const { return w_subject.rows; }
    int d_feat() const { return w_fuse.rows; }
    int num_classes() const { return w_classes.rows; }
    bool all_finite() const;
};

enum class Arity { FSpace, GSpace };

struct RelationDistribution {
    std::vector<double> probs;
    Arity arity = Arity::FSpace;

    int size() const { return static_cast<int>(probs.size()); }
};

// ---------------------------------------------------------------------------
// Core numeric operations
// ---------------------------------------------------------------------------

// v / ||v||_2, or v unchanged when ||v||_2 <= kNormEps.
std::vector<double> l2_normalize(const std::vector<double>& v);

// Max-subtracted stable softmax.
RelationDistribution softmax(const std::vector<double>& z,
                             Arity arity = Arity::FSpace);

// Shannon entropy in nats, with the 0*ln(0) = 0 convention.
double entropy(const RelationDistribution& d);

// KL(p || q) with q clamped to kProbEps and renormalized before the logs.
double kl_divergence(const RelationDistribution& p, const RelationDistribution& q);

}  // namespace sgkd
