#include "sgkd/core.hpp"
#include "sgkd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace sgkd {

// ---------------------------------------------------------------------------
// RngStream
// ---------------------------------------------------------------------------

namespace {

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::string_view stream_name,
                     std::uint64_t index) {
    std::uint64_t mix = master_seed;
    mix ^= fnv1a64(stream_name);
    mix += index * 0x9e3779b97f4a7c15ULL;
    // Warm up so that nearby seeds diverge immediately.
    state_ = mix;
    (void)splitmix64(state_);
    (void)splitmix64(state_);
}

std::uint64_t RngStream::next_u64() { return splitmix64(state_); }

double RngStream::u01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

double RngStream::normal(double mean, double stddev) {
    if (has_spare_) {
        has_spare_ = false;
        return mean + stddev * spare_normal_;
    }
    double u1 = 0.0;
    do {
        u1 = u01();
    } while (u1 <= 0.0);
    double u2 = u01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * M_PI * u2;
    spare_normal_ = r * std::sin(theta);
    has_spare_ = true;
    return mean + stddev * r * std::cos(theta);
}

std::uint64_t RngStream::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("RngStream::below: n must be > 0");
    return next_u64() % n;
}

// ---------------------------------------------------------------------------
// Vocabularies and samples
// ---------------------------------------------------------------------------

void RelationVocabulary::validate() const {
    std::set<std::string> seen;
    for (const auto& name : relation_names) {
        if (name.empty()) throw std::invalid_argument("relation name is empty");
        if (name == "no-relation")
            throw std::invalid_argument("`no-relation` must not appear in relation_names");
        if (!seen.insert(name).second)
            throw std::invalid_argument("duplicate relation name: " + name);
    }
}

RelationVocabulary RelationVocabulary::make_default(int num_real_classes) {
    RelationVocabulary v;
    v.relation_names.reserve(num_real_classes);
    for (int r = 0; r < num_real_classes; ++r) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "rel_%02d", r);
        v.relation_names.emplace_back(buf);
    }
    return v;
}

void EntityVocabulary::validate() const {
    if (size() < 2) throw std::invalid_argument("entity vocabulary needs at least 2 classes");
    std::set<std::string> seen;
    for (const auto& name : entity_names) {
        if (name.empty()) throw std::invalid_argument("entity name is empty");
        if (!seen.insert(name).second)
            throw std::invalid_argument("duplicate entity name: " + name);
    }
}

EntityVocabulary EntityVocabulary::make_default(int num_classes) {
    EntityVocabulary v;
    v.entity_names.reserve(num_classes);
    for (int c = 0; c < num_classes; ++c) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "ent_%02d", c);
        v.entity_names.emplace_back(buf);
    }
    return v;
}

void validate_sample(const SceneSample& sample, const EntityVocabulary& entities,
                     const RelationVocabulary& relations) {
    const int m = static_cast<int>(sample.entity_classes.size());
    for (int cls : sample.entity_classes) {
        if (cls < 0 || cls >= entities.size())
            throw std::invalid_argument("entity class id out of bounds");
    }
    std::set<std::pair<int, int>> seen_pairs;
    for (const auto& pair : sample.pairs) {
        if (pair.subject_index == pair.object_index)
            throw std::invalid_argument("pair has subject_index == object_index");
        if (pair.subject_index < 0 || pair.subject_index >= m ||
            pair.object_index < 0 || pair.object_index >= m)
            throw std::invalid_argument("pair index does not reference entity_classes");
        if (!seen_pairs.insert({pair.subject_index, pair.object_index}).second)
            throw std::invalid_argument("duplicate (i, j) pair in sample");
        if (pair.subject_class != sample.entity_classes[pair.subject_index] ||
            pair.object_class != sample.entity_classes[pair.object_index])
            throw std::invalid_argument("pair class inconsistent with entity_classes");
        if (pair.label != kUnannotated &&
            (pair.label < 0 || pair.label >= relations.num_real()))
            throw std::invalid_argument("pair label out of R'");
        if (pair.true_relations) {
            for (int r : *pair.true_relations)
                if (r < 0 || r >= relations.num_real())
                    throw std::invalid_argument("true relation id out of R'");
            if (pair.label != kUnannotated) {
                const auto& t = *pair.true_relations;
                if (std::find(t.begin(), t.end(), pair.label) == t.end())
                    throw std::invalid_argument("annotated label not in true_relations");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Matrix helpers
// ---------------------------------------------------------------------------

bool Matrix::all_finite() const {
    for (double x : a)
        if (!std::isfinite(x)) return false;
    return true;
}

bool LearnerParameters::all_finite() const {
    return w_subject.all_finite() && w_object.all_finite() && w_fuse.all_finite() &&
           w_classes.all_finite();
}

std::vector<double> matvec(const Matrix& m, const std::vector<double>& v) {
    if (static_cast<int>(v.size()) != m.cols)
        throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<double> out(m.rows, 0.0);
    for (int r = 0; r < m.rows; ++r) out[r] = dot(m.row(r), v.data(), m.cols);
    return out;
}

double dot(const double* x, const double* y, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("dot: size mismatch");
    return dot(x.data(), y.data(), static_cast<int>(x.size()));
}

double norm2(const double* x, int n) { return std::sqrt(dot(x, x, n)); }

double norm2(const std::vector<double>& x) {
    return norm2(x.data(), static_cast<int>(x.size()));
}

// ---------------------------------------------------------------------------
// Numeric primitives
// ---------------------------------------------------------------------------

std::vector<double> l2_normalize(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("l2_normalize: empty vector");
    const double n = norm2(v);
    if (n <= kNormEps) return v;
    std::vector<double> out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
    return out;
}

RelationDistribution softmax(const std::vector<double>& z, Arity arity) {
    if (z.empty()) throw std::invalid_argument("softmax: empty input");
    const double zmax = *std::max_element(z.begin(), z.end());
    RelationDistribution d;
    d.arity = arity;
    d.probs.resize(z.size());
    double sum = 0.0;
    for (size_t k = 0; k < z.size(); ++k) {
        d.probs[k] = std::exp(z[k] - zmax);
        sum += d.probs[k];
    }
    for (double& p : d.probs) p /= sum;
    return d;
}

double entropy(const RelationDistribution& d) {
    double h = 0.0;
    for (double p : d.probs)
        if (p > 0.0) h -= p * std::log(p);
    return h;
}

double kl_divergence(const RelationDistribution& p, const RelationDistribution& q) {
    if (p.arity != q.arity || p.probs.size() != q.probs.size())
        throw std::invalid_argument("kl_divergence: arity mismatch");
    // Clamp q away from zero; renormalize only when clamping added mass so
    // KL(p, p) stays exactly zero for strictly positive p.
    double qsum = 0.0;
    bool clamped = false;
    for (double x : q.probs) {
        if (x < kProbEps) clamped = true;
        qsum += std::max(x, kProbEps);
    }
    double kl = 0.0;
    for (size_t k = 0; k < p.probs.size(); ++k) {
        const double pk = p.probs[k];
        if (pk <= 0.0) continue;
        double qk = std::max(q.probs[k], kProbEps);
        if (clamped) qk /= qsum;
        kl += pk * std::log(pk / qk);
    }
    return kl;
}

}  // namespace sgkd
