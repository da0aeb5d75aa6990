#include "sgkd/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace sgkd {

namespace {

void append_double(std::string& out, double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    out += buf;
}

void append_vector(std::string& out, const std::vector<double>& v) {
    for (double x : v) {
        out += ' ';
        append_double(out, x);
    }
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::runtime_error(path + ": " + what);
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---------------------------------------------------------------------------
// Dataset
// ---------------------------------------------------------------------------

void write_dataset(const std::string& path, const std::vector<SceneSample>& samples,
                   int num_entity_classes, int num_relation_classes, int d_ctx,
                   int d_feat, bool include_oracle) {
    std::string out;
    out.reserve(samples.size() * 4096);
    out += "SGKD v1 " + std::to_string(num_entity_classes) + ' ' +
           std::to_string(num_relation_classes) + ' ' + std::to_string(d_ctx) + ' ' +
           std::to_string(d_feat) + '\n';
    for (const auto& sample : samples) {
        out += "image " + std::to_string(sample.image_id) + ' ' +
               std::to_string(sample.entity_classes.size()) + '\n';
        for (size_t e = 0; e < sample.entity_classes.size(); ++e) {
            if (e) out += ' ';
            out += std::to_string(sample.entity_classes[e]);
        }
        out += '\n';
        for (const auto& pair : sample.pairs) {
            out += "pair " + std::to_string(pair.subject_index) + ' ' +
                   std::to_string(pair.object_index) + ' ' + std::to_string(pair.label);
            append_vector(out, pair.context_subject);
            append_vector(out, pair.context_object);
            append_vector(out, pair.union_feature);
            out += '\n';
            if (include_oracle) {
                if (!pair.true_relations)
                    throw std::runtime_error("write_dataset: oracle requested but missing");
                out += "oracle " + std::to_string(pair.subject_index) + ' ' +
                       std::to_string(pair.object_index);
                for (int r : *pair.true_relations) out += ' ' + std::to_string(r);
                out += '\n';
            }
        }
    }
    write_text_file(path, out);
}

Dataset read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    Dataset dataset;
    std::string magic, version;
    int num_entities = 0, num_relations = 0;
    if (!(in >> magic >> version >> num_entities >> num_relations >> dataset.d_ctx >>
          dataset.d_feat))
        fail(path, "bad header");
    if (magic != "SGKD" || version != "v1") fail(path, "not an SGKD v1 dataset");
    dataset.entities = EntityVocabulary::make_default(num_entities);
    dataset.relations = RelationVocabulary::make_default(num_relations);

    std::string tag;
    SceneSample* current = nullptr;
    while (in >> tag) {
        if (tag == "image") {
            SceneSample sample;
            size_t m = 0;
            if (!(in >> sample.image_id >> m)) fail(path, "bad image line");
            sample.entity_classes.resize(m);
            for (size_t e = 0; e < m; ++e)
                if (!(in >> sample.entity_classes[e])) fail(path, "bad entity list");
            dataset.samples.push_back(std::move(sample));
            current = &dataset.samples.back();
        } else if (tag == "pair") {
            if (!current) fail(path, "pair before image");
            PairExample pair;
            if (!(in >> pair.subject_index >> pair.object_index >> pair.label))
                fail(path, "bad pair line");
            auto read_vec = [&](std::vector<double>& v, int n) {
                v.resize(n);
                for (int d = 0; d < n; ++d)
                    if (!(in >> v[d])) fail(path, "bad pair floats");
            };
            read_vec(pair.context_subject, dataset.d_ctx);
            read_vec(pair.context_object, dataset.d_ctx);
            read_vec(pair.union_feature, dataset.d_feat);
            pair.subject_class = current->entity_classes.at(pair.subject_index);
            pair.object_class = current->entity_classes.at(pair.object_index);
            current->pairs.push_back(std::move(pair));
        } else if (tag == "oracle") {
            if (!current || current->pairs.empty()) fail(path, "oracle before pair");
            int i = 0, j = 0;
            if (!(in >> i >> j)) fail(path, "bad oracle line");
            PairExample& pair = current->pairs.back();
            if (i != pair.subject_index || j != pair.object_index)
                fail(path, "oracle line does not match preceding pair");
            std::vector<int> rels;
            // Relation ids until the next tag; consume the rest of the line.
            std::string line;
            std::getline(in, line);
            std::istringstream rest(line);
            int r = 0;
            while (rest >> r) rels.push_back(r);
            pair.true_relations = std::move(rels);
        } else {
            fail(path, "unknown tag: " + tag);
        }
    }
    for (const auto& sample : dataset.samples)
        validate_sample(sample, dataset.entities, dataset.relations);
    return dataset;
}

// ---------------------------------------------------------------------------
// Checkpoint
// ---------------------------------------------------------------------------

namespace {

void append_section(std::string& out, const std::string& name, int rows, int cols,
                    const double* data) {
    out += "section " + name + ' ' + std::to_string(rows) + ' ' +
           std::to_string(cols) + '\n';
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c) out += ' ';
            append_double(out, data[static_cast<size_t>(r) * cols + c]);
        }
        out += '\n';
    }
}

void append_matrix(std::string& out, const std::string& name, const Matrix& m) {
    append_section(out, name, m.rows, m.cols, m.a.data());
}

struct RawSection {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;
};

Matrix to_matrix(const RawSection& s) {
    Matrix m(s.rows, s.cols);
    m.a = s.data;
    return m;
}

const RawSection& need(const std::map<std::string, RawSection>& sections,
                       const std::string& name, const std::string& path) {
    auto it = sections.find(name);
    if (it == sections.end()) fail(path, "missing section " + name);
    return it->second;
}

}  // namespace

void write_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
    std::string out;
    const double config_row[] = {
        static_cast<double>(checkpoint.d_ctx),
        static_cast<double>(checkpoint.d_feat),
        static_cast<double>(checkpoint.num_entity_classes),
        static_cast<double>(checkpoint.num_real_relations),
        checkpoint.gamma,
        checkpoint.l2_mode == L2Mode::normalized ? 1.0 : 0.0,
    };
    append_section(out, "config", 1, 6, config_row);

    const FrequencyPrior& prior = checkpoint.prior;
    const int cells = prior.num_entity_classes * prior.num_entity_classes;
    append_section(out, "frequency_prior", cells, prior.num_relation_classes,
                   prior.table.data());
    std::vector<double> counts(prior.counts.begin(), prior.counts.end());
    append_section(out, "frequency_prior.counts", cells, prior.num_relation_classes,
                   counts.data());
    append_section(out, "frequency_prior.alpha", 1, 1, &prior.alpha);

    const TrainState& state = checkpoint.state;
    append_matrix(out, "F.W_s", state.params_f.w_subject);
    append_matrix(out, "F.W_o", state.params_f.w_object);
    append_matrix(out, "F.W_c", state.params_f.w_fuse);
    append_matrix(out, "F.W", state.params_f.w_classes);
    append_matrix(out, "G.W_s", state.params_g.w_subject);
    append_matrix(out, "G.W_o", state.params_g.w_object);
    append_matrix(out, "G.W_c", state.params_g.w_fuse);
    append_matrix(out, "G.W", state.params_g.w_classes);
    append_matrix(out, "momentum.F.W_s", state.momentum_buffers.f.w_subject);
    append_matrix(out, "momentum.F.W_o", state.momentum_buffers.f.w_object);
    append_matrix(out, "momentum.F.W_c", state.momentum_buffers.f.w_fuse);
    append_matrix(out, "momentum.F.W", state.momentum_buffers.f.w_classes);
    append_matrix(out, "momentum.G.W_s", state.momentum_buffers.g.w_subject);
    append_matrix(out, "momentum.G.W_o", state.momentum_buffers.g.w_object);
    append_matrix(out, "momentum.G.W_c", state.momentum_buffers.g.w_fuse);
    append_matrix(out, "momentum.G.W", state.momentum_buffers.g.w_classes);

    const double state_row[] = {
        static_cast<double>(state.iteration),
        state.lr,
        static_cast<double>(state.decay_count),
        state.best_validation_recall,
        static_cast<double>(state.rounds_since_improvement),
        static_cast<double>(state.rng_seed >> 32),
        static_cast<double>(state.rng_seed & 0xffffffffULL),
    };
    append_section(out, "state", 1, 7, state_row);
    write_text_file(path, out);
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open");
    std::map<std::string, RawSection> sections;
    std::string tag;
    while (in >> tag) {
        if (tag != "section") fail(path, "expected section header");
        std::string name;
        RawSection s;
        if (!(in >> name >> s.rows >> s.cols)) fail(path, "bad section header");
        s.data.resize(static_cast<size_t>(s.rows) * s.cols);
        for (double& x : s.data)
            if (!(in >> x)) fail(path, "bad section data in " + name);
        sections[name] = std::move(s);
    }

    Checkpoint checkpoint;
    const RawSection& config = need(sections, "config", path);
    if (config.data.size() != 6) fail(path, "bad config section");
    checkpoint.d_ctx = static_cast<int>(config.data[0]);
    checkpoint.d_feat = static_cast<int>(config.data[1]);
    checkpoint.num_entity_classes = static_cast<int>(config.data[2]);
    checkpoint.num_real_relations = static_cast<int>(config.data[3]);
    checkpoint.gamma = config.data[4];
    checkpoint.l2_mode = config.data[5] != 0.0 ? L2Mode::normalized : L2Mode::raw;

    FrequencyPrior& prior = checkpoint.prior;
    prior.num_entity_classes = checkpoint.num_entity_classes;
    prior.num_relation_classes = checkpoint.num_real_relations + 1;
    prior.table = need(sections, "frequency_prior", path).data;
    const auto& counts = need(sections, "frequency_prior.counts", path).data;
    prior.counts.assign(counts.begin(), counts.end());
    prior.alpha = need(sections, "frequency_prior.alpha", path).data.at(0);

    TrainState& state = checkpoint.state;
    state.params_f.w_subject = to_matrix(need(sections, "F.W_s", path));
    state.params_f.w_object = to_matrix(need(sections, "F.W_o", path));
    state.params_f.w_fuse = to_matrix(need(sections, "F.W_c", path));
    state.params_f.w_classes = to_matrix(need(sections, "F.W", path));
    state.params_g.w_subject = to_matrix(need(sections, "G.W_s", path));
    state.params_g.w_object = to_matrix(need(sections, "G.W_o", path));
    state.params_g.w_fuse = to_matrix(need(sections, "G.W_c", path));
    state.params_g.w_classes = to_matrix(need(sections, "G.W", path));
    state.momentum_buffers.f.w_subject = to_matrix(need(sections, "momentum.F.W_s", path));
    state.momentum_buffers.f.w_object = to_matrix(need(sections, "momentum.F.W_o", path));
    state.momentum_buffers.f.w_fuse = to_matrix(need(sections, "momentum.F.W_c", path));
    state.momentum_buffers.f.w_classes = to_matrix(need(sections, "momentum.F.W", path));
    state.momentum_buffers.g.w_subject = to_matrix(need(sections, "momentum.G.W_s", path));
    state.momentum_buffers.g.w_object = to_matrix(need(sections, "momentum.G.W_o", path));
    state.momentum_buffers.g.w_fuse = to_matrix(need(sections, "momentum.G.W_c", path));
    state.momentum_buffers.g.w_classes = to_matrix(need(sections, "momentum.G.W", path));

    const RawSection& st = need(sections, "state", path);
    if (st.data.size() != 7) fail(path, "bad state section");
    state.iteration = static_cast<long>(st.data[0]);
    state.lr = st.data[1];
    state.decay_count = static_cast<int>(st.data[2]);
    state.best_validation_recall = st.data[3];
    state.rounds_since_improvement = static_cast<int>(st.data[4]);
    state.rng_seed = (static_cast<std::uint64_t>(st.data[5]) << 32) |
                     static_cast<std::uint64_t>(st.data[6]);
    return checkpoint;
}

// ---------------------------------------------------------------------------
// Metrics log and reports
// ---------------------------------------------------------------------------

std::string format_metrics_log(const TrainLog& log) {
    std::string out =
        "iteration,lr,loss_f,loss_g_supervised,loss_g_entropy,kd_labeled,"
        "kd_unlabeled,total";
    for (int k : log.ks)
        out += ",R@" + std::to_string(k) + ",mR@" + std::to_string(k);
    out += '\n';
    for (const auto& round : log.rounds) {
        out += std::to_string(round.iteration);
        auto push = [&out](double x) {
            out += ',';
            append_double(out, x);
        };
        push(round.lr);
        push(round.mean_loss.loss_f);
        push(round.mean_loss.loss_g_supervised);
        push(round.mean_loss.loss_g_entropy);
        push(round.mean_loss.kd_labeled);
        push(round.mean_loss.kd_unlabeled);
        push(round.mean_loss.total);
        for (size_t ki = 0; ki < log.ks.size(); ++ki) {
            push(round.recall[ki]);
            push(round.mean_recall[ki]);
        }
        out += '\n';
    }
    return out;
}

void write_metrics_log(const std::string& path, const TrainLog& log) {
    write_text_file(path, format_metrics_log(log));
}

std::string format_recall_report(const RecallReport& report) {
    std::string out;
    for (size_t ki = 0; ki < report.ks.size(); ++ki) {
        out += "R@" + std::to_string(report.ks[ki]) + ' ';
        append_double(out, report.recall[ki]);
        out += '\n';
        out += "mR@" + std::to_string(report.ks[ki]) + ' ';
        append_double(out, report.mean_recall[ki]);
        out += '\n';
    }
    return out;
}

}  // namespace sgkd
