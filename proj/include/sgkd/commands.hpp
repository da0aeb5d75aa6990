#pragma once

#include "sgkd/eval.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sgkd {

// Command entry points shared by the CLI binary and the test suites.
// Each returns a process exit status: 0 on success, nonzero after printing a
// single-line diagnostic to stderr.

// Writes train.sgkd / val.sgkd / test.sgkd plus stats.json into out_dir.
// Oracle relations are written only into the test split.
int cmd_generate(const std::string& config_path, const std::string& out_dir);

// Trains on data_dir/{train,val}.sgkd; writes checkpoint_latest.txt per
// validation round, checkpoint_final.txt, and metrics.csv into out_dir, and
// prints the final validation R@K / mR@K. `resume_path` restarts from a
// checkpoint; `seed_override` replaces the config seed.
int cmd_train(const std::string& config_path, const std::string& data_dir,
              const std::string& out_dir, const std::string& resume_path = "",
              std::optional<std::uint64_t> seed_override = std::nullopt);

// Scores a dataset file with a checkpoint and writes report.txt and
// per_class.csv (plus report_oracle.txt / per_class_oracle.csv with
// `use_oracle`) into out_dir.
int cmd_eval(const std::string& checkpoint_path, const std::string& data_path,
             const std::vector<int>& ks, PredictionMode mode, bool use_oracle,
             const std::string& out_dir);

// Trains one KD model per temperature with a shared seed and writes
// ablation.csv: per T, constrained R/mR@{20,50,100} and unconstrained
// R/mR@{50,100} on the test split.
int cmd_ablate_temperature(const std::string& config_path, const std::string& data_dir,
                           const std::vector<double>& temperatures,
                           const std::string& out_dir);

}  // namespace sgkd
