#include "sgkd/commands.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"Two-learner relation classification with knowledge distillation"};
    app.require_subcommand(1);

    std::string config_path, data_dir, out_dir = "out", checkpoint_path, resume_path;
    std::string mode_name = "constrained";
    std::string ks_csv = "20,50,100";
    std::vector<double> temperatures = {1.0, 1.25, 1.5, 1.75};
    bool use_oracle = false;
    std::optional<std::uint64_t> seed_override;
    std::uint64_t seed_value = 0;

    auto* generate = app.add_subcommand("generate", "Write a synthetic dataset");
    generate->add_option("--config", config_path, "Run configuration (JSON)")->required();
    generate->add_option("--out", out_dir, "Output directory");

    auto* train = app.add_subcommand("train", "Train both learners");
    train->add_option("--config", config_path, "Run configuration (JSON)")->required();
    train->add_option("--data", data_dir, "Directory with train.sgkd / val.sgkd")
        ->required();
    train->add_option("--out", out_dir, "Output directory");
    train->add_option("--resume", resume_path, "Checkpoint to resume from");
    auto* seed_opt = train->add_option("--seed", seed_value, "Override the config seed");

    auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
    eval->add_option("--checkpoint", checkpoint_path, "Checkpoint file")->required();
    eval->add_option("--data", data_dir, "Dataset file to evaluate")->required();
    eval->add_option("--k", ks_csv, "Comma-separated K values");
    eval->add_option("--mode", mode_name, "constrained|unconstrained")
        ->check(CLI::IsMember({"constrained", "unconstrained"}));
    eval->add_flag("--oracle", use_oracle, "Also report multi-label oracle recall");
    eval->add_option("--out", out_dir, "Output directory");

    auto* ablate =
        app.add_subcommand("ablate-temperature", "Train one KD model per temperature");
    ablate->add_option("--config", config_path, "Run configuration (JSON)")->required();
    ablate->add_option("--data", data_dir, "Directory with dataset files")->required();
    ablate->add_option("--temperatures", temperatures, "Temperatures to sweep");
    ablate->add_option("--out", out_dir, "Output directory");

    CLI11_PARSE(app, argc, argv);

    if (generate->parsed()) return sgkd::cmd_generate(config_path, out_dir);
    if (train->parsed()) {
        if (!seed_opt->empty()) seed_override = seed_value;
        return sgkd::cmd_train(config_path, data_dir, out_dir, resume_path,
                               seed_override);
    }
    if (eval->parsed()) {
        std::vector<int> ks;
        for (size_t pos = 0; pos < ks_csv.size();) {
            size_t next = ks_csv.find(',', pos);
            if (next == std::string::npos) next = ks_csv.size();
            ks.push_back(std::stoi(ks_csv.substr(pos, next - pos)));
            pos = next + 1;
        }
        const auto mode = mode_name == "constrained"
                              ? sgkd::PredictionMode::constrained
                              : sgkd::PredictionMode::unconstrained;
        return sgkd::cmd_eval(checkpoint_path, data_dir, ks, mode, use_oracle, out_dir);
    }
    if (ablate->parsed())
        return sgkd::cmd_ablate_temperature(config_path, data_dir, temperatures, out_dir);
    return 1;
}
