#pragma once

#include "haica/agent.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace haica {

inline constexpr const char* kVersion = "0.1.0";

struct ConditionFlags {
    bool order_blind_agent2 = false;
    bool swapped_integration = false;
    bool solo = false;
};

/// Canonical condition label used in output paths and seed derivation.
std::string condition_name(const ConditionFlags& flags);

struct ExperimentConfig {
    KitchenDomain domain = KitchenDomain::Soup;
    std::vector<std::string> layouts;  // layout file paths
    std::optional<SaladTask> task;     // overrides the layout header when set
    std::vector<double> sp_grid;       // defaults to 0..1 step 0.1
    int episodes_per_cell = 20;
    int max_steps = 0;  // 0 = domain default (soup 400, salad 100)
    ConditionFlags conditions;
    std::uint64_t seed = 0;
    TomConfig tom;
    double k_p = 0.5;
    double k_e = 0.5;
    double punish_factor = 0.5;
    double punish_floor = 0.05;
    double punish_decay = 0.1;
    std::string out_dir = "out";
    int jobs = 1;

    int resolved_max_steps() const;
    std::vector<double> resolved_sp_grid() const;
};

/// Parse `key = value` lines (# comments, blank lines allowed). Unknown keys
/// raise std::invalid_argument.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

/// Round-trippable serialization; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

struct EpisodeRecord {
    std::string layout;
    double sp_i = 0.0;
    double sp_j = 0.0;
    std::string condition;
    std::uint64_t seed = 0;
    double total_reward = 0.0;
    bool success = false;
    int steps_used = 0;
    int orders_completed = 0;
    double mean_decision_time = 0.0;  // seconds per agent_step; wall clock
};

/// Per-episode seed, derived so single episodes can be re-targeted:
/// fold layout name, sp pair, condition and episode index into the base seed.
std::uint64_t episode_seed(std::uint64_t base, const std::string& layout_name, double sp_i,
                           double sp_j, const std::string& condition, int episode_index);

/// Run one episode of the scenario. The SP pair is assigned to the two
/// agents in seeded random order.
EpisodeRecord run_episode(const Layout& layout, const ExperimentConfig& config, double sp_i,
                          double sp_j, int episode_index);

struct SweepResults {
    std::vector<EpisodeRecord> records;  // enumeration order: layout, sp_i, sp_j, episode
};

/// Execute every (layout x sp_i x sp_j x episode) cell. With jobs > 1
/// episodes run on a worker pool; results are independent of the degree.
SweepResults run_sweep(const ExperimentConfig& config);

/// Re-run a single episode identified by its row index in records.csv.
EpisodeRecord replay_episode(const ExperimentConfig& config, int episode_id);

/// Per-cell mean across episodes, then mean across layouts (two-stage
/// averaging). Matrix is indexed [i][j] over the sp grid.
std::vector<std::vector<double>> heatmap(const SweepResults& results,
                                         const ExperimentConfig& config);

/// Write records.csv, timings.csv, heatmap_<condition>.tsv (aggregate and
/// per-layout) and the manifest into out_dir. Every file except timings.csv
/// is a pure function of (config, seed).
void emit_results(const SweepResults& results, const ExperimentConfig& config,
                  const std::string& out_dir);

std::string record_csv_header();
std::string record_csv_row(const EpisodeRecord& r);

}  // namespace haica
