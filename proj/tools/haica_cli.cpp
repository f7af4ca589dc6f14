#include "haica/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Kitchen coordination experiments"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run an SP sweep from a config file");
    std::string config_path;
    run->add_option("--config", config_path, "Experiment config file")->required();
    std::vector<std::string> layouts;
    run->add_option("--layouts", layouts, "Layout files (overrides config)")->delimiter(',');
    std::string sp_grid;
    run->add_option("--sp-grid", sp_grid, "SP values, lo:hi:step or comma list");
    int episodes = -1;
    run->add_option("--episodes", episodes, "Episodes per cell");
    int max_steps = -1;
    run->add_option("--max-steps", max_steps, "Steps per episode");
    bool order_blind = false, swapped = false, solo = false;
    run->add_flag("--order-blind", order_blind, "Hide orders from agent 2");
    run->add_flag("--swapped-integration", swapped, "Resonate after own evidence");
    run->add_flag("--solo", solo, "Single agent, no mentalizing");
    std::uint64_t seed = 0;
    auto* seed_opt = run->add_option("--seed", seed, "Base RNG seed");
    std::string out_dir;
    run->add_option("--out", out_dir, "Output directory");
    int jobs = -1;
    run->add_option("--jobs", jobs, "Worker threads");

    // replay
    auto* replay = app.add_subcommand("replay", "Re-run one episode from a manifest");
    std::string manifest_path;
    replay->add_option("--manifest", manifest_path, "Manifest file")->required();
    int episode_id = 0;
    replay->add_option("--episode", episode_id, "Row index in records.csv")->required();

    // validate-layout
    auto* validate = app.add_subcommand("validate-layout", "Parse and check a layout file");
    std::string layout_path;
    validate->add_option("file", layout_path, "Layout file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            haica::ExperimentConfig config = haica::parse_config_file(config_path);
            if (!layouts.empty()) config.layouts = layouts;
            if (!sp_grid.empty()) {
                config = haica::parse_config(haica::serialize_config(config) +
                                             "sp_grid = " + sp_grid + "\n");
            }
            if (episodes >= 0) config.episodes_per_cell = episodes;
            if (max_steps >= 0) config.max_steps = max_steps;
            if (order_blind) config.conditions.order_blind_agent2 = true;
            if (swapped) config.conditions.swapped_integration = true;
            if (solo) config.conditions.solo = true;
            if (*seed_opt) config.seed = seed;
            if (!out_dir.empty()) config.out_dir = out_dir;
            if (jobs >= 1) config.jobs = jobs;

            const haica::SweepResults results = haica::run_sweep(config);
            haica::emit_results(results, config, config.out_dir);
            std::cout << results.records.size() << " episodes -> " << config.out_dir << "\n";
        } else if (*replay) {
            const haica::ExperimentConfig config = haica::parse_config_file(manifest_path);
            const haica::EpisodeRecord record = haica::replay_episode(config, episode_id);
            std::cout << haica::record_csv_header() << "\n"
                      << haica::record_csv_row(record) << "\n";
        } else if (*validate) {
            const haica::Layout layout = haica::load_layout_file(layout_path);
            std::cout << layout.name << ": " << layout.width << "x" << layout.height << ", "
                      << layout.spawn_points.size() << " spawns, " << layout.pots.size()
                      << " pots, " << layout.boards.size() << " boards: OK\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
