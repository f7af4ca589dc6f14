#include "haica/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace haica {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string task_name(SaladTask t) {
    switch (t) {
        case SaladTask::Tomato: return "tomato";
        case SaladTask::TomatoLettuce: return "tomato_lettuce";
        case SaladTask::Mixed: return "mixed";
    }
    return "tomato";
}

SaladTask parse_task(const std::string& s) {
    if (s == "tomato") return SaladTask::Tomato;
    if (s == "tomato_lettuce") return SaladTask::TomatoLettuce;
    if (s == "mixed") return SaladTask::Mixed;
    throw std::invalid_argument("unknown task: " + s);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) out.push_back(part);
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw std::invalid_argument("expected boolean, got: " + s);
}

std::vector<double> parse_sp_list(const std::string& s) {
    std::vector<double> out;
    // a:b:step ranges or comma-separated values
    if (s.find(':') != std::string::npos) {
        const auto parts = split(s, ':');
        if (parts.size() != 3) throw std::invalid_argument("sp range must be lo:hi:step");
        const double lo = std::stod(parts[0]);
        const double hi = std::stod(parts[1]);
        const double step = std::stod(parts[2]);
        if (step <= 0) throw std::invalid_argument("sp range step must be positive");
        for (int k = 0;; ++k) {
            const double v = lo + k * step;
            if (v > hi + 1e-9) break;
            out.push_back(v);
        }
    } else {
        for (const auto& part : split(s, ',')) out.push_back(std::stod(trim(part)));
    }
    for (double v : out) {
        if (v < 0.0 || v > 1.0) throw std::invalid_argument("sp values must lie in [0, 1]");
    }
    return out;
}

}  // namespace

std::string condition_name(const ConditionFlags& flags) {
    if (flags.solo) return "solo";
    std::string name;
    if (flags.order_blind_agent2) name = "order_blind";
    if (flags.swapped_integration) name += name.empty() ? "swapped" : "+swapped";
    return name.empty() ? "standard" : name;
}

int ExperimentConfig::resolved_max_steps() const {
    if (max_steps > 0) return max_steps;
    return domain == KitchenDomain::Soup ? 400 : 100;
}

std::vector<double> ExperimentConfig::resolved_sp_grid() const {
    if (!sp_grid.empty()) return sp_grid;
    std::vector<double> grid;
    for (int k = 0; k <= 10; ++k) grid.push_back(k / 10.0);
    return grid;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig config;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("expected key = value: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "version") continue;  // manifests carry it; informational
        if (key == "domain") {
            if (value == "soup") config.domain = KitchenDomain::Soup;
            else if (value == "salad") config.domain = KitchenDomain::Salad;
            else throw std::invalid_argument("unknown domain: " + value);
        } else if (key == "layouts") {
            config.layouts.clear();
            for (const auto& p : split(value, ',')) config.layouts.push_back(trim(p));
        } else if (key == "task") {
            config.task = parse_task(value);
        } else if (key == "sp_grid") {
            config.sp_grid = parse_sp_list(value);
        } else if (key == "episodes_per_cell") {
            config.episodes_per_cell = std::stoi(value);
            if (config.episodes_per_cell < 1) throw std::invalid_argument("episodes must be >= 1");
        } else if (key == "max_steps") {
            config.max_steps = std::stoi(value);
        } else if (key == "seed") {
            config.seed = std::stoull(value);
        } else if (key == "order_blind_agent2") {
            config.conditions.order_blind_agent2 = parse_bool(value);
        } else if (key == "swapped_integration") {
            config.conditions.swapped_integration = parse_bool(value);
        } else if (key == "solo") {
            config.conditions.solo = parse_bool(value);
        } else if (key == "alpha") {
            config.tom.alpha = std::stod(value);
        } else if (key == "beta") {
            config.tom.beta = std::stod(value);
        } else if (key == "mu") {
            config.tom.mu = std::stod(value);
        } else if (key == "k_p") {
            config.k_p = std::stod(value);
        } else if (key == "k_e") {
            config.k_e = std::stod(value);
        } else if (key == "punish_factor") {
            config.punish_factor = std::stod(value);
        } else if (key == "punish_floor") {
            config.punish_floor = std::stod(value);
        } else if (key == "punish_decay") {
            config.punish_decay = std::stod(value);
        } else if (key == "out") {
            config.out_dir = value;
        } else if (key == "jobs") {
            config.jobs = std::stoi(value);
        } else {
            throw std::invalid_argument("unknown config key: " + key);
        }
    }
    return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& config) {
    std::stringstream out;
    out << "domain = " << (config.domain == KitchenDomain::Soup ? "soup" : "salad") << "\n";
    out << "layouts = ";
    for (size_t i = 0; i < config.layouts.size(); ++i) {
        if (i) out << ",";
        out << config.layouts[i];
    }
    out << "\n";
    if (config.task) out << "task = " << task_name(*config.task) << "\n";
    out << "sp_grid = ";
    const auto grid = config.resolved_sp_grid();
    for (size_t i = 0; i < grid.size(); ++i) {
        if (i) out << ",";
        out << fmt(grid[i]);
    }
    out << "\n";
    out << "episodes_per_cell = " << config.episodes_per_cell << "\n";
    out << "max_steps = " << config.resolved_max_steps() << "\n";
    out << "seed = " << config.seed << "\n";
    out << "order_blind_agent2 = " << (config.conditions.order_blind_agent2 ? "true" : "false")
        << "\n";
    out << "swapped_integration = " << (config.conditions.swapped_integration ? "true" : "false")
        << "\n";
    out << "solo = " << (config.conditions.solo ? "true" : "false") << "\n";
    out << "alpha = " << fmt(config.tom.alpha) << "\n";
    out << "beta = " << fmt(config.tom.beta) << "\n";
    out << "mu = " << fmt(config.tom.mu) << "\n";
    out << "k_p = " << fmt(config.k_p) << "\n";
    out << "k_e = " << fmt(config.k_e) << "\n";
    out << "punish_factor = " << fmt(config.punish_factor) << "\n";
    out << "punish_floor = " << fmt(config.punish_floor) << "\n";
    out << "punish_decay = " << fmt(config.punish_decay) << "\n";
    out << "out = " << config.out_dir << "\n";
    out << "jobs = " << config.jobs << "\n";
    return out.str();
}

std::uint64_t episode_seed(std::uint64_t base, const std::string& layout_name, double sp_i,
                           double sp_j, const std::string& condition, int episode_index) {
    std::uint64_t h = base;
    h = hash_combine(h, layout_name);
    h = hash_combine(h, fmt(sp_i));
    h = hash_combine(h, fmt(sp_j));
    h = hash_combine(h, condition);
    h = hash_combine(h, std::to_string(episode_index));
    return h;
}

EpisodeRecord run_episode(const Layout& layout, const ExperimentConfig& config, double sp_i,
                          double sp_j, int episode_index) {
    const std::string condition = condition_name(config.conditions);
    EpisodeRecord record;
    record.layout = layout.name;
    record.sp_i = sp_i;
    record.sp_j = sp_j;
    record.condition = condition;
    record.seed = episode_seed(config.seed, layout.name, sp_i, sp_j, condition, episode_index);

    Rng rng(record.seed);
    const int num_agents = config.conditions.solo ? 1 : 2;
    // Assign the SP pair in random order so starting position does not bias
    // which agent carries which susceptibility. With an order-blind second
    // agent the two are no longer interchangeable — sp_j must stay on the
    // blind agent or the grid axes lose their meaning — so the shuffle only
    // applies when both agents are informed. The coin is drawn either way to
    // keep the downstream random stream identical across conditions.
    double sp0 = sp_i, sp1 = sp_j;
    if (num_agents == 2) {
        const bool flip = rng.coin_flip();
        if (flip && !config.conditions.order_blind_agent2) std::swap(sp0, sp1);
    }

    KitchenState state = initial_state(layout, num_agents, rng);
    const DomainSpec spec = DomainSpec::make(layout);

    std::vector<AgentState> agents;
    for (int a = 0; a < num_agents; ++a) {
        AgentConfig ac;
        ac.k_p = config.k_p;
        ac.k_e = config.k_e;
        ac.resonance.sp = a == 0 ? sp0 : sp1;
        ac.tom = config.tom;
        ac.punish_factor = config.punish_factor;
        ac.punish_floor = config.punish_floor;
        ac.punish_decay = config.punish_decay;
        ac.swapped_integration = config.conditions.swapped_integration;
        ac.mentalizing = num_agents > 1;
        agents.push_back(make_agent(spec, ac));
    }

    const int max_steps = config.resolved_max_steps();
    std::vector<LowAction> prev_actions;
    StepResult prev_result;
    prev_result.rewards.assign(num_agents, 0.0);
    prev_result.events.assign(num_agents, InteractEvent::None);

    std::chrono::steady_clock::duration decision_time{0};
    int decisions = 0;

    for (int t = 0; t < max_steps; ++t) {
        std::vector<LowAction> actions(num_agents);
        const double team_reward = [&] {
            double sum = 0.0;
            for (double r : prev_result.rewards) sum += r;
            return sum;
        }();
        for (int a = 0; a < num_agents; ++a) {
            const bool blind = config.conditions.order_blind_agent2 && a == 1;
            const Observation obs = observe(state, a, blind);
            StepFeedback feedback;
            if (!prev_actions.empty() && num_agents > 1) {
                feedback.partner_action = prev_actions[a ^ 1];
            }
            feedback.own_event = prev_result.events[a];
            feedback.team_reward = team_reward;
            const auto t0 = std::chrono::steady_clock::now();
            actions[a] = agent_step(agents[a], obs, feedback);
            decision_time += std::chrono::steady_clock::now() - t0;
            ++decisions;
        }
        prev_result = step(state, actions, rng);
        prev_actions = actions;
        record.steps_used = t + 1;
        for (size_t a = 0; a < prev_result.events.size(); ++a) {
            // Soup deliveries only count when an order paid out.
            if (prev_result.events[a] == InteractEvent::Delivered &&
                (layout.domain == KitchenDomain::Salad || prev_result.rewards[a] > 0.0)) {
                ++record.orders_completed;
            }
        }
        if (prev_result.success) {
            record.success = true;
            break;
        }
    }
    record.total_reward = state.score;
    if (decisions > 0) {
        record.mean_decision_time =
            std::chrono::duration<double>(decision_time).count() / decisions;
    }
    return record;
}

namespace {

struct EpisodeSlot {
    const Layout* layout;
    double sp_i;
    double sp_j;
    int episode;
};

std::vector<Layout> load_layouts(const ExperimentConfig& config) {
    if (config.layouts.empty()) throw std::invalid_argument("no layouts configured");
    std::vector<Layout> layouts;
    for (const auto& path : config.layouts) {
        Layout layout = load_layout_file(path);
        if (layout.domain != config.domain) {
            throw std::invalid_argument("layout domain mismatch: " + path);
        }
        if (config.task && layout.domain == KitchenDomain::Salad) layout.task = config.task;
        layouts.push_back(std::move(layout));
    }
    return layouts;
}

}  // namespace

SweepResults run_sweep(const ExperimentConfig& config) {
    const std::vector<Layout> layouts = load_layouts(config);
    const std::vector<double> grid = config.resolved_sp_grid();

    std::vector<EpisodeSlot> slots;
    for (const Layout& layout : layouts) {
        for (double si : grid) {
            for (double sj : grid) {
                for (int ep = 0; ep < config.episodes_per_cell; ++ep) {
                    slots.push_back({&layout, si, sj, ep});
                }
            }
        }
    }

    SweepResults results;
    results.records.resize(slots.size());
    const int jobs = std::max(1, config.jobs);
    if (jobs == 1) {
        for (size_t i = 0; i < slots.size(); ++i) {
            const EpisodeSlot& s = slots[i];
            results.records[i] = run_episode(*s.layout, config, s.sp_i, s.sp_j, s.episode);
        }
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> workers;
        for (int w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < slots.size(); i = next.fetch_add(1)) {
                    const EpisodeSlot& s = slots[i];
                    results.records[i] =
                        run_episode(*s.layout, config, s.sp_i, s.sp_j, s.episode);
                }
            });
        }
        for (auto& w : workers) w.join();
    }
    return results;
}

EpisodeRecord replay_episode(const ExperimentConfig& config, int episode_id) {
    const std::vector<Layout> layouts = load_layouts(config);
    const std::vector<double> grid = config.resolved_sp_grid();
    const int per_cell = config.episodes_per_cell;
    const long total = static_cast<long>(layouts.size()) * grid.size() * grid.size() * per_cell;
    if (episode_id < 0 || episode_id >= total) {
        throw std::out_of_range("episode id out of range: " + std::to_string(episode_id));
    }
    long rest = episode_id;
    const long per_layout = static_cast<long>(grid.size()) * grid.size() * per_cell;
    const Layout& layout = layouts[rest / per_layout];
    rest %= per_layout;
    const double sp_i = grid[rest / (grid.size() * per_cell)];
    rest %= grid.size() * per_cell;
    const double sp_j = grid[rest / per_cell];
    const int ep = static_cast<int>(rest % per_cell);
    return run_episode(layout, config, sp_i, sp_j, ep);
}

std::vector<std::vector<double>> heatmap(const SweepResults& results,
                                         const ExperimentConfig& config) {
    const std::vector<double> grid = config.resolved_sp_grid();
    const size_t n = grid.size();
    const auto index_of = [&](double v) {
        for (size_t k = 0; k < n; ++k) {
            if (std::abs(grid[k] - v) < 1e-12) return k;
        }
        throw std::logic_error("sp value not on grid");
    };

    // Stage one: per (layout, cell) episode means.
    struct Cell {
        double sum = 0.0;
        int count = 0;
    };
    std::vector<std::string> layout_names;
    std::vector<std::vector<std::vector<Cell>>> per_layout;  // [layout][i][j]
    for (const EpisodeRecord& r : results.records) {
        size_t li = 0;
        for (; li < layout_names.size(); ++li) {
            if (layout_names[li] == r.layout) break;
        }
        if (li == layout_names.size()) {
            layout_names.push_back(r.layout);
            per_layout.emplace_back(n, std::vector<Cell>(n));
        }
        Cell& cell = per_layout[li][index_of(r.sp_i)][index_of(r.sp_j)];
        cell.sum += r.total_reward;
        cell.count += 1;
    }

    // Stage two: plain mean of the per-layout means.
    std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            double sum = 0.0;
            int layouts_hit = 0;
            for (const auto& cells : per_layout) {
                if (cells[i][j].count > 0) {
                    sum += cells[i][j].sum / cells[i][j].count;
                    ++layouts_hit;
                }
            }
            out[i][j] = layouts_hit > 0 ? sum / layouts_hit : 0.0;
        }
    }
    return out;
}

std::string record_csv_header() {
    return "layout,sp_i,sp_j,condition,seed,total_reward,success,steps_used,orders_completed";
}

std::string record_csv_row(const EpisodeRecord& r) {
    std::stringstream out;
    out << r.layout << "," << fmt(r.sp_i) << "," << fmt(r.sp_j) << "," << r.condition << ","
        << r.seed << "," << fmt(r.total_reward) << "," << (r.success ? 1 : 0) << ","
        << r.steps_used << "," << r.orders_completed;
    return out.str();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path.string());
    out << content;
}

std::string heatmap_tsv(const std::vector<std::vector<double>>& matrix,
                        const std::vector<double>& grid) {
    std::stringstream out;
    out << "sp";
    for (double v : grid) out << "\t" << fmt(v);
    out << "\n";
    for (size_t i = 0; i < matrix.size(); ++i) {
        out << fmt(grid[i]);
        for (double v : matrix[i]) out << "\t" << fmt(v);
        out << "\n";
    }
    return out.str();
}

}  // namespace

void emit_results(const SweepResults& results, const ExperimentConfig& config,
                  const std::string& out_dir) {
    namespace fs = std::filesystem;
    const fs::path dir(out_dir);
    fs::create_directories(dir);

    // Decision times are wall clock and vary run to run; they live in a
    // separate file so records.csv stays a pure function of (config, seed).
    std::stringstream records, timings;
    records << record_csv_header() << "\n";
    timings << "episode,mean_decision_time\n";
    for (size_t i = 0; i < results.records.size(); ++i) {
        records << record_csv_row(results.records[i]) << "\n";
        timings << i << "," << fmt(results.records[i].mean_decision_time) << "\n";
    }
    write_file(dir / "records.csv", records.str());
    write_file(dir / "timings.csv", timings.str());

    const std::string condition = condition_name(config.conditions);
    const std::vector<double> grid = config.resolved_sp_grid();
    write_file(dir / ("heatmap_" + condition + ".tsv"),
               heatmap_tsv(heatmap(results, config), grid));

    // Per-layout heatmaps for analyses the aggregate mean washes out.
    std::vector<std::string> layout_names;
    for (const auto& r : results.records) {
        if (std::find(layout_names.begin(), layout_names.end(), r.layout) == layout_names.end()) {
            layout_names.push_back(r.layout);
        }
    }
    if (layout_names.size() > 1) {
        for (const auto& name : layout_names) {
            SweepResults subset;
            for (const auto& r : results.records) {
                if (r.layout == name) subset.records.push_back(r);
            }
            write_file(dir / ("heatmap_" + condition + "_" + name + ".tsv"),
                       heatmap_tsv(heatmap(subset, config), grid));
        }
    }

    std::stringstream manifest;
    manifest << "version = " << kVersion << "\n" << serialize_config(config);
    write_file(dir / "manifest", manifest.str());
}

}  // namespace haica
