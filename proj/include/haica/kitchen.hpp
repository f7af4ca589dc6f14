#pragma once

#include "haica/rng.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace haica {

enum class TileKind { Floor, Counter, Dispenser, Pot, CuttingBoard, Serve };

enum class ItemClass {
    Onion,
    Tomato,
    Lettuce,
    Plate,
    Soup,
    CutTomato,
    CutLettuce,
    Salad,  // plate whose contents complete a recipe
};

enum class Recipe { OnionSoup, TomatoSoup, TomatoSalad, LettuceSalad, MixedSalad };

enum class KitchenDomain { Soup, Salad };

enum class SaladTask { Tomato, TomatoLettuce, Mixed };

struct Item {
    ItemClass cls;
    Recipe recipe{};                  // meaningful for Soup and Salad
    std::vector<ItemClass> contents;  // cut ingredients on a plate/salad

    static Item simple(ItemClass c) { return Item{c, {}, {}}; }
    static Item soup(Recipe r) { return Item{ItemClass::Soup, r, {}}; }
};

enum class LowAction { Up, Down, Left, Right, Interact, Wait };
inline constexpr int kNumLowActions = 6;

struct Pos {
    int x = 0;
    int y = 0;
    bool operator==(const Pos&) const = default;
};

enum class Dir { Up, Down, Left, Right };

Pos neighbor(Pos p, Dir d);
Dir direction_of(LowAction a);  // movement actions only

struct SpawnPoint {
    Pos pos;
    Dir facing = Dir::Down;
};

struct Tile {
    TileKind kind = TileKind::Counter;
    ItemClass dispensed = ItemClass::Onion;  // for Dispenser tiles
};

/// Static kitchen geometry parsed from a layout file.
struct Layout {
    std::string name;
    KitchenDomain domain = KitchenDomain::Soup;
    std::optional<SaladTask> task;
    int width = 0;
    int height = 0;
    std::vector<Tile> tiles;  // row-major
    std::vector<SpawnPoint> spawn_points;
    std::vector<Pos> pots;
    std::vector<Pos> boards;
    std::vector<std::pair<Pos, Item>> initial_items;  // salad domain: placed single items

    const Tile& at(Pos p) const { return tiles[static_cast<size_t>(p.y) * width + p.x]; }
    bool in_bounds(Pos p) const { return p.x >= 0 && p.x < width && p.y >= 0 && p.y < height; }
    bool is_floor(Pos p) const { return in_bounds(p) && at(p).kind == TileKind::Floor; }

    /// Connected components of the floor graph (4-neighborhood).
    /// Returns a per-tile component id (-1 for non-floor) and the count.
    std::pair<std::vector<int>, int> floor_components() const;
};

/// Parse and validate a layout file (header line + ASCII grid).
/// Named layouts "forced" and "asymmetric" get their structural
/// invariants checked on top of the generic ones.
Layout load_layout(const std::string& text);
Layout load_layout_file(const std::string& path);

struct PotState {
    std::vector<ItemClass> contents;
    int cook_timer = -1;  // -1 idle, >0 cooking, 0 ready
    bool cooking() const { return cook_timer > 0; }
    bool ready() const { return cook_timer == 0; }
};

/// A pot takes raw onions/tomatoes of one kind, up to three, while idle.
bool pot_accepts(const PotState& pot, ItemClass cls);

struct AgentPose {
    Pos pos;
    Dir facing = Dir::Down;
    std::optional<Item> held;
};

/// What an agent's Interact accomplished this step; drives intention
/// completion detection in the agent model.
enum class InteractEvent {
    None,
    PickedUp,
    Placed,
    Swapped,
    PotFilled,
    SoupTaken,
    Cut,
    Combined,
    Delivered,
};

struct StepResult {
    std::vector<double> rewards;  // per agent
    std::vector<InteractEvent> events;
    bool success = false;  // salad domain: whole task delivered
};

/// Full world snapshot.
struct KitchenState {
    const Layout* layout = nullptr;
    std::vector<AgentPose> agents;
    std::vector<PotState> pots;
    std::vector<std::optional<Item>> counters;  // row-major, non-floor tiles only used
    std::vector<Recipe> orders;                 // soup domain: always two
    std::vector<Recipe> delivered;              // salad domain bookkeeping
    double score = 0.0;
    int step_count = 0;
    // Soup orders are drawn from a per-episode recipe preference rather than
    // a memoryless 50/50 coin: each kitchen leans towards one soup for the
    // whole episode, so the order stream carries learnable structure and
    // watching the order board (or a partner who watches it) pays off.
    double onion_order_bias = 0.5;

    std::optional<Item>& counter_at(Pos p);
    const std::optional<Item>& counter_at(Pos p) const;
};

/// Initial state for a layout; soup orders drawn from rng. `num_agents`
/// may be 1 for solo runs.
KitchenState initial_state(const Layout& layout, int num_agents, Rng& rng);

/// Advance the world one tick. Movement conflicts resolve by agent-index
/// priority; invalid interactions are no-ops. Handles both domains.
StepResult step(KitchenState& state, const std::vector<LowAction>& joint_action, Rng& rng);

/// Read-only view handed to agents. Order-blind observers see a uniform
/// marker instead of the true order list.
struct Observation {
    const KitchenState* state = nullptr;
    int agent_id = 0;
    bool order_blind = false;

    const Layout& layout() const { return *state->layout; }
    const AgentPose& self() const { return state->agents[agent_id]; }
    bool has_partner() const { return state->agents.size() > 1; }
    const AgentPose& partner() const { return state->agents[agent_id ^ 1]; }
};

Observation observe(const KitchenState& state, int agent_id, bool order_blind = false);

int soup_points(Recipe r);     // Onion 20, Tomato 15
int soup_cook_time(Recipe r);  // Onion 20, Tomato 15
ItemClass soup_ingredient(Recipe r);
std::optional<Recipe> plate_recipe(const std::vector<ItemClass>& contents);
/// Whether the cut ingredient can join the plate as part of some salad recipe.
bool plate_accepts_cut(const Item& plate, ItemClass cut);
std::vector<ItemClass> recipe_contents(Recipe r);
std::vector<Recipe> task_recipes(SaladTask t);

std::string to_string(LowAction a);
std::string to_string(Recipe r);
std::string to_string(ItemClass c);

}  // namespace haica
