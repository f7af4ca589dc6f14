#include "haica/kitchen.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace haica {

Pos neighbor(Pos p, Dir d) {
    switch (d) {
        case Dir::Up: return {p.x, p.y - 1};
        case Dir::Down: return {p.x, p.y + 1};
        case Dir::Left: return {p.x - 1, p.y};
        case Dir::Right: return {p.x + 1, p.y};
    }
    return p;
}

Dir direction_of(LowAction a) {
    switch (a) {
        case LowAction::Up: return Dir::Up;
        case LowAction::Down: return Dir::Down;
        case LowAction::Left: return Dir::Left;
        case LowAction::Right: return Dir::Right;
        default: throw std::invalid_argument("not a movement action");
    }
}

int soup_points(Recipe r) { return r == Recipe::OnionSoup ? 20 : 15; }
int soup_cook_time(Recipe r) { return r == Recipe::OnionSoup ? 20 : 15; }
ItemClass soup_ingredient(Recipe r) {
    return r == Recipe::OnionSoup ? ItemClass::Onion : ItemClass::Tomato;
}

std::vector<ItemClass> recipe_contents(Recipe r) {
    switch (r) {
        case Recipe::TomatoSalad: return {ItemClass::CutTomato};
        case Recipe::LettuceSalad: return {ItemClass::CutLettuce};
        case Recipe::MixedSalad: return {ItemClass::CutTomato, ItemClass::CutLettuce};
        default: return {};
    }
}

std::vector<Recipe> task_recipes(SaladTask t) {
    switch (t) {
        case SaladTask::Tomato: return {Recipe::TomatoSalad};
        case SaladTask::TomatoLettuce: return {Recipe::TomatoSalad, Recipe::LettuceSalad};
        case SaladTask::Mixed: return {Recipe::MixedSalad};
    }
    return {};
}

std::optional<Recipe> plate_recipe(const std::vector<ItemClass>& contents) {
    auto sorted = contents;
    std::sort(sorted.begin(), sorted.end());
    for (Recipe r : {Recipe::TomatoSalad, Recipe::LettuceSalad, Recipe::MixedSalad}) {
        auto want = recipe_contents(r);
        std::sort(want.begin(), want.end());
        if (sorted == want) return r;
    }
    return std::nullopt;
}

namespace {

/// Whether `add` can join the plate contents as part of some salad recipe.
bool contents_accept(const std::vector<ItemClass>& contents, ItemClass add) {
    if (add != ItemClass::CutTomato && add != ItemClass::CutLettuce) return false;
    auto extended = contents;
    extended.push_back(add);
    for (Recipe r : {Recipe::TomatoSalad, Recipe::LettuceSalad, Recipe::MixedSalad}) {
        auto want = recipe_contents(r);
        bool fits = true;
        for (ItemClass c : extended) {
            auto it = std::find(want.begin(), want.end(), c);
            if (it == want.end()) {
                fits = false;
                break;
            }
            want.erase(it);
        }
        if (fits) return true;
    }
    return false;
}

}  // namespace

bool plate_accepts_cut(const Item& plate, ItemClass cut) {
    if (plate.cls != ItemClass::Plate && plate.cls != ItemClass::Salad) return false;
    return contents_accept(plate.contents, cut);
}

std::string to_string(LowAction a) {
    switch (a) {
        case LowAction::Up: return "up";
        case LowAction::Down: return "down";
        case LowAction::Left: return "left";
        case LowAction::Right: return "right";
        case LowAction::Interact: return "interact";
        case LowAction::Wait: return "wait";
    }
    return "?";
}

std::string to_string(Recipe r) {
    switch (r) {
        case Recipe::OnionSoup: return "onion_soup";
        case Recipe::TomatoSoup: return "tomato_soup";
        case Recipe::TomatoSalad: return "tomato_salad";
        case Recipe::LettuceSalad: return "lettuce_salad";
        case Recipe::MixedSalad: return "mixed_salad";
    }
    return "?";
}

std::string to_string(ItemClass c) {
    switch (c) {
        case ItemClass::Onion: return "onion";
        case ItemClass::Tomato: return "tomato";
        case ItemClass::Lettuce: return "lettuce";
        case ItemClass::Plate: return "plate";
        case ItemClass::Soup: return "soup";
        case ItemClass::CutTomato: return "cut_tomato";
        case ItemClass::CutLettuce: return "cut_lettuce";
        case ItemClass::Salad: return "salad";
    }
    return "?";
}

std::pair<std::vector<int>, int> Layout::floor_components() const {
    std::vector<int> comp(static_cast<size_t>(width) * height, -1);
    int next = 0;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            Pos p{x, y};
            if (!is_floor(p) || comp[static_cast<size_t>(y) * width + x] >= 0) continue;
            std::queue<Pos> q;
            q.push(p);
            comp[static_cast<size_t>(y) * width + x] = next;
            while (!q.empty()) {
                Pos c = q.front();
                q.pop();
                for (Dir d : {Dir::Up, Dir::Down, Dir::Left, Dir::Right}) {
                    Pos n = neighbor(c, d);
                    if (!is_floor(n)) continue;
                    int& id = comp[static_cast<size_t>(n.y) * width + n.x];
                    if (id < 0) {
                        id = next;
                        q.push(n);
                    }
                }
            }
            ++next;
        }
    }
    return {comp, next};
}

namespace {

/// Floor components adjacent to a non-floor tile.
std::vector<int> adjacent_components(const Layout& layout, const std::vector<int>& comp, Pos p) {
    std::vector<int> out;
    for (Dir d : {Dir::Up, Dir::Down, Dir::Left, Dir::Right}) {
        Pos n = neighbor(p, d);
        if (!layout.is_floor(n)) continue;
        int id = comp[static_cast<size_t>(n.y) * layout.width + n.x];
        if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    }
    return out;
}

void validate_named_layout(const Layout& layout) {
    auto [comp, count] = layout.floor_components();
    if (layout.name == "forced") {
        if (count != 2) {
            throw std::invalid_argument("forced layout must have exactly two floor regions, got " +
                                        std::to_string(count));
        }
        std::vector<int> pot_sides;
        for (Pos p : layout.pots) {
            for (int id : adjacent_components(layout, comp, p)) pot_sides.push_back(id);
        }
        if (pot_sides.empty()) throw std::invalid_argument("forced layout: unreachable pots");
        const int pot_side = pot_sides.front();
        for (int id : pot_sides) {
            if (id != pot_side) {
                throw std::invalid_argument("forced layout: pots reachable from both regions");
            }
        }
        for (int y = 0; y < layout.height; ++y) {
            for (int x = 0; x < layout.width; ++x) {
                Pos p{x, y};
                const Tile& t = layout.at(p);
                if (t.kind != TileKind::Dispenser) continue;
                if (t.dispensed == ItemClass::Plate) continue;  // only ingredients constrained
                for (int id : adjacent_components(layout, comp, p)) {
                    if (id == pot_side) {
                        throw std::invalid_argument(
                            "forced layout: ingredient dispenser on the pot side");
                    }
                }
            }
        }
        bool shared_counter = false;
        for (int y = 0; y < layout.height && !shared_counter; ++y) {
            for (int x = 0; x < layout.width; ++x) {
                Pos p{x, y};
                if (layout.at(p).kind != TileKind::Counter) continue;
                if (adjacent_components(layout, comp, p).size() == 2) {
                    shared_counter = true;
                    break;
                }
            }
        }
        if (!shared_counter) {
            throw std::invalid_argument("forced layout: no shared counter between regions");
        }
    } else if (layout.name == "asymmetric") {
        if (count != 2) {
            throw std::invalid_argument("asymmetric layout must have two floor regions, got " +
                                        std::to_string(count));
        }
        std::vector<int> spawn_sides;
        for (const SpawnPoint& s : layout.spawn_points) {
            spawn_sides.push_back(comp[static_cast<size_t>(s.pos.y) * layout.width + s.pos.x]);
        }
        if (spawn_sides.size() != 2 || spawn_sides[0] == spawn_sides[1]) {
            throw std::invalid_argument("asymmetric layout: spawns must be in separate regions");
        }
        int shared_pots = 0;
        for (Pos p : layout.pots) {
            if (adjacent_components(layout, comp, p).size() == 2) ++shared_pots;
        }
        if (shared_pots < 2) {
            throw std::invalid_argument("asymmetric layout: needs two pots shared by both regions");
        }
    }
}

}  // namespace

Layout load_layout(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    if (!std::getline(in, header)) throw std::invalid_argument("empty layout file");

    Layout layout;
    std::istringstream hs(header);
    std::string field;
    while (std::getline(hs, field, ';')) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("bad layout header: " + field);
        std::string key = field.substr(0, eq);
        std::string value = field.substr(eq + 1);
        auto strip = [](std::string& s) {
            s.erase(0, s.find_first_not_of(' '));
            s.erase(s.find_last_not_of(' ') + 1);
        };
        strip(key);
        strip(value);
        if (key == "name") {
            layout.name = value;
        } else if (key == "domain") {
            if (value == "soup") layout.domain = KitchenDomain::Soup;
            else if (value == "salad") layout.domain = KitchenDomain::Salad;
            else throw std::invalid_argument("unknown domain: " + value);
        } else if (key == "task") {
            if (value == "tomato") layout.task = SaladTask::Tomato;
            else if (value == "tomato_lettuce") layout.task = SaladTask::TomatoLettuce;
            else if (value == "mixed") layout.task = SaladTask::Mixed;
            else throw std::invalid_argument("unknown task: " + value);
        } else {
            throw std::invalid_argument("unknown layout header key: " + key);
        }
    }

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && lines.empty()) continue;
        if (!line.empty()) lines.push_back(line);
    }
    if (lines.empty()) throw std::invalid_argument("layout has no grid");
    layout.height = static_cast<int>(lines.size());
    layout.width = static_cast<int>(lines.front().size());
    layout.tiles.resize(static_cast<size_t>(layout.width) * layout.height);

    std::map<char, SpawnPoint> spawns;
    const bool salad = layout.domain == KitchenDomain::Salad;
    for (int y = 0; y < layout.height; ++y) {
        if (static_cast<int>(lines[y].size()) != layout.width) {
            throw std::invalid_argument("ragged layout grid at row " + std::to_string(y));
        }
        for (int x = 0; x < layout.width; ++x) {
            const char c = lines[y][x];
            Pos p{x, y};
            Tile& t = layout.tiles[static_cast<size_t>(y) * layout.width + x];
            auto place = [&](ItemClass cls) {
                // Salad kitchens hold single placed items instead of dispensers.
                if (salad) {
                    t = {TileKind::Counter, {}};
                    layout.initial_items.emplace_back(p, Item::simple(cls));
                } else {
                    t = {TileKind::Dispenser, cls};
                }
            };
            switch (c) {
                case 'X': t = {TileKind::Counter, {}}; break;
                case ' ': t = {TileKind::Floor, {}}; break;
                case 'O': place(ItemClass::Onion); break;
                case 'T': place(ItemClass::Tomato); break;
                case 'L': place(ItemClass::Lettuce); break;
                case 'D': place(ItemClass::Plate); break;
                case 'P':
                    t = {TileKind::Pot, {}};
                    layout.pots.push_back(p);
                    break;
                case 'C':
                    t = {TileKind::CuttingBoard, {}};
                    layout.boards.push_back(p);
                    break;
                case 'S': t = {TileKind::Serve, {}}; break;
                case '1':
                case '2':
                    t = {TileKind::Floor, {}};
                    spawns[c] = SpawnPoint{p, Dir::Down};
                    break;
                default:
                    throw std::invalid_argument(std::string("unknown layout character '") + c +
                                                "'");
            }
        }
    }
    if (spawns.empty()) throw std::invalid_argument("layout has no spawn points");
    if (!spawns.count('1')) {
        throw std::invalid_argument("spawn points must be numbered from 1");
    }
    for (auto& [c, s] : spawns) layout.spawn_points.push_back(s);

    validate_named_layout(layout);
    return layout;
}

Layout load_layout_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open layout file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_layout(ss.str());
}

std::optional<Item>& KitchenState::counter_at(Pos p) {
    return counters[static_cast<size_t>(p.y) * layout->width + p.x];
}

const std::optional<Item>& KitchenState::counter_at(Pos p) const {
    return counters[static_cast<size_t>(p.y) * layout->width + p.x];
}

namespace {

constexpr double kOrderBias = 0.8;  // per-episode weight of the favored soup

Recipe random_order(Rng& rng, double onion_bias) {
    // 1/16 resolution is plenty for the coarse bias values used.
    const bool onion = rng.uniform_index(16) < static_cast<std::uint64_t>(onion_bias * 16.0);
    return onion ? Recipe::OnionSoup : Recipe::TomatoSoup;
}

}  // namespace

KitchenState initial_state(const Layout& layout, int num_agents, Rng& rng) {
    if (num_agents < 1 || num_agents > static_cast<int>(layout.spawn_points.size())) {
        throw std::invalid_argument("layout '" + layout.name + "' does not support " +
                                    std::to_string(num_agents) + " agents");
    }
    KitchenState state;
    state.layout = &layout;
    for (int i = 0; i < num_agents; ++i) {
        state.agents.push_back(AgentPose{layout.spawn_points[i].pos,
                                         layout.spawn_points[i].facing, std::nullopt});
    }
    state.pots.resize(layout.pots.size());
    state.counters.resize(layout.tiles.size());
    for (const auto& [pos, item] : layout.initial_items) {
        state.counters[static_cast<size_t>(pos.y) * layout.width + pos.x] = item;
    }
    if (layout.domain == KitchenDomain::Soup) {
        state.onion_order_bias = rng.coin_flip() ? kOrderBias : 1.0 - kOrderBias;
        state.orders = {random_order(rng, state.onion_order_bias),
                        random_order(rng, state.onion_order_bias)};
    }
    return state;
}

bool pot_accepts(const PotState& pot, ItemClass cls) {
    if (cls != ItemClass::Onion && cls != ItemClass::Tomato) return false;
    if (pot.cook_timer >= 0) return false;  // cooking or ready
    if (pot.contents.size() >= 3) return false;
    return pot.contents.empty() || pot.contents.front() == cls;
}

namespace {

int pot_index(const Layout& layout, Pos p) {
    for (size_t i = 0; i < layout.pots.size(); ++i) {
        if (layout.pots[i] == p) return static_cast<int>(i);
    }
    return -1;
}

void add_to_plate(Item& plate, ItemClass cut) {
    plate.contents.push_back(cut);
    if (auto r = plate_recipe(plate.contents)) {
        plate.cls = ItemClass::Salad;
        plate.recipe = *r;
    }
}

InteractEvent interact(KitchenState& state, int agent_id, Rng& rng, StepResult& result) {
    const Layout& layout = *state.layout;
    AgentPose& agent = state.agents[agent_id];
    const Pos target = neighbor(agent.pos, agent.facing);
    if (!layout.in_bounds(target)) return InteractEvent::None;
    const Tile& tile = layout.at(target);

    switch (tile.kind) {
        case TileKind::Floor: return InteractEvent::None;
        case TileKind::Dispenser:
            if (!agent.held) {
                agent.held = Item::simple(tile.dispensed);
                return InteractEvent::PickedUp;
            }
            return InteractEvent::None;
        case TileKind::Counter: {
            auto& slot = state.counter_at(target);
            if (!agent.held && slot) {
                agent.held = std::move(*slot);
                slot.reset();
                return InteractEvent::PickedUp;
            }
            if (agent.held && !slot) {
                slot = std::move(*agent.held);
                agent.held.reset();
                return InteractEvent::Placed;
            }
            if (agent.held && slot) {
                // Salad assembly: cut ingredients join plates in either direction.
                const bool held_plate =
                    agent.held->cls == ItemClass::Plate || agent.held->cls == ItemClass::Salad;
                const bool slot_plate =
                    slot->cls == ItemClass::Plate || slot->cls == ItemClass::Salad;
                if (slot_plate && contents_accept(slot->contents, agent.held->cls)) {
                    add_to_plate(*slot, agent.held->cls);
                    agent.held.reset();
                    return InteractEvent::Combined;
                }
                if (held_plate && contents_accept(agent.held->contents, slot->cls)) {
                    add_to_plate(*agent.held, slot->cls);
                    slot.reset();
                    return InteractEvent::Combined;
                }
                std::swap(*agent.held, *slot);
                return InteractEvent::Swapped;
            }
            return InteractEvent::None;
        }
        case TileKind::Pot: {
            PotState& pot = state.pots[pot_index(layout, target)];
            if (agent.held && pot_accepts(pot, agent.held->cls)) {
                pot.contents.push_back(agent.held->cls);
                agent.held.reset();
                if (pot.contents.size() == 3) {
                    const Recipe r = pot.contents.front() == ItemClass::Onion
                                         ? Recipe::OnionSoup
                                         : Recipe::TomatoSoup;
                    pot.cook_timer = soup_cook_time(r);
                }
                return InteractEvent::PotFilled;
            }
            if (agent.held && agent.held->cls == ItemClass::Plate && agent.held->contents.empty() &&
                pot.ready()) {
                const Recipe r = pot.contents.front() == ItemClass::Onion ? Recipe::OnionSoup
                                                                          : Recipe::TomatoSoup;
                agent.held = Item::soup(r);
                pot = PotState{};
                return InteractEvent::SoupTaken;
            }
            return InteractEvent::None;
        }
        case TileKind::CuttingBoard:
            if (agent.held && agent.held->cls == ItemClass::Tomato) {
                agent.held = Item::simple(ItemClass::CutTomato);
                return InteractEvent::Cut;
            }
            if (agent.held && agent.held->cls == ItemClass::Lettuce) {
                agent.held = Item::simple(ItemClass::CutLettuce);
                return InteractEvent::Cut;
            }
            return InteractEvent::None;
        case TileKind::Serve: {
            if (!agent.held) return InteractEvent::None;
            if (layout.domain == KitchenDomain::Soup && agent.held->cls == ItemClass::Soup) {
                const Recipe r = agent.held->recipe;
                agent.held.reset();
                auto it = std::find(state.orders.begin(), state.orders.end(), r);
                if (it != state.orders.end()) {
                    *it = random_order(rng, state.onion_order_bias);
                    const double points = soup_points(r);
                    state.score += points;
                    result.rewards[agent_id] += points;
                }
                return InteractEvent::Delivered;
            }
            if (layout.domain == KitchenDomain::Salad && agent.held->cls == ItemClass::Salad) {
                const Recipe r = agent.held->recipe;
                agent.held.reset();
                state.delivered.push_back(r);
                return InteractEvent::Delivered;
            }
            return InteractEvent::None;
        }
    }
    return InteractEvent::None;
}

}  // namespace

StepResult step(KitchenState& state, const std::vector<LowAction>& joint_action, Rng& rng) {
    const Layout& layout = *state.layout;
    const size_t n = state.agents.size();
    if (joint_action.size() != n) throw std::invalid_argument("joint action size mismatch");

    StepResult result;
    result.rewards.assign(n, 0.0);
    result.events.assign(n, InteractEvent::None);

    // Movement first, in agent-index priority order. An agent may only move
    // onto a floor tile not occupied by any other agent's settled position,
    // which blocks both same-target conflicts and swaps.
    for (size_t i = 0; i < n; ++i) {
        const LowAction a = joint_action[i];
        if (a == LowAction::Interact || a == LowAction::Wait) continue;
        const Dir d = direction_of(a);
        AgentPose& agent = state.agents[i];
        agent.facing = d;
        const Pos target = neighbor(agent.pos, d);
        if (!layout.is_floor(target)) continue;
        bool occupied = false;
        for (size_t j = 0; j < n; ++j) {
            if (j != i && state.agents[j].pos == target) occupied = true;
        }
        if (!occupied) agent.pos = target;
    }

    for (size_t i = 0; i < n; ++i) {
        if (joint_action[i] == LowAction::Interact) {
            result.events[i] = interact(state, static_cast<int>(i), rng, result);
        }
    }

    for (PotState& pot : state.pots) {
        if (pot.cooking()) --pot.cook_timer;
    }

    if (layout.domain == KitchenDomain::Salad && layout.task) {
        auto remaining = task_recipes(*layout.task);
        for (Recipe r : state.delivered) {
            auto it = std::find(remaining.begin(), remaining.end(), r);
            if (it != remaining.end()) remaining.erase(it);
        }
        if (remaining.empty() && state.score == 0.0) {
            result.success = true;
            state.score = 1.0;
            // Completion bonus credited to whoever delivered last.
            for (size_t i = 0; i < n; ++i) {
                if (result.events[i] == InteractEvent::Delivered) result.rewards[i] += 1.0;
            }
        } else if (remaining.empty()) {
            result.success = true;
        }
    }

    ++state.step_count;
    return result;
}

Observation observe(const KitchenState& state, int agent_id, bool order_blind) {
    if (agent_id < 0 || agent_id >= static_cast<int>(state.agents.size())) {
        throw std::invalid_argument("invalid agent id");
    }
    return Observation{&state, agent_id, order_blind};
}

}  // namespace haica
