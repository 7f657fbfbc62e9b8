#include "world/generator.hpp"

#include "world/navigation.hpp"
#include "world/subgoal.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <random>
#include <set>

namespace taskgrid::world {

namespace {

using C = Category;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    int below(int n) { return n <= 1 ? 0 : static_cast<int>(engine_() % static_cast<std::uint64_t>(n)); }
    int between(int lo, int hi) { return lo + below(hi - lo + 1); }
    bool chance(double p) { return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p; }
    template <class T>
    const T& pick(const std::vector<T>& v) { return v[static_cast<std::size_t>(below(static_cast<int>(v.size())))]; }

private:
    std::mt19937_64 engine_;
};

struct FurnitureCount {
    Category category;
    int lo;
    int hi;
};

struct ObjectPlan {
    std::optional<Category> anchor;
    std::vector<Category> hard_hosts;
    std::vector<Category> easy_hosts;
};

struct TaskTemplate {
    TaskType type;
    std::vector<Category> objects;
    std::vector<Category> destinations;
    std::vector<Category> movers;   // Stack & Place only
    std::vector<Category> lamps;    // Examine only
};

struct RoomSpec {
    std::vector<FurnitureCount> furniture;
    std::map<Category, ObjectPlan> plans;
    std::vector<TaskTemplate> tasks;
};

bool island_ok(Category c) {
    return c == C::DiningTable || c == C::Bed || c == C::Sofa || c == C::ArmChair || c == C::FloorLamp;
}

const RoomSpec& room_spec(RoomType room) {
    static const std::map<RoomType, RoomSpec> specs = [] {
        std::map<RoomType, RoomSpec> m;
        auto& k = m[RoomType::Kitchen];
        k.furniture = {{C::Fridge, 1, 1}, {C::Cabinet, 2, 4}, {C::Drawer, 2, 3}, {C::Microwave, 1, 1},
                       {C::CounterTop, 2, 4}, {C::DiningTable, 1, 1}, {C::SinkBasin, 1, 1},
                       {C::StoveBurner, 1, 2}, {C::CoffeeMachine, 1, 1}, {C::GarbageCan, 1, 1},
                       {C::Shelf, 0, 1}};
        for (C x : {C::Mug}) k.plans[x] = {C::CoffeeMachine, {C::Cabinet}, {C::CounterTop, C::DiningTable}};
        for (C x : {C::Bowl, C::Plate}) k.plans[x] = {C::DiningTable, {C::Cabinet}, {C::CounterTop, C::DiningTable}};
        for (C x : {C::Pan, C::Pot}) k.plans[x] = {C::StoveBurner, {C::Cabinet}, {C::CounterTop, C::StoveBurner}};
        for (C x : {C::Knife, C::Spoon, C::Spatula}) k.plans[x] = {C::SinkBasin, {C::Drawer}, {C::CounterTop, C::DiningTable}};
        for (C x : {C::Apple, C::Tomato, C::Potato, C::Lettuce, C::Bread}) k.plans[x] = {std::nullopt, {C::Fridge}, {C::CounterTop, C::DiningTable}};
        k.tasks = {
            {TaskType::PickPlace, {C::Mug, C::Bowl, C::Plate, C::Pan, C::Pot, C::Apple, C::Tomato, C::Potato,
                                   C::Lettuce, C::Bread, C::Knife, C::Spoon, C::Spatula},
             {C::CounterTop, C::DiningTable, C::Shelf}, {}, {}},
            {TaskType::StackPlace, {C::Knife, C::Spoon, C::Spatula}, {C::CounterTop, C::DiningTable},
             {C::Bowl, C::Pot, C::Pan, C::Mug}, {}},
            {TaskType::CleanPlace, {C::Mug, C::Bowl, C::Plate, C::Pan, C::Pot, C::Knife, C::Spoon, C::Spatula},
             {C::CounterTop, C::DiningTable, C::Shelf}, {}, {}},
            {TaskType::CoolPlace, {C::Apple, C::Tomato, C::Potato, C::Lettuce, C::Bread, C::Mug, C::Pan, C::Pot},
             {C::CounterTop, C::DiningTable}, {}, {}},
            {TaskType::HeatPlace, {C::Apple, C::Tomato, C::Potato, C::Bread, C::Mug, C::Plate},
             {C::CounterTop, C::DiningTable}, {}, {}},
            {TaskType::PickTwoPlace, {C::Apple, C::Tomato, C::Potato, C::Mug, C::Plate, C::Bowl, C::Spoon, C::Knife},
             {C::CounterTop, C::DiningTable}, {}, {}},
        };

        auto& b = m[RoomType::Bathroom];
        b.furniture = {{C::Cabinet, 2, 3}, {C::Drawer, 1, 2}, {C::CounterTop, 1, 2}, {C::SinkBasin, 1, 1},
                       {C::Toilet, 1, 1}, {C::Bathtub, 1, 1}, {C::GarbageCan, 1, 1}, {C::Shelf, 1, 2}};
        for (C x : {C::SoapBar, C::ToiletPaper}) b.plans[x] = {C::Toilet, {C::Cabinet}, {C::CounterTop, C::Shelf}};
        for (C x : {C::Cloth, C::Towel, C::SprayBottle}) b.plans[x] = {C::Bathtub, {C::Drawer}, {C::CounterTop, C::Shelf}};
        b.tasks = {
            {TaskType::PickPlace, {C::SoapBar, C::ToiletPaper, C::Cloth, C::Towel, C::SprayBottle},
             {C::CounterTop, C::Shelf, C::GarbageCan}, {}, {}},
            {TaskType::CleanPlace, {C::Cloth, C::SoapBar}, {C::CounterTop, C::Shelf}, {}, {}},
            {TaskType::PickTwoPlace, {C::SoapBar, C::ToiletPaper, C::SprayBottle, C::Cloth},
             {C::CounterTop, C::Shelf}, {}, {}},
        };

        auto& r = m[RoomType::Bedroom];
        r.furniture = {{C::Drawer, 2, 4}, {C::Safe, 1, 1}, {C::Desk, 1, 1}, {C::Bed, 1, 1},
                       {C::SideTable, 1, 2}, {C::Dresser, 1, 1}, {C::Shelf, 1, 1}, {C::GarbageCan, 1, 1},
                       {C::FloorLamp, 0, 1}};
        for (C x : {C::Book, C::Pencil, C::Mug}) r.plans[x] = {C::Desk, {C::Drawer}, {C::Desk, C::Shelf, C::Dresser}};
        for (C x : {C::KeyChain, C::CreditCard, C::CellPhone}) r.plans[x] = {C::Bed, {C::Drawer}, {C::Bed, C::SideTable, C::Dresser}};
        r.tasks = {
            {TaskType::Examine, {C::Book, C::CellPhone, C::KeyChain, C::CreditCard, C::Pencil, C::Mug}, {}, {},
             {C::DeskLamp, C::FloorLamp}},
            {TaskType::PickPlace, {C::Book, C::CellPhone, C::KeyChain, C::CreditCard, C::Pencil},
             {C::Bed, C::Desk, C::SideTable, C::Dresser, C::Shelf}, {}, {}},
            {TaskType::StackPlace, {C::Pencil, C::KeyChain, C::CreditCard}, {C::Desk, C::SideTable, C::Shelf, C::Dresser},
             {C::Mug}, {}},
            {TaskType::PickTwoPlace, {C::Book, C::CellPhone, C::KeyChain, C::CreditCard, C::Pencil},
             {C::Bed, C::Desk, C::Dresser}, {}, {}},
        };

        auto& l = m[RoomType::LivingRoom];
        l.furniture = {{C::Cabinet, 1, 2}, {C::Drawer, 2, 3}, {C::Safe, 0, 1}, {C::Sofa, 1, 1},
                       {C::ArmChair, 1, 1}, {C::TVStand, 1, 1}, {C::SideTable, 1, 2}, {C::DiningTable, 1, 1},
                       {C::Shelf, 1, 1}, {C::FloorLamp, 1, 1}, {C::GarbageCan, 1, 1}};
        l.plans[C::RemoteControl] = {C::TVStand, {C::Drawer}, {C::Sofa, C::ArmChair, C::TVStand}};
        for (C x : {C::KeyChain, C::CreditCard, C::CellPhone}) l.plans[x] = {C::Sofa, {C::Drawer}, {C::SideTable, C::Sofa, C::ArmChair}};
        l.plans[C::Book] = {C::Shelf, {C::Cabinet}, {C::Shelf, C::SideTable, C::DiningTable}};
        for (C x : {C::Bowl, C::Plate}) l.plans[x] = {C::DiningTable, {C::Cabinet}, {C::DiningTable, C::SideTable}};
        l.tasks = {
            {TaskType::Examine, {C::RemoteControl, C::KeyChain, C::Book, C::CreditCard, C::CellPhone}, {}, {},
             {C::FloorLamp}},
            {TaskType::PickPlace, {C::RemoteControl, C::KeyChain, C::CreditCard, C::Book, C::CellPhone, C::Bowl, C::Plate},
             {C::Sofa, C::ArmChair, C::TVStand, C::SideTable, C::DiningTable, C::Shelf}, {}, {}},
            {TaskType::StackPlace, {C::KeyChain, C::CreditCard, C::RemoteControl}, {C::DiningTable, C::SideTable, C::TVStand, C::Shelf},
             {C::Bowl, C::Plate}, {}},
            {TaskType::PickTwoPlace, {C::RemoteControl, C::KeyChain, C::CreditCard, C::Book, C::CellPhone},
             {C::Sofa, C::ArmChair, C::SideTable, C::DiningTable}, {}, {}},
        };
        return m;
    }();
    return specs.at(room);
}

bool hard_type(TaskType t) {
    return t == TaskType::Examine || t == TaskType::PickPlace || t == TaskType::StackPlace ||
           t == TaskType::CleanPlace || t == TaskType::HeatPlace;
}

// ---------------------------------------------------------------- layout

void wall_line(GridScene& s, Cell a, Cell b) {
    const int dr = (b.row > a.row) - (b.row < a.row);
    const int dc = (b.col > a.col) - (b.col < a.col);
    for (Cell c = a;; c = {c.row + dr, c.col + dc}) {
        if (s.in_bounds(c)) s.wall[s.cell_index(c)] = true;
        if (c == b) break;
    }
}

void open_gap(GridScene& s, Cell c, bool vertical_wall) {
    for (int k = 0; k < 2; ++k) {
        const Cell g = vertical_wall ? Cell{c.row + k, c.col} : Cell{c.row, c.col + k};
        if (s.in_bounds(g)) s.wall[s.cell_index(g)] = false;
    }
}

void build_walls(GridScene& s, int variant, Rng& rng) {
    const int n = s.width;
    s.wall.assign(static_cast<std::size_t>(s.width * s.height), false);
    wall_line(s, {0, 0}, {0, n - 1});
    wall_line(s, {n - 1, 0}, {n - 1, n - 1});
    wall_line(s, {0, 0}, {n - 1, 0});
    wall_line(s, {0, n - 1}, {n - 1, n - 1});
    switch (variant) {
        case 0: {
            const int x = rng.between(8, 15);
            wall_line(s, {1, x}, {n - 2, x});
            open_gap(s, {rng.between(2, 8), x}, true);
            open_gap(s, {rng.between(13, 20), x}, true);
            break;
        }
        case 1: {
            const int y = rng.between(8, 15);
            wall_line(s, {y, 1}, {y, n - 2});
            open_gap(s, {y, rng.between(2, 8)}, false);
            open_gap(s, {y, rng.between(13, 20)}, false);
            break;
        }
        case 2: {
            const int x = rng.between(9, 14), y = rng.between(9, 14);
            wall_line(s, {1, x}, {y, x});
            wall_line(s, {y, x}, {y, n - 2});
            open_gap(s, {rng.between(2, y - 3), x}, true);
            open_gap(s, {y, rng.between(x + 2, n - 4)}, false);
            break;
        }
        case 3: {
            const int pillars = rng.between(2, 3);
            for (int p = 0; p < pillars; ++p) {
                const int r = rng.between(5, 16), c = rng.between(5, 16);
                wall_line(s, {r, c}, {r, c + 1});
                wall_line(s, {r + 1, c}, {r + 1, c + 1});
            }
            break;
        }
        case 4: {
            const int x = rng.between(9, 13);
            wall_line(s, {1, x}, {n - 2, x});
            open_gap(s, {rng.between(4, 16), x}, true);
            const int y = rng.between(8, 15);
            wall_line(s, {y, x + 1}, {y, n - 2});
            open_gap(s, {y, rng.between(x + 2, n - 4)}, false);
            break;
        }
        default: {
            const int x1 = rng.between(6, 8), x2 = rng.between(15, 17);
            wall_line(s, {1, x1}, {n - 2, x1});
            wall_line(s, {1, x2}, {n - 2, x2});
            open_gap(s, {rng.between(3, 18), x1}, true);
            open_gap(s, {rng.between(3, 18), x2}, true);
            break;
        }
    }
}

// ------------------------------------------------------------ placement

class Placer {
public:
    Placer(GridScene& scene, Rng& rng) : s_(scene), rng_(rng) {
        occupied_.assign(static_cast<std::size_t>(s_.width * s_.height), false);
    }

    // Places one furniture instance subject to `allowed`; returns its id.
    std::optional<ObjectId> place(Category c, const std::function<bool(Cell)>& allowed) {
        std::vector<Cell> wall_side, any;
        for (int r = 1; r < s_.height - 1; ++r) {
            for (int col = 1; col < s_.width - 1; ++col) {
                const Cell cell{r, col};
                if (s_.is_wall(cell) || occupied(cell) || !allowed(cell)) continue;
                any.push_back(cell);
                if (touches_wall(cell)) wall_side.push_back(cell);
            }
        }
        std::vector<Cell>& pool = (!island_ok(c) && !wall_side.empty()) ? wall_side : any;
        for (int attempt = 0; attempt < 60 && !pool.empty(); ++attempt) {
            const std::size_t k = static_cast<std::size_t>(rng_.below(static_cast<int>(pool.size())));
            const Cell cell = pool[k];
            pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
            occupied_[s_.cell_index(cell)] = true;
            if (consistent()) {
                ObjectInstance o;
                o.id = static_cast<ObjectId>(s_.objects.size());
                o.category = c;
                o.cell = cell;
                s_.objects.push_back(o);
                return o.id;
            }
            occupied_[s_.cell_index(cell)] = false;
        }
        return std::nullopt;
    }

    bool occupied(Cell c) const { return occupied_[s_.cell_index(c)]; }

private:
    bool touches_wall(Cell c) const {
        for (int h = 0; h < 4; ++h) {
            if (s_.is_wall(step_toward(c, static_cast<Heading>(h)))) return true;
        }
        return false;
    }

    bool free(Cell c) const { return !s_.is_wall(c) && !occupied(c); }

    // Free cells stay connected and every furniture cell keeps an open side.
    bool consistent() const {
        std::optional<Cell> start;
        int total = 0;
        for (int r = 0; r < s_.height; ++r)
            for (int c = 0; c < s_.width; ++c)
                if (free({r, c})) {
                    ++total;
                    if (!start) start = Cell{r, c};
                }
        if (!start) return false;
        std::vector<bool> seen(static_cast<std::size_t>(s_.width * s_.height), false);
        std::deque<Cell> q{*start};
        seen[s_.cell_index(*start)] = true;
        int reached = 0;
        while (!q.empty()) {
            const Cell cur = q.front();
            q.pop_front();
            ++reached;
            for (int h = 0; h < 4; ++h) {
                const Cell n = step_toward(cur, static_cast<Heading>(h));
                if (!s_.in_bounds(n) || !free(n) || seen[s_.cell_index(n)]) continue;
                seen[s_.cell_index(n)] = true;
                q.push_back(n);
            }
        }
        if (reached != total) return false;
        for (int r = 0; r < s_.height; ++r) {
            for (int c = 0; c < s_.width; ++c) {
                const Cell cell{r, c};
                if (!occupied(cell)) continue;
                bool open = false;
                for (int h = 0; h < 4 && !open; ++h) open = free(step_toward(cell, static_cast<Heading>(h)));
                if (!open) return false;
            }
        }
        return true;
    }

    GridScene& s_;
    Rng& rng_;
    std::vector<bool> occupied_;
};

ObjectId add_small(GridScene& s, Category c, ObjectId host) {
    ObjectInstance o;
    o.id = static_cast<ObjectId>(s.objects.size());
    o.category = c;
    o.cell = s.object(host).cell;
    o.contained_in = host;
    s.objects.push_back(o);
    return o.id;
}

struct Choice {
    TaskType type;
    Category object;
    std::optional<Category> mover;
    std::optional<Category> destination;
    std::optional<Category> lamp;
};

Choice choose_task(const RoomSpec& spec, bool hard, const GeneratorOptions& opt, Rng& rng, RoomType room) {
    std::vector<const TaskTemplate*> candidates;
    for (const auto& t : spec.tasks) {
        if (hard && !hard_type(t.type)) continue;
        if (opt.task_type && t.type != *opt.task_type) continue;
        candidates.push_back(&t);
    }
    if (candidates.empty()) {
        throw GeneratorError("task type not available for room " + std::string(room_name(room)) +
                             (hard ? " (hard split)" : ""));
    }
    const TaskTemplate& t = *candidates[static_cast<std::size_t>(rng.below(static_cast<int>(candidates.size())))];
    Choice ch{t.type, rng.pick(t.objects), std::nullopt, std::nullopt, std::nullopt};
    if (!t.movers.empty()) ch.mover = rng.pick(t.movers);
    if (!t.destinations.empty()) ch.destination = rng.pick(t.destinations);
    if (!t.lamps.empty()) ch.lamp = rng.pick(t.lamps);
    return ch;
}

TaskSpec build_task(const Choice& ch, bool hard) {
    TaskSpec t;
    t.type = ch.type;
    t.hard = hard;
    t.goal_object = ch.object;
    const std::string x = category_words(ch.object);
    GoalCondition placed;
    placed.kind = ConditionKind::Placed;
    placed.object = ch.object;
    placed.receptacle = ch.destination;
    const std::string dest = ch.destination ? category_words(*ch.destination) : "";
    auto cond = [](ConditionKind k, Category c) {
        GoalCondition g;
        g.kind = k;
        g.object = c;
        return g;
    };
    switch (ch.type) {
        case TaskType::Examine:
            t.goal_statement = "Examine the " + x + " under the " + category_words(*ch.lamp) + ".";
            t.step_instructions = {sentence::pick_up(ch.object), sentence::turn_on(*ch.lamp)};
            t.goal_conditions = {cond(ConditionKind::Held, ch.object), cond(ConditionKind::ToggledOn, *ch.lamp)};
            break;
        case TaskType::PickPlace:
            t.goal_statement = "Put a " + x + " on the " + dest + ".";
            t.step_instructions = {sentence::pick_up(ch.object), sentence::put(*ch.destination)};
            t.goal_conditions = {placed};
            break;
        case TaskType::StackPlace: {
            const std::string m = category_words(*ch.mover);
            t.goal_statement = "Put a " + m + " with a " + x + " in it on the " + dest + ".";
            t.step_instructions = {sentence::pick_up(ch.object), sentence::put(*ch.mover),
                                   sentence::pick_up(*ch.mover), sentence::put(*ch.destination)};
            GoalCondition inner = placed;
            inner.receptacle = ch.mover;
            GoalCondition outer = placed;
            outer.object = *ch.mover;
            outer.containing = ch.object;
            t.goal_conditions = {inner, outer};
            break;
        }
        case TaskType::CleanPlace:
            t.goal_statement = "Put a clean " + x + " on the " + dest + ".";
            t.step_instructions = {sentence::pick_up(ch.object), sentence::rinse(C::SinkBasin),
                                   sentence::put(*ch.destination)};
            placed.need_clean = true;
            t.goal_conditions = {cond(ConditionKind::Cleaned, ch.object), placed};
            break;
        case TaskType::CoolPlace:
            t.goal_statement = "Put a cold " + x + " on the " + dest + ".";
            t.step_instructions = {sentence::pick_up(ch.object), sentence::chill(C::Fridge),
                                   sentence::put(*ch.destination)};
            placed.need_cold = true;
            t.goal_conditions = {cond(ConditionKind::Cooled, ch.object), placed};
            break;
        case TaskType::HeatPlace:
            t.goal_statement = "Put a hot " + x + " on the " + dest + ".";
            t.step_instructions = {sentence::pick_up(ch.object), sentence::heat(C::Microwave),
                                   sentence::put(*ch.destination)};
            placed.need_hot = true;
            t.goal_conditions = {cond(ConditionKind::Heated, ch.object), placed};
            break;
        case TaskType::PickTwoPlace: {
            t.goal_statement = "Put two " + x + " items on the " + dest + ".";
            t.step_instructions = {sentence::pick_up(ch.object), sentence::put(*ch.destination),
                                   sentence::pick_up(ch.object, true), sentence::put(*ch.destination)};
            GoalCondition second = placed;
            second.count = 2;
            t.goal_conditions = {placed, second};
            break;
        }
    }
    return t;
}

std::optional<GridScene> try_build(std::uint64_t seed, RoomType room, bool hard, const Choice& ch,
                                   const RoomSpec& spec, Rng& rng) {
    GridScene s;
    s.width = kGridSize;
    s.height = kGridSize;
    s.room_type = room;
    s.seed = seed;
    s.layout_variant = layout_variant_for_seed(seed);
    build_walls(s, s.layout_variant, rng);
    Placer placer(s, rng);

    // Furniture counts, with forced categories the task depends on.
    std::map<Category, int> counts;
    for (const auto& f : spec.furniture) counts[f.category] = rng.between(f.lo, f.hi);
    auto at_least = [&](Category c, int n) { counts[c] = std::max(counts[c], n); };
    if (ch.destination && info(*ch.destination).furniture) at_least(*ch.destination, 1);
    if (ch.lamp && *ch.lamp == C::FloorLamp) at_least(C::FloorLamp, 1);
    if (ch.lamp && *ch.lamp == C::DeskLamp) at_least(C::Desk, 1);
    if (ch.type == TaskType::CleanPlace) at_least(C::SinkBasin, 1);
    if (ch.type == TaskType::HeatPlace) at_least(C::Microwave, 1);
    if (ch.type == TaskType::CoolPlace) at_least(C::Fridge, 1);

    // Goal pickupables and where they come from.
    std::vector<Category> goal_items{ch.object};
    if (ch.mover) goal_items.push_back(*ch.mover);

    struct Anchored {
        Category item;
        Category host;
        std::optional<Category> anchor;
        ObjectId host_id = -1;
    };
    std::vector<Anchored> anchored;
    for (Category item : goal_items) {
        const ObjectPlan& plan = spec.plans.at(item);
        Anchored a{item, rng.pick(plan.hard_hosts), plan.anchor};
        at_least(a.host, a.host == C::Cabinet || a.host == C::Drawer ? 2 : 1);
        if (a.anchor) at_least(*a.anchor, 1);
        anchored.push_back(a);
    }

    // Anchors first, then each anchored container within reach of its anchor.
    std::map<Category, std::vector<Cell>> anchor_cells;
    std::map<Category, ObjectId> placed_anchor;
    std::map<Category, int> placed_count;
    for (auto& a : anchored) {
        if (!a.anchor || placed_anchor.count(*a.anchor)) continue;
        auto id = placer.place(*a.anchor, [](Cell) { return true; });
        if (!id) return std::nullopt;
        placed_anchor[*a.anchor] = *id;
        ++placed_count[*a.anchor];
    }
    std::map<Category, ObjectId> host_for_anchor;
    for (auto& a : anchored) {
        if (a.anchor) {
            const Cell ac = *s.object(placed_anchor[*a.anchor]).cell;
            anchor_cells[a.host].push_back(ac);
            const auto key = static_cast<Category>(index(*a.anchor));
            if (auto it = host_for_anchor.find(key); it != host_for_anchor.end() &&
                                                     s.object(it->second).category == a.host) {
                a.host_id = it->second;
                continue;
            }
            auto id = placer.place(a.host, [&](Cell c) { return chebyshev(c, ac) <= 2; });
            if (!id) return std::nullopt;
            a.host_id = *id;
            host_for_anchor[key] = *id;
        } else {
            // Single-instance hosts (fridge) need no anchor.
            auto existing = s.instances_of(a.host);
            if (!existing.empty()) {
                a.host_id = existing.front();
                continue;
            }
            auto id = placer.place(a.host, [](Cell) { return true; });
            if (!id) return std::nullopt;
            a.host_id = *id;
        }
        ++placed_count[a.host];
    }

    // Remaining furniture; other instances of an anchored host stay away
    // from that host's anchors.
    for (const auto& f : spec.furniture) {
        const Category c = f.category;
        const int want = counts[c];
        while (placed_count[c] < want) {
            const auto& avoid = anchor_cells[c];
            auto id = placer.place(c, [&](Cell cell) {
                return std::all_of(avoid.begin(), avoid.end(), [&](Cell a) { return chebyshev(cell, a) >= 4; });
            });
            if (!id) return std::nullopt;
            ++placed_count[c];
        }
    }

    // Desk lamp rides on the desk.
    if (room == RoomType::Bedroom) {
        auto desks = s.instances_of(C::Desk);
        if (!desks.empty()) add_small(s, C::DeskLamp, desks.front());
    }

    // Goal objects.
    auto hosts_of = [&](const std::vector<Category>& cats) {
        std::vector<ObjectId> out;
        for (Category c : cats) {
            if (ch.destination && c == *ch.destination) continue;
            for (ObjectId id : s.instances_of(c)) out.push_back(id);
        }
        return out;
    };
    if (hard) {
        for (const auto& a : anchored) add_small(s, a.item, a.host_id);
    } else {
        const int copies = ch.type == TaskType::PickTwoPlace ? rng.between(2, 3) : 1;
        for (Category item : goal_items) {
            auto hosts = hosts_of(spec.plans.at(item).easy_hosts);
            if (hosts.empty()) return std::nullopt;
            for (int k = 0; k < (item == ch.object ? copies : 1); ++k) {
                add_small(s, item, hosts[static_cast<std::size_t>(rng.below(static_cast<int>(hosts.size())))]);
            }
        }
    }

    // Clutter from the room catalogue, never of a goal-relevant category.
    std::vector<Category> clutter_pool;
    for (Category c : possible_landmarks(room)) {
        if (!info(c).pickupable) continue;
        if (std::find(goal_items.begin(), goal_items.end(), c) != goal_items.end()) continue;
        clutter_pool.push_back(c);
    }
    std::vector<ObjectId> receptacles;
    for (const auto& o : s.objects) {
        if (info(o.category).furniture && info(o.category).receptacle) receptacles.push_back(o.id);
    }
    const int clutter = rng.between(3, 6);
    for (int k = 0; k < clutter && !clutter_pool.empty(); ++k) {
        add_small(s, rng.pick(clutter_pool), rng.pick(receptacles));
    }

    // Spawn on a free cell.
    const NavGrid grid = nav_grid(s);
    std::vector<Cell> free_cells;
    for (int r = 0; r < s.height; ++r)
        for (int c = 0; c < s.width; ++c)
            if (grid.passable({r, c})) free_cells.push_back({r, c});
    if (free_cells.empty()) return std::nullopt;
    s.spawn.cell = rng.pick(free_cells);
    s.spawn.heading = static_cast<Heading>(rng.below(4));
    s.spawn.look = Look::Level;
    return s;
}

} // namespace

std::vector<TaskType> task_types_for(RoomType room, bool hard) {
    std::vector<TaskType> out;
    for (const auto& t : room_spec(room).tasks) {
        if (!hard || hard_type(t.type)) out.push_back(t.type);
    }
    return out;
}

std::pair<GridScene, TaskSpec> generate_scene(std::uint64_t seed, RoomType room, bool hard,
                                              const GeneratorOptions& options) {
    const RoomSpec& spec = room_spec(room);
    const std::uint64_t mixed = seed * 0x9E3779B97F4A7C15ULL ^
                                (static_cast<std::uint64_t>(room) << 56) ^ (hard ? 0x5bd1e995ULL : 0ULL);
    Rng rng(mixed);
    const Choice ch = choose_task(spec, hard, options, rng, room);
    for (int attempt = 0; attempt < 200; ++attempt) {
        if (auto scene = try_build(seed, room, hard, ch, spec, rng)) {
            return {std::move(*scene), build_task(ch, hard)};
        }
    }
    throw GeneratorError("scene generation did not converge for seed " + std::to_string(seed));
}

std::string validate_scene(const GridScene& s) {
    if (s.wall.size() != static_cast<std::size_t>(s.width * s.height)) return "wall grid size mismatch";
    std::set<Cell> furniture;
    for (std::size_t i = 0; i < s.objects.size(); ++i) {
        const auto& o = s.objects[i];
        if (o.id != static_cast<ObjectId>(i)) return "object ids are not dense";
        const auto& ci = info(o.category);
        if (o.open && !ci.openable) return "open flag on non-openable " + std::string(name(o.category));
        if (o.sliced && !ci.sliceable) return "sliced flag on non-sliceable";
        if (o.held && !ci.pickupable) return "held flag on non-pickupable";
        if (o.held && (o.cell || o.contained_in)) return "held object has a cell or container";
        if (o.cell && (!s.in_bounds(*o.cell) || s.is_wall(*o.cell))) return "object outside the floor";
        if (ci.furniture) {
            if (!o.cell) return "furniture without a cell";
            if (!furniture.insert(*o.cell).second) return "two furniture pieces share a cell";
        }
        // containment must be acyclic
        std::set<ObjectId> chain{o.id};
        for (auto p = o.contained_in; p; p = s.object(*p).contained_in) {
            if (*p < 0 || static_cast<std::size_t>(*p) >= s.objects.size()) return "dangling container id";
            if (!info(s.object(*p).category).receptacle) return "container is not a receptacle";
            if (!chain.insert(*p).second) return "containment cycle";
        }
        if (o.contained_in && o.cell != s.object(*o.contained_in).cell) return "object cell differs from its container";
    }
    if (!s.walkable(s.spawn.cell)) return "spawn cell is not walkable";
    return {};
}

bool goal_objects_sealed(const GridScene& scene, const TaskSpec& task) {
    std::set<Category> relevant;
    for (const auto& c : task.goal_conditions) {
        if (info(c.object).pickupable) relevant.insert(c.object);
    }
    for (Category c : relevant) {
        const auto ids = scene.instances_of(c);
        if (ids.empty()) return false;
        for (ObjectId id : ids) {
            if (!scene.sealed(id)) return false;
        }
    }
    return true;
}

} // namespace taskgrid::world
