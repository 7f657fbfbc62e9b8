#include "world/navigation.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <functional>

namespace taskgrid::world {

namespace {

struct PoseKey {
    Cell cell;
    Heading heading;
};

std::size_t key_index(const NavGrid& g, Cell c, Heading h) {
    return static_cast<std::size_t>((c.row * g.width + c.col) * 4 + static_cast<int>(h));
}

// BFS over (cell, heading) with unit-cost MoveAhead / RotateLeft / RotateRight.
std::optional<std::vector<ActionKind>> search(const NavGrid& g, const AgentPose& from,
                                              const std::function<bool(Cell, Heading)>& goal) {
    if (goal(from.cell, from.heading)) return std::vector<ActionKind>{};
    const std::size_t n = static_cast<std::size_t>(g.width * g.height * 4);
    std::vector<int> prev(n, -1);
    std::vector<ActionKind> via(n, ActionKind::Stop);
    std::vector<bool> seen(n, false);
    std::deque<PoseKey> queue;
    const std::size_t start = key_index(g, from.cell, from.heading);
    seen[start] = true;
    queue.push_back({from.cell, from.heading});
    constexpr std::array<ActionKind, 3> moves{ActionKind::MoveAhead, ActionKind::RotateLeft,
                                              ActionKind::RotateRight};
    while (!queue.empty()) {
        const PoseKey cur = queue.front();
        queue.pop_front();
        const std::size_t ci = key_index(g, cur.cell, cur.heading);
        for (ActionKind a : moves) {
            PoseKey nxt = cur;
            if (a == ActionKind::MoveAhead) {
                nxt.cell = step_toward(cur.cell, cur.heading);
                if (!g.passable(nxt.cell)) continue;
            } else {
                nxt.heading = a == ActionKind::RotateLeft ? rotate_left(cur.heading) : rotate_right(cur.heading);
            }
            const std::size_t ni = key_index(g, nxt.cell, nxt.heading);
            if (seen[ni]) continue;
            seen[ni] = true;
            prev[ni] = static_cast<int>(ci);
            via[ni] = a;
            if (goal(nxt.cell, nxt.heading)) {
                std::vector<ActionKind> plan;
                for (std::size_t k = ni; k != start; k = static_cast<std::size_t>(prev[k])) {
                    plan.push_back(via[k]);
                }
                std::reverse(plan.begin(), plan.end());
                return plan;
            }
            queue.push_back(nxt);
        }
    }
    return std::nullopt;
}

} // namespace

NavGrid nav_grid(const GridScene& scene) {
    NavGrid g{scene.width, scene.height, std::vector<bool>(static_cast<std::size_t>(scene.width * scene.height))};
    for (int r = 0; r < scene.height; ++r)
        for (int c = 0; c < scene.width; ++c) g.free[static_cast<std::size_t>(r * scene.width + c)] = !scene.wall[static_cast<std::size_t>(r * scene.width + c)];
    for (const auto& o : scene.objects) {
        if (info(o.category).furniture && o.cell) g.free[scene.cell_index(*o.cell)] = false;
    }
    return g;
}

std::vector<int> distance_field(const NavGrid& g, Cell from) {
    std::vector<int> dist(static_cast<std::size_t>(g.width * g.height), kUnreachable);
    if (!g.passable(from)) return dist;
    std::deque<Cell> queue{from};
    dist[static_cast<std::size_t>(from.row * g.width + from.col)] = 0;
    while (!queue.empty()) {
        const Cell cur = queue.front();
        queue.pop_front();
        const int d = dist[static_cast<std::size_t>(cur.row * g.width + cur.col)];
        for (int h = 0; h < 4; ++h) {
            const Cell n = step_toward(cur, static_cast<Heading>(h));
            if (!g.passable(n)) continue;
            auto& slot = dist[static_cast<std::size_t>(n.row * g.width + n.col)];
            if (slot != kUnreachable) continue;
            slot = d + 1;
            queue.push_back(n);
        }
    }
    return dist;
}

std::optional<std::vector<ActionKind>> plan_to_face(const NavGrid& g, const AgentPose& from, Cell target) {
    if (!g.passable(from.cell)) return std::nullopt;
    return search(g, from, [&](Cell c, Heading h) { return step_toward(c, h) == target; });
}

std::optional<std::vector<ActionKind>> plan_to_stand(const NavGrid& g, const AgentPose& from, Cell cell) {
    if (!g.passable(from.cell) || !g.passable(cell)) return std::nullopt;
    return search(g, from, [&](Cell c, Heading) { return c == cell; });
}

int face_cost(const NavGrid& g, const AgentPose& from, Cell target) {
    const auto plan = plan_to_face(g, from, target);
    return plan ? static_cast<int>(plan->size()) : kUnreachable;
}

} // namespace taskgrid::world
