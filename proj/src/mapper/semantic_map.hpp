#pragma once

#include "world/world.hpp"

#include <string>
#include <vector>

namespace taskgrid::mapper {

using world::Cell;
using world::Category;

// Top-down grid with one channel per catalog category plus an obstacle
// channel and an explored channel. Values are 0 or 1.
class SemanticMap {
public:
    SemanticMap() = default;
    SemanticMap(int height, int width);

    int height() const { return height_; }
    int width() const { return width_; }
    static constexpr std::size_t kCategoryChannels = world::kCategoryCount;
    static constexpr std::size_t kObstacleChannel = kCategoryChannels;
    static constexpr std::size_t kExploredChannel = kCategoryChannels + 1;
    static constexpr std::size_t kChannels = kCategoryChannels + 2;

    double at(std::size_t channel, Cell c) const { return data_[offset(channel, c)]; }
    void set(std::size_t channel, Cell c, double v) { data_[offset(channel, c)] = v; }
    bool in_bounds(Cell c) const { return c.row >= 0 && c.col >= 0 && c.row < height_ && c.col < width_; }

    bool explored(Cell c) const { return in_bounds(c) && at(kExploredChannel, c) > 0.5; }
    bool obstacle(Cell c) const { return in_bounds(c) && at(kObstacleChannel, c) > 0.5; }
    bool has(Category k, Cell c) const { return in_bounds(c) && at(world::index(k), c) > 0.5; }
    // Cells where the category is currently mapped, row-major.
    std::vector<Cell> cells_of(Category k) const;

    const world::AgentPose& agent() const { return agent_; }
    const std::vector<double>& data() const { return data_; }
    std::vector<double>& mutable_data() { return data_; }

    bool operator==(const SemanticMap&) const = default;

private:
    friend void update(SemanticMap&, const world::EgocentricObservation&);
    std::size_t offset(std::size_t channel, Cell c) const {
        return (channel * static_cast<std::size_t>(height_) + static_cast<std::size_t>(c.row)) *
                   static_cast<std::size_t>(width_) + static_cast<std::size_t>(c.col);
    }

    int height_ = 0;
    int width_ = 0;
    std::vector<double> data_;
    world::AgentPose agent_;
};

// Folds one observation into the map. Visible cells become explored and
// their category content is replaced by what the observation shows.
void update(SemanticMap& map, const world::EgocentricObservation& obs);

struct Landmark {
    Category category;
    Cell cell;   // mapped cell of that category nearest the agent
    bool operator==(const Landmark&) const = default;
};

// Every category with a mapped cell, sorted by name, one entry each.
std::vector<Landmark> observed_landmarks(const SemanticMap& map);
std::vector<std::string> landmark_names(const std::vector<Landmark>& landmarks);

} // namespace taskgrid::mapper
