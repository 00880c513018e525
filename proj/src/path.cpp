#include "nsmp/path.hpp"

#include <algorithm>
#include <cmath>

namespace nsmp {

DiscretePath DiscretePath::straight(const Vector& z0, const Vector& z1, int intervals) {
    if (intervals < 2) throw ContractViolation("DiscretePath::straight: need at least 2 intervals");
    DiscretePath p;
    p.grid.resize(intervals + 1);
    p.nodes.resize(intervals + 1);
    for (int i = 0; i <= intervals; ++i) {
        const double s = static_cast<double>(i) / intervals;
        p.grid[i] = s;
        p.nodes[i] = (1.0 - s) * z0 + s * z1;
    }
    p.nodes.front() = z0;
    p.nodes.back() = z1;
    return p;
}

DiscretePath DiscretePath::from_nodes(std::vector<Vector> nodes) {
    DiscretePath p;
    const int n = static_cast<int>(nodes.size());
    if (n < 3) throw ContractViolation("DiscretePath::from_nodes: need at least 3 nodes");
    p.grid.resize(n);
    for (int i = 0; i < n; ++i) p.grid[i] = static_cast<double>(i) / (n - 1);
    p.nodes = std::move(nodes);
    return p;
}

Vector DiscretePath::at(double s) const {
    if (s <= grid.front()) return nodes.front();
    if (s >= grid.back()) return nodes.back();
    const auto it = std::upper_bound(grid.begin(), grid.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - grid.begin()) - 1;
    const double w = (s - grid[i]) / (grid[i + 1] - grid[i]);
    return (1.0 - w) * nodes[i] + w * nodes[i + 1];
}

void DiscretePath::validate() const {
    if (nodes.size() < 3) throw ContractViolation("DiscretePath: node count must be >= 3");
    if (grid.size() != nodes.size()) throw ContractViolation("DiscretePath: grid and node counts differ");
    if (grid.front() != 0.0 || grid.back() != 1.0) throw ContractViolation("DiscretePath: grid must span [0, 1]");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw ContractViolation("DiscretePath: grid must be strictly increasing");
    }
}

void DiscretePath::evaluate(const Functional& f) {
    values.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) values[i] = f.checked(nodes[i]);
}

bool DiscretePath::same_grid(const DiscretePath& other) const { return grid == other.grid; }

}  // namespace nsmp
