#ifndef NSMP_PATH_HPP
#define NSMP_PATH_HPP

#include <vector>

#include "nsmp/oracle.hpp"

namespace nsmp {

/**
 * Polygonal path through nodes x_0..x_N on the parameter grid
 * 0 = s_0 < ... < s_N = 1. Endpoints are fixed by the owning algorithm;
 * values caches f(x_i) when filled by the caller.
 */
struct DiscretePath {
    std::vector<double> grid;
    std::vector<Vector> nodes;
    std::vector<double> values;

    static DiscretePath straight(const Vector& z0, const Vector& z1, int intervals);
    /// Nodes on a uniform grid; the first and last entries are the endpoints.
    static DiscretePath from_nodes(std::vector<Vector> nodes);

    std::size_t size() const { return nodes.size(); }
    int intervals() const { return static_cast<int>(nodes.size()) - 1; }
    const Vector& front() const { return nodes.front(); }
    const Vector& back() const { return nodes.back(); }

    /// Piecewise-linear interpolation at parameter s in [0, 1].
    Vector at(double s) const;
    /// Throws ContractViolation on a non-increasing grid or fewer than 3 nodes.
    void validate() const;
    /// Fills values with f at every node.
    void evaluate(const Functional& f);
    bool same_grid(const DiscretePath& other) const;
};

}  // namespace nsmp

#endif
