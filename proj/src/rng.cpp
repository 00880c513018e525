#include "nsmp/rng.hpp"

#include <cmath>

namespace nsmp {

std::uint64_t label_hash(std::string_view label) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : label) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::mt19937_64 split_rng(std::uint64_t seed, std::string_view label) {
    // splitmix64 finalizer
    std::uint64_t z = seed ^ label_hash(label);
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return std::mt19937_64(z);
}

Vector uniform_direction(std::mt19937_64& rng, int dim) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector d(dim);
    double n = 0.0;
    do {
        for (int i = 0; i < dim; ++i) d[i] = normal(rng);
        n = d.norm();
    } while (n < 1e-300);
    return d / n;
}

Vector uniform_in_ball(std::mt19937_64& rng, const Vector& center, double radius) {
    const int dim = static_cast<int>(center.size());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector d = uniform_direction(rng, dim);
    const double r = radius * std::pow(unit(rng), 1.0 / dim);
    return center + r * d;
}

}  // namespace nsmp
