#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace twr {

using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of an independent substream, e.g. derive_seed(master, {point, trial}).
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = splitmix64(master);
    for (std::uint64_t p : path)
        s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    return s;
}

struct SampleStats {
    double mean = 0.0;
    double stderr_ = 0.0;  // standard error of the mean, 0 for a single sample
    std::size_t count = 0;
};

inline SampleStats summarize(const std::vector<double>& xs) {
    SampleStats s;
    s.count = xs.size();
    if (xs.empty())
        return s;
    double sum = 0.0;
    for (double x : xs)
        sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs)
            ss += (x - s.mean) * (x - s.mean);
        const double var = ss / static_cast<double>(xs.size() - 1);
        s.stderr_ = std::sqrt(var / static_cast<double>(xs.size()));
    }
    return s;
}

} // namespace twr
