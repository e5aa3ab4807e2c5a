#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "ybfact/twisted_map.hpp"

namespace ybfact {

// splitmix64; used to derive independent per-trial substreams from one
// campaign seed so parallel evaluation cannot reorder draws.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream) : eng_(mix_seed(seed, stream)) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(eng_);
    }

    // Uniform over the complex square [-1,1] x [-i,i].
    Complex complex_square() { return {uniform(-1.0, 1.0), uniform(-1.0, 1.0)}; }

    ComplexMatrix matrix(int rows, int cols) {
        ComplexMatrix a(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) a(i, j) = complex_square();
        return a;
    }

    ComplexVector vector(int n) {
        ComplexVector v(n);
        for (int i = 0; i < n; ++i) v(i) = complex_square();
        return v;
    }

    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
};

template <class T>
struct TripleCampaign {
    std::vector<std::array<T, 3>> triples;
    std::size_t rejected = 0;
};

// Rejection sampling of campaign triples: draw from the carrier sampler,
// keep a triple only when every evaluation path of the relation checkers
// stays at least `campaign_margin` away from the map's bad set.
template <class T, class Drawer>
TripleCampaign<T> sample_triples(const TwistedMap<T>& map, Drawer draw, std::size_t trials,
                                 std::uint64_t seed, double campaign_margin) {
    TripleCampaign<T> out;
    out.triples.reserve(trials);
    constexpr std::uint64_t kAttemptsPerTrial = 4096;
    for (std::uint64_t t = 0; t < trials; ++t) {
        bool accepted = false;
        for (std::uint64_t attempt = 0; attempt < kAttemptsPerTrial; ++attempt) {
            Rng rng(seed, t * kAttemptsPerTrial + attempt);
            try {
                std::array<T, 3> triple{draw(rng), draw(rng), draw(rng)};
                if (triple_margin(map, triple[0], triple[1], triple[2]) >= campaign_margin) {
                    out.triples.push_back(std::move(triple));
                    accepted = true;
                    break;
                }
            } catch (const Error&) {
                // sampler construction itself hit a degenerate instance
            }
            ++out.rejected;
        }
        if (!accepted)
            throw Error(ErrorKind::DegenerateInstance,
                        "could not sample an in-domain triple after " +
                            std::to_string(kAttemptsPerTrial) + " attempts");
    }
    return out;
}

}  // namespace ybfact
