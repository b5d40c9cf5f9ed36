#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

namespace balltrace {

// Multi-index alpha in N_0^n, stored densely.
using MultiIndex = std::vector<int>;

inline int degree(const MultiIndex& a) {
    return std::accumulate(a.begin(), a.end(), 0);
}

inline MultiIndex mi_add(const MultiIndex& a, const MultiIndex& b) {
    MultiIndex r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

// a - b, or an empty vector if any component would be negative.
inline MultiIndex mi_sub_checked(const MultiIndex& a, const MultiIndex& b) {
    MultiIndex r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        r[i] = a[i] - b[i];
        if (r[i] < 0) return {};
    }
    return r;
}

// Graded lexicographic order: first by |alpha|, then lexicographically.
inline bool graded_lex_less(const MultiIndex& a, const MultiIndex& b) {
    int da = degree(a), db = degree(b);
    if (da != db) return da < db;
    return a < b;
}

// Number of alpha in N_0^n with |alpha| <= N, i.e. binomial(N+n, n).
inline std::size_t multi_index_count(int n, int N) {
    std::size_t c = 1;
    for (int j = 1; j <= n; ++j) c = c * static_cast<std::size_t>(N + j) / j;
    return c;
}

// All alpha with |alpha| <= N in graded lexicographic order.
std::vector<MultiIndex> enumerate_multi_indices(int n, int N);

struct MultiIndexHash {
    std::size_t operator()(const MultiIndex& a) const {
        std::size_t h = 1469598103934665603ull;
        for (int v : a) {
            h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return h;
    }
};

} // namespace balltrace
