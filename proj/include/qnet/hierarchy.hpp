// hierarchy.hpp — ADO multi-index enumeration with O(1) neighbor lookup.
//
// Indices n = (n_1..n_K), sum n_k <= L, ordered graded-lexicographically
// (by level, then lexicographically descending), so (0,..,0) is first.
#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace qnet {

struct Hierarchy {
    int n_cor = 0;
    int level = 0;
    std::vector<std::vector<std::uint8_t>> indices;  // per-ADO occupation vectors
    std::vector<std::int32_t> plus;                  // [ado*n_cor + k], -1 if absent
    std::vector<std::int32_t> minus;

    std::size_t size() const { return indices.size(); }
    std::int32_t up(std::size_t ado, int k) const { return plus[ado * n_cor + k]; }
    std::int32_t down(std::size_t ado, int k) const { return minus[ado * n_cor + k]; }
};

inline std::size_t hierarchy_count(int n_cor, int level) {
    // C(level + n_cor, n_cor)
    std::size_t c = 1;
    for (int i = 1; i <= n_cor; ++i) c = c * (level + i) / i;
    return c;
}

inline Hierarchy enumerate_hierarchy(int n_cor, int level, std::size_t max_ados = 2'000'000) {
    if (n_cor < 0) throw std::invalid_argument("enumerate_hierarchy: n_cor must be >= 0");
    if (level < 0) throw std::invalid_argument("enumerate_hierarchy: level must be >= 0");
    if (n_cor > 0 && hierarchy_count(n_cor, level) > max_ados)
        throw std::invalid_argument("enumerate_hierarchy: ADO count " +
                                    std::to_string(hierarchy_count(n_cor, level)) +
                                    " exceeds the budget of " + std::to_string(max_ados));

    Hierarchy h;
    h.n_cor = n_cor;
    h.level = level;

    if (n_cor == 0) {  // bath off: a single system matrix
        h.indices.push_back({});
        return h;
    }

    std::vector<std::uint8_t> cur(n_cor, 0);
    auto emit = [&](auto&& self, int k, int rem) -> void {
        if (k == n_cor - 1) {
            cur[k] = static_cast<std::uint8_t>(rem);
            h.indices.push_back(cur);
            return;
        }
        for (int v = rem; v >= 0; --v) {
            cur[k] = static_cast<std::uint8_t>(v);
            self(self, k + 1, rem - v);
        }
    };
    for (int lev = 0; lev <= level; ++lev) emit(emit, 0, lev);

    std::map<std::vector<std::uint8_t>, std::int32_t> pos;
    for (std::size_t i = 0; i < h.indices.size(); ++i) pos[h.indices[i]] = static_cast<std::int32_t>(i);

    h.plus.assign(h.indices.size() * n_cor, -1);
    h.minus.assign(h.indices.size() * n_cor, -1);
    for (std::size_t i = 0; i < h.indices.size(); ++i) {
        std::vector<std::uint8_t> nb = h.indices[i];
        int sum = 0;
        for (auto v : nb) sum += v;
        for (int k = 0; k < n_cor; ++k) {
            if (sum + 1 <= level) {
                ++nb[k];
                h.plus[i * n_cor + k] = pos.at(nb);
                --nb[k];
            }
            if (nb[k] > 0) {
                --nb[k];
                h.minus[i * n_cor + k] = pos.at(nb);
                ++nb[k];
            }
        }
    }
    return h;
}

}  // namespace qnet
