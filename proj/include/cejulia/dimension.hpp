#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cejulia/occupancy.hpp"

namespace cejulia::dimension {

using porosity::DyadicOccupancy;
using rational = boost::multiprecision::cpp_rational;

/// Exact count of occupied level-n boxes.
inline std::size_t box_count(const DyadicOccupancy& occ, int n) {
    if (n < 0 || n > occ.depth()) throw std::invalid_argument("box_count: level out of range");
    return occ.count(n);
}

struct DimensionFit {
    std::vector<std::pair<int, std::size_t>> counts;
    double slope = 0.0;
    double r_squared = 0.0;
    int n_min = 0;
    int n_max = 0;
    bool degenerate = false;  // all counts equal
};

/// Least-squares slope of log2 #B_n against n over [n_min, n_max].
inline DimensionFit minkowski_fit(const DyadicOccupancy& occ, int n_min, int n_max) {
    if (n_min >= n_max || n_max > occ.depth())
        throw std::invalid_argument("minkowski_fit: bad level range");
    DimensionFit fit;
    fit.n_min = n_min;
    fit.n_max = n_max;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, syy = 0.0;
    int m = 0;
    for (int n = n_min; n <= n_max; ++n) {
        std::size_t c = box_count(occ, n);
        if (c == 0) throw std::invalid_argument("minkowski_fit: empty occupancy level");
        fit.counts.emplace_back(n, c);
        double x = n, y = std::log2(static_cast<double>(c));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        ++m;
    }
    double det = m * sxx - sx * sx;
    double cov = m * sxy - sx * sy;
    double var_y = m * syy - sy * sy;
    if (var_y <= 1e-12) {
        fit.degenerate = true;
        fit.slope = 0.0;
        fit.r_squared = 1.0;
        return fit;
    }
    fit.slope = cov / det;
    fit.r_squared = (cov * cov) / (det * var_y);
    return fit;
}

/// Closed-form dimension bound for box porous sets:
/// K = (2^d)^N, alpha = 1 - (1 - log(K-1)/log K)/P, bound = alpha d.
inline std::pair<double, double> porosity_bound(int d, int N, double P) {
    if (d < 1 || N < 1 || P < 1.0) throw std::invalid_argument("porosity_bound: d,N >= 1 and P >= 1");
    double K = std::ldexp(1.0, d * N);
    double ratio = std::log(K - 1.0) / std::log(K);
    double alpha = 1.0 - (1.0 - ratio) / P;
    return {alpha, alpha * d};
}

/// Rooted tree of occupied dyadic boxes; vertex 0 is the level-0 root and
/// every edge joins consecutive levels.
struct BoxTree {
    int d = 1;
    std::vector<int> level;
    std::vector<int> parent;  // -1 at the root
    std::vector<std::vector<int>> children;

    int depth() const {
        int m = 0;
        for (int l : level) m = std::max(m, l);
        return m;
    }
    std::size_t count_at(int lvl) const {
        std::size_t c = 0;
        for (int l : level) c += (l == lvl) ? 1 : 0;
        return c;
    }
    std::vector<int> vertices_at(int lvl) const {
        std::vector<int> out;
        for (std::size_t v = 0; v < level.size(); ++v)
            if (level[v] == lvl) out.push_back(static_cast<int>(v));
        return out;
    }
    /// descendants exactly k levels below v
    std::vector<int> k_children(int v, int k) const {
        std::vector<int> frontier{v};
        for (int step = 0; step < k; ++step) {
            std::vector<int> next;
            for (int u : frontier)
                next.insert(next.end(), children[u].begin(), children[u].end());
            frontier = std::move(next);
        }
        return frontier;
    }

    static BoxTree from_edges(int d, const std::vector<int>& levels, const std::vector<int>& parents) {
        if (levels.size() != parents.size() || levels.empty())
            throw std::invalid_argument("box tree: level/parent size mismatch");
        BoxTree t;
        t.d = d;
        t.level = levels;
        t.parent = parents;
        t.children.resize(levels.size());
        int roots = 0;
        for (std::size_t v = 0; v < levels.size(); ++v) {
            if (parents[v] < 0) {
                if (levels[v] != 0) throw std::invalid_argument("box tree: root must be level 0");
                ++roots;
                continue;
            }
            if (parents[v] >= static_cast<int>(levels.size()))
                throw std::invalid_argument("box tree: parent index out of range");
            if (levels[v] != levels[parents[v]] + 1)
                throw std::invalid_argument("box tree: edge must join consecutive levels");
            t.children[parents[v]].push_back(static_cast<int>(v));
        }
        if (roots != 1) throw std::invalid_argument("box tree: exactly one root required");
        return t;
    }

    static BoxTree from_occupancy(const DyadicOccupancy& occ) {
        BoxTree t;
        t.d = occ.dim();
        std::vector<std::size_t> offset(occ.depth() + 2, 0);
        for (int n = 0; n <= occ.depth(); ++n) offset[n + 1] = offset[n] + occ.count(n);
        t.level.resize(offset[occ.depth() + 1]);
        t.parent.assign(offset[occ.depth() + 1], -1);
        t.children.resize(offset[occ.depth() + 1]);
        for (int n = 0; n <= occ.depth(); ++n) {
            const auto& keys = occ.level_keys(n);
            for (std::size_t i = 0; i < keys.size(); ++i) {
                std::size_t v = offset[n] + i;
                t.level[v] = n;
                if (n == 0) continue;
                auto c = occ.unpack(keys[i]);
                for (int a = 0; a < occ.dim(); ++a) c[a] >>= 1;
                const auto& up = occ.level_keys(n - 1);
                auto it = std::lower_bound(up.begin(), up.end(), occ.key(c));
                std::size_t p = offset[n - 1] + static_cast<std::size_t>(it - up.begin());
                t.parent[v] = static_cast<int>(p);
                t.children[p].push_back(static_cast<int>(v));
            }
        }
        return t;
    }
};

struct TreePropertyReport {
    long long K = 0;
    bool property_i = false;
    bool property_ii = false;
    std::vector<int> violations_i;   // vertices with more than K N-children
    std::vector<int> violations_ii;  // vertices lacking floor(n/P) qualifying ancestors
};

/// (i): every vertex has at most K = (2^d)^N N-children.
/// (ii): every level-n vertex has at least floor(n/P) proper ancestors
/// with at most K-1 N-children.
inline TreePropertyReport verify_tree_properties(const BoxTree& tree, int N, double P) {
    if (N < 1 || P < 1.0) throw std::invalid_argument("verify_tree_properties: N >= 1, P >= 1");
    TreePropertyReport rep;
    rep.K = 1LL << (tree.d * N);
    std::size_t nv = tree.level.size();
    std::vector<long long> nch(nv, 0);
    for (std::size_t v = 0; v < nv; ++v)
        nch[v] = static_cast<long long>(tree.k_children(static_cast<int>(v), N).size());

    rep.property_i = true;
    for (std::size_t v = 0; v < nv; ++v)
        if (nch[v] > rep.K) {
            rep.property_i = false;
            rep.violations_i.push_back(static_cast<int>(v));
        }

    rep.property_ii = true;
    for (std::size_t v = 0; v < nv; ++v) {
        int n = tree.level[v];
        if (n == 0) continue;
        int needed = static_cast<int>(std::floor(n / P));
        int good = 0;
        for (int u = tree.parent[v]; u >= 0; u = tree.parent[u])
            if (nch[u] <= rep.K - 1) ++good;
        if (good < needed) {
            rep.property_ii = false;
            rep.violations_ii.push_back(static_cast<int>(v));
        }
    }
    return rep;
}

struct RamsBound {
    long long bound = 0;          // floor(N / min_v max_b mu_b(v))
    std::size_t actual = 0;       // #B_n
    double mu_min_max = 0.0;      // min over v of max over b of mu_b(v)
    bool mass_conserved = false;  // every mu_b sums to exactly 1 over B_n
};

/// Offset family of equidistributed measures down the tree in N-strides;
/// the reciprocal of the smallest guaranteed mass bounds #B_n.
inline RamsBound rams_bound(const BoxTree& tree, int N, double P, int n) {
    if (N < 1) throw std::invalid_argument("rams_bound: N >= 1");
    if (n % N != 0) throw std::invalid_argument("rams_bound: n must be a multiple of N");
    if (n > tree.depth()) throw std::invalid_argument("rams_bound: n exceeds tree depth");
    auto props = verify_tree_properties(tree, N, P);
    if (!props.property_i || !props.property_ii)
        throw std::runtime_error(
            "rams_bound: tree violates the child-count properties; run verify_tree_properties");

    std::size_t nv = tree.level.size();
    RamsBound out;
    auto bottom = tree.vertices_at(n);
    out.actual = bottom.size();
    if (bottom.empty()) throw std::invalid_argument("rams_bound: no vertices at level n");

    std::vector<rational> max_mass(nv, rational(0));
    bool conserved = true;
    for (int b = 0; b < N && b <= n; ++b) {
        std::vector<std::pair<int, rational>> mass;
        auto start = tree.vertices_at(b);
        if (start.empty()) break;
        rational init = rational(1) / rational(static_cast<long long>(start.size()));
        for (int v : start) mass.emplace_back(v, init);
        int lvl = b;
        while (lvl < n) {
            int stride = std::min(N, n - lvl);
            std::vector<std::pair<int, rational>> next;
            for (auto& [v, m] : mass) {
                auto ch = tree.k_children(v, stride);
                if (ch.empty()) continue;  // truncated branch: mass is dropped
                rational share = m / rational(static_cast<long long>(ch.size()));
                for (int u : ch) next.emplace_back(u, share);
            }
            mass = std::move(next);
            lvl += stride;
        }
        rational total(0);
        std::map<int, rational> agg;
        for (auto& [v, m] : mass) {
            agg[v] += m;
            total += m;
        }
        if (total != rational(1)) conserved = false;
        for (auto& [v, m] : agg) max_mass[v] = std::max(max_mass[v], m);
    }
    out.mass_conserved = conserved;

    rational mu_min(-1);
    for (int v : bottom) {
        if (max_mass[v] == rational(0)) {
            mu_min = rational(0);
            break;
        }
        if (mu_min < rational(0) || max_mass[v] < mu_min) mu_min = max_mass[v];
    }
    out.mu_min_max = mu_min.convert_to<double>();
    if (mu_min > rational(0)) {
        rational q = rational(N) / mu_min;
        out.bound = static_cast<long long>(boost::multiprecision::numerator(q) /
                                           boost::multiprecision::denominator(q));
    } else {
        out.bound = -1;  // no usable mass floor (should not happen on valid trees)
    }
    return out;
}

/// Child-count form of the growth estimate: C (K-1)^{n/(PN)} K^{n/N - n/(PN)}.
inline double growth_formula(int d, int N, double P, int n) {
    double K = std::ldexp(1.0, d * N);
    double e1 = n / (P * N);
    double e2 = static_cast<double>(n) / N - e1;
    return std::pow(K - 1.0, e1) * std::pow(K, e2);
}

}
