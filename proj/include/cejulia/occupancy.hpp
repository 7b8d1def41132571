#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace cejulia::porosity {

/// Dyadic occupancy structure over [0,1)^d: for every level n <= depth the
/// sorted set of level-n boxes [p 2^-n, (p+1) 2^-n)^d that meet the sample.
/// Upward closed: the parent of an occupied box is occupied.
class DyadicOccupancy {
  public:
    using Coord = std::array<std::uint32_t, 3>;

    DyadicOccupancy(int dim, int depth) : dim_(dim), depth_(depth) {
        if (dim < 1 || dim > 3) throw std::invalid_argument("occupancy supports dim 1..3");
        int max_depth = dim == 3 ? 21 : 24;
        if (depth < 1 || depth > max_depth) throw std::invalid_argument("occupancy depth out of range");
        levels_.resize(depth + 1);
    }

    int dim() const { return dim_; }
    int depth() const { return depth_; }

    std::uint64_t key(const Coord& c) const {
        // 25 bits per axis covers depth 24; three axes use 21 bits (depth <= 21)
        int shift = dim_ == 3 ? 21 : 25;
        std::uint64_t k = 0;
        for (int a = 0; a < dim_; ++a) k = (k << shift) | c[a];
        return k;
    }

    bool occupied(int level, const Coord& c) const {
        const auto& v = levels_[level];
        return std::binary_search(v.begin(), v.end(), key(c));
    }

    std::size_t count(int level) const { return levels_[level].size(); }
    const std::vector<std::uint64_t>& level_keys(int level) const { return levels_[level]; }

    Coord unpack(std::uint64_t k) const {
        int shift = dim_ == 3 ? 21 : 25;
        Coord c{0, 0, 0};
        for (int a = dim_ - 1; a >= 0; --a) {
            c[a] = static_cast<std::uint32_t>(k & ((1u << shift) - 1));
            k >>= shift;
        }
        return c;
    }

    Coord cell_of(const double* point, int level) const {
        Coord c{0, 0, 0};
        double scale = std::ldexp(1.0, level);
        for (int a = 0; a < dim_; ++a) {
            double x = point[a];
            if (x < 0.0 || x >= 1.0) {
                std::ostringstream os;
                os << "point outside the unit box at axis " << a << ": " << x;
                throw std::invalid_argument(os.str());
            }
            c[a] = static_cast<std::uint32_t>(x * scale);
            if (c[a] >= (1u << level)) c[a] = (1u << level) - 1;
        }
        return c;
    }

    /// True iff the level-n box has an empty descendant exactly N levels down
    /// (an empty coarser descendant also certifies one, by upward closure).
    bool has_empty_descendant(int level, const Coord& c, int N) const {
        if (level + N > depth_) throw std::invalid_argument("has_empty_descendant: level+N exceeds depth");
        if (!occupied(level, c)) return true;
        if (N == 0) return false;
        int branches = 1 << dim_;
        for (int b = 0; b < branches; ++b) {
            Coord child = c;
            for (int a = 0; a < dim_; ++a) child[a] = (c[a] << 1) | ((b >> a) & 1);
            if (has_empty_descendant(level + 1, child, N - 1)) return true;
        }
        return false;
    }

    /// True iff no occupied finest-level box intersects the closed ball
    /// B(center, radius) (coordinates in [0,1)^d).
    bool ball_is_empty(const double* center, double radius) const {
        Coord root{0, 0, 0};
        return ball_empty_rec(0, root, center, radius);
    }

    struct Builder {
        Builder(int dim, int depth) : occ_(dim, depth) {}

        void add(const double* point) {
            occ_.levels_[occ_.depth_].push_back(occ_.key(occ_.cell_of(point, occ_.depth_)));
            if (occ_.levels_[occ_.depth_].size() > (1u << 24)) compact();
        }
        void add(double x, double y) {
            double p[2]{x, y};
            add(p);
        }

        DyadicOccupancy finish() {
            compact();
            auto& lv = occ_.levels_;
            for (int n = occ_.depth_; n > 0; --n) {
                std::vector<std::uint64_t> parents;
                parents.reserve(lv[n].size());
                for (std::uint64_t k : lv[n]) {
                    Coord c = occ_.unpack(k);
                    for (int a = 0; a < occ_.dim_; ++a) c[a] >>= 1;
                    parents.push_back(occ_.key(c));
                }
                std::sort(parents.begin(), parents.end());
                parents.erase(std::unique(parents.begin(), parents.end()), parents.end());
                lv[n - 1] = std::move(parents);
            }
            occ_.assert_upward_closed();
            return std::move(occ_);
        }

      private:
        void compact() {
            auto& v = occ_.levels_[occ_.depth_];
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        }
        DyadicOccupancy occ_;
    };

    void assert_upward_closed() const {
        for (int n = 1; n <= depth_; ++n) {
            for (std::uint64_t k : levels_[n]) {
                Coord c = unpack(k);
                for (int a = 0; a < dim_; ++a) c[a] >>= 1;
                if (!occupied(n - 1, c))
                    throw std::logic_error("occupancy violates upward closure");
            }
        }
    }

  private:
    bool ball_empty_rec(int level, const Coord& c, const double* center, double radius) const {
        if (!occupied(level, c)) return true;
        double side = std::ldexp(1.0, -level);
        // squared distance from the ball center to the box
        double d2 = 0.0;
        for (int a = 0; a < dim_; ++a) {
            double lo = c[a] * side, hi = lo + side;
            double x = center[a];
            if (x < lo)
                d2 += (lo - x) * (lo - x);
            else if (x > hi)
                d2 += (x - hi) * (x - hi);
        }
        if (d2 > radius * radius) return true;  // box misses the ball entirely
        if (level == depth_) return false;      // occupied finest box touches it
        int branches = 1 << dim_;
        for (int b = 0; b < branches; ++b) {
            Coord child = c;
            for (int a = 0; a < dim_; ++a) child[a] = (c[a] << 1) | ((b >> a) & 1);
            if (!ball_empty_rec(level + 1, child, center, radius)) return false;
        }
        return true;
    }

    int dim_;
    int depth_;
    std::vector<std::vector<std::uint64_t>> levels_;
};

/// Marks every box containing a sample point, levels 0..depth.
/// Points are row-major, dim doubles each, all inside [0,1)^d.
inline DyadicOccupancy build_occupancy(const std::vector<double>& flat_points, int dim, int depth) {
    if (flat_points.size() % dim != 0)
        throw std::invalid_argument("build_occupancy: flat point array size mismatch");
    DyadicOccupancy::Builder b(dim, depth);
    for (std::size_t i = 0; i < flat_points.size(); i += dim) b.add(&flat_points[i]);
    return b.finish();
}

}
