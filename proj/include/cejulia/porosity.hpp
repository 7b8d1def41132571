#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "cejulia/occupancy.hpp"
#include "cejulia/parallel.hpp"

namespace cejulia::porosity {

/// Per-point good-scale record shared by the scanners.
struct PointScales {
    std::size_t point_index = 0;
    std::vector<int> good_scales;  // increasing
    double density = 0.0;          // |good_scales cap [1, n_max]| / n_max
};

struct PorosityScanResult {
    std::vector<PointScales> per_point;
    double p1_hat = 0.0;  // max over points of n_j / j (infinite when some point has no scales)
    double p2 = 0.0;
    int n_max = 0;
    bool feasible = false;  // every point has at least one good scale
};

struct DirectionalScanResult {
    double alpha = 0.0;
    double beta_hat = 0.0;  // certified radius factor (half of the passing mesh value)
    double P_hat = 0.0;
    std::vector<PointScales> per_point;
    bool feasible = false;
    bool resolution_limited = false;  // grid floor reached before a passing beta
    int n_max = 0;
};

struct BoxPorosityResult {
    int N = 0;
    double P_hat = 0.0;
    std::vector<PointScales> per_point;
    std::vector<double> per_point_densities;
    bool feasible = false;
    int n_max = 0;
};

namespace detail {

// minimal P with n_j <= P j over the increasing good scales >= 1, j from 1
inline double minimal_p(const std::vector<int>& scales) {
    double p = 0.0;
    int j = 0;
    for (int n : scales) {
        if (n < 1) continue;
        ++j;
        p = std::max(p, static_cast<double>(n) / j);
    }
    return j == 0 ? std::numeric_limits<double>::infinity() : std::max(p, 1.0);
}

inline double fill_density(PointScales& ps, int n_max) {
    int cnt = 0;
    for (int n : ps.good_scales) cnt += (n >= 1 && n <= n_max) ? 1 : 0;
    ps.density = n_max > 0 ? static_cast<double>(cnt) / n_max : 0.0;
    return ps.density;
}

// odometer over the coordinate window [lo[a], hi[a]] per axis
template <typename Fn>
inline void for_each_coord(int dim, const long* lo, const long* hi, Fn&& fn) {
    DyadicOccupancy::Coord c{0, 0, 0};
    long idx[3];
    for (int a = 0; a < dim; ++a) {
        if (lo[a] > hi[a]) return;
        idx[a] = lo[a];
    }
    while (true) {
        for (int a = 0; a < dim; ++a) c[a] = static_cast<std::uint32_t>(idx[a]);
        if (fn(c)) return;  // early exit
        int a = 0;
        for (; a < dim; ++a) {
            if (++idx[a] <= hi[a]) break;
            idx[a] = lo[a];
        }
        if (a == dim) return;
    }
}

// is some level-m box empty, entirely inside B(center, radius)?
inline bool empty_box_in_ball(const DyadicOccupancy& occ, int m, const double* center,
                              double radius) {
    int dim = occ.dim();
    double side = std::ldexp(1.0, -m);
    double half_diag = 0.5 * side * std::sqrt(static_cast<double>(dim));
    double reach = radius - half_diag;
    if (reach <= 0.0) return false;
    long lo[3], hi[3], cells = 1L << m;
    for (int a = 0; a < dim; ++a) {
        lo[a] = std::max(0L, static_cast<long>(std::floor((center[a] - reach) / side)));
        hi[a] = std::min(cells - 1, static_cast<long>(std::floor((center[a] + reach) / side)));
    }
    bool found = false;
    for_each_coord(dim, lo, hi, [&](const DyadicOccupancy::Coord& c) {
        double d2 = 0.0;
        for (int a = 0; a < dim; ++a) {
            double cc = (c[a] + 0.5) * side;
            d2 += (cc - center[a]) * (cc - center[a]);
        }
        // box center within radius - half_diag puts the whole box inside
        if (d2 <= reach * reach && !occ.occupied(m, c)) {
            found = true;
            return true;
        }
        return false;
    });
    return found;
}

}  // namespace detail

/// Scale n is good for z when an empty box of side >= 2 p2 2^-n has its
/// center within 2^-n of z (emptiness certified against the grid).
inline PorosityScanResult mean_porosity_scan(const DyadicOccupancy& occ,
                                             const std::vector<double>& flat_points, double p2,
                                             int n_max) {
    if (p2 <= 0.0 || p2 >= 1.0) throw std::invalid_argument("mean_porosity_scan: p2 in (0,1)");
    int dim = occ.dim();
    int level_off = static_cast<int>(std::floor(std::log2(1.0 / p2))) - 1;
    if (n_max < 1 || n_max + level_off > occ.depth())
        throw std::invalid_argument("mean_porosity_scan: n_max exceeds usable depth");
    std::size_t npts = flat_points.size() / dim;

    PorosityScanResult res;
    res.p2 = p2;
    res.n_max = n_max;
    res.per_point.resize(npts);
    parallel_for(npts, [&](std::size_t i) {
        const double* z = &flat_points[i * dim];
        PointScales ps;
        ps.point_index = i;
        for (int n = 0; n <= n_max; ++n) {
            int m = n + level_off;
            if (m < 0 || m > occ.depth()) continue;
            double scale = std::ldexp(1.0, -n);
            double side = std::ldexp(1.0, -m);
            long lo[3], hi[3], cells = 1L << m;
            for (int a = 0; a < dim; ++a) {
                lo[a] = std::max(0L, static_cast<long>(std::floor((z[a] - scale) / side)));
                hi[a] = std::min(cells - 1, static_cast<long>(std::floor((z[a] + scale) / side)));
            }
            bool good = false;
            detail::for_each_coord(dim, lo, hi, [&](const DyadicOccupancy::Coord& c) {
                double d2 = 0.0;
                for (int a = 0; a < dim; ++a) {
                    double cc = (c[a] + 0.5) * side;
                    d2 += (cc - z[a]) * (cc - z[a]);
                }
                if (d2 <= scale * scale && !occ.occupied(m, c)) {
                    good = true;
                    return true;
                }
                return false;
            });
            if (good) ps.good_scales.push_back(n);
        }
        detail::fill_density(ps, n_max);
        res.per_point[i] = std::move(ps);
    });

    res.feasible = true;
    for (auto& ps : res.per_point) {
        double p = detail::minimal_p(ps.good_scales);
        if (!std::isfinite(p)) res.feasible = false;
        res.p1_hat = std::max(res.p1_hat, p);
    }
    return res;
}

/// Scale n is good for z when every admissible alpha-sub-ball center on a
/// half-radius mesh contains an empty ball of the probed radius. A pass at
/// mesh radius beta certifies beta/2 for arbitrary centers, which is the
/// reported beta_hat.
inline DirectionalScanResult directional_scan(const DyadicOccupancy& occ,
                                              const std::vector<double>& flat_points, double alpha,
                                              int n_max) {
    if (alpha <= 0.0 || alpha > 0.5) throw std::invalid_argument("directional_scan: alpha in (0, 1/2]");
    if (n_max < 1) throw std::invalid_argument("directional_scan: n_max must be >= 1");
    int dim = occ.dim();
    std::size_t npts = flat_points.size() / dim;

    DirectionalScanResult res;
    res.alpha = alpha;
    res.n_max = n_max;

    auto scan_at = [&](double beta_mesh, std::vector<PointScales>& out) -> bool {
        out.assign(npts, PointScales{});
        // level of a box whose inscribed ball has radius >= beta_mesh 2^-n
        std::vector<char> ok(npts, 1);
        parallel_for(npts, [&](std::size_t i) {
            const double* z = &flat_points[i * dim];
            PointScales ps;
            ps.point_index = i;
            for (int n = 1; n <= n_max; ++n) {
                int m = static_cast<int>(std::floor(n - 1.0 - std::log2(beta_mesh)));
                if (m > occ.depth() || m < 0) continue;
                double scale = std::ldexp(1.0, -n);
                double sub_r = alpha * scale;
                double mesh_step = 0.5 * sub_r;
                double reach = (1.0 - alpha) * scale;
                bool all_pass = true;
                // mesh over admissible sub-ball centers, z' = z + mesh_step * offset
                long span = static_cast<long>(std::floor(reach / mesh_step));
                std::vector<long> idx(dim, -span);
                while (all_pass) {
                    double zp[3];
                    double off2 = 0.0;
                    for (int a = 0; a < dim; ++a) {
                        zp[a] = z[a] + idx[a] * mesh_step;
                        off2 += (zp[a] - z[a]) * (zp[a] - z[a]);
                    }
                    if (off2 <= reach * reach) {
                        bool inside = true;
                        for (int a = 0; a < dim; ++a)
                            if (zp[a] < 0.0 || zp[a] >= 1.0) inside = false;
                        if (inside && !occ.ball_is_empty(zp, sub_r) &&
                            !detail::empty_box_in_ball(occ, m, zp, sub_r))
                            all_pass = false;
                    }
                    int a = 0;
                    for (; a < dim; ++a) {
                        if (++idx[a] <= span) break;
                        idx[a] = -span;
                    }
                    if (a == dim) break;
                }
                if (all_pass) ps.good_scales.push_back(n);
            }
            detail::fill_density(ps, n_max);
            if (ps.good_scales.empty()) ok[i] = 0;
            out[i] = std::move(ps);
        });
        for (std::size_t i = 0; i < npts; ++i)
            if (!ok[i]) return false;
        return true;
    };

    double beta_mesh = alpha;
    while (true) {
        // the emptiness certificate needs level floor(n - 1 - log2 beta) <= depth at n = 1
        int m_max = static_cast<int>(std::floor(n_max - 1.0 - std::log2(beta_mesh)));
        if (m_max > occ.depth()) {
            res.resolution_limited = true;
            break;
        }
        std::vector<PointScales> out;
        if (scan_at(beta_mesh, out)) {
            res.feasible = true;
            res.beta_hat = beta_mesh / 2.0;
            res.per_point = std::move(out);
            for (auto& ps : res.per_point) res.P_hat = std::max(res.P_hat, detail::minimal_p(ps.good_scales));
            return res;
        }
        res.per_point = std::move(out);  // keep the last (deepest) attempt for diagnostics
        beta_mesh /= 2.0;
    }
    return res;
}

/// Scale n is good for z when Q(z,n) has at least one empty level-(n+N)
/// descendant. P_hat is the minimal P with n_j <= P j over scales >= 1.
inline BoxPorosityResult box_porosity_detect(const DyadicOccupancy& occ,
                                             const std::vector<double>& flat_points, int N,
                                             int n_max) {
    if (N < 1) throw std::invalid_argument("box_porosity_detect: N >= 1");
    if (n_max + N > occ.depth())
        throw std::invalid_argument("box_porosity_detect: n_max + N exceeds depth");
    int dim = occ.dim();
    std::size_t npts = flat_points.size() / dim;

    BoxPorosityResult res;
    res.N = N;
    res.n_max = n_max;
    res.per_point.resize(npts);
    parallel_for(npts, [&](std::size_t i) {
        const double* z = &flat_points[i * dim];
        PointScales ps;
        ps.point_index = i;
        for (int n = 0; n <= n_max; ++n) {
            auto c = occ.cell_of(z, n);
            if (occ.has_empty_descendant(n, c, N)) ps.good_scales.push_back(n);
        }
        detail::fill_density(ps, n_max);
        res.per_point[i] = std::move(ps);
    });

    res.feasible = true;
    for (auto& ps : res.per_point) {
        res.per_point_densities.push_back(ps.density);
        double p = detail::minimal_p(ps.good_scales);
        if (!std::isfinite(p)) res.feasible = false;
        res.P_hat = std::max(res.P_hat, p);
    }
    if (!res.feasible) res.P_hat = std::numeric_limits<double>::infinity();
    return res;
}

}
