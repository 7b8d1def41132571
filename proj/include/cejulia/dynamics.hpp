#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "cejulia/sphere.hpp"

namespace cejulia::dynamics {

using sphere::chordal_dist;
using sphere::CriticalSet;
using sphere::RationalMap;
using sphere::SpherePoint;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Forward orbit with cumulative log spherical derivatives:
/// log_deriv_prefix[k] = log |(f^k)'(x)| in the spherical metric.
struct OrbitRecord {
    SpherePoint base;
    std::vector<SpherePoint> points;       // x, f(x), ..., f^n(x)
    std::vector<double> log_deriv_prefix;  // size n+1, entry 0 is 0
    bool hit_critical = false;             // some derivative factor was exactly 0
};

inline OrbitRecord forward_orbit(const RationalMap& f, const SpherePoint& x, int n) {
    if (n < 0) throw std::invalid_argument("forward_orbit: n must be >= 0");
    OrbitRecord rec;
    rec.base = x;
    rec.points.reserve(n + 1);
    rec.log_deriv_prefix.reserve(n + 1);
    rec.points.push_back(x);
    rec.log_deriv_prefix.push_back(0.0);
    for (int k = 0; k < n; ++k) {
        const SpherePoint& z = rec.points.back();
        double d = f.spherical_deriv(z);
        double prev = rec.log_deriv_prefix.back();
        if (d == 0.0) {
            rec.hit_critical = true;
            rec.log_deriv_prefix.push_back(-kInf);
        } else {
            rec.log_deriv_prefix.push_back(prev + std::log(d));
        }
        rec.points.push_back(f.eval(z));
    }
    return rec;
}

/// Fitted Collet-Eckmann pair: lambda_hat is the minimal slope of the lower
/// convex envelope of (k, log |(f^k)'(f(c))|) restricted to the tail window
/// [n_max/4, n_max]; log_C_hat is the best intercept over the whole range.
struct CEEstimate {
    double lambda_hat = 0.0;
    double log_C_hat = 0.0;
    int n_used = 0;
    std::vector<double> per_n_log_deriv;
    std::optional<int> collision_time;  // orbit of f(c) hit a critical point exactly
    bool ce_holds() const { return lambda_hat > 1.0; }
};

namespace detail {

// Lower convex hull (monotone chain) of (k, y_k); returns minimal edge slope.
inline std::optional<double> lower_envelope_min_slope(const std::vector<std::pair<int, double>>& pts) {
    if (pts.size() < 2) return std::nullopt;
    std::vector<std::pair<double, double>> hull;
    for (const auto& [k, y] : pts) {
        double x = static_cast<double>(k);
        while (hull.size() >= 2) {
            auto& a = hull[hull.size() - 2];
            auto& b = hull[hull.size() - 1];
            if ((b.second - a.second) * (x - a.first) >= (y - a.second) * (b.first - a.first))
                hull.pop_back();
            else
                break;
        }
        hull.emplace_back(x, y);
    }
    double min_slope = kInf;
    for (std::size_t i = 1; i < hull.size(); ++i)
        min_slope = std::min(min_slope,
                             (hull[i].second - hull[i - 1].second) / (hull[i].first - hull[i - 1].first));
    if (min_slope == kInf) return std::nullopt;
    return min_slope;
}

}  // namespace detail

/// CE constant estimation along the orbit of the critical value f(c).
/// A collision at time 0 (the critical value is itself critical, e.g. a
/// superattracting fixed critical point) throws; later exact collisions
/// zero the derivative product, so the estimate reports lambda_hat <= 1.
inline CEEstimate ce_estimate(const RationalMap& f, const SpherePoint& c, int n_max,
                              const CriticalSet& crit, double collision_tol = 1e-12) {
    if (n_max < 4) throw std::invalid_argument("ce_estimate: n_max too small");
    SpherePoint v = f.eval(c);
    for (const auto& e : crit.points) {
        if (chordal_dist(v, e.point) <= collision_tol) {
            std::ostringstream os;
            os << "critical value orbit meets a critical point at time 0";
            throw std::runtime_error(os.str());
        }
    }
    OrbitRecord orbit = forward_orbit(f, v, n_max);
    CEEstimate est;
    est.per_n_log_deriv = orbit.log_deriv_prefix;
    est.n_used = n_max;
    for (int k = 1; k <= n_max && !est.collision_time; ++k) {
        for (const auto& e : crit.points)
            if (chordal_dist(orbit.points[k], e.point) <= collision_tol) {
                est.collision_time = k;
                break;
            }
    }

    std::vector<std::pair<int, double>> window;
    for (int k = std::max(1, n_max / 4); k <= n_max; ++k)
        if (std::isfinite(orbit.log_deriv_prefix[k])) window.emplace_back(k, orbit.log_deriv_prefix[k]);
    auto slope = detail::lower_envelope_min_slope(window);
    if (!slope) {
        est.lambda_hat = 0.0;  // derivative product collapsed: CE fails
        est.log_C_hat = 0.0;
        return est;
    }
    est.lambda_hat = std::exp(*slope);
    double intercept = kInf;
    for (int k = 0; k <= n_max; ++k) {
        double y = orbit.log_deriv_prefix[k];
        if (std::isfinite(y)) intercept = std::min(intercept, y - k * *slope);
    }
    est.log_C_hat = intercept;
    return est;
}

/// phi(j) = -log dist(f^j(x), Crit(f,J)), clamped at 0; exact hits are +inf.
inline std::vector<double> phi_series(const RationalMap& f, const SpherePoint& x, int n,
                                      const CriticalSet& crit) {
    if (crit.count_in_julia() == 0)
        throw std::invalid_argument("phi_series: no in-Julia critical point");
    std::vector<double> phi(n + 1, 0.0);
    SpherePoint z = x;
    for (int j = 0; j <= n; ++j) {
        double d = kInf;
        for (const auto& e : crit.points)
            if (e.in_julia) d = std::min(d, chordal_dist(z, e.point));
        phi[j] = d == 0.0 ? kInf : std::max(0.0, -std::log(d));
        if (j < n) z = f.eval(z);
    }
    return phi;
}

/// Empirical constant for the average-distance bound: the largest running
/// mean of phi with the `exclude` biggest entries dropped, times a 1.1
/// safety factor. Infinite entries count against the excluded budget first.
inline double dpu_cf(const std::vector<double>& phi, int exclude) {
    if (phi.empty()) return 0.0;
    int inf_count = 0;
    for (double p : phi)
        if (p == kInf) ++inf_count;
    if (inf_count > exclude)
        throw std::runtime_error("dpu_cf: orbit hits critical points more often than the excluded budget");

    double best = 0.0;
    // running largest finite entries (ascending, capped at `exclude`) plus
    // the finite prefix sum; infinities consume the excluded budget first
    std::vector<double> top;
    double finite_sum = 0.0;
    int inf_seen = 0;
    for (std::size_t n = 0; n < phi.size(); ++n) {
        double v = phi[n];
        if (v == kInf) {
            ++inf_seen;
        } else {
            finite_sum += v;
            if (exclude > 0) {
                top.insert(std::lower_bound(top.begin(), top.end(), v), v);
                if (static_cast<int>(top.size()) > exclude) top.erase(top.begin());
            }
        }
        if (n == 0) continue;  // averages taken over prefixes phi(0..n), n >= 1
        int budget = std::min<int>(exclude - inf_seen, static_cast<int>(top.size()));
        double dropped = 0.0;
        for (int k = 0; k < budget; ++k) dropped += top[top.size() - 1 - k];
        int included = static_cast<int>(n + 1) - inf_seen - std::max(budget, 0);
        if (included <= 0) continue;
        double avg = (finite_sum - dropped) / included;
        best = std::max(best, avg);
    }
    return 1.1 * best;
}

/// Shadow bookkeeping: S_n = (n, n + phi(n) K_f] and the low-shadow-count
/// index set A with threshold N_f = ceil(2 (#crit + C_f K_f)).
struct ShadowCover {
    std::vector<double> phi;
    double K_f = 0.0;
    double C_f = 0.0;
    int N_f = 0;
    std::vector<int> shadow_count;  // per index j
    std::vector<char> A_flags;      // shadow_count[j] <= N_f
};

inline ShadowCover shadow_cover(const std::vector<double>& phi, double K_f, double C_f,
                                int crit_count) {
    if (K_f <= 0.0) throw std::invalid_argument("shadow_cover: K_f must be positive");
    ShadowCover cover;
    cover.phi = phi;
    cover.K_f = K_f;
    cover.C_f = C_f;
    cover.N_f = static_cast<int>(std::ceil(2.0 * (crit_count + C_f * K_f)));
    std::size_t len = phi.size();
    cover.shadow_count.assign(len, 0);
    for (std::size_t n = 0; n < len; ++n) {
        if (phi[n] <= 0.0) continue;
        std::size_t hi;
        if (phi[n] == kInf) {
            hi = len - 1;
        } else {
            double end = n + phi[n] * K_f;
            hi = end >= static_cast<double>(len - 1) ? len - 1
                                                     : static_cast<std::size_t>(std::floor(end));
        }
        for (std::size_t j = n + 1; j <= hi; ++j) ++cover.shadow_count[j];
    }
    cover.A_flags.assign(len, 0);
    for (std::size_t j = 0; j < len; ++j) cover.A_flags[j] = cover.shadow_count[j] <= cover.N_f;
    return cover;
}

/// #(A cap [1,n]) / n
inline double shadow_density(const ShadowCover& cover, int n) {
    if (n <= 0 || static_cast<std::size_t>(n) >= cover.A_flags.size())
        throw std::invalid_argument("shadow_density: n out of range");
    int count = 0;
    for (int j = 1; j <= n; ++j) count += cover.A_flags[j] ? 1 : 0;
    return static_cast<double>(count) / n;
}

/// K_f = 2 nu / log(lambda).
inline double shadow_rate(int nu, double lambda_hat) {
    if (lambda_hat <= 1.0) throw std::invalid_argument("shadow_rate: needs lambda > 1");
    return 2.0 * nu / std::log(lambda_hat);
}

}
