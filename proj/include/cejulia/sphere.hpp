#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "cejulia/polyroots.hpp"

namespace cejulia::sphere {

using cplx = std::complex<double>;

/// A point on the Riemann sphere: a finite complex value or the single
/// canonical point at infinity.
struct SpherePoint {
    cplx value{0.0, 0.0};
    bool infinite = false;

    SpherePoint() = default;
    SpherePoint(cplx v) : value(v) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("finite SpherePoint requires finite coordinates");
    }
    SpherePoint(double re, double im) : SpherePoint(cplx{re, im}) {}

    static SpherePoint infinity() {
        SpherePoint p;
        p.infinite = true;
        return p;
    }
    bool is_infinity() const { return infinite; }

    friend bool operator==(const SpherePoint& a, const SpherePoint& b) {
        if (a.infinite || b.infinite) return a.infinite == b.infinite;
        return a.value == b.value;
    }
};

/// Chordal metric: chi(z,w) = 2|z-w| / sqrt((1+|z|^2)(1+|w|^2)), chi(z,inf) = 2/sqrt(1+|z|^2).
inline double chordal_dist(const SpherePoint& a, const SpherePoint& b) {
    if (a.infinite && b.infinite) return 0.0;
    if (a.infinite) return 2.0 / std::sqrt(1.0 + std::norm(b.value));
    if (b.infinite) return 2.0 / std::sqrt(1.0 + std::norm(a.value));
    return 2.0 * std::abs(a.value - b.value) /
           std::sqrt((1.0 + std::norm(a.value)) * (1.0 + std::norm(b.value)));
}

namespace detail {

// coefficients of p reversed onto a fixed degree: q(w) = w^deg * p(1/w)
inline std::vector<cplx> reverse_to_degree(const std::vector<cplx>& p, std::size_t deg) {
    std::vector<cplx> out(deg + 1, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < p.size() && k <= deg; ++k) out[deg - k] = p[k];
    return out;
}

inline std::vector<cplx> derivative(const std::vector<cplx>& p) {
    if (p.size() <= 1) return {cplx{0.0, 0.0}};
    std::vector<cplx> d(p.size() - 1);
    for (std::size_t k = 1; k < p.size(); ++k) d[k - 1] = static_cast<double>(k) * p[k];
    return d;
}

}  // namespace detail

/// A rational map P/Q on the sphere, coefficients ascending.
/// Validated on construction: nonzero leading coefficients, no common
/// roots (to tolerance), and degree >= 2.
class RationalMap {
  public:
    RationalMap(std::vector<cplx> numer, std::vector<cplx> denom, std::size_t min_degree = 2)
        : numer_(polyroots::trim(numer)), denom_(polyroots::trim(denom)) {
        if (numer_.empty() || denom_.empty() || (denom_.size() == 1 && denom_[0] == cplx{0.0, 0.0}))
            throw std::invalid_argument("rational map needs nonzero numerator and denominator");
        deg_ = std::max(numer_.size(), denom_.size()) - 1;
        if (deg_ < min_degree) throw std::invalid_argument("rational map degree below minimum");
        check_no_common_root();
        // charts: tilde polynomials represent w^deg * p(1/w)
        numer_rev_ = detail::reverse_to_degree(numer_, deg_);
        denom_rev_ = detail::reverse_to_degree(denom_, deg_);
        dnumer_ = detail::derivative(numer_);
        ddenom_ = detail::derivative(denom_);
        dnumer_rev_ = detail::derivative(numer_rev_);
        ddenom_rev_ = detail::derivative(denom_rev_);
    }

    static RationalMap polynomial(std::vector<cplx> coeffs) {
        return RationalMap(std::move(coeffs), {cplx{1.0, 0.0}});
    }
    /// z^2 + c
    static RationalMap quadratic(cplx c) { return polynomial({c, {0.0, 0.0}, {1.0, 0.0}}); }
    /// (az + b) / (cz + d); degree-one maps are allowed here for metric
    /// sanity checks, the analysis pipeline itself requires degree >= 2.
    static RationalMap mobius(cplx a, cplx b, cplx c, cplx d) {
        if (a * d - b * c == cplx{0.0, 0.0})
            throw std::invalid_argument("mobius: determinant must be nonzero");
        return RationalMap({b, a}, {d, c}, 1);
    }

    std::size_t degree() const { return deg_; }
    const std::vector<cplx>& numer() const { return numer_; }
    const std::vector<cplx>& denom() const { return denom_; }
    bool is_polynomial() const { return denom_.size() == 1; }

    SpherePoint eval(const SpherePoint& z) const {
        if (z.infinite) return ratio(numer_rev_[0], denom_rev_[0]);
        if (std::abs(z.value) <= 1.0) return ratio(polyroots::horner(numer_, z.value),
                                                   polyroots::horner(denom_, z.value));
        cplx w = 1.0 / z.value;
        return ratio(polyroots::horner(numer_rev_, w), polyroots::horner(denom_rev_, w));
    }

    /// Spherical derivative |f'(z)| (1+|z|^2)/(1+|f(z)|^2), evaluated in
    /// inverted coordinates near infinity and poles so every case is a
    /// finite quotient-rule expression.
    double spherical_deriv(const SpherePoint& z) const {
        cplx zeta;
        const std::vector<cplx>*A, *B, *dA, *dB;
        if (z.infinite || std::abs(z.value) > 1.0) {
            zeta = z.infinite ? cplx{0.0, 0.0} : 1.0 / z.value;
            A = &numer_rev_;
            B = &denom_rev_;
            dA = &dnumer_rev_;
            dB = &ddenom_rev_;
        } else {
            zeta = z.value;
            A = &numer_;
            B = &denom_;
            dA = &dnumer_;
            dB = &ddenom_;
        }
        cplx a = polyroots::horner(*A, zeta), b = polyroots::horner(*B, zeta);
        // choose the range chart where the value has modulus <= 1
        if (std::abs(a) > std::abs(b)) {
            std::swap(a, b);
            std::swap(A, B);
            std::swap(dA, dB);
        }
        cplx da = polyroots::horner(*dA, zeta), db = polyroots::horner(*dB, zeta);
        if (b == cplx{0.0, 0.0})
            throw std::runtime_error("spherical_deriv at a common root of numerator and denominator");
        cplx h = a / b;
        cplx dh = (da * b - a * db) / (b * b);
        return std::abs(dh) * (1.0 + std::norm(zeta)) / (1.0 + std::norm(h));
    }

    /// All finite preimages of target under f: roots of P - target*Q.
    /// For an infinite target: roots of Q.
    std::vector<cplx> preimages(const SpherePoint& target) const {
        std::vector<cplx> coeffs;
        if (target.infinite) {
            coeffs = denom_;
        } else {
            std::size_t n = std::max(numer_.size(), denom_.size());
            coeffs.assign(n, cplx{0.0, 0.0});
            for (std::size_t k = 0; k < numer_.size(); ++k) coeffs[k] += numer_[k];
            for (std::size_t k = 0; k < denom_.size(); ++k) coeffs[k] -= target.value * denom_[k];
        }
        return polyroots::solve(coeffs);
    }

  private:
    SpherePoint ratio(cplx p, cplx q) const {
        if (q == cplx{0.0, 0.0}) return SpherePoint::infinity();
        cplx v = p / q;
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return SpherePoint::infinity();
        return SpherePoint(v);
    }
    void check_no_common_root() const {
        if (denom_.size() == 1) return;
        for (const cplx& r : polyroots::solve(denom_)) {
            double scale = 0.0;
            for (const cplx& c : numer_) scale = std::max(scale, std::abs(c));
            if (std::abs(polyroots::horner(numer_, r)) < 1e-9 * std::max(scale, 1.0))
                throw std::invalid_argument("numerator and denominator share a root");
        }
    }

    std::vector<cplx> numer_, denom_, numer_rev_, denom_rev_;
    std::vector<cplx> dnumer_, ddenom_, dnumer_rev_, ddenom_rev_;
    std::size_t deg_ = 0;
};

inline SpherePoint eval(const RationalMap& f, const SpherePoint& z) { return f.eval(z); }
inline double spherical_deriv(const RationalMap& f, const SpherePoint& z) {
    return f.spherical_deriv(z);
}

/// Critical points with local degrees, in-Julia flags, and the compounded
/// local-degree bound nu over in-Julia critical orbit chains.
struct CriticalSet {
    struct Entry {
        SpherePoint point;
        int local_degree = 2;
        bool in_julia = false;
    };
    std::vector<Entry> points;
    int nu = 2;

    int count_in_julia() const {
        int c = 0;
        for (const auto& e : points) c += e.in_julia ? 1 : 0;
        return c;
    }
    int max_local_degree() const {
        int m = 2;
        for (const auto& e : points) m = std::max(m, e.local_degree);
        return m;
    }
};

struct CriticalSetOptions {
    double julia_tol = 1e-3;      // chordal distance to the Julia sample
    int attraction_iters = 200;   // forward iterations for the attraction test
    int cycle_search = 24;        // max period probed when detecting a cycle
    double cluster_tol = 1e-8;    // root clustering for multiplicities
    int nu_orbit_steps = 256;     // steps when compounding chain degrees
    double collision_tol = 1e-9;  // chordal tolerance for orbit-meets-critical-point
};

namespace detail {

inline bool attracted_to_cycle(const RationalMap& f, const SpherePoint& start,
                               const CriticalSetOptions& opt) {
    SpherePoint z = start;
    for (int i = 0; i < opt.attraction_iters; ++i) z = f.eval(z);
    // look for a near-return and test the cycle multiplier
    std::vector<SpherePoint> tail;
    SpherePoint w = z;
    for (int p = 1; p <= opt.cycle_search; ++p) {
        w = f.eval(w);
        tail.push_back(w);
        if (chordal_dist(w, z) < 1e-6) {
            double log_mult = 0.0;
            SpherePoint u = z;
            for (int k = 0; k < p; ++k) {
                double d = f.spherical_deriv(u);
                if (d == 0.0) return true;  // superattracting
                log_mult += std::log(d);
                u = f.eval(u);
            }
            return log_mult < std::log(0.99);
        }
    }
    return false;
}

}  // namespace detail

/// Critical points of f from the Wronskian P'Q - PQ' (plus infinity when
/// the finite multiplicities do not exhaust 2 deg - 2), flagged against a
/// Julia sample. Throws if the Riemann-Hurwitz count fails.
inline CriticalSet critical_set(const RationalMap& f, const std::vector<SpherePoint>& julia_sample,
                                const CriticalSetOptions& opt = {}) {
    if (julia_sample.empty()) throw std::invalid_argument("critical_set needs a Julia sample");
    const auto& P = f.numer();
    const auto& Q = f.denom();
    auto dP = detail::derivative(P);
    auto dQ = detail::derivative(Q);
    // wronskian = P'Q - PQ'
    std::size_t n = std::max(dP.size() + Q.size(), P.size() + dQ.size());
    std::vector<cplx> w(n, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < dP.size(); ++i)
        for (std::size_t j = 0; j < Q.size(); ++j) w[i + j] += dP[i] * Q[j];
    for (std::size_t i = 0; i < P.size(); ++i)
        for (std::size_t j = 0; j < dQ.size(); ++j) w[i + j] -= P[i] * dQ[j];
    w = polyroots::trim(w);

    CriticalSet cs;
    int mult_total = 0;
    bool wronskian_zero = w.size() == 1 && w[0] == cplx{0.0, 0.0};
    if (!wronskian_zero && w.size() > 1) {
        auto roots = polyroots::solve(w);
        for (const auto& [rep, count] : polyroots::cluster(roots, opt.cluster_tol)) {
            CriticalSet::Entry e;
            e.point = SpherePoint(rep);
            e.local_degree = count + 1;
            cs.points.push_back(e);
            mult_total += count;
        }
    }
    int expected = 2 * static_cast<int>(f.degree()) - 2;
    int at_infinity = expected - mult_total;
    if (at_infinity < 0) {
        std::ostringstream os;
        os << "Riemann-Hurwitz violated: finite critical multiplicity " << mult_total
           << " exceeds " << expected;
        throw std::runtime_error(os.str());
    }
    if (at_infinity > 0) {
        CriticalSet::Entry e;
        e.point = SpherePoint::infinity();
        e.local_degree = at_infinity + 1;
        cs.points.push_back(e);
    }

    for (auto& e : cs.points) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& s : julia_sample) d = std::min(d, chordal_dist(e.point, s));
        e.in_julia = d <= opt.julia_tol && !detail::attracted_to_cycle(f, e.point, opt);
    }

    // nu: compound local degrees along orbit chains of in-Julia critical points
    int nu = cs.max_local_degree();
    for (const auto& start : cs.points) {
        if (!start.in_julia) continue;
        long long chain = start.local_degree;
        SpherePoint z = start.point;
        for (int step = 0; step < opt.nu_orbit_steps && chain < (1LL << 20); ++step) {
            z = f.eval(z);
            for (const auto& other : cs.points) {
                if (!other.in_julia) continue;
                if (chordal_dist(z, other.point) < opt.collision_tol) {
                    chain *= other.local_degree;
                    break;
                }
            }
        }
        nu = std::max(nu, static_cast<int>(std::min(chain, 1LL << 20)));
    }
    cs.nu = nu;
    return cs;
}

}
