#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace cejulia::polyroots {

using cplx = std::complex<double>;

inline cplx horner(const std::vector<cplx>& coeffs, cplx z) {
    cplx acc{0.0, 0.0};
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * z + coeffs[i];
    return acc;
}

// Drop numerically-zero leading coefficients (ascending storage: the tail).
inline std::vector<cplx> trim(const std::vector<cplx>& coeffs, double rel_tol = 1e-13) {
    double scale = 0.0;
    for (const cplx& c : coeffs) scale = std::max(scale, std::abs(c));
    std::vector<cplx> out = coeffs;
    while (out.size() > 1 && std::abs(out.back()) <= rel_tol * scale) out.pop_back();
    return out;
}

inline void solve_quadratic(cplx a, cplx b, cplx c, cplx& r0, cplx& r1) {
    // b-conjugate sign choice avoids cancellation in the larger root.
    cplx sq = std::sqrt(b * b - 4.0 * a * c);
    cplx big = (std::real(std::conj(b) * sq) >= 0.0) ? -0.5 * (b + sq) : -0.5 * (b - sq);
    if (big == cplx{0.0, 0.0}) {
        r0 = r1 = cplx{0.0, 0.0};
        return;
    }
    r0 = big / a;
    r1 = c / big;
}

// All complex roots of a polynomial given by ascending coefficients.
// Degree 1 and 2 are closed-form; higher degrees use Durand-Kerner
// simultaneous iteration (degrees here stay tiny, so no deflation).
inline std::vector<cplx> solve(const std::vector<cplx>& coeffs_in, int max_iter = 400,
                               double tol = 1e-14) {
    std::vector<cplx> a = trim(coeffs_in);
    std::size_t deg = a.size() - 1;
    // roots at the origin split off exactly
    std::size_t zero_roots = 0;
    {
        double scale = 0.0;
        for (const cplx& c : a) scale = std::max(scale, std::abs(c));
        while (zero_roots < deg && std::abs(a[zero_roots]) <= 1e-300 * std::max(scale, 1.0))
            ++zero_roots;
    }
    std::vector<cplx> roots(zero_roots, cplx{0.0, 0.0});
    if (zero_roots > 0) a.erase(a.begin(), a.begin() + static_cast<long>(zero_roots));
    deg = a.size() - 1;
    if (deg == 0) return roots;
    if (deg == 1) {
        roots.push_back(-a[0] / a[1]);
        return roots;
    }
    if (deg == 2) {
        cplx r0, r1;
        solve_quadratic(a[2], a[1], a[0], r0, r1);
        roots.push_back(r0);
        roots.push_back(r1);
        return roots;
    }

    double radius = 0.0;
    for (std::size_t i = 0; i < deg; ++i) radius = std::max(radius, std::abs(a[i] / a[deg]));
    radius = 1.0 + radius;

    std::vector<cplx> w(deg);
    const cplx seed{0.4, 0.9};
    cplx p{1.0, 0.0};
    for (std::size_t i = 0; i < deg; ++i) {
        p *= seed;
        w[i] = radius * p / std::abs(p) * (0.5 + 0.5 * static_cast<double>(i + 1) / deg);
    }

    for (int it = 0; it < max_iter; ++it) {
        double worst = 0.0;
        for (std::size_t i = 0; i < deg; ++i) {
            cplx denom{1.0, 0.0};
            for (std::size_t j = 0; j < deg; ++j)
                if (j != i) denom *= (w[i] - w[j]);
            cplx val = horner(a, w[i]) / a[deg];
            if (denom == cplx{0.0, 0.0}) {
                w[i] += cplx{1e-8, 1e-8};
                worst = 1.0;
                continue;
            }
            cplx delta = val / denom;
            w[i] -= delta;
            worst = std::max(worst, std::abs(delta));
        }
        if (worst < tol * radius) break;
        if (it == max_iter - 1 && worst > 1e-6 * radius) {
            std::ostringstream os;
            os << "polynomial root iteration failed to converge; coefficients:";
            for (const cplx& c : coeffs_in) os << " (" << c.real() << "," << c.imag() << ")";
            throw std::runtime_error(os.str());
        }
    }
    roots.insert(roots.end(), w.begin(), w.end());
    return roots;
}

// Greedy clustering of near-coincident roots: returns (representative, count).
inline std::vector<std::pair<cplx, int>> cluster(const std::vector<cplx>& roots, double tol) {
    std::vector<std::pair<cplx, int>> out;
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        cplx sum = roots[i];
        int count = 1;
        used[i] = true;
        for (std::size_t j = i + 1; j < roots.size(); ++j) {
            if (!used[j] && std::abs(roots[j] - roots[i]) <= tol) {
                sum += roots[j];
                ++count;
                used[j] = true;
            }
        }
        out.emplace_back(sum / static_cast<double>(count), count);
    }
    return out;
}

}
