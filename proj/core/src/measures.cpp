#include "mfg/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "mfg/errors.hpp"
#include "mfg/spectral.hpp"

namespace mfg {

namespace {

/// Cumulative mass difference through node i, and its L1 distance to the median.
double cycleFlowCost(std::span<const double> diff, double h) {
    const std::size_t n = diff.size();
    std::vector<double> R(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += h * diff[i];
        R[i] = acc;
    }
    std::vector<double> sorted(R);
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2),
                     sorted.end());
    const double c = sorted[n / 2];
    double s = 0.0;
    for (double r : R) s += std::abs(r - c);
    return h * s;
}

struct Quantile {
    std::vector<double> cum;  // cum[k] = mass of atoms 0..k
    std::vector<double> x;
    double length;

    Quantile(const GridDensity& m) : cum(m.size()), x(m.grid().nodes()), length(m.grid().length()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            acc += m.grid().spacing() * m[i];
            cum[i] = acc;
        }
        cum.back() = 1.0;
    }

    /// Generalized inverse extended by Q(u + 1) = Q(u) + length.
    [[nodiscard]] double operator()(double u) const {
        const double fl = std::floor(u);
        double r = u - fl;
        if (r <= 0.0) {
            r += 1.0;
            return at(r) + (fl - 1.0) * length;
        }
        return at(r) + fl * length;
    }

    [[nodiscard]] double at(double r) const {
        auto it = std::lower_bound(cum.begin(), cum.end(), r);
        if (it == cum.end()) --it;
        return x[static_cast<std::size_t>(it - cum.begin())];
    }
};

double circularQuantileCost(const Quantile& q1, const Quantile& q2, double theta) {
    std::vector<double> br;
    br.reserve(2 * q1.cum.size() + 4);
    br.push_back(0.0);
    br.push_back(1.0);
    for (double c : q1.cum) {
        if (c > 0.0 && c < 1.0) br.push_back(c);
    }
    for (double c : q2.cum) {
        double b = c - theta;
        b -= std::floor(b);
        if (b > 0.0 && b < 1.0) br.push_back(b);
    }
    std::sort(br.begin(), br.end());
    double cost = 0.0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        const double len = br[i + 1] - br[i];
        if (len <= 0.0) continue;
        const double mid = 0.5 * (br[i] + br[i + 1]);
        const double d = q1(mid) - q2(mid + theta);
        cost += len * d * d;
    }
    return cost;
}

double supRefined(std::span<const double> f) {
    const auto fine = spectral::refine(f, 4);
    double s = 0.0;
    for (double v : fine) s = std::max(s, std::abs(v));
    return s;
}

}  // namespace

double wasserstein1(const GridDensity& m1, const GridDensity& m2) {
    requireSameGrid(m1.grid(), m2.grid(), "wasserstein1");
    std::vector<double> diff(m1.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = m1[i] - m2[i];
    return cycleFlowCost(diff, m1.grid().spacing());
}

double wasserstein2(const GridDensity& m1, const GridDensity& m2) {
    requireSameGrid(m1.grid(), m2.grid(), "wasserstein2");
    if (m1.vector() == m2.vector()) return 0.0;
    const Quantile q1(m1), q2(m2);
    auto cost = [&](double th) { return circularQuantileCost(q1, q2, th); };

    // Coarse scan brackets the minimum of the convex piecewise-linear cost.
    const int scan = static_cast<int>(8 * m1.size());
    double bestTh = -1.0, best = cost(-1.0);
    for (int i = 1; i <= scan; ++i) {
        const double th = -1.0 + 2.0 * i / scan;
        const double c = cost(th);
        if (c < best) {
            best = c;
            bestTh = th;
        }
    }
    const double step = 2.0 / scan;
    double lo = bestTh - step, hi = bestTh + step;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    double fa = cost(a), fb = cost(b);
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        if (fa < fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = cost(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = cost(b);
        }
    }
    best = std::min({best, fa, fb, cost(0.5 * (lo + hi))});
    return std::sqrt(std::max(0.0, best));
}

GridDensity rotateCells(const GridDensity& m, std::ptrdiff_t k) {
    const auto& g = m.grid();
    std::vector<double> v(m.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = m[g.index(static_cast<std::ptrdiff_t>(i) - k)];
    }
    return {g, std::move(v)};
}

GridFunction rotateCells(const GridFunction& f, std::ptrdiff_t k) {
    GridFunction out(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) {
        out[i] = f[f.grid.index(static_cast<std::ptrdiff_t>(i) - k)];
    }
    return out;
}

GridSignedMeasure rotateCells(const GridSignedMeasure& m, std::ptrdiff_t k) {
    const auto& g = m.grid();
    std::vector<double> v(m.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] = m[g.index(static_cast<std::ptrdiff_t>(i) - k)];
    }
    return {g, std::move(v)};
}

namespace {

std::vector<double> translateValues(std::span<const double> m, const TorusGrid& g, double z) {
    const double s = g.wrap(z) / g.spacing();
    double q = std::floor(s);
    double f = s - q;
    if (f < 1e-14) f = 0.0;
    if (f > 1.0 - 1e-14) {
        f = 0.0;
        q += 1.0;
    }
    const auto qi = static_cast<std::ptrdiff_t>(q);
    std::vector<double> v(m.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto ii = static_cast<std::ptrdiff_t>(i);
        v[i] = (1.0 - f) * m[g.index(ii - qi)] + f * m[g.index(ii - qi - 1)];
    }
    return v;
}

}  // namespace

GridDensity pushforwardTranslate(const GridDensity& m, double z) {
    auto v = translateValues(m.values(), m.grid(), z);
    return GridDensity::normalized(m.grid(), std::move(v));
}

GridSignedMeasure pushforwardTranslate(const GridSignedMeasure& m, double z) {
    return {m.grid(), translateValues(m.values(), m.grid(), z)};
}

double integrateAgainst(const GridDensity& m, const GridFunction& f) {
    requireSameGrid(m.grid(), f.grid, "integrateAgainst");
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) s += f[i] * m[i];
    return m.grid().spacing() * s;
}

double integrateAgainst(const GridSignedMeasure& m, const GridFunction& f) {
    requireSameGrid(m.grid(), f.grid, "integrateAgainst");
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) s += f[i] * m[i];
    return m.grid().spacing() * s;
}

double moment2(const GridDensity& m) {
    const auto& g = m.grid();
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double d = g.wrapSigned(g.node(i));
        s += d * d * m[i];
    }
    return std::sqrt(g.spacing() * s);
}

double antiderivativeNorm(const GridSignedMeasure& rho) {
    return cycleFlowCost(rho.values(), rho.grid().spacing());
}

DualNormEstimate dualNormMinusK(const GridSignedMeasure& rho, int k, int candidateCount,
                                NormConvention convention, std::uint64_t seed) {
    if (k < 1 || k > 3) throw InvalidArgument("dualNormMinusK: k must be in {1,2,3}");
    const auto& g = rho.grid();
    const std::size_t n = g.cells();
    const double h = g.spacing();
    const double L = g.length();
    const int r0 = convention == NormConvention::Full ? 0 : 1;
    const bool zeroMass = std::abs(rho.totalMass()) < 1e-13;
    if (convention == NormConvention::Homogeneous && !zeroMass) {
        throw InvalidArgument("dualNormMinusK: homogeneous convention needs a zero-mass measure");
    }

    double best = 0.0;
    auto consider = [&](std::vector<double> phi) {
        auto score = [&](const std::vector<double>& p) {
            double norm = 0.0;
            for (int r = r0; r <= k; ++r) {
                if (r == 1) {
                    // Lipschitz constant of the piecewise-linear interpolant.
                    double lip = 0.0;
                    for (std::size_t i = 0; i < n; ++i) lip = std::max(lip, std::abs(p[(i + 1) % n] - p[i]));
                    norm += lip / h;
                } else {
                    norm += supRefined(r == 0 ? p : spectral::derivative(p, L, r));
                }
            }
            if (!(norm > 0.0)) return 0.0;
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += p[i] * rho[i];
            return std::abs(h * s) / norm;
        };
        best = std::max(best, score(phi));
        if (r0 == 0) {
            // Centring by the midrange lowers sup|φ| without changing D^rφ.
            const auto [lo, hi] = std::minmax_element(phi.begin(), phi.end());
            const double c = 0.5 * (*lo + *hi);
            for (double& v : phi) v -= c;
            best = std::max(best, score(phi));
        }
    };

    const auto x = g.nodes();
    const double w = 2.0 * std::numbers::pi / L;
    if (r0 == 0) consider(std::vector<double>(n, 1.0));
    const int maxMode = std::min<int>(16, static_cast<int>(n / 2) - 1);
    for (int j = 1; j <= maxMode; ++j) {
        std::vector<double> c(n), s(n);
        for (std::size_t i = 0; i < n; ++i) {
            c[i] = std::cos(w * j * x[i]);
            s[i] = std::sin(w * j * x[i]);
        }
        consider(std::move(c));
        consider(std::move(s));
    }

    // Smoothed sign of the centred antiderivative: near-optimal for k = 1.
    std::vector<double> R(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += h * rho[i];
        R[i] = acc;
    }
    std::vector<double> sorted(R);
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2),
                     sorted.end());
    const double med = sorted[n / 2];
    double scale = 0.0;
    for (double r : R) scale = std::max(scale, std::abs(r - med));
    if (scale > 0.0) {
        for (double eps : {1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3}) {
            std::vector<double> inc(n);
            double mean = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                inc[i] = -std::tanh((R[i] - med) / (eps * scale));
                mean += inc[i] / static_cast<double>(n);
            }
            std::vector<double> phi(n);
            double p = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                phi[i] = p;
                p += h * (inc[i] - mean);
            }
            consider(std::move(phi));
        }
    }

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int c = 0; c < candidateCount; ++c) {
        std::vector<double> phi(n, 0.0);
        for (int j = 1; j <= maxMode; ++j) {
            const double a = normal(rng) / (j * j), b = normal(rng) / (j * j);
            for (std::size_t i = 0; i < n; ++i) {
                phi[i] += a * std::cos(w * j * x[i]) + b * std::sin(w * j * x[i]);
            }
        }
        consider(std::move(phi));
    }
    return {best, k, candidateCount};
}

}  // namespace mfg
