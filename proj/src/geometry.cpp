#include "hyprec/geometry.hpp"

#include <algorithm>
#include <numeric>
#include <thread>

#include "hyprec/errors.hpp"

namespace hyprec {

namespace {

double sq_norm_of(const std::vector<double>& c) {
    double s = 0.0;
    for (double v : c) s += v * v;
    return s;
}

void require_in_ball(const std::vector<double>& c, const char* what) {
    for (double v : c)
        if (!std::isfinite(v)) throw Error(ErrorKind::DomainError, std::string(what) + ": non-finite coordinate");
    if (sq_norm_of(c) >= 1.0)
        throw Error(ErrorKind::DomainError, std::string(what) + ": norm >= 1 (outside the open ball)");
}

void require_same_dim(std::size_t a, std::size_t b) {
    if (a != b)
        throw Error(ErrorKind::DimensionError,
                    "dimensionality mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

// acosh(1 + t) for t >= 0 without cancellation near t = 0.
double acosh1p(double t) {
    if (t <= 0.0) return 0.0;
    return std::log1p(t + std::sqrt(t * (t + 2.0)));
}

}  // namespace

double PoincareVector::sq_norm() const { return sq_norm_of(c); }
double KleinVector::sq_norm() const { return sq_norm_of(c); }

bool clamp_to_ball(std::vector<double>& coords, double eps) {
    const double limit = 1.0 - eps;
    const double n = std::sqrt(sq_norm_of(coords));
    if (n < limit) return false;
    const double scale = limit / n;
    for (double& v : coords) v *= scale;
    return true;
}

double poincare_distance(const PoincareVector& x, const PoincareVector& y) {
    require_same_dim(x.dim(), y.dim());
    require_in_ball(x.c, "poincare_distance");
    require_in_ball(y.c, "poincare_distance");
    double diff2 = 0.0;
    for (std::size_t i = 0; i < x.c.size(); ++i) {
        const double d = x.c[i] - y.c[i];
        diff2 += d * d;
    }
    const double denom = (1.0 - x.sq_norm()) * (1.0 - y.sq_norm());
    return acosh1p(2.0 * diff2 / denom);
}

KleinVector poincare_to_klein(const PoincareVector& x) {
    require_in_ball(x.c, "poincare_to_klein");
    const double f = 2.0 / (1.0 + x.sq_norm());
    KleinVector k;
    k.c.reserve(x.c.size());
    for (double v : x.c) k.c.push_back(f * v);
    clamp_to_ball(k.c, kBoundaryGuard);
    return k;
}

PoincareVector klein_to_poincare(const KleinVector& x) {
    require_in_ball(x.c, "klein_to_poincare");
    const double f = 1.0 / (1.0 + std::sqrt(1.0 - x.sq_norm()));
    PoincareVector p;
    p.c.reserve(x.c.size());
    for (double v : x.c) p.c.push_back(f * v);
    clamp_to_ball(p.c, kBoundaryGuard);
    return p;
}

double lorentz_factor(const KleinVector& x) {
    require_in_ball(x.c, "lorentz_factor");
    return 1.0 / std::sqrt(1.0 - x.sq_norm());
}

KleinVector einstein_midpoint(std::span<const KleinVector> points) {
    if (points.empty()) throw Error(ErrorKind::EmptyInput, "einstein_midpoint: no points");
    const std::size_t d = points.front().dim();
    for (const auto& p : points) require_same_dim(d, p.dim());

    // Canonical summation order: indices sorted by coordinate lexicographic
    // order. Bitwise-equal inputs are interchangeable, so any permutation of
    // the input yields the identical floating-point result.
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(points[a].c.begin(), points[a].c.end(),
                                            points[b].c.begin(), points[b].c.end());
    });

    std::vector<double> num(d, 0.0);
    double den = 0.0;
    for (std::size_t idx : order) {
        const KleinVector& p = points[idx];
        const double g = lorentz_factor(p);
        for (std::size_t i = 0; i < d; ++i) num[i] += g * p.c[i];
        den += g;
    }
    KleinVector mid;
    mid.c.resize(d);
    for (std::size_t i = 0; i < d; ++i) mid.c[i] = num[i] / den;
    clamp_to_ball(mid.c, kBoundaryGuard);
    return mid;
}

PoincareVector hyperbolic_average(std::span<const PoincareVector> points) {
    if (points.empty()) throw Error(ErrorKind::EmptyInput, "hyperbolic_average: no points");
    std::vector<KleinVector> klein;
    klein.reserve(points.size());
    for (const auto& p : points) klein.push_back(poincare_to_klein(p));
    return klein_to_poincare(einstein_midpoint(klein));
}

SimilarityMatrix similarity_from_distances(const DistanceMatrix& d) {
    const std::size_t n = d.values.rows();
    double lo = 0.0, hi = 0.0;
    if (n > 0) {
        lo = hi = d.values.at(0, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const double v = d.values.at(i, j);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    }
    SimilarityMatrix s;
    s.labels = d.labels;
    s.values = DenseMatrix(n, n, 1.0);
    const double range = hi - lo;
    if (range < 1e-12) return s;  // indistinguishable entities
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            s.values.at(i, j) = 1.0 - (d.values.at(i, j) - lo) / range;
    return s;
}

DistanceMatrix pairwise_poincare_distances(const std::vector<std::string>& labels,
                                           const std::vector<PoincareVector>& features,
                                           unsigned n_threads) {
    if (labels.size() != features.size())
        throw Error(ErrorKind::DimensionError, "pairwise distances: labels/features size mismatch");
    const std::size_t n = features.size();
    DistanceMatrix d;
    d.labels = labels;
    d.values = DenseMatrix(n, n, 0.0);

    auto fill_rows = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                d.values.at(i, j) = poincare_distance(features[i], features[j]);
    };

    unsigned workers = n_threads == 0 ? std::thread::hardware_concurrency() : n_threads;
    if (workers <= 1 || n < 64) {
        fill_rows(0, n);
    } else {
        workers = std::min<unsigned>(workers, 16);
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + workers - 1) / workers;
        for (unsigned t = 0; t < workers; ++t) {
            const std::size_t lo = std::min<std::size_t>(t * chunk, n);
            const std::size_t hi = std::min<std::size_t>(lo + chunk, n);
            if (lo < hi) pool.emplace_back(fill_rows, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) d.values.at(i, j) = d.values.at(j, i);
    return d;
}

}  // namespace hyprec
