#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace hyprec {

// Ingested vectors whose norm reaches 1 - kClampEps are radially rescaled
// back onto that radius: the distance denominator and the Lorentz factor both
// diverge at the boundary of the ball.
inline constexpr double kClampEps = 1e-5;

// Conversion outputs only guard the open-ball invariant itself. Anything
// stronger would corrupt legitimate values: a Poincare norm of 0.999 maps to
// a Klein norm of ~1 - 5e-7, which must survive the inverse translation.
inline constexpr double kBoundaryGuard = 1e-15;

// Point in the Poincare ball model (open unit ball, conformal).
struct PoincareVector {
    std::vector<double> c;

    std::size_t dim() const { return c.size(); }
    double sq_norm() const;
    double norm() const { return std::sqrt(sq_norm()); }
};

// The same space in Klein coordinates; geodesics are straight chords and the
// Einstein midpoint takes its simplest form here.
struct KleinVector {
    std::vector<double> c;

    std::size_t dim() const { return c.size(); }
    double sq_norm() const;
    double norm() const { return std::sqrt(sq_norm()); }
};

// Rescales coords onto radius 1-eps when the norm reaches it.
// Returns true when a rescale happened.
bool clamp_to_ball(std::vector<double>& coords, double eps = kClampEps);

// d(x,y) = acosh(1 + 2|x-y|^2 / ((1-|x|^2)(1-|y|^2))), evaluated through
// log1p so nearby points do not lose precision in acosh(1 + tiny).
double poincare_distance(const PoincareVector& x, const PoincareVector& y);

// Model translations; results stay strictly inside the open ball.
KleinVector poincare_to_klein(const PoincareVector& x);
PoincareVector klein_to_poincare(const KleinVector& x);

// gamma = 1 / sqrt(1 - |x|^2), the Einstein-midpoint weight. >= 1.
double lorentz_factor(const KleinVector& x);

// (sum gamma_i x_i) / (sum gamma_i). Summation runs in a canonical order
// (inputs sorted lexicographically by coordinates), so the result is
// bit-identical under any permutation of the input.
KleinVector einstein_midpoint(std::span<const KleinVector> points);

// Poincare-side averaging: translate to Klein, take the Einstein midpoint,
// translate back.
PoincareVector hyperbolic_average(std::span<const PoincareVector> points);

// Dense row-major matrix of doubles.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    const std::vector<double>& data() const { return data_; }

    bool operator==(const DenseMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Symmetric nonnegative pairwise distances with entity labels on both axes.
struct DistanceMatrix {
    std::vector<std::string> labels;
    DenseMatrix values;
};

// Entries in [0,1]; 1 on the diagonal in the generic case.
struct SimilarityMatrix {
    std::vector<std::string> labels;
    DenseMatrix values;
};

// S = 1 - (D - min) / (max - min), min/max over all entries of D.
// When max - min < 1e-12 every entity is indistinguishable and S is all ones.
SimilarityMatrix similarity_from_distances(const DistanceMatrix& d);

// All-pairs Poincare distances. Rows are filled in parallel when n_threads
// != 1 (0 picks a hardware-based count); every entry is computed
// independently so the output does not depend on the thread count.
DistanceMatrix pairwise_poincare_distances(const std::vector<std::string>& labels,
                                           const std::vector<PoincareVector>& features,
                                           unsigned n_threads = 0);

}  // namespace hyprec
