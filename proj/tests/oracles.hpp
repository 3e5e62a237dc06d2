#pragma once

// Reference computations for the tests, written without the library's
// algorithms: brute-force searches, closed forms and matrix exponentials.

#include "vdiff/lattice.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using vdiff::Mat;
using vdiff::Vec;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = std::numbers::pi;

/// Nearest point of {(a, b) : |a| <= b} to (x, y). Exterior points project
/// onto the boundary, so both boundary rays t (1, 1) and t (-1, 1) are
/// searched by bisection on the sign of the slope of the squared distance
/// (a convex function of t); `resolution` receives the final bracket width.
inline std::pair<double, double> cone_nearest_2d(double x, double y, double* resolution = nullptr) {
    if (resolution) *resolution = 0.0;
    if (std::abs(x) <= y) return {x, y};
    double best_a = 0.0, best_b = 0.0, best = x * x + y * y;
    double width = 0.0;
    for (const double side : {1.0, -1.0}) {
        const auto slope = [&](double t) { return (side * t - x) * side + (t - y); };
        double lo = 0.0, hi = 1.0 + std::abs(x) + std::abs(y);
        if (slope(lo) >= 0) hi = lo;
        for (int it = 0; it < 200 && hi - lo > 0; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            (slope(mid) < 0 ? lo : hi) = mid;
        }
        const double t = 0.5 * (lo + hi);
        const double d = (side * t - x) * (side * t - x) + (t - y) * (t - y);
        width = std::max(width, hi - lo);
        if (d < best) {
            best = d;
            best_a = side * t;
            best_b = t;
        }
    }
    if (resolution) *resolution = width;
    return {best_a, best_b};
}

/// Same nearest point by exhaustive search over a uniform grid of spacing `step`
/// on the two boundary rays (plus the point itself when it lies inside).
inline std::pair<double, double> cone_nearest_grid_2d(double x, double y, double step) {
    if (std::abs(x) <= y) return {x, y};
    const double reach = 2.0 * (1.0 + std::abs(x) + std::abs(y));
    const auto count = static_cast<long>(std::ceil(reach / step));
    double best_a = 0.0, best_b = 0.0, best = kInf;
    for (const double side : {1.0, -1.0}) {
        for (long i = 0; i <= count; ++i) {
            const double t = static_cast<double>(i) * step;
            const double d = (side * t - x) * (side * t - x) + (t - y) * (t - y);
            if (d < best) {
                best = d;
                best_a = side * t;
                best_b = t;
            }
        }
    }
    return {best_a, best_b};
}

/// The cone {|u| <= v} in W x W is a product over coordinates, so its
/// nearest point is found coordinate by coordinate.
inline std::pair<Vec, Vec> cone_nearest(const Vec& x, const Vec& y, double* resolution = nullptr) {
    Vec u(x.size()), v(x.size());
    double worst = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double r = 0.0;
        std::tie(u(i), v(i)) = cone_nearest_2d(x(i), y(i), &r);
        worst = std::max(worst, r);
    }
    if (resolution) *resolution = worst;
    return {u, v};
}

/// Decomposition J = conv(base points) + cone(rays) of an order interval.
struct IntervalShape {
    std::vector<Vec> base;
    std::vector<Vec> rays;
};

inline IntervalShape shape(const Vec& lo, const Vec& hi) {
    const Eigen::Index m = lo.size();
    std::vector<std::vector<double>> choices(static_cast<std::size_t>(m));
    IntervalShape s;
    for (Eigen::Index i = 0; i < m; ++i) {
        auto& c = choices[static_cast<std::size_t>(i)];
        const bool fl = std::isfinite(lo(i)), fh = std::isfinite(hi(i));
        if (fl) c.push_back(lo(i));
        if (fh && (!fl || hi(i) != lo(i))) c.push_back(hi(i));
        if (!fl && !fh) c.push_back(0.0);
        if (!fh) s.rays.push_back(Vec::Unit(m, i));
        if (!fl) s.rays.push_back(-Vec::Unit(m, i));
    }
    std::vector<std::size_t> idx(static_cast<std::size_t>(m), 0);
    while (true) {
        Vec v(m);
        for (Eigen::Index i = 0; i < m; ++i) v(i) = choices[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
        s.base.push_back(v);
        std::size_t k = 0;
        for (; k < idx.size(); ++k) {
            if (++idx[k] < choices[k].size()) break;
            idx[k] = 0;
        }
        if (k == idx.size()) break;
    }
    return s;
}

inline bool in_interval(const Vec& x, const Vec& lo, const Vec& hi, double tol) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x(i) < lo(i) - tol || x(i) > hi(i) + tol) return false;
    }
    return true;
}

/// Recession cone of [lo, hi].
inline bool in_recession(const Vec& r, const Vec& lo, const Vec& hi, double tol) {
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        if (std::isfinite(hi(i)) && r(i) > tol) return false;
        if (std::isfinite(lo(i)) && r(i) < -tol) return false;
    }
    return true;
}

/// M [lo, hi] subset [lo, hi], decided on base points and rays.
inline bool maps_interval(const Mat& m, const Vec& lo, const Vec& hi, double tol = 1e-9) {
    const IntervalShape s = shape(lo, hi);
    for (const Vec& b : s.base) {
        if (!in_interval(m * b, lo, hi, tol)) return false;
    }
    for (const Vec& r : s.rays) {
        if (!in_recession(m * r, lo, hi, tol)) return false;
    }
    return true;
}

/// e^{tG} [lo, hi] subset [lo, hi] for t on a logarithmic grid in [1e-5, 1].
inline bool exp_preserves_interval(const Mat& g, const Vec& lo, const Vec& hi) {
    for (int k = 0; k <= 50; ++k) {
        const double t = std::pow(10.0, -5.0 + 5.0 * k / 50.0);
        const Mat e = (t * g).exp();
        const double tol = 1e-12 * std::max(1.0, e.cwiseAbs().maxCoeff()) * (1.0 + lo.cwiseAbs().cwiseMin(1e3).maxCoeff() +
                                                                             hi.cwiseAbs().cwiseMin(1e3).maxCoeff());
        if (!maps_interval(e, lo, hi, tol)) return false;
    }
    return true;
}

/// Every nonempty proper index set I: is span{e_i : i in I} invariant under
/// every matrix of the family?
inline bool has_invariant_coordinate_subspace(const std::vector<Mat>& family, int m, double tol = 1e-10) {
    for (unsigned mask = 1; mask + 1 < (1u << m); ++mask) {
        bool invariant = true;
        for (const Mat& a : family) {
            for (int j = 0; j < m && invariant; ++j) {
                if (!(mask >> j & 1u)) continue;
                for (int i = 0; i < m; ++i) {
                    if (!(mask >> i & 1u) && std::abs(a(i, j)) > tol) {
                        invariant = false;
                        break;
                    }
                }
            }
            if (!invariant) break;
        }
        if (invariant) return true;
    }
    return false;
}

/// Coordinate subspaces are exactly the closed ideals of R^m.
inline bool is_coordinate_subspace(const Mat& projection, double tol = 1e-9) {
    const Eigen::Index m = projection.rows();
    Mat d = Mat::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) d(i, i) = projection(i, i) > 0.5 ? 1.0 : 0.0;
    return (projection - d).cwiseAbs().maxCoeff() <= tol;
}

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return out;
}

/// Largest singular value as the square root of the top eigenvalue of A^T A.
inline double two_norm(const Mat& a) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a.transpose() * a);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

/// Dirichlet P1 chain on a uniform mesh of n elements.
inline double dirichlet_lumped(int k, int n) {
    const double h = 1.0 / n;
    const double s = std::sin(k * kPi * h / 2.0);
    return 4.0 / (h * h) * s * s;
}

inline double dirichlet_consistent(int k, int n) {
    const double h = 1.0 / n;
    const double c = std::cos(k * kPi * h);
    return 6.0 / (h * h) * (1.0 - c) / (2.0 + c);
}

/// Neumann chain with lumped mass (half masses at the ends): k = 0..n.
inline double neumann_lumped(int k, int n) { return dirichlet_lumped(k, n); }

inline Vec random_vec(Eigen::Index m, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    Vec v(m);
    for (Eigen::Index i = 0; i < m; ++i) v(i) = g(rng);
    return v;
}

inline Mat random_mat(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Mat a(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) a(i, j) = g(rng);
    }
    return a;
}

inline Mat random_int_mat(Eigen::Index m, int lo, int hi, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> u(lo, hi);
    Mat a(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) a(i, j) = u(rng);
    }
    return a;
}

}  // namespace oracle
