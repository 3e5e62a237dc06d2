#include "vdiff/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

namespace vdiff {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
    if (a != b) {
        throw std::invalid_argument(std::string(what) + ": ambient dimension mismatch (" +
                                    std::to_string(a) + " vs " + std::to_string(b) + ")");
    }
}

/// Residual of v after removing its components along the orthonormal
/// columns of q; done twice to keep orthogonality at machine precision.
Vec orthogonal_residual(const Mat& q, Vec v) {
    for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index j = 0; j < q.cols(); ++j) v -= q.col(j).dot(v) * q.col(j);
    }
    return v;
}

Mat orthonormalize(const Mat& columns) {
    Mat q(columns.rows(), 0);
    for (Eigen::Index j = 0; j < columns.cols(); ++j) {
        const Vec g = columns.col(j);
        const double scale = g.norm();
        if (scale == 0.0) continue;
        Vec r = orthogonal_residual(q, g);
        if (r.norm() <= kRankTol * scale) continue;
        q.conservativeResize(Eigen::NoChange, q.cols() + 1);
        q.col(q.cols() - 1) = r / r.norm();
    }
    return q;
}

bool is_coordinate_subspace(const Subspace& y) {
    const Mat& p = y.projection();
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            const double target = (i == j) ? std::round(p(i, j)) : 0.0;
            if (std::abs(p(i, j) - target) > kMembershipTol) return false;
        }
    }
    return true;
}

std::vector<Vec> sign_combinations(const Mat& basis, std::size_t limit) {
    std::vector<Vec> out;
    const auto k = basis.cols();
    if (k == 0 || k > 20 || (std::size_t{1} << k) > limit) return out;
    for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        Vec v = Vec::Zero(basis.rows());
        for (Eigen::Index j = 0; j < k; ++j) {
            v += ((mask >> j) & 1U ? -1.0 : 1.0) * basis.col(j);
        }
        out.push_back(std::move(v));
    }
    return out;
}

Vec random_combination(const Mat& basis, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec c(basis.cols());
    for (Eigen::Index j = 0; j < c.size(); ++j) c(j) = normal(rng);
    return basis * c;
}

double log_uniform_scale(std::mt19937_64& rng, double lo_exp, double hi_exp) {
    std::uniform_real_distribution<double> u(lo_exp, hi_exp);
    return std::pow(10.0, u(rng));
}

Vec random_point_of_interval(const OrderInterval& j, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, 2);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double s = 1.0 + j.scale();
    Vec x(j.dim());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double lo = j.lower()(i);
        const double hi = j.upper()(i);
        const bool flo = std::isfinite(lo);
        const bool fhi = std::isfinite(hi);
        const int choice = pick(rng);
        if (flo && fhi) {
            x(i) = choice == 0 ? lo : (choice == 1 ? hi : lo + (hi - lo) * unit(rng));
        } else if (flo) {
            x(i) = choice == 0 ? lo : lo + s * log_uniform_scale(rng, -1.0, 2.0) * expo(rng);
        } else if (fhi) {
            x(i) = choice == 0 ? hi : hi - s * log_uniform_scale(rng, -1.0, 2.0) * expo(rng);
        } else {
            x(i) = s * log_uniform_scale(rng, -1.0, 2.0) * normal(rng);
        }
    }
    return x;
}

Vec random_ambient_point(Eigen::Index m, double scale, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double s = scale * log_uniform_scale(rng, -1.0, 1.5);
    Vec x(m);
    for (Eigen::Index i = 0; i < m; ++i) x(i) = s * normal(rng);
    return x;
}

double set_scale(const ConvexSet& set) {
    if (const auto* j = std::get_if<OrderInterval>(&set)) return 1.0 + j->scale();
    return 1.0;
}

/// Points of `set` that exercise its extreme structure: vertices for
/// intervals, sign combinations of the basis at a few scales for subspaces.
std::vector<Vec> structured_points(const ConvexSet& set) {
    if (const auto* j = std::get_if<OrderInterval>(&set)) {
        return interval_vertices(*j, 1e3 * (1.0 + j->scale()));
    }
    const auto& y = std::get<Subspace>(set);
    std::vector<Vec> out;
    for (const double s : {0.5, 1.0, 3.0, 30.0}) {
        for (Eigen::Index j = 0; j < y.dim(); ++j) out.push_back(s * y.basis().col(j));
        for (auto& v : sign_combinations(y.basis(), 256)) out.push_back(s * v);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Lattice operations

LatticeParts lattice_decompose(const LatticeVector& x) {
    LatticeParts parts;
    parts.pos = x.cwiseMax(0.0);
    parts.neg = (-x).cwiseMax(0.0);
    parts.abs = parts.pos + parts.neg;
    parts.sign = lattice_sign(x);
    return parts;
}

LatticeVector lattice_sign(const LatticeVector& x) { return x.unaryExpr(&sgn); }

// ---------------------------------------------------------------------------
// Subspace

Subspace::Subspace(Mat basis, Eigen::Index ambient)
    : basis_(std::move(basis)), projection_(Mat::Zero(ambient, ambient)) {
    if (basis_.cols() > 0) projection_ = basis_ * basis_.transpose();
}

Subspace Subspace::span(const std::vector<LatticeVector>& generators, Eigen::Index ambient) {
    if (generators.empty()) {
        if (ambient < 1) throw std::invalid_argument("Subspace::span: ambient dimension must be >= 1");
        return zero(ambient);
    }
    if (ambient < 0) ambient = generators.front().size();
    Mat columns(ambient, static_cast<Eigen::Index>(generators.size()));
    for (std::size_t i = 0; i < generators.size(); ++i) {
        require_same_dim(generators[i].size(), ambient, "Subspace::span");
        columns.col(static_cast<Eigen::Index>(i)) = generators[i];
    }
    return Subspace(orthonormalize(columns), ambient);
}

Subspace Subspace::zero(Eigen::Index ambient) { return Subspace(Mat(ambient, 0), ambient); }

Subspace Subspace::whole(Eigen::Index ambient) {
    return Subspace(Mat::Identity(ambient, ambient), ambient);
}

Subspace Subspace::column_span(const Mat& columns) {
    return Subspace(orthonormalize(columns), columns.rows());
}

bool Subspace::contains(const LatticeVector& v, double rel_tol) const {
    require_same_dim(v.size(), ambient_dim(), "Subspace::contains");
    return (v - projection_ * v).norm() <= rel_tol * (1.0 + v.norm());
}

Subspace Subspace::orthogonal_complement() const {
    const Eigen::Index m = ambient_dim();
    if (dim() == 0) return whole(m);
    if (dim() == m) return zero(m);
    return Subspace(null_space(basis_.transpose()), m);
}

Subspace make_subspace(const std::vector<LatticeVector>& generators, Eigen::Index ambient) {
    return Subspace::span(generators, ambient);
}

Mat null_space(const Mat& a, double tol) {
    if (a.rows() == 0) return Mat::Identity(a.cols(), a.cols());
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cutoff = tol * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv(rank) > cutoff) ++rank;
    return svd.matrixV().rightCols(a.cols() - rank);
}

Subspace intersect(const Subspace& a, const Subspace& b) {
    require_same_dim(a.ambient_dim(), b.ambient_dim(), "intersect");
    const Eigen::Index m = a.ambient_dim();
    if (a.dim() == 0 || b.dim() == 0) return Subspace::zero(m);
    // v = Qa c lies in b iff (I - Pb) Qa c = 0.
    const Mat k = null_space((Mat::Identity(m, m) - b.projection()) * a.basis());
    return Subspace::column_span(a.basis() * k);
}

// ---------------------------------------------------------------------------
// Order intervals

OrderInterval::OrderInterval(LatticeVector lower, LatticeVector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    require_same_dim(lower_.size(), upper_.size(), "OrderInterval");
    for (Eigen::Index i = 0; i < lower_.size(); ++i) {
        if (std::isnan(lower_(i)) || std::isnan(upper_(i)) || lower_(i) > upper_(i) ||
            lower_(i) == kInf || upper_(i) == -kInf) {
            throw std::invalid_argument("OrderInterval: empty in coordinate " + std::to_string(i));
        }
    }
}

OrderInterval OrderInterval::positive_cone(Eigen::Index m) {
    return {Vec::Zero(m), Vec::Constant(m, kInf)};
}

OrderInterval OrderInterval::negative_cone(Eigen::Index m) {
    return {Vec::Constant(m, -kInf), Vec::Zero(m)};
}

OrderInterval OrderInterval::symmetric_box(Eigen::Index m, double radius) {
    return {Vec::Constant(m, -radius), Vec::Constant(m, radius)};
}

bool OrderInterval::contains(const LatticeVector& x, double margin) const {
    return violation(x) <= margin;
}

double OrderInterval::violation(const LatticeVector& x) const {
    require_same_dim(x.size(), dim(), "OrderInterval::violation");
    double worst = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        worst = std::max({worst, lower_(i) - x(i), x(i) - upper_(i)});
    }
    return worst;
}

LatticeVector OrderInterval::project(const LatticeVector& x) const {
    require_same_dim(x.size(), dim(), "OrderInterval::project");
    return x.cwiseMax(lower_).cwiseMin(upper_);
}

bool OrderInterval::contains_zero() const {
    return (lower_.array() <= 0.0).all() && (upper_.array() >= 0.0).all();
}

bool OrderInterval::is_positive_cone() const {
    return (lower_.array() == 0.0).all() && (upper_.array() == kInf).all();
}

bool OrderInterval::is_negative_cone() const {
    return (lower_.array() == -kInf).all() && (upper_.array() == 0.0).all();
}

bool OrderInterval::is_symmetric_box() const {
    if (dim() == 0) return true;
    const double r = upper_(0);
    return std::isfinite(r) && r > 0.0 && (upper_.array() == r).all() &&
           (lower_.array() == -r).all();
}

double OrderInterval::scale() const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < dim(); ++i) {
        if (std::isfinite(lower_(i))) s = std::max(s, std::abs(lower_(i)));
        if (std::isfinite(upper_(i))) s = std::max(s, std::abs(upper_(i)));
    }
    return s;
}

LatticeVector project_interval(const OrderInterval& interval, const LatticeVector& x) {
    return interval.project(x);
}

std::vector<LatticeVector> interval_vertices(const OrderInterval& interval, double reach,
                                             std::size_t limit) {
    const Eigen::Index m = interval.dim();
    std::vector<std::vector<double>> choices(static_cast<std::size_t>(m));
    std::size_t total = 1;
    for (Eigen::Index i = 0; i < m; ++i) {
        auto& c = choices[static_cast<std::size_t>(i)];
        const double lo = interval.lower()(i);
        const double hi = interval.upper()(i);
        if (std::isfinite(lo)) c.push_back(lo);
        if (std::isfinite(hi) && hi != lo) c.push_back(hi);
        if (!std::isfinite(lo)) c.push_back((std::isfinite(hi) ? hi : 0.0) - reach);
        if (!std::isfinite(hi)) c.push_back((std::isfinite(lo) ? lo : 0.0) + reach);
        total *= c.size();
        if (total > limit) return {};
    }
    std::vector<LatticeVector> out;
    out.reserve(total);
    std::vector<std::size_t> idx(static_cast<std::size_t>(m), 0);
    for (std::size_t n = 0; n < total; ++n) {
        Vec v(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            v(i) = choices[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
        }
        out.push_back(std::move(v));
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (++idx[i] < choices[i].size()) break;
            idx[i] = 0;
        }
    }
    return out;
}

std::pair<LatticeVector, LatticeVector> project_domination_cone(const LatticeVector& x,
                                                                const LatticeVector& y) {
    require_same_dim(x.size(), y.size(), "project_domination_cone");
    const Vec ax = x.cwiseAbs();
    const Vec sx = lattice_sign(x);
    Vec u = (0.5 * (ax + ax.cwiseMin(y))).cwiseMax(0.0).cwiseProduct(sx);
    Vec v = (0.5 * (ax.cwiseMax(y) + y)).cwiseMax(0.0);
    return {std::move(u), std::move(v)};
}

// ---------------------------------------------------------------------------
// Invariance tests for matrices

bool is_positive_operator(const Mat& m) { return m.size() == 0 || m.minCoeff() >= -1e-12; }

bool leaves_box_invariant(const Mat& m) {
    return m.size() == 0 || m.cwiseAbs().rowwise().sum().maxCoeff() <= 1.0 + 1e-12;
}

bool interval_invariant(const Mat& m, const OrderInterval& interval, int samples,
                        std::uint64_t seed) {
    if (m.rows() != m.cols()) throw std::invalid_argument("interval_invariant: M must be square");
    require_same_dim(m.rows(), interval.dim(), "interval_invariant");
    if (samples < 1) throw std::invalid_argument("interval_invariant: samples must be >= 1");

    if (interval.is_positive_cone() || interval.is_negative_cone()) return is_positive_operator(m);
    if (interval.is_symmetric_box()) return leaves_box_invariant(m);

    const auto image_outside = [&](const Vec& x) {
        const double tol = 1e-9 * std::max(1.0, x.cwiseAbs().maxCoeff());
        return interval.violation(m * x) > tol;
    };
    const double reach = 1e3 * (1.0 + interval.scale());
    for (const auto& v : interval_vertices(interval, reach)) {
        if (image_outside(v)) return false;
    }
    std::mt19937_64 rng(seed);
    for (int s = 0; s < samples; ++s) {
        if (image_outside(random_point_of_interval(interval, rng))) return false;
    }
    return true;
}

bool semigroup_preserves_interval(const Mat& generator, const OrderInterval& interval) {
    const Eigen::Index m = interval.dim();
    if (generator.rows() != m || generator.cols() != m) {
        throw std::invalid_argument("semigroup_preserves_interval: generator must be m x m");
    }
    const double tol = 1e-12 * std::max(1.0, generator.cwiseAbs().maxCoeff()) * (1.0 + interval.scale());
    const auto& lo = interval.lower();
    const auto& hi = interval.upper();
    // Supremum of sum_{j != i} g_ij x_j over the face; +inf if unbounded.
    const auto face_sup = [&](Eigen::Index i, double sign) {
        double sup = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (j == i) continue;
            const double g = sign * generator(i, j);
            if (std::abs(g) <= 1e-14) continue;
            const double bound = g > 0.0 ? hi(j) : lo(j);
            if (!std::isfinite(bound)) return kInf;
            sup += g * bound;
        }
        return sup;
    };
    for (Eigen::Index i = 0; i < m; ++i) {
        if (std::isfinite(hi(i)) && generator(i, i) * hi(i) + face_sup(i, 1.0) > tol) return false;
        // At the lower face: inf (Gx)_i >= 0  <=>  sup (-Gx)_i <= 0.
        if (std::isfinite(lo(i)) && -generator(i, i) * lo(i) + face_sup(i, -1.0) > tol) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Convex sets

Eigen::Index ambient_dim(const ConvexSet& set) {
    return std::visit(
        [](const auto& s) -> Eigen::Index {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Subspace>) return s.ambient_dim();
            else return s.dim();
        },
        set);
}

LatticeVector project(const ConvexSet& set, const LatticeVector& x) {
    return std::visit([&](const auto& s) -> LatticeVector { return s.project(x); }, set);
}

bool contains(const ConvexSet& set, const LatticeVector& x, double rel_tol) {
    if (const auto* y = std::get_if<Subspace>(&set)) return y->contains(x, rel_tol);
    const auto& j = std::get<OrderInterval>(set);
    return j.violation(x) <= rel_tol * (1.0 + x.cwiseAbs().maxCoeff());
}

LatticeVector sample_point(const ConvexSet& set, std::mt19937_64& rng) {
    if (const auto* j = std::get_if<OrderInterval>(&set)) return random_point_of_interval(*j, rng);
    const auto& y = std::get<Subspace>(set);
    if (y.dim() == 0) return Vec::Zero(y.ambient_dim());
    return log_uniform_scale(rng, -1.0, 1.5) * random_combination(y.basis(), rng);
}

ProjectionEquivalence commuting_projection_equivalence(const ConvexSet& c1, const ConvexSet& c2,
                                                       int samples, std::uint64_t seed) {
    const Eigen::Index m = ambient_dim(c1);
    require_same_dim(m, ambient_dim(c2), "commuting_projection_equivalence");

    ProjectionEquivalence out;
    const auto* y1 = std::get_if<Subspace>(&c1);
    const auto* y2 = std::get_if<Subspace>(&c2);
    if (y1 != nullptr && y2 != nullptr) {
        const Mat& p1 = y1->projection();
        const Mat& p2 = y2->projection();
        const Mat id = Mat::Identity(m, m);
        out.first_preserves_second = ((id - p2) * p1 * p2).norm() <= kMembershipTol;
        out.second_preserves_first = ((id - p1) * p2 * p1).norm() <= kMembershipTol;
        out.commute = (p1 * p2 - p2 * p1).norm() <= kMembershipTol;
        return out;
    }

    std::mt19937_64 rng(seed);
    const auto preserves = [&](const ConvexSet& projector, const ConvexSet& target) {
        auto points = structured_points(target);
        for (int s = 0; s < samples; ++s) points.push_back(sample_point(target, rng));
        return std::all_of(points.begin(), points.end(), [&](const Vec& x) {
            return contains(target, project(projector, x));
        });
    };
    out.first_preserves_second = preserves(c1, c2);
    out.second_preserves_first = preserves(c2, c1);

    const double scale = std::max(set_scale(c1), set_scale(c2));
    out.commute = true;
    for (int s = 0; s < 4 * samples && out.commute; ++s) {
        const Vec x = random_ambient_point(m, scale, rng);
        const Vec a = project(c1, project(c2, x));
        const Vec b = project(c2, project(c1, x));
        out.commute = (a - b).norm() <= kMembershipTol * (1.0 + x.norm());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ideals

bool is_ideal(const Subspace& y1, const Subspace& y2, int samples, std::uint64_t seed) {
    require_same_dim(y1.ambient_dim(), y2.ambient_dim(), "is_ideal");
    const Eigen::Index m = y1.ambient_dim();
    if (y1.dim() == 0) return true;

    if (is_coordinate_subspace(y1) && is_coordinate_subspace(y2)) {
        for (Eigen::Index i = 0; i < m; ++i) {
            if (y1.projection()(i, i) > 0.5 && y2.projection()(i, i) < 0.5) return false;
        }
        return true;
    }

    std::mt19937_64 rng(seed);
    std::vector<Vec> xs = sign_combinations(y1.basis(), 1024);
    for (Eigen::Index j = 0; j < y1.dim(); ++j) xs.push_back(y1.basis().col(j));
    for (int s = 0; s < samples; ++s) xs.push_back(random_combination(y1.basis(), rng));

    // First condition: |x| in Y2.
    for (const auto& x : xs) {
        if (!y2.contains(x.cwiseAbs())) return false;
    }

    // Second condition: y in Y2, |y| <= |x| implies y sgn x in Y1. Such y
    // vanish wherever x does, so they are drawn from Y2 restricted to supp x.
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const auto& x : xs) {
        const double xmax = x.cwiseAbs().maxCoeff();
        if (xmax == 0.0) continue;
        std::vector<Eigen::Index> zeros;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (std::abs(x(i)) <= 1e-12 * xmax) zeros.push_back(i);
        }
        Mat restricted = y2.basis();
        if (!zeros.empty() && y2.dim() > 0) {
            Mat rows(static_cast<Eigen::Index>(zeros.size()), y2.dim());
            for (std::size_t r = 0; r < zeros.size(); ++r) {
                rows.row(static_cast<Eigen::Index>(r)) = y2.basis().row(zeros[r]);
            }
            restricted = Subspace::column_span(y2.basis() * null_space(rows)).basis();
        }
        if (restricted.cols() == 0) continue;

        std::vector<Vec> candidates;
        for (Eigen::Index j = 0; j < restricted.cols(); ++j) candidates.push_back(restricted.col(j));
        for (auto& v : sign_combinations(restricted, 64)) candidates.push_back(std::move(v));
        for (int s = 0; s < 4; ++s) candidates.push_back(random_combination(restricted, rng));

        const Vec sx = lattice_sign(x);
        for (const auto& y0 : candidates) {
            double t = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < m; ++i) {
                if (std::abs(y0(i)) > 1e-14 * y0.norm()) t = std::min(t, std::abs(x(i)) / std::abs(y0(i)));
            }
            if (!std::isfinite(t)) continue;
            for (const double frac : {1.0, unit(rng)}) {
                for (const double sign : {1.0, -1.0}) {
                    const Vec y = sign * frac * t * y0;
                    if (!y1.contains(y.cwiseProduct(sx))) return false;
                }
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Irreducibility

bool is_irreducible(const Mat& projection, double tol) {
    const Eigen::Index m = projection.rows();
    if (projection.cols() != m) throw std::invalid_argument("is_irreducible: matrix must be square");
    if (m <= 1) return true;
    std::vector<bool> seen(static_cast<std::size_t>(m), false);
    std::queue<Eigen::Index> frontier;
    frontier.push(0);
    seen[0] = true;
    Eigen::Index reached = 1;
    while (!frontier.empty()) {
        const Eigen::Index i = frontier.front();
        frontier.pop();
        for (Eigen::Index j = 0; j < m; ++j) {
            if (seen[static_cast<std::size_t>(j)]) continue;
            if (std::abs(projection(i, j)) > tol || std::abs(projection(j, i)) > tol) {
                seen[static_cast<std::size_t>(j)] = true;
                ++reached;
                frontier.push(j);
            }
        }
    }
    return reached == m;
}

bool is_irreducible(const Subspace& subspace, double tol) {
    return is_irreducible(subspace.projection(), tol);
}

bool pattern_strongly_connected(const std::vector<Mat>& family, Eigen::Index m, double tol) {
    if (m <= 1) return true;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> edge =
        Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(m, m, false);
    for (const auto& a : family) {
        require_same_dim(a.rows(), m, "pattern_strongly_connected");
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) {
                if (i != j && std::abs(a(i, j)) > tol) edge(j, i) = true;
            }
        }
    }
    // Strongly connected iff every vertex is reachable from 0 both in the
    // graph and in its transpose.
    const auto all_reachable = [&](bool transposed) {
        std::vector<bool> seen(static_cast<std::size_t>(m), false);
        std::queue<Eigen::Index> frontier;
        frontier.push(0);
        seen[0] = true;
        Eigen::Index reached = 1;
        while (!frontier.empty()) {
            const Eigen::Index i = frontier.front();
            frontier.pop();
            for (Eigen::Index j = 0; j < m; ++j) {
                const bool e = transposed ? edge(j, i) : edge(i, j);
                if (e && !seen[static_cast<std::size_t>(j)]) {
                    seen[static_cast<std::size_t>(j)] = true;
                    ++reached;
                    frontier.push(j);
                }
            }
        }
        return reached == m;
    };
    return all_reachable(false) && all_reachable(true);
}

// ---------------------------------------------------------------------------
// Lift norms

double spectral_norm(const Mat& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues()(0);
}

Mat lift(const Mat& t, Eigen::Index m) {
    if (m < 1) throw std::invalid_argument("lift: m must be >= 1");
    Mat out = Mat::Zero(t.rows() * m, t.cols() * m);
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
        for (Eigen::Index j = 0; j < t.cols(); ++j) {
            out.block(i * m, j * m, m, m).diagonal().setConstant(t(i, j));
        }
    }
    return out;
}

LiftNorms lift_norm_check(const Mat& t, Eigen::Index m) {
    return {spectral_norm(t), spectral_norm(lift(t, m))};
}

}  // namespace vdiff
