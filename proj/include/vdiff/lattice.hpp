#pragma once

// Finite-dimensional Hilbert-lattice algebra on W = R^m: lattice parts,
// subspaces with their orthogonal projections, order intervals, and the
// decision procedures built on them (positivity, box invariance, ideals,
// irreducibility, commuting projections, lift norms).

#include "vdiff/types.hpp"

#include <cstdint>
#include <random>
#include <utility>
#include <variant>
#include <vector>

namespace vdiff {

/// Relative tolerance for subspace membership: ||(I-P)v|| <= tol*(1+||v||).
inline constexpr double kMembershipTol = 1e-9;
/// Generators whose orthogonal residual falls below this (relative) are dropped.
inline constexpr double kRankTol = 1e-10;
/// Default threshold for the nonzero pattern of a matrix.
inline constexpr double kPatternTol = 1e-10;
/// Seed used by randomized decision procedures unless the caller supplies one.
inline constexpr std::uint64_t kDefaultSeed = 0x5eed5eedULL;

struct LatticeParts {
    LatticeVector pos;
    LatticeVector neg;
    LatticeVector abs;
    LatticeVector sign;
};

/// x+ = max(x,0), x- = max(-x,0), |x| = x+ + x-, sgn with sgn(0) = 0.
LatticeParts lattice_decompose(const LatticeVector& x);

LatticeVector lattice_sign(const LatticeVector& x);

/// Closed subspace Y of R^m, stored as a column-orthonormal basis Q together
/// with P_Y = Q Q^T. The zero subspace has an empty basis and P = 0.
class Subspace {
public:
    /// Orthonormalizes `generators` (two-pass Gram-Schmidt); generators that
    /// are dependent up to kRankTol are dropped. `ambient` is required when
    /// the generator list is empty and must match every generator otherwise.
    static Subspace span(const std::vector<LatticeVector>& generators, Eigen::Index ambient);
    static Subspace zero(Eigen::Index ambient);
    static Subspace whole(Eigen::Index ambient);
    /// Column span of `columns`.
    static Subspace column_span(const Mat& columns);

    Eigen::Index ambient_dim() const { return projection_.rows(); }
    Eigen::Index dim() const { return basis_.cols(); }
    const Mat& basis() const { return basis_; }
    const Mat& projection() const { return projection_; }

    LatticeVector project(const LatticeVector& x) const { return projection_ * x; }
    bool contains(const LatticeVector& v, double rel_tol = kMembershipTol) const;
    Subspace orthogonal_complement() const;

private:
    explicit Subspace(Mat basis, Eigen::Index ambient);

    Mat basis_;
    Mat projection_;
};

/// Same as Subspace::span.
Subspace make_subspace(const std::vector<LatticeVector>& generators, Eigen::Index ambient);

Subspace intersect(const Subspace& a, const Subspace& b);

/// Orthonormal basis of ker(A), singular values below tol*max(1, sigma_max)
/// count as zero.
Mat null_space(const Mat& a, double tol = kRankTol);

/// Order interval [lower, upper] in R^m; entries may be +-infinity.
class OrderInterval {
public:
    OrderInterval(LatticeVector lower, LatticeVector upper);

    static OrderInterval positive_cone(Eigen::Index m);
    static OrderInterval negative_cone(Eigen::Index m);
    static OrderInterval symmetric_box(Eigen::Index m, double radius = 1.0);

    Eigen::Index dim() const { return lower_.size(); }
    const LatticeVector& lower() const { return lower_; }
    const LatticeVector& upper() const { return upper_; }

    bool contains(const LatticeVector& x, double margin = 0.0) const;
    /// Largest distance by which any coordinate of x leaves the interval.
    double violation(const LatticeVector& x) const;
    LatticeVector project(const LatticeVector& x) const;

    bool contains_zero() const;
    bool is_positive_cone() const;
    bool is_negative_cone() const;
    bool is_symmetric_box() const;
    /// Largest finite |bound|, 0 if the interval is all of R^m.
    double scale() const;

private:
    LatticeVector lower_;
    LatticeVector upper_;
};

/// Componentwise clamp; the Euclidean nearest point of J.
LatticeVector project_interval(const OrderInterval& interval, const LatticeVector& x);

/// Orthogonal projection of (x, y) onto {(u, v) : |u| <= v} in W x W:
/// ( 1/2 (|x| + |x| ^ y)+ sgn x , 1/2 (|x| v y + y)+ ).
std::pair<LatticeVector, LatticeVector> project_domination_cone(const LatticeVector& x,
                                                                const LatticeVector& y);

/// True iff every entry is >= -1e-12, i.e. M maps [0,inf)^m into itself.
bool is_positive_operator(const Mat& m);

/// True iff every row absolute sum is <= 1 + 1e-12, i.e. M[-1,1]^m in [-1,1]^m.
bool leaves_box_invariant(const Mat& m);

/// Does M map the order interval J into itself? Exact for the positive and
/// negative cones and for symmetric boxes. Otherwise every vertex of J (with
/// unbounded coordinates pushed far along their recession direction) is
/// tested plus `samples` random points; a point with M x outside J by more
/// than 1e-9 is a certificate of non-invariance.
bool interval_invariant(const Mat& m, const OrderInterval& interval, int samples,
                        std::uint64_t seed = kDefaultSeed);

/// Does e^{tG} leave J invariant for all t >= 0? Decided exactly by the
/// boundary (Nagumo) condition on each face of J: at x_i = upper_i the i-th
/// velocity (Gx)_i must be <= 0 for every x in the face, at x_i = lower_i it
/// must be >= 0. For J = [0,inf)^m this is "G_ij >= 0 off the diagonal", for
/// J = [-1,1]^m it is "G_ii + sum_{j!=i} |G_ij| <= 0".
bool semigroup_preserves_interval(const Mat& generator, const OrderInterval& interval);

using ConvexSet = std::variant<Subspace, OrderInterval>;

Eigen::Index ambient_dim(const ConvexSet& set);
LatticeVector project(const ConvexSet& set, const LatticeVector& x);
bool contains(const ConvexSet& set, const LatticeVector& x, double rel_tol = kMembershipTol);

struct ProjectionEquivalence {
    bool first_preserves_second = false;  ///< P_{C1} C2 in C2
    bool second_preserves_first = false;  ///< P_{C2} C1 in C1
    bool commute = false;                 ///< P_{C1} P_{C2} = P_{C2} P_{C1}

    bool agree() const {
        return first_preserves_second == second_preserves_first &&
               second_preserves_first == commute;
    }
};

/// Evaluates P_{C1} C2 in C2, P_{C2} C1 in C1 and P_{C1} P_{C2} = P_{C2} P_{C1}.
/// Pairs of subspaces are decided algebraically; all other pairs are decided
/// on sampled points (vertices and random points of each set, random points
/// of R^m for commutation).
ProjectionEquivalence commuting_projection_equivalence(const ConvexSet& c1, const ConvexSet& c2,
                                                       int samples = 256,
                                                       std::uint64_t seed = kDefaultSeed);

/// Is Y1 a closed ideal of Y2? Checks |x| in Y2 over all sign combinations
/// of the Y1 basis plus random points, and y sgn x in Y1 for sampled x in Y1,
/// y in Y2 with |y| <= |x|. One-sided: `false` always comes with a concrete
/// witness; `true` means no witness was found within the budget. Exact when
/// both subspaces are coordinate subspaces.
bool is_ideal(const Subspace& y1, const Subspace& y2, int samples = 256,
              std::uint64_t seed = kDefaultSeed);

/// Connectivity of the undirected graph on {0..m-1} with an edge (i,j) iff
/// |P_ij| > tol. For symmetric P this is the absence of a nontrivial
/// coordinate subspace invariant under P.
bool is_irreducible(const Mat& projection, double tol = kPatternTol);
bool is_irreducible(const Subspace& subspace, double tol = kPatternTol);

/// Strong connectivity of the directed graph with an edge j -> i iff some
/// matrix has |M_ij| > tol. A coordinate subspace is invariant under every
/// matrix in the family iff it is closed in this graph.
bool pattern_strongly_connected(const std::vector<Mat>& family, Eigen::Index m,
                                double tol = kPatternTol);

/// T (x) I_m: T acting componentwise on W-valued coordinates.
Mat lift(const Mat& t, Eigen::Index m);

struct LiftNorms {
    double norm = 0.0;
    double lifted_norm = 0.0;
};

/// Spectral norms of T and of its lift to W-valued coordinates.
LiftNorms lift_norm_check(const Mat& t, Eigen::Index m);

double spectral_norm(const Mat& a);

/// Vertices of J. Unbounded coordinates contribute their finite bound (if
/// any) and a point at distance `reach` along the recession direction.
/// Returns an empty list if there would be more than `limit` vertices.
std::vector<LatticeVector> interval_vertices(const OrderInterval& interval, double reach,
                                             std::size_t limit = 4096);

/// Random point of the set: a mix of bounds and uniform draws for intervals,
/// a Gaussian combination of the basis at a random scale for subspaces.
LatticeVector sample_point(const ConvexSet& set, std::mt19937_64& rng);

}  // namespace vdiff
