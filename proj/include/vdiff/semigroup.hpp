#pragma once

// Time integration of M u' = -A u in constrained coordinates, the symmetric
// eigenproblem A v = lambda M v, and observers that measure qualitative
// properties along trajectories.

#include "vdiff/forms.hpp"

#include <Eigen/SparseLU>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace vdiff {

enum class Scheme { implicit_euler, crank_nicolson };

/// h_max^2 / 2.
double default_dt(const Mesh& mesh);

/// Factorized theta-scheme step (M + theta dt A) u+ = (M - (1-theta) dt A) u.
/// The factorization is shared between copies; step() is const and may be
/// called from several threads.
class StepOperator {
public:
    StepOperator(const DiscreteForm& form, double dt, Scheme scheme, MassKind mass);

    Vec step(const Vec& u) const;
    double dt() const { return dt_; }
    Scheme scheme() const { return scheme_; }
    MassKind mass() const { return mass_; }

private:
    double dt_;
    Scheme scheme_;
    MassKind mass_;
    SparseMat explicit_part_;
    std::shared_ptr<const Eigen::SparseLU<SparseMat>> lu_;
};

struct Trajectory {
    std::vector<double> times;
    Mat states;  ///< N_c x times.size(), constrained coordinates
    Scenario scenario;
    Mesh mesh;
    SparseMat constraint;
    Vec mass_lumped_c;

    Eigen::Index size() const { return static_cast<Eigen::Index>(times.size()); }
    Eigen::Index m() const { return scenario.m; }
    /// (n+1) x m nodal values at time index k.
    Mat nodal(Eigen::Index k) const;
    /// Discrete L2 norm sqrt(u^T M_lumped u) at time index k.
    double l2_norm(Eigen::Index k) const;
};

struct EvolveOptions {
    double dt = 0.0;  ///< <= 0 selects default_dt(mesh)
    double t_end = 1.0;
    Scheme scheme = Scheme::implicit_euler;
    MassKind mass = MassKind::lumped;
    int record_every = 1;  ///< keep every k-th step (the final state is always kept)
};

/// Evolves the nodal datum u0 (length N, projected with C^T first).
Trajectory evolve(const DiscreteForm& form, const Vec& u0, const EvolveOptions& options);
/// Same, reusing an existing factorization.
Trajectory evolve(const DiscreteForm& form, const StepOperator& stepper, const Vec& u0,
                  double t_end, int record_every = 1);

struct EigenPair {
    double lambda = 0.0;
    Vec vector;  ///< constrained coordinates, M-orthonormal
};

/// k smallest eigenpairs of A v = lambda M v. Throws std::invalid_argument
/// for non-symmetric scenarios and std::out_of_range for k outside [1, N_c].
std::vector<EigenPair> eigenpairs(const DiscreteForm& form, int k, MassKind mass);

enum class PropertyKind {
    positivity,
    linf_contraction,
    interval_invariance,
    subspace_invariance,
    domination,
    scalar_domination,
    decay,
    irreducibility,
    symmetry,
};

std::string to_string(PropertyKind kind);
std::optional<PropertyKind> property_kind_from_string(const std::string& name);

struct Witness {
    double time = 0.0;
    Eigen::Index node = 0;
    Eigen::Index component = 0;
};

struct PropertyObservation {
    PropertyKind property = PropertyKind::interval_invariance;
    bool holds = true;
    double worst_violation = 0.0;
    double tolerance = 0.0;
    std::optional<Witness> witness;
};

/// Interval sets: nodal values must stay in J, violation = distance outside
/// J. Subspace sets: ||(I-P_C) u(t,node)|| relative to max_node ||u(t,.)||.
PropertyObservation observe(const Trajectory& trajectory, const ConvexSet& set, double tol,
                            PropertyKind kind);
PropertyObservation observe(const Trajectory& trajectory, const ConvexSet& set, double tol);

/// |u1(t,node,comp)| <= u2(t,node,comp) + tol on matched grids.
PropertyObservation check_domination(const Trajectory& dominated, const Trajectory& dominating,
                                     double tol);

/// Tensor-form scenario D = d I, S = s I, Y = W?
bool is_tensor_form(const Scenario& scenario);

/// ||u(t,node)||_W <= v(t,node) + tol, where v evolves ||u0(.)||_W under the
/// scalar form with the same d and s.
PropertyObservation check_scalar_domination(const Trajectory& vector_traj,
                                            const Trajectory& scalar_traj, double tol);

/// Minus the least-squares slope of log ||u(t)|| over the last half of the
/// window; the window stops where the norm underflows below 1e-14 ||u(0)||.
double decay_rate(const Trajectory& trajectory);

}  // namespace vdiff
