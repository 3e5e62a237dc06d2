#pragma once

// Galerkin discretization of the coupled form
//
//   a(f, g) = int_0^1 (D f' | g') + int_0^1 (C f | g) + (S_0 f(0) | g(0)) + (S_1 f(1) | g(1))
//
// on V_Y = { f in H^1((0,1); R^m) : f(0) in Y_left, f(1) in Y_right } with P1
// elements. Unknowns are ordered node-major: dof(node, component) = node*m + component.

#include "vdiff/lattice.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vdiff {

struct Mesh {
    std::vector<double> nodes;  ///< 0 = x_0 < x_1 < ... < x_n = 1
    double h_max = 0.0;

    int n_elements() const { return static_cast<int>(nodes.size()) - 1; }
    double length(int element) const { return nodes[element + 1] - nodes[element]; }
    double midpoint(int element) const { return 0.5 * (nodes[element] + nodes[element + 1]); }
};

/// Uniform mesh with n elements; throws std::invalid_argument if n < 2.
Mesh build_mesh(int n);

/// Mesh from explicit nodes (strictly increasing from 0 to 1, at least 3).
Mesh make_mesh(std::vector<double> nodes);

/// Matrix-valued coefficient, constant on each piece of a partition of [0,1].
/// Elements take the value at their midpoint.
class PiecewiseMatrix {
public:
    PiecewiseMatrix() = default;
    explicit PiecewiseMatrix(Mat constant);
    /// `breakpoints` are the interior cut points (strictly increasing in
    /// (0,1)); `values` has one more entry than `breakpoints`.
    PiecewiseMatrix(std::vector<double> breakpoints, std::vector<Mat> values);

    bool empty() const { return values_.empty(); }
    const Mat& at(double x) const;
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<Mat>& values() const { return values_; }

private:
    std::vector<double> breakpoints_;
    std::vector<Mat> values_;
};

struct Scenario {
    std::string name = "custom";
    Eigen::Index m = 1;
    PiecewiseMatrix diffusion{Mat::Identity(1, 1)};
    Mat s_left = Mat::Zero(1, 1);
    Mat s_right = Mat::Zero(1, 1);
    Subspace y_left = Subspace::whole(1);
    Subspace y_right = Subspace::whole(1);
    std::optional<PiecewiseMatrix> potential;
    double gamma = 1.0;  ///< claimed ellipticity constant

    /// Dimensional consistency; throws std::invalid_argument.
    void validate() const;
};

enum class MassKind { lumped, consistent };

struct DiscreteForm {
    Scenario scenario;
    Mesh mesh;

    // Full nodal space, N = (n+1) m.
    SparseMat stiffness;
    SparseMat boundary;
    SparseMat potential;
    SparseMat mass_consistent;
    Vec mass_lumped;
    /// N x N_c, orthonormal columns spanning the discrete V_Y.
    SparseMat constraint;

    // Constrained coordinates: X_c = C^T X C.
    SparseMat stiffness_c;
    SparseMat boundary_c;
    SparseMat potential_c;
    SparseMat operator_c;  ///< stiffness_c + boundary_c + potential_c
    SparseMat mass_consistent_c;
    Vec mass_lumped_c;

    /// Assembly diagnostics (e.g. elements violating ellipticity).
    std::vector<std::string> warnings;

    Eigen::Index m() const { return scenario.m; }
    Eigen::Index n_full() const { return constraint.rows(); }
    Eigen::Index n_constrained() const { return constraint.cols(); }

    SparseMat mass_c(MassKind kind) const;

    /// C^T u: orthogonal projection of a nodal vector into constrained coordinates.
    Vec restrict_to_constrained(const Vec& full) const { return constraint.transpose() * full; }
    /// C u_c: nodal values of a constrained vector.
    Vec expand(const Vec& constrained) const { return constraint * constrained; }
    /// (n+1) x m matrix of nodal values.
    Mat nodal(const Vec& constrained) const;
};

DiscreteForm assemble(const Scenario& scenario, const Mesh& mesh);

struct FormDiagnostics {
    bool elliptic = false;
    bool accretive = false;
    bool symmetric = false;
    Eigen::Index kernel_dim = 0;
    double min_stiffness_eigenvalue = 0.0;
};

/// Discrete counterparts of the accretivity and symmetry characterizations:
/// accretive iff P_Y sym(S) P_Y is PSD at both ends, symmetric iff every D_e
/// (and C_e) is symmetric and P_Y (S - S^T) P_Y = 0 at both ends.
FormDiagnostics form_diagnostics(const DiscreteForm& form);

/// The symmetry half of form_diagnostics, without the spectral work.
bool is_symmetric(const DiscreteForm& form);

/// Dense generalized symmetric eigenproblem A v = lambda B v, ascending,
/// B-orthonormal vectors.
struct EigenSystem {
    Vec values;
    Mat vectors;
};
EigenSystem symmetric_generalized_eigen(const Mat& a, const Mat& b);

/// Residual of the natural boundary condition P_Y (d_D f/d nu + S f) = 0 for
/// the eigenfunction with the given index (lumped mass), using one-sided
/// differences for the conormal derivative. The eigenfunction is scaled to
/// unit nodal sup norm; the result is the larger of the two endpoint residuals.
double verify_natural_bc(const DiscreteForm& form, int eigenindex);

}  // namespace vdiff
