#include "vdiff/forms.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace vdiff {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void add_block(Triplets& t, Eigen::Index row0, Eigen::Index col0, const Mat& block, double factor) {
    for (Eigen::Index i = 0; i < block.rows(); ++i) {
        for (Eigen::Index j = 0; j < block.cols(); ++j) {
            if (block(i, j) != 0.0) t.emplace_back(row0 + i, col0 + j, factor * block(i, j));
        }
    }
}

SparseMat from_triplets(Eigen::Index rows, Eigen::Index cols, const Triplets& t) {
    SparseMat a(rows, cols);
    a.setFromTriplets(t.begin(), t.end());
    a.makeCompressed();
    return a;
}

SparseMat congruence(const SparseMat& c, const SparseMat& a) {
    SparseMat out = SparseMat(c.transpose()) * a * c;
    out.prune(0.0);
    return out;
}

Mat sym(const Mat& a) { return 0.5 * (a + a.transpose()); }

double min_sym_eigenvalue(const Mat& a) {
    if (a.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(sym(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

bool nearly_symmetric(const Mat& a) {
    return (a - a.transpose()).norm() <= 1e-12 * std::max(1.0, a.norm());
}

}  // namespace

// ---------------------------------------------------------------------------
// Mesh

Mesh build_mesh(int n) {
    if (n < 2) throw std::invalid_argument("build_mesh: need at least 2 elements, got " + std::to_string(n));
    Mesh mesh;
    mesh.nodes.resize(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) mesh.nodes[static_cast<std::size_t>(i)] = static_cast<double>(i) / n;
    mesh.h_max = 1.0 / n;
    return mesh;
}

Mesh make_mesh(std::vector<double> nodes) {
    if (nodes.size() < 3) throw std::invalid_argument("make_mesh: need at least 2 elements");
    if (nodes.front() != 0.0 || nodes.back() != 1.0) {
        throw std::invalid_argument("make_mesh: nodes must start at 0 and end at 1");
    }
    Mesh mesh;
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        const double h = nodes[i] - nodes[i - 1];
        if (!(h > 0.0)) throw std::invalid_argument("make_mesh: nodes must be strictly increasing");
        mesh.h_max = std::max(mesh.h_max, h);
    }
    mesh.nodes = std::move(nodes);
    return mesh;
}

// ---------------------------------------------------------------------------
// Coefficients and scenarios

PiecewiseMatrix::PiecewiseMatrix(Mat constant) { values_.push_back(std::move(constant)); }

PiecewiseMatrix::PiecewiseMatrix(std::vector<double> breakpoints, std::vector<Mat> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    if (values_.size() != breakpoints_.size() + 1) {
        throw std::invalid_argument("PiecewiseMatrix: need one more value than breakpoints");
    }
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        const double b = breakpoints_[i];
        if (!(b > 0.0 && b < 1.0) || (i > 0 && !(b > breakpoints_[i - 1]))) {
            throw std::invalid_argument("PiecewiseMatrix: breakpoints must increase strictly inside (0,1)");
        }
    }
    for (const auto& v : values_) {
        if (v.rows() != values_.front().rows() || v.cols() != values_.front().cols()) {
            throw std::invalid_argument("PiecewiseMatrix: pieces have different shapes");
        }
    }
}

const Mat& PiecewiseMatrix::at(double x) const {
    if (values_.empty()) throw std::logic_error("PiecewiseMatrix::at on empty coefficient");
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    return values_[static_cast<std::size_t>(it - breakpoints_.begin())];
}

void Scenario::validate() const {
    const auto check = [&](const Mat& a, const char* what) {
        if (a.rows() != m || a.cols() != m) {
            std::ostringstream msg;
            msg << "scenario '" << name << "': " << what << " is " << a.rows() << "x" << a.cols()
                << ", expected " << m << "x" << m;
            throw std::invalid_argument(msg.str());
        }
        if (!a.allFinite()) {
            throw std::invalid_argument("scenario '" + name + "': " + what + " has non-finite entries");
        }
    };
    if (m < 1) throw std::invalid_argument("scenario '" + name + "': m must be >= 1");
    if (diffusion.empty()) throw std::invalid_argument("scenario '" + name + "': missing diffusion");
    for (const auto& d : diffusion.values()) check(d, "diffusion");
    if (potential) {
        for (const auto& c : potential->values()) check(c, "potential");
    }
    check(s_left, "S_left");
    check(s_right, "S_right");
    if (y_left.ambient_dim() != m || y_right.ambient_dim() != m) {
        throw std::invalid_argument("scenario '" + name + "': boundary subspace dimension mismatch");
    }
    if (!(gamma > 0.0)) throw std::invalid_argument("scenario '" + name + "': gamma must be > 0");
}

// ---------------------------------------------------------------------------
// Assembly

SparseMat DiscreteForm::mass_c(MassKind kind) const {
    if (kind == MassKind::consistent) return mass_consistent_c;
    SparseMat d(mass_lumped_c.size(), mass_lumped_c.size());
    d.reserve(Eigen::VectorXi::Constant(mass_lumped_c.size(), 1));
    for (Eigen::Index i = 0; i < mass_lumped_c.size(); ++i) d.insert(i, i) = mass_lumped_c(i);
    d.makeCompressed();
    return d;
}

Mat DiscreteForm::nodal(const Vec& constrained) const {
    const Vec full = expand(constrained);
    const Eigen::Index nodes = full.size() / m();
    Mat out(nodes, m());
    for (Eigen::Index k = 0; k < nodes; ++k) out.row(k) = full.segment(k * m(), m()).transpose();
    return out;
}

DiscreteForm assemble(const Scenario& scenario, const Mesh& mesh) {
    scenario.validate();
    if (mesh.n_elements() < 2) throw std::invalid_argument("assemble: mesh needs at least 2 elements");

    DiscreteForm form;
    form.scenario = scenario;
    form.mesh = mesh;

    const Eigen::Index m = scenario.m;
    const int n = mesh.n_elements();
    const Eigen::Index big_n = (n + 1) * m;
    const Mat id = Mat::Identity(m, m);

    Triplets k_t, p_t, mc_t, b_t;
    form.mass_lumped = Vec::Zero(big_n);
    for (int e = 0; e < n; ++e) {
        const double h = mesh.length(e);
        const double xm = mesh.midpoint(e);
        const Mat& d = scenario.diffusion.at(xm);

        const double margin = min_sym_eigenvalue(d) - scenario.gamma;
        if (margin < -1e-10) {
            std::ostringstream msg;
            msg << "element " << e << ": symmetric part of D has eigenvalue "
                << (margin + scenario.gamma) << " < gamma = " << scenario.gamma;
            form.warnings.push_back(msg.str());
        }

        const Eigen::Index a = e * m;
        const Eigen::Index b = (e + 1) * m;
        // (1/h) D (x) [[1,-1],[-1,1]]
        add_block(k_t, a, a, d, 1.0 / h);
        add_block(k_t, b, b, d, 1.0 / h);
        add_block(k_t, a, b, d, -1.0 / h);
        add_block(k_t, b, a, d, -1.0 / h);

        // (h/6) I (x) [[2,1],[1,2]]
        add_block(mc_t, a, a, id, h / 3.0);
        add_block(mc_t, b, b, id, h / 3.0);
        add_block(mc_t, a, b, id, h / 6.0);
        add_block(mc_t, b, a, id, h / 6.0);

        form.mass_lumped.segment(a, m).array() += 0.5 * h;
        form.mass_lumped.segment(b, m).array() += 0.5 * h;

        // Potential with nodal quadrature, so it does not spoil the M-matrix
        // structure of the lumped scheme.
        if (scenario.potential) {
            const Mat& c = scenario.potential->at(xm);
            add_block(p_t, a, a, c, 0.5 * h);
            add_block(p_t, b, b, c, 0.5 * h);
        }
    }
    add_block(b_t, 0, 0, scenario.s_left, 1.0);
    add_block(b_t, n * m, n * m, scenario.s_right, 1.0);

    form.stiffness = from_triplets(big_n, big_n, k_t);
    form.boundary = from_triplets(big_n, big_n, b_t);
    form.potential = from_triplets(big_n, big_n, p_t);
    form.mass_consistent = from_triplets(big_n, big_n, mc_t);

    // Constraint basis: Y-bases at the endpoint blocks, identity inside.
    const Eigen::Index k_left = scenario.y_left.dim();
    const Eigen::Index k_right = scenario.y_right.dim();
    const Eigen::Index n_c = k_left + (n - 1) * m + k_right;
    Triplets c_t;
    add_block(c_t, 0, 0, scenario.y_left.basis(), 1.0);
    for (Eigen::Index i = 0; i < (n - 1) * m; ++i) c_t.emplace_back(m + i, k_left + i, 1.0);
    add_block(c_t, n * m, k_left + (n - 1) * m, scenario.y_right.basis(), 1.0);
    form.constraint = from_triplets(big_n, n_c, c_t);

    form.stiffness_c = congruence(form.constraint, form.stiffness);
    form.boundary_c = congruence(form.constraint, form.boundary);
    form.potential_c = congruence(form.constraint, form.potential);
    form.operator_c = form.stiffness_c + form.boundary_c + form.potential_c;
    form.operator_c.makeCompressed();
    form.mass_consistent_c = congruence(form.constraint, form.mass_consistent);
    // The lumped mass is a multiple of the identity on each endpoint block, so
    // C^T M C stays diagonal.
    const SparseMat lumped_c = SparseMat(form.constraint.transpose()) *
                               form.mass_lumped.asDiagonal() * form.constraint;
    form.mass_lumped_c = lumped_c.diagonal();
    return form;
}

// ---------------------------------------------------------------------------
// Diagnostics

bool is_symmetric(const DiscreteForm& form) {
    const Scenario& s = form.scenario;
    const auto endpoint_symmetric = [](const Subspace& y, const Mat& s_end) {
        const Mat& p = y.projection();
        return (p * (s_end - s_end.transpose()) * p).norm() <= 1e-12 * std::max(1.0, s_end.norm());
    };
    if (!endpoint_symmetric(s.y_left, s.s_left) || !endpoint_symmetric(s.y_right, s.s_right)) return false;
    for (int e = 0; e < form.mesh.n_elements(); ++e) {
        const double xm = form.mesh.midpoint(e);
        if (!nearly_symmetric(s.diffusion.at(xm))) return false;
        if (s.potential && !nearly_symmetric(s.potential->at(xm))) return false;
    }
    return true;
}

FormDiagnostics form_diagnostics(const DiscreteForm& form) {
    const Scenario& s = form.scenario;
    FormDiagnostics out;

    const Mat stiff = Mat(form.stiffness_c);
    out.min_stiffness_eigenvalue = min_sym_eigenvalue(stiff);
    out.elliptic = out.min_stiffness_eigenvalue >= -1e-10 * std::max(1.0, stiff.norm());

    const auto endpoint_psd = [](const Subspace& y, const Mat& s_end) {
        if (y.dim() == 0) return true;
        const Mat reduced = y.basis().transpose() * sym(s_end) * y.basis();
        return min_sym_eigenvalue(reduced) >= -1e-10 * std::max(1.0, s_end.norm());
    };
    out.accretive = endpoint_psd(s.y_left, s.s_left) && endpoint_psd(s.y_right, s.s_right);

    out.symmetric = is_symmetric(form);

    const Mat op = Mat(form.operator_c);
    if (op.size() > 0) {
        Eigen::BDCSVD<Mat> svd(op);
        const auto& sv = svd.singularValues();
        const double cutoff = 1e-9 * std::max(1.0, sv(0));
        out.kernel_dim = (sv.array() <= cutoff).count();
    }
    return out;
}

EigenSystem symmetric_generalized_eigen(const Mat& a, const Mat& b) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(sym(a), sym(b));
    if (es.info() != Eigen::Success) {
        throw NumericalError("generalized eigenproblem failed (mass matrix not positive definite?)", 0.0);
    }
    return {es.eigenvalues(), es.eigenvectors()};
}

double verify_natural_bc(const DiscreteForm& form, int eigenindex) {
    if (!is_symmetric(form)) {
        throw std::invalid_argument("verify_natural_bc: scenario is not symmetric");
    }
    if (eigenindex < 0 || eigenindex >= form.n_constrained()) {
        throw std::out_of_range("verify_natural_bc: eigenindex " + std::to_string(eigenindex) +
                                " outside [0, " + std::to_string(form.n_constrained()) + ")");
    }
    const auto es = symmetric_generalized_eigen(Mat(form.operator_c), Mat(form.mass_c(MassKind::lumped)));
    Mat f = form.nodal(es.vectors.col(eigenindex));
    const double sup = f.rowwise().norm().maxCoeff();
    if (sup > 0.0) f /= sup;

    const Scenario& s = form.scenario;
    const int n = form.mesh.n_elements();
    const double h0 = form.mesh.length(0);
    const double h1 = form.mesh.length(n - 1);
    const Mat& d0 = s.diffusion.at(form.mesh.midpoint(0));
    const Mat& d1 = s.diffusion.at(form.mesh.midpoint(n - 1));
    const Vec f0 = f.row(0).transpose();
    const Vec f1 = f.row(1).transpose();
    const Vec fn = f.row(n).transpose();
    const Vec fn1 = f.row(n - 1).transpose();

    // Outward normal is -1 at x = 0 and +1 at x = 1.
    const Vec left = -d0 * (f1 - f0) / h0 + s.s_left * f0;
    const Vec right = d1 * (fn - fn1) / h1 + s.s_right * fn;
    return std::max((s.y_left.projection() * left).norm(), (s.y_right.projection() * right).norm());
}

}  // namespace vdiff
