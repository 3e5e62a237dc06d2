#include "vdiff/semigroup.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace vdiff {

namespace {

constexpr std::array<std::pair<PropertyKind, const char*>, 9> kPropertyNames{{
    {PropertyKind::positivity, "positivity"},
    {PropertyKind::linf_contraction, "linf_contraction"},
    {PropertyKind::interval_invariance, "interval_invariance"},
    {PropertyKind::subspace_invariance, "subspace_invariance"},
    {PropertyKind::domination, "domination"},
    {PropertyKind::scalar_domination, "scalar_domination"},
    {PropertyKind::decay, "decay"},
    {PropertyKind::irreducibility, "irreducibility"},
    {PropertyKind::symmetry, "symmetry"},
}};

double smallest_pivot(const SparseMat& a) {
    Eigen::PartialPivLU<Mat> lu{Mat(a)};
    return lu.matrixLU().diagonal().cwiseAbs().minCoeff();
}

void require_matched(const Trajectory& a, const Trajectory& b, bool same_m, const char* what) {
    std::ostringstream msg;
    if (a.times.size() != b.times.size()) {
        msg << what << ": time grids differ in length (" << a.times.size() << " vs " << b.times.size() << ")";
    } else if (a.mesh.nodes != b.mesh.nodes) {
        msg << what << ": meshes differ";
    } else if (same_m && a.m() != b.m()) {
        msg << what << ": component counts differ";
    } else {
        for (std::size_t k = 0; k < a.times.size(); ++k) {
            if (std::abs(a.times[k] - b.times[k]) > 1e-12 * std::max(1.0, std::abs(a.times[k]))) {
                msg << what << ": time grids differ at index " << k;
                break;
            }
        }
    }
    if (!msg.str().empty()) throw std::invalid_argument(msg.str());
}

bool is_multiple_of_identity(const Mat& a, double* factor) {
    const double c = a(0, 0);
    if ((a - c * Mat::Identity(a.rows(), a.cols())).norm() > 1e-14 * std::max(1.0, std::abs(c))) {
        return false;
    }
    if (factor != nullptr) *factor = c;
    return true;
}

}  // namespace

double default_dt(const Mesh& mesh) { return 0.5 * mesh.h_max * mesh.h_max; }

std::string to_string(PropertyKind kind) {
    for (const auto& [k, name] : kPropertyNames) {
        if (k == kind) return name;
    }
    return "unknown";
}

std::optional<PropertyKind> property_kind_from_string(const std::string& name) {
    for (const auto& [k, n] : kPropertyNames) {
        if (name == n) return k;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Time stepping

StepOperator::StepOperator(const DiscreteForm& form, double dt, Scheme scheme, MassKind mass)
    : dt_(dt), scheme_(scheme), mass_(mass) {
    if (!(dt > 0.0)) throw std::invalid_argument("StepOperator: dt must be > 0");
    const double theta = scheme == Scheme::implicit_euler ? 1.0 : 0.5;
    const SparseMat m = form.mass_c(mass);
    SparseMat lhs = m + (theta * dt) * form.operator_c;
    lhs.makeCompressed();
    explicit_part_ = m - ((1.0 - theta) * dt) * form.operator_c;
    explicit_part_.makeCompressed();

    auto lu = std::make_shared<Eigen::SparseLU<SparseMat>>();
    lu->analyzePattern(lhs);
    lu->factorize(lhs);
    if (lu->info() != Eigen::Success) {
        const double pivot = smallest_pivot(lhs);
        throw NumericalError("singular step matrix (" + lu->lastErrorMessage() +
                                 "), smallest pivot " + std::to_string(pivot),
                             pivot);
    }
    // SparseLU can report success on a numerically singular matrix; the dense
    // pivot check is cheap at the sizes this library targets.
    if (lhs.rows() <= 2000) {
        const double pivot = smallest_pivot(lhs);
        if (pivot <= 1e-13 * Mat(lhs).cwiseAbs().maxCoeff()) {
            throw NumericalError("singular step matrix, smallest pivot " + std::to_string(pivot), pivot);
        }
    }
    lu_ = std::move(lu);
}

Vec StepOperator::step(const Vec& u) const {
    Vec next = lu_->solve(explicit_part_ * u);
    if (!next.allFinite()) throw NumericalError("time step produced non-finite values", 0.0);
    return next;
}

Mat Trajectory::nodal(Eigen::Index k) const {
    const Vec full = constraint * states.col(k);
    const Eigen::Index nodes = full.size() / m();
    Mat out(nodes, m());
    for (Eigen::Index i = 0; i < nodes; ++i) out.row(i) = full.segment(i * m(), m()).transpose();
    return out;
}

double Trajectory::l2_norm(Eigen::Index k) const {
    return std::sqrt(states.col(k).cwiseAbs2().dot(mass_lumped_c));
}

Trajectory evolve(const DiscreteForm& form, const Vec& u0, const EvolveOptions& options) {
    const double dt = options.dt > 0.0 ? options.dt : default_dt(form.mesh);
    const StepOperator stepper(form, dt, options.scheme, options.mass);
    return evolve(form, stepper, u0, options.t_end, options.record_every);
}

Trajectory evolve(const DiscreteForm& form, const StepOperator& stepper, const Vec& u0,
                  double t_end, int record_every) {
    if (u0.size() != form.n_full()) {
        throw std::invalid_argument("evolve: initial datum has length " + std::to_string(u0.size()) +
                                    ", expected " + std::to_string(form.n_full()));
    }
    const double dt = stepper.dt();
    if (!(t_end >= dt)) throw std::invalid_argument("evolve: t_end must be >= dt");
    if (record_every < 1) throw std::invalid_argument("evolve: record_every must be >= 1");

    const auto steps = static_cast<Eigen::Index>(std::llround(std::ceil(t_end / dt - 1e-9)));
    const Eigen::Index kept = 1 + steps / record_every + (steps % record_every != 0 ? 1 : 0);

    Trajectory traj;
    traj.scenario = form.scenario;
    traj.mesh = form.mesh;
    traj.constraint = form.constraint;
    traj.mass_lumped_c = form.mass_lumped_c;
    traj.states.resize(form.n_constrained(), kept);
    traj.times.reserve(static_cast<std::size_t>(kept));

    Vec u = form.restrict_to_constrained(u0);
    traj.states.col(0) = u;
    traj.times.push_back(0.0);
    Eigen::Index col = 1;
    for (Eigen::Index s = 1; s <= steps; ++s) {
        u = stepper.step(u);
        if (s % record_every == 0 || s == steps) {
            traj.states.col(col++) = u;
            traj.times.push_back(static_cast<double>(s) * dt);
        }
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Spectrum

std::vector<EigenPair> eigenpairs(const DiscreteForm& form, int k, MassKind mass) {
    if (!is_symmetric(form)) {
        throw std::invalid_argument("eigenpairs: scenario '" + form.scenario.name +
                                    "' is not symmetric; use evolve instead");
    }
    if (k < 1 || k > form.n_constrained()) {
        throw std::out_of_range("eigenpairs: k = " + std::to_string(k) + " outside [1, " +
                                std::to_string(form.n_constrained()) + "]");
    }
    const auto es = symmetric_generalized_eigen(Mat(form.operator_c), Mat(form.mass_c(mass)));
    std::vector<EigenPair> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) out.push_back({es.values(i), es.vectors.col(i)});
    return out;
}

// ---------------------------------------------------------------------------
// Observers

PropertyObservation observe(const Trajectory& trajectory, const ConvexSet& set, double tol) {
    const bool interval = std::holds_alternative<OrderInterval>(set);
    return observe(trajectory, set, tol,
                   interval ? PropertyKind::interval_invariance : PropertyKind::subspace_invariance);
}

PropertyObservation observe(const Trajectory& trajectory, const ConvexSet& set, double tol,
                            PropertyKind kind) {
    if (ambient_dim(set) != trajectory.m()) {
        throw std::invalid_argument("observe: set dimension does not match trajectory");
    }
    PropertyObservation obs;
    obs.property = kind;
    obs.tolerance = tol;

    const auto* interval = std::get_if<OrderInterval>(&set);
    const auto* subspace = std::get_if<Subspace>(&set);
    const Mat complement = subspace != nullptr
                               ? Mat(Mat::Identity(trajectory.m(), trajectory.m()) - subspace->projection())
                               : Mat();

    for (Eigen::Index k = 0; k < trajectory.size(); ++k) {
        const Mat u = trajectory.nodal(k);
        const double sup = subspace != nullptr ? u.rowwise().norm().maxCoeff() : 0.0;
        for (Eigen::Index node = 0; node < u.rows(); ++node) {
            const Vec x = u.row(node).transpose();
            double violation = 0.0;
            Eigen::Index comp = 0;
            if (interval != nullptr) {
                const Vec below = interval->lower() - x;
                const Vec above = x - interval->upper();
                const Vec worst = below.cwiseMax(above);
                violation = std::max(0.0, worst.maxCoeff(&comp));
            } else if (sup > 0.0) {
                const Vec r = complement * x;
                violation = r.norm() / sup;
                r.cwiseAbs().maxCoeff(&comp);
            }
            obs.worst_violation = std::max(obs.worst_violation, violation);
            if (violation > tol && !obs.witness) {
                obs.witness = Witness{trajectory.times[static_cast<std::size_t>(k)], node, comp};
            }
        }
    }
    obs.holds = obs.worst_violation <= tol;
    return obs;
}

PropertyObservation check_domination(const Trajectory& dominated, const Trajectory& dominating,
                                     double tol) {
    require_matched(dominated, dominating, true, "check_domination");
    PropertyObservation obs;
    obs.property = PropertyKind::domination;
    obs.tolerance = tol;
    for (Eigen::Index k = 0; k < dominated.size(); ++k) {
        const Mat gap = dominated.nodal(k).cwiseAbs() - dominating.nodal(k);
        for (Eigen::Index node = 0; node < gap.rows(); ++node) {
            for (Eigen::Index c = 0; c < gap.cols(); ++c) {
                obs.worst_violation = std::max(obs.worst_violation, gap(node, c));
                if (gap(node, c) > tol && !obs.witness) {
                    obs.witness = Witness{dominated.times[static_cast<std::size_t>(k)], node, c};
                }
            }
        }
    }
    obs.holds = obs.worst_violation <= tol;
    return obs;
}

bool is_tensor_form(const Scenario& s) {
    const Eigen::Index m = s.m;
    const auto ok_piecewise = [](const PiecewiseMatrix& p) {
        return std::all_of(p.values().begin(), p.values().end(),
                           [](const Mat& a) { return is_multiple_of_identity(a, nullptr); });
    };
    return ok_piecewise(s.diffusion) && (!s.potential || ok_piecewise(*s.potential)) &&
           is_multiple_of_identity(s.s_left, nullptr) && is_multiple_of_identity(s.s_right, nullptr) &&
           s.y_left.dim() == m && s.y_right.dim() == m;
}

PropertyObservation check_scalar_domination(const Trajectory& vector_traj,
                                            const Trajectory& scalar_traj, double tol) {
    require_matched(vector_traj, scalar_traj, false, "check_scalar_domination");
    const Scenario& v = vector_traj.scenario;
    const Scenario& s = scalar_traj.scenario;
    if (!is_tensor_form(v)) {
        throw std::invalid_argument("check_scalar_domination: scenario '" + v.name +
                                    "' is not of the form D = d I, S = s I, Y = W");
    }
    if (s.m != 1 || s.y_left.dim() != 1 || s.y_right.dim() != 1) {
        throw std::invalid_argument("check_scalar_domination: dominating trajectory must be scalar with Y = R");
    }
    const auto same = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); };
    bool coefficients_match = same(v.s_left(0, 0), s.s_left(0, 0)) && same(v.s_right(0, 0), s.s_right(0, 0)) &&
                              v.diffusion.breakpoints() == s.diffusion.breakpoints();
    for (std::size_t i = 0; coefficients_match && i < v.diffusion.values().size(); ++i) {
        coefficients_match = same(v.diffusion.values()[i](0, 0), s.diffusion.values()[i](0, 0));
    }
    if (!coefficients_match) {
        throw std::invalid_argument("check_scalar_domination: scalar coefficients (d, s) do not match the vector scenario");
    }

    PropertyObservation obs;
    obs.property = PropertyKind::scalar_domination;
    obs.tolerance = tol;
    for (Eigen::Index k = 0; k < vector_traj.size(); ++k) {
        const Vec norms = vector_traj.nodal(k).rowwise().norm();
        const Vec gap = norms - scalar_traj.nodal(k).col(0);
        Eigen::Index node = 0;
        const double worst = gap.maxCoeff(&node);
        obs.worst_violation = std::max(obs.worst_violation, worst);
        if (worst > tol && !obs.witness) {
            obs.witness = Witness{vector_traj.times[static_cast<std::size_t>(k)], node, 0};
        }
    }
    obs.holds = obs.worst_violation <= tol;
    return obs;
}

double decay_rate(const Trajectory& trajectory) {
    const Eigen::Index total = trajectory.size();
    if (total < 3) throw std::invalid_argument("decay_rate: trajectory too short");
    const double n0 = trajectory.l2_norm(0);
    if (!(n0 > 0.0)) throw std::invalid_argument("decay_rate: zero initial datum");

    std::vector<double> t;
    std::vector<double> logn;
    for (Eigen::Index k = 0; k < total; ++k) {
        const double nk = trajectory.l2_norm(k);
        if (nk < 1e-14 * n0) break;
        t.push_back(trajectory.times[static_cast<std::size_t>(k)]);
        logn.push_back(std::log(nk));
    }
    if (t.size() < 3) throw std::runtime_error("decay_rate: norm underflows before a usable window");

    const double t_mid = 0.5 * (t.front() + t.back());
    double st = 0, sy = 0, stt = 0, sty = 0, count = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_mid) continue;
        st += t[i];
        sy += logn[i];
        stt += t[i] * t[i];
        sty += t[i] * logn[i];
        count += 1;
    }
    if (count < 2) throw std::runtime_error("decay_rate: window has fewer than two samples");
    const double slope = (count * sty - st * sy) / (count * stt - st * st);
    return -slope;
}

}  // namespace vdiff
