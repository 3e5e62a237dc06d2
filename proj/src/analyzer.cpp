#include "vdiff/analyzer.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <sstream>
#include <stdexcept>

namespace vdiff {

namespace {

constexpr double kStructureTol = 1e-9;
constexpr double kReachThreshold = 1e-10;
constexpr double kSymmetryTol = 1e-12;

Mat sym(const Mat& a) { return 0.5 * (a + a.transpose()); }

bool is_psd(const Mat& a) {
    if (a.size() == 0) return true;
    Eigen::SelfAdjointEigenSolver<Mat> es(sym(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -1e-10 * std::max(1.0, a.cwiseAbs().maxCoeff());
}

bool is_diagonal(const Mat& a) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (i != j && std::abs(a(i, j)) > 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff())) return false;
        }
    }
    return true;
}

bool near_zero(const Mat& a, double scale = 1.0) {
    return a.size() == 0 || a.cwiseAbs().maxCoeff() <= kStructureTol * std::max(1.0, scale);
}

bool all_pieces(const PiecewiseMatrix& p, bool (*pred)(const Mat&)) {
    return std::all_of(p.values().begin(), p.values().end(), pred);
}

bool same_piecewise(const PiecewiseMatrix& a, const PiecewiseMatrix& b) {
    if (a.breakpoints() != b.breakpoints() || a.values().size() != b.values().size()) return false;
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        const Mat& x = a.values()[i];
        const Mat& y = b.values()[i];
        if (x.rows() != y.rows() || x.cols() != y.cols()) return false;
        if ((x - y).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, x.cwiseAbs().maxCoeff())) return false;
    }
    return true;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

std::string vec_str(const Vec& v) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v(i));
    return s + ")";
}

OrderInterval interval_of(const Target& t, Eigen::Index m) {
    switch (t.kind) {
        case PropertyKind::positivity: return OrderInterval::positive_cone(m);
        case PropertyKind::linf_contraction: return OrderInterval::symmetric_box(m, 1.0);
        default:
            if (!t.interval) throw std::invalid_argument("interval target without an interval");
            if (t.interval->dim() != m) throw std::invalid_argument("target interval has the wrong dimension");
            return *t.interval;
    }
}

bool is_interval_kind(PropertyKind k) {
    return k == PropertyKind::positivity || k == PropertyKind::linf_contraction ||
           k == PropertyKind::interval_invariance;
}

// ---------------------------------------------------------------------------
// Prediction

struct Builder {
    Prediction p;
    void add(std::string name, bool value) { p.criterion_trace.push_back({std::move(name), value}); }
    bool all() const {
        return std::all_of(p.criterion_trace.begin(), p.criterion_trace.end(),
                           [](const Criterion& c) { return c.value; });
    }
    Prediction finish(Applicability a) {
        p.applicability = a;
        p.predicted = all();
        return std::move(p);
    }
};

Prediction predict_interval(const Scenario& sc, const Target& target, const PredictOptions& opt) {
    Builder b;
    b.p.target = target;
    const OrderInterval j = interval_of(target, sc.m);
    b.add("J contains 0", j.contains_zero());
    if (!j.contains_zero()) {
        b.p.note = "the characterization needs an interval containing 0";
        return b.finish(Applicability::inapplicable);
    }
    b.add("P_Y left leaves J invariant", interval_invariant(sc.y_left.projection(), j, opt.samples, opt.seed));
    b.add("P_Y right leaves J invariant", interval_invariant(sc.y_right.projection(), j, opt.samples, opt.seed));
    if (!all_pieces(sc.diffusion, is_diagonal)) {
        b.p.note = "D is not local: only the necessary condition on P_Y is decided";
        return b.finish(Applicability::necessary_only);
    }
    b.add("e^{-tS_left} leaves J invariant", semigroup_preserves_interval(-sc.s_left, j));
    b.add("e^{-tS_right} leaves J invariant", semigroup_preserves_interval(-sc.s_right, j));
    if (sc.potential) {
        bool ok = true;
        for (const Mat& c : sc.potential->values()) ok = ok && semigroup_preserves_interval(-c, j);
        b.add("e^{-tC} leaves J invariant", ok);
    }
    return b.finish(Applicability::applicable);
}

Prediction predict_subspace(const Scenario& sc, const Target& target) {
    Builder b;
    b.p.target = target;
    if (!target.subspace) throw std::invalid_argument("subspace target without a subspace");
    const Subspace& c = *target.subspace;
    if (c.ambient_dim() != sc.m) throw std::invalid_argument("target subspace has the wrong dimension");
    const Mat pc = c.projection();
    const Mat qc = Mat::Identity(sc.m, sc.m) - pc;
    const auto leaves = [&](const Mat& a) { return near_zero(qc * a * pc, a.cwiseAbs().maxCoeff()); };

    b.add("P_Y left C subset C", leaves(sc.y_left.projection()));
    b.add("P_Y right C subset C", leaves(sc.y_right.projection()));
    bool d_ok = true;
    for (const Mat& d : sc.diffusion.values()) d_ok = d_ok && leaves(d);
    b.add("D C subset C", d_ok);
    b.add("(I-P_C) S_left P_C = 0", leaves(sc.s_left));
    b.add("(I-P_C) S_right P_C = 0", leaves(sc.s_right));
    if (sc.potential) {
        bool ok = true;
        for (const Mat& v : sc.potential->values()) ok = ok && leaves(v);
        b.add("(I-P_C) C_pot P_C = 0", ok);
    }
    return b.finish(Applicability::applicable);
}

Prediction predict_irreducibility(const Scenario& sc, const Target& target) {
    Builder b;
    b.p.target = target;
    const Mat pl = sc.y_left.projection();
    const Mat pr = sc.y_right.projection();
    std::vector<Mat> family{pl, pr, pl * sc.s_left * pl, pr * sc.s_right * pr};
    for (const Mat& d : sc.diffusion.values()) family.push_back(d);
    if (sc.potential) {
        for (const Mat& c : sc.potential->values()) family.push_back(c);
    }
    b.add("coefficient pattern strongly connected", pattern_strongly_connected(family, sc.m));
    b.p.note = std::string("P_Y irreducible: left ") + (is_irreducible(pl) ? "true" : "false") + ", right " +
               (is_irreducible(pr) ? "true" : "false");
    return b.finish(Applicability::applicable);
}

Prediction predict_decay(const Scenario& sc, const Target& target, const PredictOptions& opt) {
    Builder b;
    b.p.target = target;
    const DiscreteForm form = assemble(sc, build_mesh(opt.n_elements));
    const FormDiagnostics d = form_diagnostics(form);
    b.add("form accretive", d.accretive);
    if (!d.accretive) {
        b.p.note = "kernel criterion needs an accretive form";
        return b.finish(Applicability::inapplicable);
    }
    b.add("kernel_dim = 0", d.kernel_dim == 0);
    b.p.note = "kernel_dim = " + std::to_string(d.kernel_dim);
    return b.finish(Applicability::applicable);
}

Prediction predict_symmetry(const Scenario& sc, const Target& target) {
    Builder b;
    b.p.target = target;
    const auto symmetric = [](const Mat& a) {
        return (a - a.transpose()).cwiseAbs().maxCoeff() <= kSymmetryTol * std::max(1.0, a.cwiseAbs().maxCoeff());
    };
    bool d_ok = true;
    for (const Mat& d : sc.diffusion.values()) d_ok = d_ok && symmetric(d);
    b.add("D symmetric", d_ok);
    if (sc.potential) {
        bool ok = true;
        for (const Mat& c : sc.potential->values()) ok = ok && symmetric(c);
        b.add("C symmetric", ok);
    }
    const auto boundary_ok = [&](const Subspace& y, const Mat& s) {
        const Mat q = y.basis();
        return q.cols() == 0 || symmetric(q.transpose() * s * q);
    };
    b.add("S_left symmetric on Y", boundary_ok(sc.y_left, sc.s_left));
    b.add("S_right symmetric on Y", boundary_ok(sc.y_right, sc.s_right));
    return b.finish(Applicability::applicable);
}

Prediction predict_scalar_domination(const Scenario& sc, const Target& target) {
    Builder b;
    b.p.target = target;
    b.add("D = d I, S = s I, Y = W", is_tensor_form(sc));
    if (!b.all()) {
        b.p.note = "scalar comparison needs a tensor-form scenario";
        return b.finish(Applicability::inapplicable);
    }
    return b.finish(Applicability::applicable);
}

Prediction predict_domination(const Scenario& sc, const Target& target, const PredictOptions& opt) {
    Builder b;
    b.p.target = target;
    if (!target.dominating) throw std::invalid_argument("domination target without a dominating scenario");
    const Scenario& s2 = *target.dominating;

    const bool same_m = s2.m == sc.m;
    b.add("same m", same_m);
    if (same_m) {
        b.add("same D", same_piecewise(sc.diffusion, s2.diffusion));
        b.add("no potential", !sc.potential && !s2.potential);
        b.add("P_Y2 positive", is_positive_operator(s2.y_left.projection()) &&
                                   is_positive_operator(s2.y_right.projection()));
        const Prediction pos2 = predict_interval(s2, Target::positivity(), opt);
        b.add("dominating scenario positive", pos2.predicted && pos2.applicability == Applicability::applicable);
        b.add("S_1, S_2 positive semidefinite",
              is_psd(sc.s_left) && is_psd(sc.s_right) && is_psd(s2.s_left) && is_psd(s2.s_right));
    }
    if (!b.all()) {
        b.p.note = "hypotheses of the domination characterization fail";
        return b.finish(Applicability::inapplicable);
    }
    const auto rho_ok = [](const Subspace& y1, const Mat& s1, const Mat& s2m) {
        const Mat q = y1.basis();
        return q.cols() == 0 || is_psd(q.transpose() * (sym(s1) - sym(s2m)) * q);
    };
    b.add("Y_1 ideal of Y_2 (left)", is_ideal(sc.y_left, s2.y_left, opt.samples, opt.seed));
    b.add("Y_1 ideal of Y_2 (right)", is_ideal(sc.y_right, s2.y_right, opt.samples, opt.seed));
    b.add("S_1 >= S_2 on Y_1 (left)", rho_ok(sc.y_left, sc.s_left, s2.s_left));
    b.add("S_1 >= S_2 on Y_1 (right)", rho_ok(sc.y_right, sc.s_right, s2.s_right));
    return b.finish(Applicability::applicable);
}

// ---------------------------------------------------------------------------
// Verification

struct Data {
    const DiscreteForm& form;
    Eigen::Index m;
    int n;  // elements

    Vec zero() const { return Vec::Zero(form.n_full()); }
    void set(Vec& u, int node, const Vec& v) const { u.segment(node * m, m) = v; }
    double x(int node) const { return form.mesh.nodes[static_cast<std::size_t>(node)]; }

    Vec interior_constant(const Vec& v) const {
        Vec u = zero();
        for (int i = 1; i < n; ++i) set(u, i, v);
        return u;
    }
    /// v on interior nodes within a quarter of the given end (0 left, 1 right).
    Vec bump(const Vec& v, int side) const {
        Vec u = zero();
        for (int i = 1; i < n; ++i) {
            if ((side == 0 && x(i) < 0.25) || (side == 1 && x(i) > 0.75)) set(u, i, v);
        }
        return u;
    }
};

/// Largest t in [0, 1] with t y in J (J contains 0).
double fit_scale(const Vec& y, const OrderInterval& j) {
    double t = 1.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y(i) > 0 && std::isfinite(j.upper()(i))) t = std::min(t, j.upper()(i) / y(i));
        if (y(i) < 0 && std::isfinite(j.lower()(i))) t = std::min(t, j.lower()(i) / y(i));
    }
    return std::max(t, 0.0);
}

Vec random_in(const Subspace& y, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vec c(y.dim());
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = normal(rng);
    return y.basis() * c;
}

Vec random_in_fitted(const Subspace& y, const OrderInterval& j, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Vec v = random_in(y, rng);
    return fit_scale(v, j) * unit(rng) * v;
}

Vec uniform_box(Eigen::Index m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec v(m);
    for (Eigen::Index i = 0; i < m; ++i) v(i) = u(rng);
    return v;
}

void merge(PropertyObservation& into, const PropertyObservation& o, bool first) {
    if (first) {
        into = o;
        return;
    }
    into.worst_violation = std::max(into.worst_violation, o.worst_violation);
    into.holds = into.holds && o.holds;
    if (!into.witness && o.witness) into.witness = o.witness;
}

Trajectory thin(const Trajectory& t, int max_snapshots, std::optional<double> keep_time) {
    const Eigen::Index total = t.size();
    std::vector<Eigen::Index> idx;
    if (max_snapshots < 2 || total <= max_snapshots) {
        for (Eigen::Index k = 0; k < total; ++k) idx.push_back(k);
    } else {
        for (int i = 0; i < max_snapshots; ++i) {
            idx.push_back(static_cast<Eigen::Index>(
                std::llround(static_cast<double>(i) * static_cast<double>(total - 1) / (max_snapshots - 1))));
        }
        if (keep_time) {
            const auto it = std::lower_bound(t.times.begin(), t.times.end(), *keep_time - 1e-15);
            if (it != t.times.end()) idx.push_back(static_cast<Eigen::Index>(it - t.times.begin()));
        }
        std::sort(idx.begin(), idx.end());
        idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    }
    Trajectory out;
    out.scenario = t.scenario;
    out.mesh = t.mesh;
    out.constraint = t.constraint;
    out.mass_lumped_c = t.mass_lumped_c;
    out.states.resize(t.states.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.times.push_back(t.times[static_cast<std::size_t>(idx[i])]);
        out.states.col(static_cast<Eigen::Index>(i)) = t.states.col(idx[i]);
    }
    return out;
}

struct Context {
    const Scenario& scenario;
    const SimConfig& config;
    const DiscreteForm& form;
    const StepOperator& stepper;
    double dt;
};

/// Runs trials and folds their observations. `stop_on_witness` ends the
/// search at the first violation.
class Search {
public:
    Search(ReportRow& row, int max_snapshots) : row_(row), max_snapshots_(max_snapshots) {}

    bool record(const PropertyObservation& o, const Trajectory& t) {
        merge(row_.observation, o, row_.trials == 0);
        ++row_.trials;
        const bool violated = !o.holds;
        if (!row_.sample || (violated && !witness_kept_)) {
            std::optional<double> at;
            if (o.witness) at = o.witness->time;
            row_.sample = thin(t, max_snapshots_, at);
            witness_kept_ = violated;
        }
        return violated;
    }

private:
    ReportRow& row_;
    int max_snapshots_;
    bool witness_kept_ = false;
};

void verify_interval(const Context& ctx, ReportRow& row, std::mt19937_64& rng) {
    const Scenario& sc = ctx.scenario;
    const OrderInterval j = interval_of(row.prediction.target, sc.m);
    if (!j.contains_zero()) return;
    const Data data{ctx.form, sc.m, ctx.form.mesh.n_elements()};
    const bool hunt = !row.prediction.predicted;
    Search search(row, ctx.config.max_snapshots);

    const auto run = [&](const Vec& u0) {
        const Trajectory t = evolve(ctx.form, ctx.stepper, u0, ctx.config.t_end);
        return search.record(observe(t, ConvexSet(j), ctx.config.tol, row.prediction.target.kind), t) && hunt;
    };

    std::vector<Vec> structured;
    for (const Vec& v : interval_vertices(j, 1.0, 64)) {
        structured.push_back(data.interior_constant(v));
        structured.push_back(data.bump(v, 0));
        structured.push_back(data.bump(v, 1));
    }
    for (const Vec& u0 : structured) {
        if (run(u0)) return;
    }
    const int trials = hunt ? ctx.config.witness_trials : ctx.config.random_trials;
    const int n = data.n;
    for (int k = 0; k < trials; ++k) {
        Vec u0 = data.zero();
        for (int i = 1; i < n; ++i) data.set(u0, i, sample_point(ConvexSet(j), rng));
        data.set(u0, 0, random_in_fitted(sc.y_left, j, rng));
        data.set(u0, n, random_in_fitted(sc.y_right, j, rng));
        if (run(u0)) return;
    }
}

void verify_subspace(const Context& ctx, ReportRow& row, std::mt19937_64& rng) {
    const Scenario& sc = ctx.scenario;
    const Subspace& c = *row.prediction.target.subspace;
    const Subspace cl = intersect(c, sc.y_left);
    const Subspace cr = intersect(c, sc.y_right);
    const Data data{ctx.form, sc.m, ctx.form.mesh.n_elements()};
    const bool hunt = !row.prediction.predicted;
    Search search(row, ctx.config.max_snapshots);

    const auto run = [&](const Vec& u0) {
        const Trajectory t = evolve(ctx.form, ctx.stepper, u0, ctx.config.t_end);
        return search.record(observe(t, ConvexSet(c), ctx.config.tol, PropertyKind::subspace_invariance), t) &&
               hunt;
    };

    for (Eigen::Index k = 0; k < c.dim(); ++k) {
        const Vec v = c.basis().col(k);
        for (const Vec& u0 : {data.interior_constant(v), data.bump(v, 0), data.bump(v, 1)}) {
            if (run(u0)) return;
        }
    }
    if (c.dim() == 0) {
        run(data.zero());
        return;
    }
    const int trials = hunt ? ctx.config.witness_trials : ctx.config.random_trials;
    const int n = data.n;
    for (int k = 0; k < trials; ++k) {
        Vec u0 = data.zero();
        for (int i = 1; i < n; ++i) data.set(u0, i, random_in(c, rng));
        data.set(u0, 0, random_in(cl, rng));
        data.set(u0, n, random_in(cr, rng));
        if (run(u0)) return;
    }
}

/// Signed data in V_{Y_1}: structured sign patterns and bumps, then random.
std::vector<Vec> signed_structured(const Data& data) {
    std::vector<Vec> out;
    for (const Vec& v : interval_vertices(OrderInterval::symmetric_box(data.m), 1.0, 64)) {
        out.push_back(data.interior_constant(v));
        out.push_back(data.bump(v, 0));
        out.push_back(data.bump(v, 1));
    }
    for (Eigen::Index c = 0; c < data.m; ++c) {
        const Vec e = Vec::Unit(data.m, c);
        out.push_back(data.bump(e, 0));
        out.push_back(data.bump(e, 1));
    }
    return out;
}

Vec signed_random(const Data& data, const Scenario& sc, std::mt19937_64& rng) {
    const OrderInterval box = OrderInterval::symmetric_box(sc.m);
    Vec u0 = data.zero();
    for (int i = 1; i < data.n; ++i) data.set(u0, i, uniform_box(sc.m, rng));
    data.set(u0, 0, random_in_fitted(sc.y_left, box, rng));
    data.set(u0, data.n, random_in_fitted(sc.y_right, box, rng));
    return u0;
}

void verify_domination(const Context& ctx, ReportRow& row, std::mt19937_64& rng) {
    const Scenario& sc = ctx.scenario;
    const Scenario& s2 = *row.prediction.target.dominating;
    if (s2.m != sc.m) return;
    const DiscreteForm form2 = assemble(s2, ctx.form.mesh);
    const StepOperator stepper2(form2, ctx.dt, ctx.config.scheme, ctx.config.mass);
    const Data data{ctx.form, sc.m, ctx.form.mesh.n_elements()};
    const bool hunt = !row.prediction.predicted;
    Search search(row, ctx.config.max_snapshots);

    const auto run = [&](const Vec& u0) {
        const Trajectory t1 = evolve(ctx.form, ctx.stepper, u0, ctx.config.t_end);
        const Trajectory t2 = evolve(form2, stepper2, u0.cwiseAbs(), ctx.config.t_end);
        return search.record(check_domination(t1, t2, ctx.config.tol), t1) && hunt;
    };
    for (const Vec& u0 : signed_structured(data)) {
        if (run(u0)) return;
    }
    const int trials = hunt ? ctx.config.witness_trials : ctx.config.random_trials;
    for (int k = 0; k < trials; ++k) {
        if (run(signed_random(data, sc, rng))) return;
    }
}

Scenario scalar_companion(const Scenario& sc) {
    Scenario s;
    s.name = sc.name + "/scalar";
    s.m = 1;
    std::vector<Mat> d;
    for (const Mat& v : sc.diffusion.values()) d.push_back(v.topLeftCorner(1, 1));
    s.diffusion = PiecewiseMatrix(sc.diffusion.breakpoints(), d);
    s.s_left = sc.s_left.topLeftCorner(1, 1);
    s.s_right = sc.s_right.topLeftCorner(1, 1);
    s.y_left = Subspace::whole(1);
    s.y_right = Subspace::whole(1);
    if (sc.potential) {
        std::vector<Mat> c;
        for (const Mat& v : sc.potential->values()) c.push_back(v.topLeftCorner(1, 1));
        s.potential = PiecewiseMatrix(sc.potential->breakpoints(), c);
    }
    s.gamma = sc.gamma;
    return s;
}

void verify_scalar_domination(const Context& ctx, ReportRow& row, std::mt19937_64& rng) {
    const Scenario& sc = ctx.scenario;
    if (!is_tensor_form(sc)) return;
    const Scenario scalar = scalar_companion(sc);
    const DiscreteForm form2 = assemble(scalar, ctx.form.mesh);
    const StepOperator stepper2(form2, ctx.dt, ctx.config.scheme, ctx.config.mass);
    const Data data{ctx.form, sc.m, ctx.form.mesh.n_elements()};
    const bool hunt = !row.prediction.predicted;
    Search search(row, ctx.config.max_snapshots);

    const auto run = [&](const Vec& u0) {
        Vec v0(data.n + 1);
        for (int i = 0; i <= data.n; ++i) v0(i) = u0.segment(i * sc.m, sc.m).norm();
        const Trajectory t1 = evolve(ctx.form, ctx.stepper, u0, ctx.config.t_end);
        const Trajectory t2 = evolve(form2, stepper2, v0, ctx.config.t_end);
        return search.record(check_scalar_domination(t1, t2, ctx.config.tol), t1) && hunt;
    };
    for (const Vec& u0 : signed_structured(data)) {
        if (run(u0)) return;
    }
    const int trials = hunt ? ctx.config.witness_trials : ctx.config.random_trials;
    for (int k = 0; k < trials; ++k) {
        Vec u0 = data.zero();
        for (int i = 0; i <= data.n; ++i) data.set(u0, i, uniform_box(sc.m, rng));
        if (run(u0)) return;
    }
}

void verify_decay(const Context& ctx, ReportRow& row, std::mt19937_64& rng) {
    const Scenario& sc = ctx.scenario;
    const Data data{ctx.form, sc.m, ctx.form.mesh.n_elements()};
    const bool hunt = !row.prediction.predicted;
    Search search(row, ctx.config.max_snapshots);

    const auto run = [&](const Vec& u0) {
        const Trajectory t = evolve(ctx.form, ctx.stepper, u0, ctx.config.t_end);
        const double rate = decay_rate(t);
        PropertyObservation o;
        o.property = PropertyKind::decay;
        o.tolerance = 0.0;
        o.worst_violation = std::max(0.0, ctx.config.decay_threshold - rate);
        o.holds = o.worst_violation <= o.tolerance;
        if (!o.holds) o.witness = Witness{t.times.back(), 0, 0};
        return search.record(o, t) && hunt;
    };

    if (hunt) {
        const Mat kernel = null_space(Mat(ctx.form.operator_c), 1e-9 * std::max(1.0, Mat(ctx.form.operator_c).norm()));
        for (Eigen::Index k = 0; k < kernel.cols(); ++k) {
            if (run(ctx.form.expand(kernel.col(k)))) return;
        }
    }
    const int trials = hunt ? ctx.config.witness_trials : ctx.config.random_trials;
    for (int k = 0; k < trials; ++k) {
        if (run(signed_random(data, sc, rng))) return;
    }
}

void verify_irreducibility(const Context& ctx, ReportRow& row) {
    const Scenario& sc = ctx.scenario;
    const Data data{ctx.form, sc.m, ctx.form.mesh.n_elements()};
    Search search(row, ctx.config.max_snapshots);
    for (Eigen::Index i = 0; i < sc.m; ++i) {
        const Trajectory t = evolve(ctx.form, ctx.stepper, data.interior_constant(Vec::Unit(sc.m, i)), ctx.config.t_end);
        Vec reach = Vec::Zero(sc.m);
        for (Eigen::Index k = 0; k < t.size(); ++k) reach = reach.cwiseMax(t.nodal(k).cwiseAbs().colwise().maxCoeff().transpose());
        const double top = reach.maxCoeff();
        PropertyObservation o;
        o.property = PropertyKind::irreducibility;
        o.tolerance = 0.0;
        Eigen::Index weakest = 0;
        const Vec rel = top > 0 ? Vec(reach / top) : Vec(Vec::Zero(sc.m));
        const double least = rel.minCoeff(&weakest);
        o.worst_violation = std::max(0.0, kReachThreshold - least);
        if (o.worst_violation > 0) o.witness = Witness{t.times.back(), 0, weakest};
        o.holds = o.worst_violation <= o.tolerance;
        search.record(o, t);
    }
}

void verify_symmetry(const Context& ctx, ReportRow& row) {
    const Mat a = Mat(ctx.form.operator_c);
    PropertyObservation o;
    o.property = PropertyKind::symmetry;
    o.tolerance = kSymmetryTol;
    o.worst_violation = a.size() ? (a - a.transpose()).norm() / std::max(1.0, a.norm()) : 0.0;
    o.holds = o.worst_violation <= o.tolerance;
    row.observation = o;
}

Verdict decide(const ReportRow& row) {
    const Prediction& p = row.prediction;
    if (p.applicability == Applicability::inapplicable) return Verdict::inapplicable;
    const bool holds = row.observation.holds;
    if (p.predicted) {
        if (holds) return Verdict::confirmed;
        return p.applicability == Applicability::necessary_only ? Verdict::inapplicable
                                                                 : Verdict::refuted_prediction;
    }
    return holds ? Verdict::no_counterexample_found : Verdict::confirmed;
}

ReportRow run_row(const Context& ctx, const Prediction& prediction, std::uint64_t seed) {
    ReportRow row;
    row.prediction = prediction;
    row.observation.property = prediction.target.kind;
    row.observation.tolerance = ctx.config.tol;
    std::mt19937_64 rng(seed);
    try {
        switch (prediction.target.kind) {
            case PropertyKind::positivity:
            case PropertyKind::linf_contraction:
            case PropertyKind::interval_invariance: verify_interval(ctx, row, rng); break;
            case PropertyKind::subspace_invariance: verify_subspace(ctx, row, rng); break;
            case PropertyKind::domination: verify_domination(ctx, row, rng); break;
            case PropertyKind::scalar_domination: verify_scalar_domination(ctx, row, rng); break;
            case PropertyKind::decay: verify_decay(ctx, row, rng); break;
            case PropertyKind::irreducibility: verify_irreducibility(ctx, row); break;
            case PropertyKind::symmetry: verify_symmetry(ctx, row); break;
        }
        row.verdict = decide(row);
    } catch (const NumericalError& e) {
        row.error = e.what();
        row.verdict = Verdict::numerical_error;
    } catch (const std::exception& e) {
        row.error = e.what();
        row.verdict = Verdict::numerical_error;
    }
    return row;
}

}  // namespace

// ---------------------------------------------------------------------------

Target Target::positivity() { return Target{PropertyKind::positivity, {}, {}, nullptr}; }
Target Target::linf_contraction() { return Target{PropertyKind::linf_contraction, {}, {}, nullptr}; }
Target Target::interval_invariance(OrderInterval interval) {
    return Target{PropertyKind::interval_invariance, std::move(interval), {}, nullptr};
}
Target Target::subspace_invariance(Subspace subspace) {
    return Target{PropertyKind::subspace_invariance, {}, std::move(subspace), nullptr};
}
Target Target::dominated_by(Scenario dominating) {
    return Target{PropertyKind::domination, {}, {}, std::make_shared<const Scenario>(std::move(dominating))};
}
Target Target::scalar_domination() { return Target{PropertyKind::scalar_domination, {}, {}, nullptr}; }
Target Target::decay() { return Target{PropertyKind::decay, {}, {}, nullptr}; }
Target Target::irreducibility() { return Target{PropertyKind::irreducibility, {}, {}, nullptr}; }
Target Target::symmetry() { return Target{PropertyKind::symmetry, {}, {}, nullptr}; }

std::string Target::label() const {
    std::string s = to_string(kind);
    if (kind == PropertyKind::interval_invariance && interval) {
        s += "[" + vec_str(interval->lower()) + "," + vec_str(interval->upper()) + "]";
    } else if (kind == PropertyKind::subspace_invariance && subspace) {
        s += "[dim " + std::to_string(subspace->dim()) + "]";
    } else if (kind == PropertyKind::domination && dominating) {
        s += "[by " + dominating->name + "]";
    }
    return s;
}

std::vector<Target> default_targets(const Scenario& scenario) {
    std::vector<Target> t{Target::positivity(), Target::linf_contraction(), Target::irreducibility(),
                          Target::decay(), Target::symmetry()};
    if (is_tensor_form(scenario)) t.push_back(Target::scalar_domination());
    return t;
}

std::vector<Prediction> predict(const Scenario& scenario, const std::vector<Target>& targets,
                                const PredictOptions& options) {
    scenario.validate();
    std::vector<Prediction> out;
    out.reserve(targets.size());
    for (const Target& t : targets) {
        if (is_interval_kind(t.kind)) {
            out.push_back(predict_interval(scenario, t, options));
            continue;
        }
        switch (t.kind) {
            case PropertyKind::subspace_invariance: out.push_back(predict_subspace(scenario, t)); break;
            case PropertyKind::domination: out.push_back(predict_domination(scenario, t, options)); break;
            case PropertyKind::scalar_domination: out.push_back(predict_scalar_domination(scenario, t)); break;
            case PropertyKind::decay: out.push_back(predict_decay(scenario, t, options)); break;
            case PropertyKind::irreducibility: out.push_back(predict_irreducibility(scenario, t)); break;
            case PropertyKind::symmetry: out.push_back(predict_symmetry(scenario, t)); break;
            default: break;
        }
    }
    return out;
}

std::string to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::confirmed: return "confirmed";
        case Verdict::refuted_prediction: return "refuted_prediction";
        case Verdict::no_counterexample_found: return "no_counterexample_found";
        case Verdict::inapplicable: return "inapplicable";
        case Verdict::numerical_error: return "numerical_error";
    }
    return "?";
}

std::string to_string(Applicability a) {
    switch (a) {
        case Applicability::applicable: return "applicable";
        case Applicability::necessary_only: return "necessary_only";
        case Applicability::inapplicable: return "inapplicable";
    }
    return "?";
}

bool Report::any_refuted() const {
    return std::any_of(rows.begin(), rows.end(),
                       [](const ReportRow& r) { return r.verdict == Verdict::refuted_prediction; });
}

bool Report::any_numerical_error() const {
    return std::any_of(rows.begin(), rows.end(),
                       [](const ReportRow& r) { return r.verdict == Verdict::numerical_error; });
}

Report verify(const Scenario& scenario, const std::vector<Prediction>& predictions, const SimConfig& config) {
    scenario.validate();
    if (config.n_elements < 2) throw std::invalid_argument("verify: n_elements must be >= 2");
    if (!(config.t_end > 0)) throw std::invalid_argument("verify: t_end must be positive");

    Report report;
    report.scenario = scenario;
    report.config = config;

    const DiscreteForm form = assemble(scenario, build_mesh(config.n_elements));
    const double dt = config.dt > 0 ? config.dt : default_dt(form.mesh);
    std::optional<StepOperator> stepper;
    std::string setup_error;
    try {
        stepper.emplace(form, dt, config.scheme, config.mass);
    } catch (const NumericalError& e) {
        setup_error = e.what();
    }
    if (!stepper) {
        for (const Prediction& p : predictions) {
            ReportRow row;
            row.prediction = p;
            row.observation.property = p.target.kind;
            row.error = setup_error;
            row.verdict = Verdict::numerical_error;
            report.rows.push_back(std::move(row));
        }
        return report;
    }

    const Context ctx{scenario, config, form, *stepper, dt};
    const auto seed_of = [&](std::size_t i) { return splitmix64(config.seed ^ splitmix64(i + 1)); };
    if (config.parallel && predictions.size() > 1) {
        std::vector<std::future<ReportRow>> futures;
        futures.reserve(predictions.size());
        for (std::size_t i = 0; i < predictions.size(); ++i) {
            futures.push_back(std::async(std::launch::async, run_row, std::cref(ctx), std::cref(predictions[i]),
                                         seed_of(i)));
        }
        for (auto& f : futures) report.rows.push_back(f.get());
    } else {
        for (std::size_t i = 0; i < predictions.size(); ++i) {
            report.rows.push_back(run_row(ctx, predictions[i], seed_of(i)));
        }
    }
    return report;
}

}  // namespace vdiff
