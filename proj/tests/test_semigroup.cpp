#include "oracles.hpp"

#include "vdiff/analyzer.hpp"
#include "vdiff/semigroup.hpp"

#include <doctest.h>

using namespace vdiff;
using oracle::kPi;

namespace {

Vec nodal_datum(const Mesh& mesh, Eigen::Index m, const std::function<double(double, Eigen::Index)>& f) {
    Vec u((mesh.n_elements() + 1) * m);
    for (int i = 0; i <= mesh.n_elements(); ++i) {
        for (Eigen::Index c = 0; c < m; ++c) u(i * m + c) = f(mesh.nodes[static_cast<std::size_t>(i)], c);
    }
    return u;
}

double energy(const DiscreteForm& f, const Vec& u) { return u.dot(f.operator_c * u); }

}  // namespace

TEST_CASE("implicit Euler and Crank-Nicolson act on eigenvectors by their amplification factors") {
    const int n = 12;
    const DiscreteForm f = assemble(preset(Preset::dirichlet, 1), build_mesh(n));
    const auto pairs = eigenpairs(f, 3, MassKind::lumped);
    const double dt = 0.01;
    for (const Scheme scheme : {Scheme::implicit_euler, Scheme::crank_nicolson}) {
        const StepOperator stepper(f, dt, scheme, MassKind::lumped);
        for (const auto& p : pairs) {
            const double g = scheme == Scheme::implicit_euler
                                 ? 1.0 / (1.0 + dt * p.lambda)
                                 : (1.0 - 0.5 * dt * p.lambda) / (1.0 + 0.5 * dt * p.lambda);
            const Trajectory t = evolve(f, stepper, f.expand(p.vector), 0.1);
            REQUIRE(t.size() == 11);
            for (Eigen::Index k = 0; k < t.size(); ++k) {
                const Vec want = std::pow(g, static_cast<double>(k)) * p.vector;
                CHECK((t.states.col(k) - want).norm() < 1e-10);
            }
        }
    }
    CHECK(pairs[0].lambda == doctest::Approx(oracle::dirichlet_lumped(1, n)).epsilon(1e-12));
}

TEST_CASE("eigenpairs are mass-orthonormal and ascending") {
    const DiscreteForm f = assemble(preset(Preset::kirchhoff, 3), build_mesh(10));
    for (const MassKind mass : {MassKind::lumped, MassKind::consistent}) {
        const auto pairs = eigenpairs(f, 8, mass);
        const Mat mm(f.mass_c(mass));
        const Mat a(f.operator_c);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (i > 0) CHECK(pairs[i].lambda >= pairs[i - 1].lambda);
            CHECK((a * pairs[i].vector - pairs[i].lambda * mm * pairs[i].vector).norm() < 1e-8);
            for (std::size_t j = 0; j < pairs.size(); ++j) {
                CHECK(pairs[i].vector.dot(mm * pairs[j].vector) == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0));
            }
        }
        CHECK(std::abs(pairs[0].lambda) < 1e-9);
    }
    CHECK_THROWS_AS(eigenpairs(f, 0, MassKind::lumped), std::out_of_range);
    CHECK_THROWS_AS(eigenpairs(f, 1000, MassKind::lumped), std::out_of_range);
    Scenario skew = preset(Preset::neumann, 2);
    skew.s_left(0, 1) = 1.0;
    CHECK_THROWS_AS(eigenpairs(assemble(skew, build_mesh(4)), 1, MassKind::lumped), std::invalid_argument);
}

TEST_CASE("Neumann keeps constants and conserves lumped mass") {
    const Mesh mesh = build_mesh(16);
    const DiscreteForm f = assemble(preset(Preset::neumann, 2), mesh);
    const Trajectory c = evolve(f, Vec::Constant(f.n_full(), 0.7), {.t_end = 0.5});
    for (Eigen::Index k = 0; k < c.size(); ++k) CHECK((c.nodal(k).array() - 0.7).abs().maxCoeff() < 1e-12);

    const Vec u0 = nodal_datum(mesh, 2, [](double x, Eigen::Index comp) { return comp == 0 ? x * x : std::cos(3 * x); });
    const Trajectory t = evolve(f, u0, {.t_end = 2.0});
    const double total0 = t.states.col(0).dot(f.mass_lumped_c);
    const double total1 = t.states.col(t.size() - 1).dot(f.mass_lumped_c);
    CHECK(total1 == doctest::Approx(total0).epsilon(1e-10));
    const Mat last = t.nodal(t.size() - 1);
    CHECK((last.col(0).array() - last(0, 0)).abs().maxCoeff() < 1e-6);
}

TEST_CASE("Dirichlet sine mode decays at pi^2") {
    const Mesh mesh = build_mesh(128);
    const DiscreteForm f = assemble(preset(Preset::dirichlet, 1), mesh);
    const Vec u0 = nodal_datum(mesh, 1, [](double x, Eigen::Index) { return std::sin(kPi * x); });
    const Trajectory t = evolve(f, u0, {.t_end = 1.0, .record_every = 40});
    CHECK(decay_rate(t) == doctest::Approx(kPi * kPi).epsilon(0.01));
    const Mat mid = t.nodal(t.size() - 1);
    CHECK(mid(64, 0) == doctest::Approx(std::exp(-kPi * kPi)).epsilon(0.01));
}

TEST_CASE("Kirchhoff with equal components behaves as scalar Neumann") {
    const Mesh mesh = build_mesh(20);
    const DiscreteForm k = assemble(preset(Preset::kirchhoff, 3), mesh);
    const DiscreteForm n = assemble(preset(Preset::neumann, 1), mesh);
    const auto g = [](double x, Eigen::Index) { return 1.0 + std::sin(5 * x); };
    const Trajectory tk = evolve(k, nodal_datum(mesh, 3, g), {.t_end = 0.3});
    const Trajectory tn = evolve(n, nodal_datum(mesh, 1, g), {.t_end = 0.3});
    REQUIRE(tk.size() == tn.size());
    for (Eigen::Index s = 0; s < tk.size(); ++s) {
        const Mat a = tk.nodal(s);
        const Mat b = tn.nodal(s);
        for (Eigen::Index c = 0; c < 3; ++c) CHECK((a.col(c) - b.col(0)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("energy and mass norm decrease for symmetric accretive forms") {
    std::mt19937_64 rng(31);
    for (const Preset p : all_presets()) {
        for (Eigen::Index m = 1; m <= 3; ++m) {
            const DiscreteForm f = assemble(preset(p, m, 0.5), build_mesh(12));
            const Vec u0 = oracle::random_vec(f.n_full(), rng);
            for (const Scheme scheme : {Scheme::implicit_euler, Scheme::crank_nicolson}) {
                const Trajectory t = evolve(f, u0, {.t_end = 0.05, .scheme = scheme});
                for (Eigen::Index k = 1; k < t.size(); ++k) {
                    CHECK(t.l2_norm(k) <= t.l2_norm(k - 1) * (1 + 1e-12));
                    CHECK(energy(f, t.states.col(k)) <= energy(f, t.states.col(k - 1)) + 1e-10);
                }
            }
        }
    }
}

TEST_CASE("evolve bookkeeping") {
    const DiscreteForm f = assemble(preset(Preset::robin, 2), build_mesh(8));
    const Vec u0 = Vec::Ones(f.n_full());
    const Trajectory all = evolve(f, u0, {.dt = 0.01, .t_end = 0.1});
    const Trajectory thin = evolve(f, u0, {.dt = 0.01, .t_end = 0.1, .record_every = 3});
    CHECK(all.size() == 11);
    CHECK(thin.size() == 5);
    CHECK(thin.times.back() == doctest::Approx(0.1));
    CHECK((thin.states.col(4) - all.states.col(10)).norm() == 0.0);
    CHECK(default_dt(build_mesh(8)) == doctest::Approx(1.0 / 128));
    CHECK_THROWS_AS(evolve(f, Vec::Ones(3), {}), std::invalid_argument);
    CHECK_THROWS_AS(evolve(f, u0, {.dt = 0.5, .t_end = 0.1}), std::invalid_argument);
    CHECK_THROWS_AS(StepOperator(f, 0.0, Scheme::implicit_euler, MassKind::lumped), std::invalid_argument);
}

TEST_CASE("singular step matrix raises NumericalError") {
    Scenario s = preset(Preset::neumann, 1);
    const Mesh mesh = build_mesh(4);
    const double dt = default_dt(mesh);
    s.potential = PiecewiseMatrix(Mat::Constant(1, 1, -1.0 / dt));
    const DiscreteForm f = assemble(s, mesh);
    CHECK_THROWS_AS(StepOperator(f, dt, Scheme::implicit_euler, MassKind::lumped), NumericalError);
}

TEST_CASE("interval and subspace observers") {
    const Mesh mesh = build_mesh(8);
    const DiscreteForm f = assemble(preset(Preset::neumann, 2), mesh);
    const Vec u0 = nodal_datum(mesh, 2, [](double x, Eigen::Index c) { return c == 0 ? x - 0.2 : 0.5; });
    const Trajectory t = evolve(f, u0, {.t_end = 0.1});
    const PropertyObservation pos = observe(t, OrderInterval::positive_cone(2), 1e-12);
    CHECK_FALSE(pos.holds);
    REQUIRE(pos.witness);
    CHECK(pos.witness->time == 0.0);
    CHECK(pos.witness->node == 0);
    CHECK(pos.witness->component == 0);
    CHECK(pos.worst_violation == doctest::Approx(0.2));
    CHECK(observe(t, OrderInterval::symmetric_box(2, 1.0), 1e-12).holds);
    CHECK(observe(t, OrderInterval::symmetric_box(2, 1.0), 1e-12, PropertyKind::linf_contraction).property ==
          PropertyKind::linf_contraction);

    const PropertyObservation sub = observe(t, Subspace::span({Vec::Unit(2, 0)}, 2), 1e-12);
    CHECK_FALSE(sub.holds);
    CHECK(sub.witness->component == 1);
    const Vec e0 = nodal_datum(mesh, 2, [](double x, Eigen::Index c) { return c == 0 ? x : 0.0; });
    CHECK(observe(evolve(f, e0, {.t_end = 0.1}), Subspace::span({Vec::Unit(2, 0)}, 2), 1e-12).holds);
    CHECK_THROWS_AS(observe(t, OrderInterval::positive_cone(3), 1e-12), std::invalid_argument);
}

TEST_CASE("domination observers") {
    const Mesh mesh = build_mesh(16);
    const auto g = [](double x, Eigen::Index c) { return std::sin(7 * x + static_cast<double>(c)); };
    const Vec u0 = nodal_datum(mesh, 2, g);
    const Trajectory dir = evolve(assemble(preset(Preset::dirichlet, 2), mesh), u0, {.t_end = 0.2});
    const Trajectory neu = evolve(assemble(preset(Preset::neumann, 2), mesh), u0.cwiseAbs(), {.t_end = 0.2});
    CHECK(check_domination(dir, neu, 1e-10).holds);
    const PropertyObservation rev = check_domination(neu, dir, 1e-10);
    CHECK_FALSE(rev.holds);
    REQUIRE(rev.witness);
    const Trajectory shorter = evolve(assemble(preset(Preset::neumann, 2), mesh), u0, {.t_end = 0.1});
    CHECK_THROWS_AS(check_domination(dir, shorter, 1e-10), std::invalid_argument);

    Scenario vec = preset(Preset::robin, 3, 0.5);
    Scenario sca = preset(Preset::robin, 1, 0.5);
    const Vec w0 = nodal_datum(mesh, 3, g);
    Vec n0((mesh.n_elements() + 1));
    for (int i = 0; i <= mesh.n_elements(); ++i) n0(i) = w0.segment(3 * i, 3).norm();
    const Trajectory tv = evolve(assemble(vec, mesh), w0, {.t_end = 0.2});
    const Trajectory ts = evolve(assemble(sca, mesh), n0, {.t_end = 0.2});
    CHECK(check_scalar_domination(tv, ts, 1e-10).holds);
    CHECK(is_tensor_form(vec));
    CHECK_FALSE(is_tensor_form(preset(Preset::kirchhoff, 3)));
    const Trajectory other = evolve(assemble(preset(Preset::robin, 1, 2.0), mesh), n0, {.t_end = 0.2});
    CHECK_THROWS_AS(check_scalar_domination(tv, other, 1e-10), std::invalid_argument);
    const Trajectory kir = evolve(assemble(preset(Preset::kirchhoff, 3), mesh), w0, {.t_end = 0.2});
    CHECK_THROWS_AS(check_scalar_domination(kir, ts, 1e-10), std::invalid_argument);
}

TEST_CASE("property names round trip") {
    for (int k = 0; k <= static_cast<int>(PropertyKind::symmetry); ++k) {
        const auto kind = static_cast<PropertyKind>(k);
        CHECK(property_kind_from_string(to_string(kind)) == kind);
    }
    CHECK_FALSE(property_kind_from_string("nope"));
}
