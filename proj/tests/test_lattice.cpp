#include "oracles.hpp"

#include <doctest.h>

using namespace vdiff;
using oracle::kInf;

namespace {

Vec v(std::initializer_list<double> xs) {
    Vec out(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) out(i++) = x;
    return out;
}

Subspace ones(Eigen::Index m) { return Subspace::span({Vec::Ones(m)}, m); }

Subspace random_subspace(Eigen::Index m, Eigen::Index k, std::mt19937_64& rng) {
    std::vector<Vec> g;
    for (Eigen::Index i = 0; i < k; ++i) g.push_back(oracle::random_vec(m, rng));
    return Subspace::span(g, m);
}

Subspace coordinate_subspace(Eigen::Index m, unsigned mask) {
    std::vector<Vec> g;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (mask >> i & 1u) g.push_back(Vec::Unit(m, i));
    }
    return Subspace::span(g, m);
}

}  // namespace

TEST_CASE("lattice decomposition identities") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        Vec x = oracle::random_vec(5, rng);
        x(trial % 5) = 0.0;
        const LatticeParts p = lattice_decompose(x);
        CHECK((p.pos - p.neg - x).norm() == doctest::Approx(0.0));
        CHECK((p.pos + p.neg - x.cwiseAbs()).norm() == doctest::Approx(0.0));
        CHECK(p.pos.cwiseMin(p.neg).maxCoeff() == 0.0);
        CHECK((p.sign.cwiseProduct(p.abs) - x).norm() == 0.0);
        CHECK(p.sign(trial % 5) == 0.0);
    }
}

TEST_CASE("subspace projection is symmetric, idempotent and contractive") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index m = 1 + trial % 6;
        const Eigen::Index k = trial % (m + 1);
        const Subspace y = random_subspace(m, k, rng);
        const Mat& p = y.projection();
        CHECK(y.dim() == k);
        CHECK((p - p.transpose()).norm() < 1e-12);
        CHECK((p * p - p).norm() < 1e-12);
        CHECK((y.basis().transpose() * y.basis() - Mat::Identity(k, k)).norm() < 1e-12);
        const Vec x = oracle::random_vec(m, rng);
        CHECK(y.project(x).norm() <= x.norm() + 1e-12);
        CHECK(y.contains(y.project(x)));
        CHECK((p + y.orthogonal_complement().projection() - Mat::Identity(m, m)).norm() < 1e-12);
    }
}

TEST_CASE("subspace edge cases") {
    CHECK(Subspace::zero(3).projection().isZero());
    CHECK(Subspace::whole(3).projection().isIdentity());
    const Subspace dup = Subspace::span({v({1, 1, 0}), v({2, 2, 0}), v({0, 0, 0})}, 3);
    CHECK(dup.dim() == 1);
    CHECK_THROWS_AS(Subspace::span({v({1, 2})}, 3), std::invalid_argument);
    const Subspace k = ones(2);
    CHECK(k.projection().isApprox(Mat::Constant(2, 2, 0.5)));
}

TEST_CASE("intersection of subspaces") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const Vec a = oracle::random_vec(4, rng);
        const Vec b = oracle::random_vec(4, rng);
        const Vec c = oracle::random_vec(4, rng);
        const Subspace s = intersect(Subspace::span({a, b}, 4), Subspace::span({a, c}, 4));
        REQUIRE(s.dim() == 1);
        CHECK(s.contains(a));
    }
    CHECK(intersect(ones(3), ones(3).orthogonal_complement()).dim() == 0);
}

TEST_CASE("order intervals") {
    CHECK_THROWS_AS(OrderInterval(v({0, 1}), v({1, 0})), std::invalid_argument);
    const OrderInterval j(v({-1, -kInf}), v({2, 0.5}));
    CHECK(j.contains(v({0, -100})));
    CHECK_FALSE(j.contains(v({3, 0})));
    CHECK(j.violation(v({3, 1})) == doctest::Approx(1.0));
    CHECK(j.violation(v({0, 1})) == doctest::Approx(0.5));
    CHECK(j.contains_zero());
    CHECK(OrderInterval::positive_cone(3).is_positive_cone());
    CHECK(OrderInterval::symmetric_box(2, 3.0).is_symmetric_box());
}

TEST_CASE("interval projection matches coordinatewise nearest point") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int trial = 0; trial < 100; ++trial) {
        const Vec lo = v({u(rng) - 2, -kInf, 0.0});
        const Vec hi = v({lo(0) + 1.0, u(rng), kInf});
        const OrderInterval j(lo, hi);
        const Vec x = oracle::random_vec(3, rng, 3.0);
        const Vec p = project_interval(j, x);
        CHECK(j.contains(p));
        // Variational inequality against random points of J.
        for (int k = 0; k < 20; ++k) {
            const Vec c = sample_point(ConvexSet(j), rng);
            CHECK((x - p).dot(c - p) <= 1e-9 * (1 + c.norm()));
        }
    }
}

TEST_CASE("domination cone projection") {
    SUBCASE("closed form example") {
        const auto [u, w] = project_domination_cone(v({3}), v({1}));
        CHECK(u(0) == doctest::Approx(2.0));
        CHECK(w(0) == doctest::Approx(2.0));
        const auto [u2, w2] = project_domination_cone(v({-1, 0.5}), v({-3, 2}));
        CHECK(u2.isApprox(v({0, 0.5})));
        CHECK(w2.isApprox(v({0, 2})));
    }
    SUBCASE("grid oracle, idempotence and obtuse angle") {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 40; ++trial) {
            const Eigen::Index m = 1 + trial % 3;
            const Vec x = oracle::random_vec(m, rng, 2.0);
            const Vec y = oracle::random_vec(m, rng, 2.0);
            const auto [u, w] = project_domination_cone(x, y);
            double res = 0;
            const auto [ou, ow] = oracle::cone_nearest(x, y, &res);
            CHECK((u - ou).cwiseAbs().maxCoeff() <= 4 * res + 1e-12);
            CHECK((w - ow).cwiseAbs().maxCoeff() <= 4 * res + 1e-12);
            const auto [uu, ww] = project_domination_cone(u, w);
            CHECK((uu - u).norm() <= 1e-10);
            CHECK((ww - w).norm() <= 1e-10);
            CHECK((u.cwiseAbs().array() <= w.array() + 1e-12).all());
            for (int k = 0; k < 10; ++k) {
                const Vec cu = oracle::random_vec(m, rng);
                const Vec cw = cu.cwiseAbs() + oracle::random_vec(m, rng).cwiseAbs();
                CHECK((x - u).dot(cu - u) + (y - w).dot(cw - w) <= 1e-9);
            }
        }
    }
}

TEST_CASE("operator order properties of boundary projections") {
    CHECK(is_positive_operator(ones(3).projection()));
    CHECK(leaves_box_invariant(ones(3).projection()));
    for (int m = 1; m <= 4; ++m) {
        const Mat p = ones(m).orthogonal_complement().projection();
        CHECK(is_positive_operator(p) == (m == 1));
        CHECK(leaves_box_invariant(p) == (m <= 2));
    }
}

TEST_CASE("interval invariance agrees with the base-point/ray oracle") {
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<int> b(-2, 2);
    std::uniform_int_distribution<int> kind(0, 3);
    int agree_true = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const Eigen::Index m = 1 + trial % 3;
        Vec lo(m), hi(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            switch (kind(rng)) {
                case 0: lo(i) = -kInf; hi(i) = std::max(0, b(rng)); break;
                case 1: lo(i) = std::min(0, b(rng)); hi(i) = kInf; break;
                case 2: lo(i) = -kInf; hi(i) = kInf; break;
                default: lo(i) = std::min(0, b(rng)); hi(i) = lo(i) + 1 + std::abs(b(rng)); break;
            }
        }
        Mat a = oracle::random_int_mat(m, -1, 1, rng);
        if (trial % 4 == 0) a = Mat::Identity(m, m) * 0.5;
        if (trial % 4 == 1) a = a.cwiseAbs() / static_cast<double>(m);
        const OrderInterval j(lo, hi);
        const bool expected = oracle::maps_interval(a, lo, hi);
        CHECK(interval_invariant(a, j, 64, 17) == expected);
        agree_true += expected;
    }
    CHECK(agree_true > 20);
}

TEST_CASE("generator criterion agrees with matrix exponentials") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> b(-2, 2);
    std::uniform_int_distribution<int> kind(0, 3);
    int positives = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index m = 1 + trial % 3;
        Vec lo(m), hi(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            switch (kind(rng)) {
                case 0: lo(i) = 0; hi(i) = kInf; break;
                case 1: lo(i) = -1; hi(i) = 1; break;
                case 2: lo(i) = -kInf; hi(i) = std::max(0, b(rng)); break;
                default: lo(i) = std::min(0, b(rng)); hi(i) = lo(i) + 1 + std::abs(b(rng)); break;
            }
        }
        Mat g = oracle::random_int_mat(m, -2, 2, rng);
        if (trial % 3 == 0) {
            // Bias towards M-matrix-like generators so both answers occur.
            g = g.cwiseAbs();
            for (Eigen::Index i = 0; i < m; ++i) g(i, i) = -(g.row(i).sum() - g(i, i)) - (trial % 2);
        }
        const bool expected = oracle::exp_preserves_interval(g, lo, hi);
        CHECK(semigroup_preserves_interval(g, OrderInterval(lo, hi)) == expected);
        positives += expected;
    }
    CHECK(positives > 20);
}

TEST_CASE("classical generator conditions as special cases") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index m = 1 + trial % 4;
        const Mat s = oracle::random_int_mat(m, -2, 2, rng);
        bool off_nonpos = true, dominant = true;
        for (Eigen::Index i = 0; i < m; ++i) {
            double off = 0;
            for (Eigen::Index j = 0; j < m; ++j) {
                if (i == j) continue;
                off_nonpos = off_nonpos && s(i, j) <= 0;
                off += std::abs(s(i, j));
            }
            dominant = dominant && s(i, i) >= off;
        }
        CHECK(semigroup_preserves_interval(-s, OrderInterval::positive_cone(m)) == off_nonpos);
        CHECK(semigroup_preserves_interval(-s, OrderInterval::symmetric_box(m)) == dominant);
    }
}

TEST_CASE("projection inclusion statements") {
    SUBCASE("examples") {
        const auto r = commuting_projection_equivalence(ConvexSet(Subspace::span({v({1, 0})}, 2)),
                                                        ConvexSet(OrderInterval::symmetric_box(2)));
        CHECK(r.first_preserves_second);
        CHECK(r.second_preserves_first);
        CHECK(r.commute);
        const auto o = commuting_projection_equivalence(ConvexSet(Subspace::span({v({1, 1})}, 2)),
                                                        ConvexSet(Subspace::span({v({1, -1})}, 2)));
        CHECK((o.agree() && o.commute));
    }
    SUBCASE("random subspace pairs") {
        std::mt19937_64 rng(9);
        int commuting = 0;
        for (int trial = 0; trial < 100; ++trial) {
            const Eigen::Index m = 2 + trial % 4;
            Subspace a = random_subspace(m, 1 + trial % (m - 1), rng);
            Subspace b = random_subspace(m, 1 + (trial / 2) % (m - 1), rng);
            if (trial % 2 == 0) {
                // Split a common orthonormal basis.
                const Mat q = Subspace::column_span(oracle::random_mat(m, m, rng)).basis();
                std::vector<Vec> ga, gb;
                for (Eigen::Index j = 0; j < m; ++j) {
                    if (j % 3 != 1) ga.push_back(q.col(j));
                    if (j % 3 != 0) gb.push_back(q.col(j));
                }
                a = Subspace::span(ga, m);
                b = Subspace::span(gb, m);
            }
            const auto r = commuting_projection_equivalence(ConvexSet(a), ConvexSet(b));
            const Mat pa = a.projection(), pb = b.projection();
            CHECK(r.agree());
            CHECK(r.commute == ((pa * pb - pb * pa).norm() < 1e-9));
            commuting += r.commute;
        }
        CHECK(commuting >= 50);
    }
    SUBCASE("the span of 1 and the unit box do not commute") {
        // Both inclusions hold, yet clamp(P x) != P clamp(x) for x = (3, 0).
        const auto r = commuting_projection_equivalence(ConvexSet(ones(2)), ConvexSet(OrderInterval::symmetric_box(2)));
        CHECK(r.first_preserves_second);
        CHECK(r.second_preserves_first);
        CHECK_FALSE(r.commute);
        const Vec x = v({3, 0});
        const Vec pc = OrderInterval::symmetric_box(2).project(ones(2).project(x));
        const Vec cp = ones(2).project(OrderInterval::symmetric_box(2).project(x));
        CHECK((pc - cp).norm() > 0.5);
    }
}

TEST_CASE("closed ideals") {
    SUBCASE("examples") {
        CHECK(is_ideal(Subspace::span({v({0, 1})}, 2), Subspace::whole(2)));
        CHECK_FALSE(is_ideal(Subspace::span({v({1, 1})}, 2), Subspace::whole(2)));
        CHECK(is_ideal(ones(2).orthogonal_complement(), ones(2)));
        CHECK(is_ideal(Subspace::zero(3), ones(3)));
        for (int m = 2; m <= 4; ++m) {
            CHECK_FALSE(is_ideal(ones(m), Subspace::whole(m)));
            CHECK(is_ideal(ones(m), ones(m)));
        }
    }
    SUBCASE("ideals of W are the coordinate subspaces") {
        std::mt19937_64 rng(10);
        for (int trial = 0; trial < 60; ++trial) {
            const Eigen::Index m = 2 + trial % 3;
            Subspace y = trial % 2 ? coordinate_subspace(m, static_cast<unsigned>(trial) % (1u << m))
                                   : random_subspace(m, 1 + trial % (m - 1), rng);
            if (trial % 6 == 4) {
                // A coordinate subspace with one axis tilted.
                y = Subspace::span({Vec::Unit(m, 0) + 0.3 * Vec::Unit(m, 1)}, m);
            }
            const bool coordinate = oracle::is_coordinate_subspace(y.projection());
            CHECK(is_ideal(y, Subspace::whole(m)) == coordinate);
            if (coordinate) CHECK(is_ideal(y, y));
        }
    }
    SUBCASE("a generic subspace is not an ideal of itself") {
        // x = (1, -2) in Y but |x| = (1, 2) is not.
        const Subspace y = Subspace::span({v({1, -2})}, 2);
        CHECK_FALSE(is_ideal(y, y));
    }
}

TEST_CASE("irreducibility against brute-force invariant coordinate subspaces") {
    CHECK(is_irreducible(ones(3)));
    CHECK_FALSE(is_irreducible(Subspace::whole(2)));
    CHECK(is_irreducible(ones(2).orthogonal_complement()));
    CHECK(is_irreducible(Subspace::zero(1)));
    std::mt19937_64 rng(11);
    std::bernoulli_distribution sparse(0.25);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 2 + trial % 4;
        Mat a = Mat::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) a(i, j) = sparse(rng) ? 1.0 : 0.0;
        }
        const Mat s = a + a.transpose();
        CHECK(is_irreducible(s) == !oracle::has_invariant_coordinate_subspace({s}, m));
        Mat b = Mat::Zero(m, m);
        b(0, m - 1) = sparse(rng) ? 1.0 : 0.0;
        CHECK(pattern_strongly_connected({a, b}, m) == !oracle::has_invariant_coordinate_subspace({a, b}, m));
    }
}

TEST_CASE("lift to W-valued coordinates") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::Index r = 1 + trial % 5, c = 1 + (trial / 5) % 5, m = 1 + trial % 4;
        const Mat t = oracle::random_mat(r, c, rng);
        const Mat l = lift(t, m);
        CHECK((l - oracle::kron(t, Mat::Identity(m, m))).norm() == 0.0);
        const LiftNorms n = lift_norm_check(t, m);
        CHECK(n.norm == doctest::Approx(oracle::two_norm(t)).epsilon(1e-10));
        CHECK(std::abs(n.lifted_norm - n.norm) <= 1e-10 * std::max(1.0, n.norm));
    }
}

TEST_CASE("null space") {
    Mat a(2, 3);
    a << 1, 1, 0, 0, 0, 1;
    const Mat k = null_space(a);
    REQUIRE(k.cols() == 1);
    CHECK((a * k).norm() < 1e-12);
}
