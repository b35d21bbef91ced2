#include <cmath>
#include <random>

#include "doctest.h"

#include "instances.hpp"
#include "oracles.hpp"
#include "rsqd/errors.hpp"
#include "rsqd/oracle.hpp"
#include "rsqd/series.hpp"
#include "tables.hpp"

using namespace rsqd;
using rsqd::testing::instance_a;

namespace {

Tree named(const std::string& name) {
    for (const auto& row : rsqd::testing::reference_tables())
        if (row.name == name) return row.tree;
    FAIL("no such tree " << name);
    return {};
}

double rel(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

} // namespace

TEST_CASE("first-order term on instance A") {
    auto a = instance_a();
    auto term = omega_term_recursive(named("Y"), a);
    CHECK(std::abs(term.block.matrix(2, 0) - Complex(-0.2)) < 1e-15);
    CHECK(std::abs(term.block.matrix(2, 1) - Complex(-1.0 / 3.0)) < 1e-15);
    CHECK(term.sign == 1);
    CHECK(term.block.domain == Subspace::P);
    CHECK(term.block.codomain == Subspace::Q);
}

TEST_CASE("deuxdeux matches its double sum") {
    std::mt19937_64 rng(1);
    auto inst = rsqd::testing::random_instance(rng);
    Matrix v = inst.scaled_v();
    const RealVector& e = inst.h0();
    Matrix expected = Matrix::Zero(inst.dim(), inst.dim());
    for (int i1 : inst.complement())
        for (int i3 : inst.model())
            for (int i2 : inst.complement())
                expected(i1, i3) += v(i1, i2) * v(i2, i3) / ((e(i3) - e(i2)) * (e(i3) - e(i1)));
    CHECK(rel(omega_term_recursive(named("deuxdeux"), inst).block.matrix, expected) < 1e-14);
    CHECK(rel(omega_term_direct(named("deuxdeux"), inst).block.matrix, expected) < 1e-14);
}

TEST_CASE("troisun matches its triple sum") {
    // Orientations L R R R; spans (1,4), (1,3), (1,2).
    std::mt19937_64 rng(2);
    auto inst = rsqd::testing::random_instance(rng);
    Matrix v = inst.scaled_v();
    const RealVector& e = inst.h0();
    Matrix expected = Matrix::Zero(inst.dim(), inst.dim());
    for (int i1 : inst.complement())
        for (int i2 : inst.model())
            for (int i3 : inst.model())
                for (int i4 : inst.model())
                    expected(i1, i4) += v(i1, i2) * v(i2, i3) * v(i3, i4) /
                                        ((e(i4) - e(i1)) * (e(i3) - e(i1)) * (e(i2) - e(i1)));
    CHECK(rel(omega_term_recursive(named("troisun"), inst).block.matrix, expected) < 1e-13);
}

TEST_CASE("recursive and direct evaluators agree") {
    std::mt19937_64 rng(42);
    for (int k = 0; k < 6; ++k) {
        auto inst = rsqd::testing::random_instance(rng, 6);
        RecursiveEvaluator eval(inst);
        for (std::size_t n = 1; n <= 4; ++n)
            for (const auto& t : enumerate(n)) {
                double min_den = 0;
                auto direct = omega_term_direct(t, inst, kDefaultDirectCap, &min_den);
                CHECK(rel(direct.block.matrix, eval.term(t)) < 1e-12);
                CHECK(min_den >= inst.gap() * (1 - 1e-15));
                CHECK(direct.sign == omega_term_recursive(t, inst).sign);
            }
    }
    CHECK_THROWS_AS(omega_term_direct(enumerate(7)[0], instance_a()), ValidationError);
    CHECK_THROWS_AS(omega_term_direct(Tree{}, instance_a()), ValidationError);
}

TEST_CASE("quatresix sign and value") {
    auto t = named("quatresix");
    auto inst = instance_a();
    auto direct = omega_term_direct(t, inst);
    CHECK(direct.sign == 1);
    CHECK(rel(direct.block.matrix, omega_term_recursive(t, inst).block.matrix) < 1e-13);
}

TEST_CASE("terms are chi-shaped and homogeneous in lambda") {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 5; ++k) {
        auto inst = rsqd::testing::random_instance(rng);
        auto scaled = inst.with_lambda(0.37);
        for (std::size_t n = 1; n <= 5; ++n)
            for (const auto& t : enumerate(n)) {
                Matrix m1 = omega_term_recursive(t, inst.with_lambda(1.0)).block.matrix;
                Matrix ml = omega_term_recursive(t, scaled).block.matrix;
                CHECK(chi_shape_defect(ml, inst) == 0.0);
                CHECK(rel(ml, std::pow(0.37, static_cast<double>(n)) * m1) < 1e-14);
                int d = static_cast<int>(right_leaf_count(t));
                CHECK(omega_term_recursive(t, inst).sign == ((d - 1) % 2 == 0 ? 1 : -1));
            }
    }
}

TEST_CASE("wave operator truncation") {
    auto a = instance_a(0.5);
    auto pr = projectors(a);
    auto w0 = wave_operator(a, 0);
    CHECK((w0.omega.matrix - pr.p.matrix).norm() == 0.0);
    CHECK(w0.chi.matrix.norm() == 0.0);

    auto w = wave_operator(a, 6);
    REQUIRE(w.per_order.size() == 7);
    CHECK(w.per_order[0].matrix.norm() == 0.0);
    auto first = sylvester_solve(a, {pr.q.matrix * a.scaled_v() * pr.p.matrix, Subspace::P, Subspace::Q});
    CHECK(rel(w.per_order[1].matrix, first.matrix) < 1e-15);
    CHECK((w.omega.matrix - pr.p.matrix - w.chi.matrix).norm() == 0.0);
    CHECK((pr.p.matrix * w.omega.matrix - pr.p.matrix).norm() == 0.0);
    CHECK((w.omega.matrix * pr.p.matrix - w.omega.matrix).norm() == 0.0);

    RecursiveEvaluator eval(a);
    for (std::size_t n = 1; n <= 6; ++n) {
        Matrix sum = Matrix::Zero(3, 3);
        for (const auto& t : enumerate(n)) sum += eval.term(t);
        CHECK(rel(w.per_order[n].matrix, sum) < 1e-15);
    }
    CHECK_THROWS_AS(wave_operator(a, 5, 4), ValidationError);
}

TEST_CASE("orders agree with an independent Riccati recursion") {
    std::mt19937_64 rng(13);
    std::vector<ProblemInstance> instances{instance_a(), instance_a(0.3)};
    for (int k = 0; k < 5; ++k) instances.push_back(rsqd::testing::random_instance(rng));
    for (const auto& inst : instances) {
        auto w = wave_operator(inst, 6);
        auto ref = rsqd::testing::riccati_orders(inst, 6);
        for (std::size_t n = 1; n <= 6; ++n) CHECK(rel(w.per_order[n].matrix, ref[n]) < 1e-11);
        for (double r : lindgren_order_residuals(w, inst)) CHECK(r <= 1e-10);
    }
}

TEST_CASE("Lindgren residual") {
    auto a = instance_a(0.4);
    auto pr = projectors(a);
    Matrix zero = Matrix::Zero(3, 3);
    CHECK(lindgren_residual(zero, a) == doctest::Approx((pr.q.matrix * a.scaled_v() * pr.p.matrix).norm()));
    auto exact = exact_wave_operator(a);
    CHECK(lindgren_residual(exact.chi.matrix, a) <= 1e-10);
    CHECK(rsqd::testing::riccati_residual(a, exact.chi.matrix) <= 1e-10);

    std::mt19937_64 rng(29);
    for (int k = 0; k < 5; ++k) {
        auto inst = rsqd::testing::random_instance(rng);
        Matrix chi = chi_part(rsqd::testing::random_hermitian(rng, inst.dim(), 0.2), inst);
        CHECK(lindgren_residual(chi, inst) ==
              doctest::Approx(rsqd::testing::riccati_residual(inst, chi)).epsilon(1e-12));
    }
}

TEST_CASE("effective Hamiltonian") {
    auto zero = instance_a(0.0);
    auto h0 = effective_hamiltonian(wave_operator(zero, 3), zero);
    CHECK(std::abs(h0.matrix(0, 0)) < 1e-15);
    CHECK(std::abs(h0.matrix(1, 1) - Complex(0.1)) < 1e-15);
    CHECK(std::abs(h0.matrix(0, 1)) < 1e-15);

    auto a = instance_a(0.3);
    // The first-order part is PH0P + lambda PVP; P V chi_1 starts at lambda^2.
    auto w1 = wave_operator(a, 1);
    auto h1 = effective_hamiltonian(w1, a);
    Matrix first = restrict(a.h0_matrix() + a.scaled_v(), a.model(), a.model());
    Matrix second = restrict(a.scaled_v() * w1.chi.matrix, a.model(), a.model());
    CHECK((h1.matrix - first - second).norm() < 1e-15);
    auto half = a.with_lambda(0.15);
    auto w1h = wave_operator(half, 1);
    Matrix second_half = restrict(half.scaled_v() * w1h.chi.matrix, half.model(), half.model());
    CHECK(second_half.norm() == doctest::Approx(second.norm() / 4).epsilon(1e-12));

    auto hn = effective_hamiltonian(wave_operator(a, 10), a);
    auto exact = exact_wave_operator(a);
    REQUIRE(hn.eigenvalues.size() == 2);
    for (int j = 0; j < 2; ++j) CHECK(std::abs(hn.eigenvalues(j) - Complex(exact.energies(j))) < 1e-8);
    CHECK(hn.eigenvalues(0).real() <= hn.eigenvalues(1).real());
}

TEST_CASE("truncation error shrinks with order") {
    auto a = instance_a(0.1);
    Matrix chi = exact_wave_operator(a).chi.matrix;
    double prev = 1e300;
    for (std::size_t n = 1; n <= 6; ++n) {
        double err = (wave_operator(a, n).chi.matrix - chi).norm();
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 1e-8);
}

TEST_CASE("two-sided terms do not need the middle projector") {
    std::mt19937_64 rng(19);
    for (int k = 0; k < 3; ++k) {
        auto inst = rsqd::testing::random_instance(rng);
        RecursiveEvaluator eval(inst);
        Matrix v = inst.scaled_v();
        for (std::size_t n = 3; n <= 5; ++n)
            for (const auto& t : enumerate(n)) {
                if (t.left().is_leaf() || t.right().is_leaf()) continue;
                Matrix c = -eval.term(t.left()) * v * eval.term(t.right());
                auto x = sylvester_solve(inst, {c, Subspace::P, Subspace::Q});
                CHECK(rel(x.matrix, eval.term(t)) < 1e-13);
            }
    }
}
