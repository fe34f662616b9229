#include <doctest.h>

#include <cmath>
#include <cstddef>

#include "fptrec/errors.hpp"
#include "fptrec/fpt.hpp"
#include "fptrec/graph.hpp"
#include "fptrec/heat.hpp"
#include "fptrec/rng.hpp"
#include "test_graphs.hpp"

using namespace fptrec::heat;
using fptrec::fpt::exact_fpt;
using fptrec::fpt::FptTensor;
using fptrec::fpt::TensorDomain;
using fptrec::graph::Domain;
using fptrec::graph::Graph;
using fptrec::linalg::Matrix;

namespace {

SourceField random_source(int T, std::size_t nb, std::uint64_t stream) {
    fptrec::rng::Xoshiro256ss g = fptrec::rng::make_stream(31337, stream);
    SourceField f{T, Matrix(T, nb)};
    for (double& v : f.f.data()) v = g.symmetric();
    return f;
}

}  // namespace

TEST_CASE("zero source evolves to zero") {
    const Graph g = testsupport::make_p3();
    const SourceField f{3, Matrix(3, 2)};
    const HeatTrajectory u = direct_heat_solve(g, f);
    for (double v : u.u.data()) CHECK(v == 0.0);
}

TEST_CASE("one explicit step from a boundary impulse") {
    const Graph g = testsupport::make_p3();
    SourceField f{3, Matrix(3, 2)};
    f.f(0, 0) = 1.0;  // impulse at t=0 on boundary vertex a
    const HeatTrajectory u = direct_heat_solve(g, f);

    const std::size_t n = g.size();
    for (std::size_t x = 0; x < n; ++x) CHECK(u.at(0, x) == 0.0);

    // U(1) = δ_a; internal order (b, a, c).
    CHECK(u.at(1, 0) == 0.0);
    CHECK(u.at(1, 1) == 1.0);
    CHECK(u.at(1, 2) == 0.0);

    // U(2) = δ_a + Δδ_a.
    fptrec::graph::VertexFunction delta{Domain::Full, {0.0, 1.0, 0.0}};
    const auto lap = fptrec::graph::laplacian_apply(g, delta);
    for (std::size_t x = 0; x < n; ++x)
        CHECK(u.at(2, x) == doctest::Approx(delta.values[x] + lap.values[x]).epsilon(1e-15));
}

TEST_CASE("naive occupation base cases") {
    const Graph g = testsupport::make_p3();
    const FptTensor r = exact_fpt(g, 4, TensorDomain::BoundaryByBoundary);
    for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y) {
            CHECK(occupation_naive(r, 1, x, y) == r.value(1, x, y));
            CHECK(occupation_naive(r, 2, x, y) ==
                  doctest::Approx(r.value(2, x, y) + r.value(1, x, y) * r.value(1, y, y))
                      .epsilon(1e-15));
        }
}

TEST_CASE("two-vertex occupation is constant one half") {
    const Graph g = testsupport::make_g2();
    const FptTensor r = exact_fpt(g, 5, TensorDomain::FullByFull);
    // Internal order (b, a): u_b(t, a) = P(walk from a sits at b) = 0.5.
    for (int t = 1; t <= r.max_time(); ++t) {
        CHECK(occupation_naive(r, t, 1, 0) == doctest::Approx(0.5).epsilon(1e-12));
    }
    const OccupationTable occ = occupation_renewal(r);
    for (int t = 1; t <= r.max_time(); ++t)
        CHECK(occ.value(t, 1, 0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("explicit renewal step on the two-vertex graph") {
    const Graph g = testsupport::make_g2();
    const FptTensor r = exact_fpt(g, 2, TensorDomain::FullByFull);
    const OccupationTable occ = occupation_renewal(r);
    // u_b(2,a) = r(2,a,b) + u_b(1,a)·r(1,b,b) = 0.25 + 0.5·0.5.
    CHECK(occ.value(1, 1, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(occ.value(2, 1, 0) == doctest::Approx(0.25 + 0.5 * 0.5).epsilon(1e-15));
    // Base case everywhere.
    for (std::size_t x = 0; x < 2; ++x)
        for (std::size_t y = 0; y < 2; ++y) CHECK(occ.value(1, x, y) == r.value(1, x, y));
}

TEST_CASE("renewal recursion equals the literal nested sum") {
    const Graph graphs[] = {testsupport::make_p3(), testsupport::make_random_graph(6, 2, 41)};
    for (const Graph& g : graphs) {
        const FptTensor r = exact_fpt(g, 7, TensorDomain::FullByFull);
        const OccupationTable occ = occupation_renewal(r);
        for (int t = 1; t <= 12; ++t)
            for (std::size_t x = 0; x < r.side(); ++x)
                for (std::size_t y = 0; y < r.side(); ++y)
                    CHECK(occ.value(t, x, y) ==
                          doctest::Approx(occupation_naive(r, t, x, y)).epsilon(1e-12));
    }
}

TEST_CASE("the naive sum costs exactly (t-1)·2^(t-2) multiplications") {
    const Graph g = testsupport::make_p3();
    const FptTensor r = exact_fpt(g, 7, TensorDomain::BoundaryByBoundary);
    for (int t = 2; t <= 12; ++t) {
        unsigned long long muls = 0;
        occupation_naive(r, t, 0, 1, &muls);
        const unsigned long long expected =
            static_cast<unsigned long long>(t - 1) << (t - 2);
        CHECK(muls == expected);
    }
}

TEST_CASE("occupation values are probabilities for exact data") {
    const Graph g = testsupport::make_random_graph(8, 3, 42);
    const OccupationTable occ =
        occupation_renewal(exact_fpt(g, 6, TensorDomain::BoundaryByBoundary));
    for (const Matrix& slice : occ.u)
        for (double v : slice.data()) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0 + 1e-12);
        }
}

TEST_CASE("data-driven trajectory base cases") {
    const Graph g = testsupport::make_p3();
    const FptTensor r = exact_fpt(g, 3, TensorDomain::BoundaryByBoundary);
    const SourceField f = random_source(3, 2, 0);
    const HeatTrajectory u = assemble_uf(r, f);
    CHECK(u.at(0, 0) == 0.0);
    CHECK(u.at(0, 1) == 0.0);
    CHECK(u.at(1, 0) == f.f(0, 0));
    CHECK(u.at(1, 1) == f.f(0, 1));
}

TEST_CASE("data-driven trajectory matches the direct solver on B") {
    const Graph graphs[] = {testsupport::make_p3(), testsupport::make_star(3),
                            testsupport::make_random_graph(8, 3, 43),
                            testsupport::make_random_graph(9, 4, 44)};
    for (const Graph& g : graphs) {
        const int T = 5;
        const std::size_t ni = g.interior_size();
        const std::size_t nb = g.boundary_size();
        const FptTensor r = exact_fpt(g, T, TensorDomain::BoundaryByBoundary);
        for (std::uint64_t k = 0; k < 10; ++k) {
            const SourceField f = random_source(T, nb, 100 + k);
            const HeatTrajectory data = assemble_uf(r, f);
            const HeatTrajectory direct = direct_heat_solve(g, f);
            for (int t = 0; t < 2 * T; ++t)
                for (std::size_t b = 0; b < nb; ++b)
                    CHECK(data.at(t, b) ==
                          doctest::Approx(direct.at(t, ni + b)).epsilon(1e-10));
        }
    }
}

TEST_CASE("trajectory assembly is linear in the source") {
    const Graph g = testsupport::make_random_graph(7, 3, 45);
    const FptTensor r = exact_fpt(g, 4, TensorDomain::BoundaryByBoundary);
    const SourceField f1 = random_source(4, 3, 200);
    const SourceField f2 = random_source(4, 3, 201);
    SourceField combo{4, Matrix(4, 3)};
    const double alpha = 0.6, beta = -1.3;
    for (std::size_t i = 0; i < combo.f.data().size(); ++i)
        combo.f.data()[i] = alpha * f1.f.data()[i] + beta * f2.f.data()[i];

    const HeatTrajectory ua = assemble_uf(r, f1);
    const HeatTrajectory ub = assemble_uf(r, f2);
    const HeatTrajectory uc = assemble_uf(r, combo);
    for (std::size_t i = 0; i < uc.u.data().size(); ++i)
        CHECK(uc.u.data()[i] ==
              doctest::Approx(alpha * ua.u.data()[i] + beta * ub.u.data()[i]).epsilon(1e-12));
}

TEST_CASE("source-to-solution matrix on the two-vertex graph") {
    const Graph g = testsupport::make_g2();
    const FptTensor r = exact_fpt(g, 3, TensorDomain::BoundaryByBoundary);
    const Matrix lambda = assemble_lambda(r, 3);
    REQUIRE(lambda.rows() == 3);
    REQUIRE(lambda.cols() == 3);
    const double expected[3][3] = {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.5, 1.0, 0.0}};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(lambda(i, j) == doctest::Approx(expected[i][j]).epsilon(1e-14));
}

TEST_CASE("source-to-solution matrix is causal") {
    const Graph g = testsupport::make_random_graph(7, 2, 46);
    const int T = 4;
    const std::size_t nb = g.boundary_size();
    const Matrix lambda = assemble_lambda(exact_fpt(g, T, TensorDomain::BoundaryByBoundary), T);
    // Row block t=0 vanishes; block (t,s) vanishes unless s < t.
    for (int t = 0; t < T; ++t)
        for (int s = 0; s < T; ++s) {
            if (s < t) continue;
            for (std::size_t bi = 0; bi < nb; ++bi)
                for (std::size_t bj = 0; bj < nb; ++bj)
                    CHECK(lambda(time_major_index(t, bi, nb), time_major_index(s, bj, nb)) ==
                          0.0);
        }
}

TEST_CASE("source-to-solution columns match the direct solver") {
    const Graph g = testsupport::make_random_graph(6, 2, 47);
    const int T = 4;
    const std::size_t ni = g.interior_size();
    const std::size_t nb = g.boundary_size();
    const Matrix lambda = assemble_lambda(exact_fpt(g, T, TensorDomain::BoundaryByBoundary), T);
    for (int ts = 0; ts < T; ++ts)
        for (std::size_t bs = 0; bs < nb; ++bs) {
            SourceField basis{T, Matrix(T, nb)};
            basis.f(ts, bs) = 1.0;
            const HeatTrajectory direct = direct_heat_solve(g, basis);
            for (int t = 0; t < T; ++t)
                for (std::size_t b = 0; b < nb; ++b)
                    CHECK(lambda(time_major_index(t, b, nb), time_major_index(ts, bs, nb)) ==
                          doctest::Approx(direct.at(t, ni + b)).epsilon(1e-10));
        }
}

TEST_CASE("heat module rejects malformed inputs") {
    const Graph g = testsupport::make_p3();
    const FptTensor r = exact_fpt(g, 3, TensorDomain::BoundaryByBoundary);
    CHECK_THROWS_AS(occupation_naive(r, 0, 0, 0), fptrec::ValidationError);
    CHECK_THROWS_AS(occupation_naive(r, r.max_time() + 1, 0, 0), fptrec::ValidationError);
    CHECK_THROWS_AS(assemble_uf(r, SourceField{4, Matrix(4, 2)}), fptrec::ValidationError);
    CHECK_THROWS_AS(assemble_uf(r, SourceField{3, Matrix(3, 3)}), fptrec::ValidationError);
    CHECK_THROWS_AS(assemble_lambda(r, 4), fptrec::ValidationError);
    const FptTensor full = exact_fpt(g, 3, TensorDomain::FullByFull);
    CHECK_THROWS_AS(assemble_lambda(full, 3), fptrec::ValidationError);
}
