#include "fptrec/control.hpp"

#include <cmath>
#include <cstddef>

#include "fptrec/errors.hpp"
#include "fptrec/rng.hpp"

namespace fptrec::control {

namespace {

heat::SourceField field_from_vec(const linalg::Vector& v, int T, std::size_t nb) {
    heat::SourceField f{T, linalg::Matrix(T, nb)};
    for (int t = 0; t < T; ++t)
        for (std::size_t b = 0; b < nb; ++b) f.f(t, b) = v[heat::time_major_index(t, b, nb)];
    return f;
}

linalg::Vector random_time_vector(std::size_t len, rng::Xoshiro256ss& gen) {
    linalg::Vector v(len);
    for (double& x : v) x = gen.symmetric();
    return v;
}

/// Lexicographic slot of the unordered pair (j,k), j ≤ k, among all
/// |B|(|B|+1)/2 of them.
std::size_t pair_slot(std::size_t j, std::size_t k, std::size_t nb) {
    return j * nb - j * (j + 1) / 2 + k;
}

}  // namespace

linalg::Vector time_reversal(const linalg::Vector& u, int L, std::size_t nb) {
    if (L < 1 || u.size() != static_cast<std::size_t>(L) * nb)
        throw ValidationError("time_reversal: length mismatch");
    linalg::Vector out(u.size());
    for (int t = 0; t < L; ++t)
        for (std::size_t b = 0; b < nb; ++b)
            out[heat::time_major_index(t, b, nb)] =
                u[heat::time_major_index(L - 1 - t, b, nb)];
    return out;
}

linalg::Vector project_time(const linalg::Vector& u, int T, std::size_t nb) {
    if (T < 1 || u.size() != static_cast<std::size_t>(2 * T) * nb)
        throw ValidationError("project_time: length mismatch");
    return linalg::Vector(u.begin(), u.begin() + static_cast<std::size_t>(T) * nb);
}

linalg::Vector flatten_trajectory(const heat::HeatTrajectory& traj) {
    const std::size_t rows = traj.u.rows();
    const std::size_t nb = traj.u.cols();
    linalg::Vector out(rows * nb);
    for (std::size_t t = 0; t < rows; ++t)
        for (std::size_t b = 0; b < nb; ++b) out[t * nb + b] = traj.u(t, b);
    return out;
}

double weighted_time_dot(const graph::Graph& g, const linalg::Vector& u,
                         const linalg::Vector& v) {
    const std::size_t nb = g.boundary_size();
    const std::size_t ni = g.interior_size();
    if (u.size() != v.size() || nb == 0 || u.size() % nb != 0)
        throw ValidationError("weighted_time_dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += g.mu(ni + i % nb) * u[i] * v[i];
    return s;
}

linalg::Matrix final_state_gram(const fpt::FptTensor& r, int T) {
    if (r.domain != fpt::TensorDomain::BoundaryByBoundary)
        throw ValidationError("final_state_gram: tensor must cover the observation pairs");
    if (T != r.horizon) throw ValidationError("final_state_gram: horizon mismatch");

    const std::size_t nb = r.side();
    const std::size_t dim = static_cast<std::size_t>(T) * nb;
    const heat::OccupationTable occ = heat::occupation_renewal(r);

    linalg::Matrix gram(dim, dim);
    for (int ts = 0; ts < T; ++ts)
        for (std::size_t bs = 0; bs < nb; ++bs) {
            heat::SourceField basis{T, linalg::Matrix(T, nb)};
            basis.f(ts, bs) = 1.0;
            const linalg::Vector full = flatten_trajectory(heat::assemble_uf(r, occ, basis));
            const linalg::Vector col = project_time(time_reversal(full, 2 * T, nb), T, nb);
            const std::size_t k = heat::time_major_index(ts, bs, nb);
            for (std::size_t i = 0; i < dim; ++i) gram(i, k) = col[i];
        }
    return gram;
}

linalg::Vector final_state_adjoint_harmonic(const linalg::Matrix& lambda,
                                            const graph::Graph& g,
                                            const graph::VertexFunction& phi, int T) {
    const std::size_t n = g.size();
    const std::size_t ni = g.interior_size();
    const std::size_t nb = g.boundary_size();
    if (phi.domain != graph::Domain::Full || phi.values.size() != n)
        throw ValidationError("final_state_adjoint_harmonic: need a full-domain function");
    const std::size_t dim = static_cast<std::size_t>(T) * nb;
    if (T < 1 || lambda.rows() != dim || lambda.cols() != dim)
        throw ValidationError("final_state_adjoint_harmonic: operator size mismatch");

    // μ-free harmonicity residual on the interior.
    double scale = 1.0;
    for (double v : phi.values) scale = std::max(scale, std::abs(v));
    for (std::size_t x = 0; x < ni; ++x) {
        double res = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            const double w = g.weight(x, y);
            if (w > 0.0) res += w * (phi.values[y] - phi.values[x]);
        }
        if (std::abs(res) > 1e-10 * scale)
            throw ValidationError("final_state_adjoint_harmonic: function is not harmonic on X\\B");
    }

    // W*φ = R_{T−1} Λ R_{T−1} (1_T ⊗ Δφ|_B) + 1_T ⊗ φ|_B; Δφ|_B needs μ
    // only on B.
    const graph::VertexFunction dphi_b = graph::laplacian_on_boundary(g, phi);
    linalg::Vector lifted(dim);
    for (int t = 0; t < T; ++t)
        for (std::size_t b = 0; b < nb; ++b)
            lifted[heat::time_major_index(t, b, nb)] = dphi_b.values[b];

    linalg::Vector out = time_reversal(
        linalg::matvec(lambda, time_reversal(lifted, T, nb)), T, nb);
    for (int t = 0; t < T; ++t)
        for (std::size_t b = 0; b < nb; ++b)
            out[heat::time_major_index(t, b, nb)] += phi.values[ni + b];
    return out;
}

double adjoint_deviation(const linalg::Matrix& lambda, const graph::Graph& g, int T,
                         int trials, std::uint64_t seed) {
    const std::size_t nb = g.boundary_size();
    const std::size_t dim = static_cast<std::size_t>(T) * nb;
    if (lambda.rows() != dim || lambda.cols() != dim)
        throw ValidationError("adjoint_deviation: operator size mismatch");

    rng::Xoshiro256ss gen = rng::make_stream(seed, 0);
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        const linalg::Vector f = random_time_vector(dim, gen);
        const linalg::Vector h = random_time_vector(dim, gen);
        const double lhs = weighted_time_dot(g, h, linalg::matvec(lambda, f));
        const linalg::Vector rlrh =
            time_reversal(linalg::matvec(lambda, time_reversal(h, T, nb)), T, nb);
        const double rhs = weighted_time_dot(g, rlrh, f);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

double final_state_gram_deviation(const graph::Graph& g, const fpt::FptTensor& r, int trials,
                                  std::uint64_t seed) {
    const int T = r.horizon;
    const std::size_t nb = g.boundary_size();
    const std::size_t dim = static_cast<std::size_t>(T) * nb;
    const linalg::Matrix gram = final_state_gram(r, T);

    rng::Xoshiro256ss gen = rng::make_stream(seed, 1);
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        const linalg::Vector f1 = random_time_vector(dim, gen);
        const linalg::Vector f2 = random_time_vector(dim, gen);
        const heat::HeatTrajectory u1 = heat::direct_heat_solve(g, field_from_vec(f1, T, nb));
        const heat::HeatTrajectory u2 = heat::direct_heat_solve(g, field_from_vec(f2, T, nb));
        graph::VertexFunction final1{graph::Domain::Full, linalg::Vector(g.size())};
        graph::VertexFunction final2{graph::Domain::Full, linalg::Vector(g.size())};
        for (std::size_t x = 0; x < g.size(); ++x) {
            final1.values[x] = u1.at(T, x);
            final2.values[x] = u2.at(T, x);
        }
        const double lhs = graph::weighted_inner_product(g, final1, final2);
        const double rhs = weighted_time_dot(g, f1, linalg::matvec(gram, f2));
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

std::size_t final_state_rank(const graph::Graph& g, int T, double rel_tol) {
    const std::size_t n = g.size();
    const std::size_t nb = g.boundary_size();
    const std::size_t dim = static_cast<std::size_t>(T) * nb;

    linalg::Matrix w(n, dim);
    for (int ts = 0; ts < T; ++ts)
        for (std::size_t bs = 0; bs < nb; ++bs) {
            heat::SourceField basis{T, linalg::Matrix(T, nb)};
            basis.f(ts, bs) = 1.0;
            const heat::HeatTrajectory u = heat::direct_heat_solve(g, basis);
            const std::size_t k = heat::time_major_index(ts, bs, nb);
            for (std::size_t x = 0; x < n; ++x) w(x, k) = u.at(T, x);
        }

    const linalg::Vector sv = linalg::singular_values(w);
    if (sv.empty() || sv[0] == 0.0) return 0;
    std::size_t rank = 0;
    for (double s : sv)
        if (s > rel_tol * sv[0]) ++rank;
    return rank;
}

double control_target_deviation(const graph::Graph& g, const fpt::FptTensor& r, double tol,
                                linalg::TolMode mode) {
    const int T = r.horizon;
    const std::size_t nb = g.boundary_size();
    const linalg::Matrix lambda = heat::assemble_lambda(r, T);
    const linalg::Matrix gram = final_state_gram(r, T);
    const std::vector<graph::VertexFunction> basis = graph::harmonic_basis(g);

    double worst = 0.0;
    for (std::size_t j = 0; j < nb; ++j) {
        const linalg::Vector rhs = final_state_adjoint_harmonic(lambda, g, basis[j], T);
        const ControlFunction h0 = minimum_norm_control(gram, rhs, tol, mode, j);
        const heat::HeatTrajectory u = heat::direct_heat_solve(g, field_from_vec(h0.h0, T, nb));
        for (std::size_t x = 0; x < g.size(); ++x)
            worst = std::max(worst, std::abs(u.at(T, x) - basis[j].values[x]));
    }
    return worst;
}

ControlFunction minimum_norm_control(const linalg::Matrix& gram, const linalg::Vector& rhs,
                                     double tol, linalg::TolMode mode,
                                     std::size_t target_index) {
    if (gram.rows() != gram.cols() || gram.rows() != rhs.size())
        throw ValidationError("minimum_norm_control: dimension mismatch");
    ControlFunction out;
    out.target_index = target_index;
    out.h0 = linalg::min_norm_lstsq(gram, rhs, tol, mode);
    return out;
}

linalg::Matrix harmonic_product_matrix(const graph::Graph& g,
                                       const std::vector<graph::VertexFunction>& basis) {
    const std::size_t nb = g.boundary_size();
    const std::size_t ni = g.interior_size();
    if (basis.size() != nb)
        throw ValidationError("harmonic_product_matrix: need one basis function per boundary vertex");
    for (const auto& phi : basis)
        if (phi.domain != graph::Domain::Full || phi.values.size() != g.size())
            throw ValidationError("harmonic_product_matrix: basis functions must cover X");

    linalg::Matrix h(ni, nb * (nb + 1) / 2);
    for (std::size_t j = 0; j < nb; ++j)
        for (std::size_t k = j; k < nb; ++k) {
            const std::size_t m = pair_slot(j, k, nb);
            for (std::size_t x = 0; x < ni; ++x)
                h(x, m) = basis[j].values[x] * basis[k].values[x];
        }
    return h;
}

ReconstructionResult reconstruct_centrality(const fpt::FptTensor& r, const graph::Graph& g,
                                            int T, double tol, linalg::TolMode mode) {
    if (r.domain != fpt::TensorDomain::BoundaryByBoundary)
        throw ValidationError("reconstruct_centrality: tensor must cover the observation pairs");
    if (T < 2) throw ValidationError("reconstruct_centrality: horizon must be at least 2");
    if (T != r.horizon) throw ValidationError("reconstruct_centrality: horizon mismatch");
    if (r.side() != g.boundary_size())
        throw ValidationError("reconstruct_centrality: tensor width does not match the boundary");
    if (tol <= 0.0) throw ValidationError("reconstruct_centrality: tol must be positive");

    const std::size_t nb = g.boundary_size();
    const std::size_t ni = g.interior_size();

    ReconstructionResult result;
    result.tol_used = tol;
    result.tol_mode = mode;
    result.horizon_warning = static_cast<std::size_t>(T) < g.size();

    const linalg::Matrix lambda = heat::assemble_lambda(r, T);
    const linalg::Matrix gram = final_state_gram(r, T);
    const std::vector<graph::VertexFunction> basis = graph::harmonic_basis(g);

    std::vector<linalg::Vector> adjoint_images(nb);
    for (std::size_t k = 0; k < nb; ++k)
        adjoint_images[k] = final_state_adjoint_harmonic(lambda, g, basis[k], T);

    result.controls.reserve(nb);
    for (std::size_t j = 0; j < nb; ++j)
        result.controls.push_back(minimum_norm_control(gram, adjoint_images[j], tol, mode, j));

    const linalg::Matrix h = harmonic_product_matrix(g, basis);
    const std::size_t m = h.cols();

    // Right side: ⟨h₀^{(j)}, W*φ^{(k)}⟩ minus the known boundary part of
    // ⟨φ^{(j)}, φ^{(k)}⟩_X.
    linalg::Vector b(m, 0.0);
    for (std::size_t j = 0; j < nb; ++j)
        for (std::size_t k = j; k < nb; ++k) {
            double boundary_part = 0.0;
            for (std::size_t q = 0; q < nb; ++q)
                boundary_part += g.mu(ni + q) * basis[j].values[ni + q] * basis[k].values[ni + q];
            b[pair_slot(j, k, nb)] =
                weighted_time_dot(g, result.controls[j].h0, adjoint_images[k]) - boundary_part;
        }

    const linalg::Matrix a = linalg::transpose(h);
    std::size_t rank = 0;
    linalg::Vector mu = ni == 0 ? linalg::Vector{}
                                : linalg::min_norm_lstsq(a, b, tol, mode, &rank);

    result.mu_interior = graph::VertexFunction{graph::Domain::Interior, mu};
    result.rank_products = rank;
    result.projection_only = rank < ni;
    if (ni > 0) {
        const linalg::Vector ax = linalg::matvec(a, mu);
        result.residuals.assign(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) result.residuals[i] = ax[i] - b[i];
        result.sv_products = linalg::singular_values(h);
    }
    result.sv_gram = linalg::singular_values(gram);
    return result;
}

}  // namespace fptrec::control
