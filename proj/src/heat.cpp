#include "fptrec/heat.hpp"

#include <cstddef>

#include "fptrec/errors.hpp"

namespace fptrec::heat {

HeatTrajectory direct_heat_solve(const graph::Graph& g, const SourceField& f) {
    if (f.horizon < 1) throw ValidationError("direct_heat_solve: horizon must be positive");
    if (f.f.rows() != static_cast<std::size_t>(f.horizon) || f.f.cols() != g.boundary_size())
        throw ValidationError("direct_heat_solve: source field shape mismatch");
    const std::size_t n = g.size();
    const std::size_t ni = g.interior_size();
    const int steps = 2 * f.horizon;

    HeatTrajectory out;
    out.domain = graph::Domain::Full;
    out.horizon = f.horizon;
    out.u = linalg::Matrix(steps, n);

    graph::VertexFunction state{graph::Domain::Full, linalg::Vector(n, 0.0)};
    for (int t = 0; t + 1 < steps; ++t) {
        const graph::VertexFunction lap = graph::laplacian_apply(g, state);
        for (std::size_t x = 0; x < n; ++x) {
            double next = state.values[x] + lap.values[x];
            if (x >= ni) next += f.at(t, x - ni);
            state.values[x] = next;
        }
        for (std::size_t x = 0; x < n; ++x) out.u(t + 1, x) = state.values[x];
    }
    return out;
}

double occupation_naive(const fpt::FptTensor& r, int t, std::size_t x, std::size_t y,
                        unsigned long long* mults) {
    if (t < 1 || t > r.max_time()) throw ValidationError("occupation_naive: time out of range");
    if (t > 25) throw ValidationError("occupation_naive: horizon too large for the literal sum");

    // Visit sequences t_1 < … < t_j = t; the chosen subset of {1,…,t−1}
    // supplies t_1,…,t_{j−1}. Empty subset is the no-return term r(t,x,y).
    unsigned long long muls = 0;
    double total = 0.0;
    const std::uint32_t masks = static_cast<std::uint32_t>(1) << (t - 1);
    for (std::uint32_t mask = 0; mask < masks; ++mask) {
        double term = 0.0;
        int prev = 0;
        for (int s = 1; s < t; ++s) {
            if ((mask & (static_cast<std::uint32_t>(1) << (s - 1))) == 0) continue;
            if (prev == 0) {
                term = r.value(s, x, y);
            } else {
                term *= r.value(s - prev, y, y);
                ++muls;
            }
            prev = s;
        }
        if (prev == 0) {
            term = r.value(t, x, y);
        } else {
            term *= r.value(t - prev, y, y);
            ++muls;
        }
        total += term;
    }
    if (mults != nullptr) *mults += muls;
    return total;
}

OccupationTable occupation_renewal(const fpt::FptTensor& r) {
    const std::size_t m = r.side();
    const int tmax = r.max_time();

    OccupationTable out;
    out.horizon = r.horizon;
    out.u.assign(tmax, linalg::Matrix(m, m));
    for (std::size_t y = 0; y < m; ++y)
        for (std::size_t x = 0; x < m; ++x)
            for (int t = 1; t <= tmax; ++t) {
                double v = r.value(t, x, y);
                for (int s = 1; s < t; ++s) v += out.u[s - 1](x, y) * r.value(t - s, y, y);
                out.u[t - 1](x, y) = v;
            }
    return out;
}

HeatTrajectory assemble_uf(const fpt::FptTensor& r, const SourceField& f) {
    return assemble_uf(r, occupation_renewal(r), f);
}

HeatTrajectory assemble_uf(const fpt::FptTensor& r, const OccupationTable& occ,
                           const SourceField& f) {
    if (r.domain != fpt::TensorDomain::BoundaryByBoundary)
        throw ValidationError("assemble_uf: tensor must cover the observation pairs");
    if (f.horizon != r.horizon) throw ValidationError("assemble_uf: horizon mismatch");
    if (f.f.cols() != r.side()) throw ValidationError("assemble_uf: source width mismatch");
    if (occ.horizon != r.horizon) throw ValidationError("assemble_uf: occupation table mismatch");

    const std::size_t nb = r.side();
    const int steps = 2 * r.horizon;

    HeatTrajectory out;
    out.domain = graph::Domain::Boundary;
    out.horizon = r.horizon;
    out.u = linalg::Matrix(steps, nb);
    for (int t = 1; t < steps; ++t)
        for (std::size_t x = 0; x < nb; ++x) {
            double v = f.at(t - 1, x);
            for (int s = 1; s < t; ++s) {
                if (t - s > occ.max_time()) continue;
                for (std::size_t y = 0; y < nb; ++y) {
                    const double fs = f.at(s - 1, y);
                    if (fs != 0.0) v += fs * occ.value(t - s, x, y);
                }
            }
            out.u(t, x) = v;
        }
    return out;
}

linalg::Matrix assemble_lambda(const fpt::FptTensor& r, int T) {
    if (r.domain != fpt::TensorDomain::BoundaryByBoundary)
        throw ValidationError("assemble_lambda: tensor must cover the observation pairs");
    if (T != r.horizon) throw ValidationError("assemble_lambda: horizon mismatch");

    const std::size_t nb = r.side();
    const std::size_t dim = static_cast<std::size_t>(T) * nb;
    const OccupationTable occ = occupation_renewal(r);
    linalg::Matrix lambda(dim, dim);
    for (int ts = 0; ts < T; ++ts)
        for (std::size_t bs = 0; bs < nb; ++bs) {
            SourceField basis{T, linalg::Matrix(T, nb)};
            basis.f(ts, bs) = 1.0;
            const HeatTrajectory traj = assemble_uf(r, occ, basis);
            const std::size_t col = time_major_index(ts, bs, nb);
            for (int t = 0; t < T; ++t)
                for (std::size_t b = 0; b < nb; ++b)
                    lambda(time_major_index(t, b, nb), col) = traj.at(t, b);
        }
    return lambda;
}

}  // namespace fptrec::heat
