#include "fptrec/fpt.hpp"

#include <cmath>
#include <cstddef>

#include "fptrec/errors.hpp"
#include "fptrec/rng.hpp"

namespace fptrec::fpt {

namespace {

std::vector<std::size_t> domain_indices(const graph::Graph& g, TensorDomain domain) {
    std::vector<std::size_t> idx;
    const std::size_t lo = domain == TensorDomain::FullByFull ? 0 : g.interior_size();
    for (std::size_t i = lo; i < g.size(); ++i) idx.push_back(i);
    return idx;
}

}  // namespace

FptTensor exact_fpt(const graph::Graph& g, int T, TensorDomain domain) {
    if (T < 1) throw ValidationError("exact_fpt: horizon must be at least 1");
    const linalg::Matrix p = graph::transition_matrix(g);
    const std::size_t n = g.size();
    const std::vector<std::size_t> idx = domain_indices(g, domain);
    const std::size_t m = idx.size();
    const int tmax = 2 * T - 1;

    FptTensor out;
    out.domain = domain;
    out.horizon = T;
    out.r.assign(tmax, linalg::Matrix(m, m));
    out.escape = linalg::Matrix(m, m);

    for (std::size_t yc = 0; yc < m; ++yc) {
        const std::size_t y = idx[yc];

        // hit[x] = r(t,x,y); survive[x] = P(no visit to y in steps 1..t).
        linalg::Vector hit(n, 0.0);
        linalg::Vector survive(n, 1.0);
        for (std::size_t x = 0; x < n; ++x) hit[x] = p(x, y);

        for (int t = 1; t <= tmax; ++t) {
            for (std::size_t xc = 0; xc < m; ++xc) out.r[t - 1](xc, yc) = hit[idx[xc]];

            linalg::Vector hit_next(n, 0.0);
            linalg::Vector survive_next(n, 0.0);
            for (std::size_t x = 0; x < n; ++x) {
                double h = 0.0;
                double s = 0.0;
                for (std::size_t z = 0; z < n; ++z) {
                    const double pxz = p(x, z);
                    if (pxz == 0.0 || z == y) continue;
                    h += pxz * hit[z];
                    s += pxz * survive[z];
                }
                hit_next[x] = h;
                survive_next[x] = s;
            }
            hit.swap(hit_next);
            survive.swap(survive_next);
        }
        for (std::size_t xc = 0; xc < m; ++xc) out.escape(xc, yc) = survive[idx[xc]];
    }
    return out;
}

std::vector<double> mc_pair(const linalg::Matrix& kernel, std::size_t x, std::size_t y,
                            const McConfig& cfg, std::uint64_t pair_stream) {
    if (cfg.samples_per_pair < 1) throw ValidationError("mc_pair: need at least one sample");
    const std::size_t n = kernel.rows();
    const int tmax = 2 * cfg.horizon - 1;

    // Per-state cumulative rows make each step one uniform draw plus a scan.
    linalg::Matrix cumulative(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            acc += kernel(i, j);
            cumulative(i, j) = acc;
        }
    }

    rng::Xoshiro256ss gen = rng::make_stream(cfg.seed, pair_stream);
    std::vector<long long> bins(tmax + 1, 0);  // last slot: never hit
    for (long long s = 0; s < cfg.samples_per_pair; ++s) {
        std::size_t state = x;
        int hit_at = 0;
        for (int t = 1; t <= tmax; ++t) {
            const double u = gen.uniform01();
            std::size_t next = n - 1;
            for (std::size_t j = 0; j < n; ++j)
                if (u < cumulative(state, j)) {
                    next = j;
                    break;
                }
            state = next;
            if (state == y) {
                hit_at = t;
                break;
            }
        }
        ++bins[hit_at == 0 ? tmax : hit_at - 1];
    }

    std::vector<double> freq(tmax + 1, 0.0);
    const double inv = 1.0 / static_cast<double>(cfg.samples_per_pair);
    for (int k = 0; k <= tmax; ++k) freq[k] = static_cast<double>(bins[k]) * inv;
    return freq;
}

FptTensor mc_fpt(const graph::Graph& g, const McConfig& cfg) {
    if (cfg.horizon < 1) throw ValidationError("mc_fpt: horizon must be at least 1");
    if (cfg.samples_per_pair < 1) throw ValidationError("mc_fpt: need at least one sample");
    const linalg::Matrix p = graph::transition_matrix(g);
    const std::size_t ni = g.interior_size();
    const std::size_t nb = g.boundary_size();
    const int tmax = 2 * cfg.horizon - 1;

    FptTensor out;
    out.domain = TensorDomain::BoundaryByBoundary;
    out.horizon = cfg.horizon;
    out.r.assign(tmax, linalg::Matrix(nb, nb));
    out.escape = linalg::Matrix(nb, nb);
    out.seed = cfg.seed;
    out.samples = cfg.samples_per_pair;

    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t j = 0; j < nb; ++j) {
            const std::uint64_t stream = static_cast<std::uint64_t>(i) * nb + j;
            const std::vector<double> freq = mc_pair(p, ni + i, ni + j, cfg, stream);
            for (int t = 1; t <= tmax; ++t) out.r[t - 1](i, j) = freq[t - 1];
            out.escape(i, j) = freq[tmax];
        }
    return out;
}

double frne(const FptTensor& exact, const FptTensor& empirical) {
    if (exact.horizon != empirical.horizon || exact.side() != empirical.side() ||
        exact.domain != empirical.domain)
        throw ValidationError("frne: tensor shapes do not match");
    double num = 0.0;
    double den = 0.0;
    for (int t = 1; t <= exact.max_time(); ++t) {
        const linalg::Matrix& a = exact.r[t - 1];
        const linalg::Matrix& b = empirical.r[t - 1];
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j) {
                const double d = a(i, j) - b(i, j);
                num += d * d;
                den += a(i, j) * a(i, j);
            }
    }
    if (den == 0.0) throw ValidationError("frne: reference tensor has zero norm");
    return std::sqrt(num / den) * 100.0;
}

}  // namespace fptrec::fpt
