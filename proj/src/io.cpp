#include "fptrec/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "fptrec/errors.hpp"

namespace fptrec::io {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open for reading: " + path);
    return in;
}

/// Internal index of the tensor's slot i.
std::size_t tensor_vertex(const fpt::FptTensor& r, const graph::Graph& g, std::size_t i) {
    return r.domain == fpt::TensorDomain::BoundaryByBoundary ? g.interior_size() + i : i;
}

const std::string& csv_safe_id(const graph::Graph& g, std::size_t x) {
    const std::string& id = g.id(x);
    if (id.find(',') != std::string::npos || id.find('\n') != std::string::npos)
        throw ValidationError("vertex id not CSV-safe: " + id);
    return id;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw ValidationError("trailing characters in number: " + s);
        return v;
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception&) {
        throw ValidationError("malformed number: " + s);
    }
}

long long parse_int(const std::string& s) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used != s.size()) throw ValidationError("trailing characters in integer: " + s);
        return v;
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception&) {
        throw ValidationError("malformed integer: " + s);
    }
}

}  // namespace

std::string format_float(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_tensor_csv(const std::string& path, const fpt::FptTensor& r,
                      const graph::Graph& g) {
    const std::size_t side = r.side();
    std::ofstream out = open_out(path);

    out << "# horizon=" << r.horizon << " domain="
        << (r.domain == fpt::TensorDomain::BoundaryByBoundary ? "boundary" : "full");
    if (r.seed) out << " seed=" << *r.seed;
    if (r.samples) out << " samples=" << *r.samples;
    out << "\n";
    out << "t,x_id,y_id,value\n";

    for (int t = 1; t <= r.max_time(); ++t)
        for (std::size_t x = 0; x < side; ++x)
            for (std::size_t y = 0; y < side; ++y)
                out << t << ',' << csv_safe_id(g, tensor_vertex(r, g, x)) << ','
                    << csv_safe_id(g, tensor_vertex(r, g, y)) << ','
                    << format_float(r.value(t, x, y)) << "\n";
    for (std::size_t x = 0; x < side; ++x)
        for (std::size_t y = 0; y < side; ++y)
            out << "escape," << csv_safe_id(g, tensor_vertex(r, g, x)) << ','
                << csv_safe_id(g, tensor_vertex(r, g, y)) << ','
                << format_float(r.escape(x, y)) << "\n";
    if (!out) throw ValidationError("write failed: " + path);
}

fpt::FptTensor read_tensor_csv(const std::string& path, const graph::Graph& g) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
        throw ValidationError("tensor file lacks the metadata line: " + path);

    fpt::FptTensor r;
    int horizon = 0;
    bool have_domain = false;
    std::istringstream meta(line.substr(2));
    std::string token;
    while (meta >> token) {
        const std::size_t eq = token.find('=');
        if (eq == std::string::npos)
            throw ValidationError("malformed metadata token: " + token);
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "horizon") {
            horizon = static_cast<int>(parse_int(value));
        } else if (key == "domain") {
            if (value == "boundary")
                r.domain = fpt::TensorDomain::BoundaryByBoundary;
            else if (value == "full")
                r.domain = fpt::TensorDomain::FullByFull;
            else
                throw ValidationError("unknown tensor domain: " + value);
            have_domain = true;
        } else if (key == "seed") {
            r.seed = static_cast<std::uint64_t>(parse_int(value));
        } else if (key == "samples") {
            r.samples = parse_int(value);
        } else {
            throw ValidationError("unknown metadata key: " + key);
        }
    }
    if (horizon < 1 || !have_domain)
        throw ValidationError("tensor metadata must give horizon and domain");

    if (!std::getline(in, line) || line != "t,x_id,y_id,value")
        throw ValidationError("tensor file lacks the column header: " + path);

    const std::size_t side = r.domain == fpt::TensorDomain::BoundaryByBoundary
                                 ? g.boundary_size()
                                 : g.size();
    const std::size_t lo =
        r.domain == fpt::TensorDomain::BoundaryByBoundary ? g.interior_size() : 0;
    r.horizon = horizon;
    r.r.assign(static_cast<std::size_t>(2 * horizon - 1), linalg::Matrix(side, side));
    r.escape = linalg::Matrix(side, side);

    auto slot_of = [&](const std::string& id) {
        const std::size_t x = g.index_of(id);
        if (x < lo) throw ValidationError("vertex outside the tensor's index set: " + id);
        return x - lo;
    };

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != 4)
            throw ValidationError("tensor row needs 4 fields: " + line);
        const std::size_t x = slot_of(fields[1]);
        const std::size_t y = slot_of(fields[2]);
        const double v = parse_double(fields[3]);
        if (fields[0] == "escape") {
            r.escape(x, y) = v;
        } else {
            const long long t = parse_int(fields[0]);
            if (t < 1 || t > r.max_time())
                throw ValidationError("time index out of range: " + fields[0]);
            r.r[static_cast<std::size_t>(t - 1)](x, y) = v;
        }
    }
    return r;
}

void write_vertex_csv(const std::string& path, const graph::Graph& g,
                      const graph::VertexFunction& f) {
    if (f.values.size() != g.domain_size(f.domain))
        throw ValidationError("vertex function does not fit its domain");
    const std::size_t lo = f.domain == graph::Domain::Boundary ? g.interior_size() : 0;
    std::ofstream out = open_out(path);
    out << "vertex_id,value\n";
    for (std::size_t i = 0; i < f.values.size(); ++i)
        out << csv_safe_id(g, lo + i) << ',' << format_float(f.values[i]) << "\n";
    if (!out) throw ValidationError("write failed: " + path);
}

graph::VertexFunction read_vertex_csv(const std::string& path, const graph::Graph& g) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line != "vertex_id,value")
        throw ValidationError("vertex file lacks the column header: " + path);

    std::unordered_map<std::string, double> byid;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != 2)
            throw ValidationError("vertex row needs 2 fields: " + line);
        if (!byid.emplace(fields[0], parse_double(fields[1])).second)
            throw ValidationError("duplicate vertex row: " + fields[0]);
    }

    auto assemble = [&](graph::Domain d, std::size_t lo,
                        std::size_t hi) -> std::optional<graph::VertexFunction> {
        if (byid.size() != hi - lo) return std::nullopt;
        graph::VertexFunction f{d, linalg::Vector(hi - lo)};
        for (std::size_t x = lo; x < hi; ++x) {
            const auto it = byid.find(g.id(x));
            if (it == byid.end()) return std::nullopt;
            f.values[x - lo] = it->second;
        }
        return f;
    };

    const std::size_t ni = g.interior_size();
    const std::size_t n = g.size();
    if (auto f = assemble(graph::Domain::Interior, 0, ni)) return *f;
    if (auto f = assemble(graph::Domain::Full, 0, n)) return *f;
    if (auto f = assemble(graph::Domain::Boundary, ni, n)) return *f;
    throw ValidationError("vertex ids match neither interior, boundary, nor all of X: " +
                          path);
}

void write_singular_csv(const std::string& path, const linalg::Vector& sv) {
    std::ofstream out = open_out(path);
    out << "index,value\n";
    for (std::size_t i = 0; i < sv.size(); ++i)
        out << i << ',' << format_float(sv[i]) << "\n";
    if (!out) throw ValidationError("write failed: " + path);
}

void write_metrics_csv(const std::string& path, const graph::Graph& g,
                       const metrics::MetricsReport& m) {
    const std::size_t lo = m.domain == graph::Domain::Boundary ? g.interior_size() : 0;
    if (m.error.size() != g.domain_size(m.domain))
        throw ValidationError("metrics error vector does not fit its domain");
    std::ofstream out = open_out(path);
    out << "metric,value\n";
    if (m.frne_percent) out << "frne_percent," << format_float(*m.frne_percent) << "\n";
    out << "l2rne_percent," << format_float(m.l2rne_percent) << "\n";
    for (std::size_t i = 0; i < m.error.size(); ++i)
        out << "error_" << csv_safe_id(g, lo + i) << ',' << format_float(m.error[i]) << "\n";
    if (!out) throw ValidationError("write failed: " + path);
}

void write_report(const std::string& path, const graph::Graph& g,
                  const control::ReconstructionResult& res, int T,
                  const metrics::MetricsReport* m) {
    std::ofstream out = open_out(path);
    const std::size_t ni = g.interior_size();

    out << "reconstruction report\n\n";
    out << "graph: " << g.size() << " vertices, " << ni << " interior, "
        << g.boundary_size() << " observed\n";
    out << "horizon T: " << T << "\n";
    char tolbuf[64];
    std::snprintf(tolbuf, sizeof tolbuf, "%g", res.tol_used);
    out << "tolerance: " << tolbuf << " ("
        << (res.tol_mode == linalg::TolMode::Relative ? "relative" : "absolute") << ")\n";
    out << "horizon warning: " << (res.horizon_warning ? "yes" : "no") << "\n\n";

    out << "rank of product system: " << res.rank_products << " / " << ni
        << " unknowns\n";
    out << "projection only: " << (res.projection_only ? "yes" : "no") << "\n";
    double rnorm = 0.0;
    for (double v : res.residuals) rnorm += v * v;
    out << "residual norm: " << format_float(std::sqrt(rnorm)) << "\n\n";

    out << "recovered centrality (interior):\n";
    for (std::size_t x = 0; x < res.mu_interior.values.size(); ++x)
        out << csv_safe_id(g, x) << ' ' << format_float(res.mu_interior.values[x]) << "\n";
    out << "\n";

    if (m != nullptr) {
        out << "metrics:\n";
        if (m->frne_percent) out << "frne_percent " << format_float(*m->frne_percent) << "\n";
        out << "l2rne_percent " << format_float(m->l2rne_percent) << "\n\n";
    }

    out << "singular values, final-state gram:\n";
    for (std::size_t i = 0; i < res.sv_gram.size(); ++i)
        out << i << ' ' << format_float(res.sv_gram[i]) << "\n";
    out << "\nsingular values, harmonic products:\n";
    for (std::size_t i = 0; i < res.sv_products.size(); ++i)
        out << i << ' ' << format_float(res.sv_products[i]) << "\n";
    if (!out) throw ValidationError("write failed: " + path);
}

}  // namespace fptrec::io
