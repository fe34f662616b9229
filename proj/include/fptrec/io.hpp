#pragma once

#include <string>

#include "fptrec/control.hpp"
#include "fptrec/fpt.hpp"
#include "fptrec/graph.hpp"
#include "fptrec/linalg.hpp"
#include "fptrec/metrics.hpp"

namespace fptrec::io {

/// Full round-trip precision (17 significant digits), locale-free.
std::string format_float(double v);

/// Passage-time tensor as CSV: one `# horizon=… domain=…` metadata line
/// (plus seed/samples for simulated data), a `t,x_id,y_id,value` header,
/// the full grid in (t, x, y) order, then the never-hit mass as rows
/// with `escape` in the t column. Byte-deterministic.
void write_tensor_csv(const std::string& path, const fpt::FptTensor& r,
                      const graph::Graph& g);

/// Inverse of write_tensor_csv against the same graph.
fpt::FptTensor read_tensor_csv(const std::string& path, const graph::Graph& g);

/// Vertex function as `vertex_id,value` rows, ids in internal order of
/// the function's domain.
void write_vertex_csv(const std::string& path, const graph::Graph& g,
                      const graph::VertexFunction& f);

/// Reads a vertex CSV back; the id set must be exactly the interior,
/// the boundary, or all of X (that fixes the domain).
graph::VertexFunction read_vertex_csv(const std::string& path, const graph::Graph& g);

/// Singular values as `index,value` rows, descending as given.
void write_singular_csv(const std::string& path, const linalg::Vector& sv);

/// Metric rows `metric,value`: frne_percent when present, l2rne_percent,
/// then error_<id> per vertex of the report's domain.
void write_metrics_csv(const std::string& path, const graph::Graph& g,
                       const metrics::MetricsReport& m);

/// Human-readable reconstruction summary. Always states the rank of the
/// product system, the projection-only flag, and both singular spectra;
/// includes metrics when given. No timestamps: identical runs give
/// identical bytes.
void write_report(const std::string& path, const graph::Graph& g,
                  const control::ReconstructionResult& res, int T,
                  const metrics::MetricsReport* m = nullptr);

}  // namespace fptrec::io
