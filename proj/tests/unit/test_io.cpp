#include <doctest.h>

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fptrec/control.hpp"
#include "fptrec/errors.hpp"
#include "fptrec/fpt.hpp"
#include "fptrec/graph.hpp"
#include "fptrec/io.hpp"
#include "fptrec/metrics.hpp"
#include "test_graphs.hpp"

using namespace fptrec;
using fpt::exact_fpt;
using fpt::FptTensor;
using fpt::TensorDomain;
using graph::Domain;
using graph::Graph;
using graph::VertexFunction;
using linalg::Vector;

namespace {

std::filesystem::path tmp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "fptrec-io-tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("float formatting survives a round trip") {
    for (double v : {1.0 / 3.0, 0.1, 1e-300, -2.5e17, 0.0, 123456789.123456789}) {
        const std::string s = io::format_float(v);
        CHECK(std::stod(s) == v);
    }
}

TEST_CASE("relative recovery error in percent") {
    const VertexFunction truth{Domain::Interior, {3.0, 4.0}};
    CHECK(metrics::l2rne(truth, truth) == 0.0);

    const VertexFunction doubled{Domain::Interior, {6.0, 8.0}};
    CHECK(metrics::l2rne(truth, doubled) == doctest::Approx(100.0));

    const VertexFunction wrong_domain{Domain::Boundary, {3.0, 4.0}};
    CHECK_THROWS_AS(metrics::l2rne(truth, wrong_domain), ValidationError);
    const VertexFunction zero{Domain::Interior, {0.0, 0.0}};
    CHECK_THROWS_AS(metrics::l2rne(zero, truth), ValidationError);
}

TEST_CASE("metric bundle carries per-vertex errors and optional data fidelity") {
    const VertexFunction truth{Domain::Interior, {1.0, 2.0}};
    const VertexFunction rec{Domain::Interior, {1.5, 1.0}};
    const auto m = metrics::compute_metrics(truth, rec);
    CHECK_FALSE(m.frne_percent.has_value());
    CHECK(m.domain == Domain::Interior);
    REQUIRE(m.error.size() == 2);
    CHECK(m.error[0] == doctest::Approx(0.5));
    CHECK(m.error[1] == doctest::Approx(1.0));

    const Graph g = testsupport::make_p3();
    const FptTensor r = exact_fpt(g, 3, TensorDomain::BoundaryByBoundary);
    const auto with_tensors = metrics::compute_metrics(truth, rec, &r, &r);
    REQUIRE(with_tensors.frne_percent.has_value());
    CHECK(*with_tensors.frne_percent == doctest::Approx(0.0));

    CHECK_THROWS_AS(metrics::compute_metrics(truth, rec, &r, nullptr), ValidationError);
}

TEST_CASE("tensor files round trip exactly") {
    const Graph g = testsupport::make_p3();
    const FptTensor r = exact_fpt(g, 3, TensorDomain::BoundaryByBoundary);
    const auto path = tmp_path("p3_exact.csv");
    io::write_tensor_csv(path.string(), r, g);
    const FptTensor back = io::read_tensor_csv(path.string(), g);

    CHECK(back.domain == r.domain);
    CHECK(back.horizon == r.horizon);
    CHECK_FALSE(back.seed.has_value());
    CHECK_FALSE(back.samples.has_value());
    for (int t = 1; t <= r.max_time(); ++t)
        for (std::size_t x = 0; x < r.side(); ++x)
            for (std::size_t y = 0; y < r.side(); ++y)
                CHECK(back.value(t, x, y) == r.value(t, x, y));
    for (std::size_t x = 0; x < r.side(); ++x)
        for (std::size_t y = 0; y < r.side(); ++y)
            CHECK(back.escape(x, y) == r.escape(x, y));
}

TEST_CASE("simulated tensors keep their provenance through files") {
    const Graph g = testsupport::make_g2();
    fpt::McConfig cfg;
    cfg.samples_per_pair = 500;
    cfg.seed = 42;
    cfg.horizon = 3;
    const FptTensor r = fpt::mc_fpt(g, cfg);
    const auto path = tmp_path("g2_mc.csv");
    io::write_tensor_csv(path.string(), r, g);
    const FptTensor back = io::read_tensor_csv(path.string(), g);

    REQUIRE(back.seed.has_value());
    REQUIRE(back.samples.has_value());
    CHECK(*back.seed == 42);
    CHECK(*back.samples == 500);
    for (int t = 1; t <= r.max_time(); ++t)
        CHECK(back.value(t, 0, 0) == r.value(t, 0, 0));
    CHECK(back.escape(0, 0) == r.escape(0, 0));
}

TEST_CASE("tensor writes are byte-deterministic") {
    const Graph g = testsupport::make_p3();
    const FptTensor r = exact_fpt(g, 3, TensorDomain::BoundaryByBoundary);
    const auto p1 = tmp_path("det_a.csv");
    const auto p2 = tmp_path("det_b.csv");
    io::write_tensor_csv(p1.string(), r, g);
    io::write_tensor_csv(p2.string(), r, g);
    CHECK(slurp(p1) == slurp(p2));
    CHECK(!slurp(p1).empty());
}

TEST_CASE("tensor reader rejects malformed files") {
    const Graph g = testsupport::make_p3();
    auto write_raw = [](const std::filesystem::path& p, const std::string& body) {
        std::ofstream out(p);
        out << body;
    };

    const auto no_meta = tmp_path("no_meta.csv");
    write_raw(no_meta, "t,x_id,y_id,value\n1,a,c,0\n");
    CHECK_THROWS_AS(io::read_tensor_csv(no_meta.string(), g), ValidationError);

    const auto bad_header = tmp_path("bad_header.csv");
    write_raw(bad_header, "# horizon=3 domain=boundary\nt,x,y,v\n");
    CHECK_THROWS_AS(io::read_tensor_csv(bad_header.string(), g), ValidationError);

    const auto unknown_vertex = tmp_path("unknown_vertex.csv");
    write_raw(unknown_vertex, "# horizon=3 domain=boundary\nt,x_id,y_id,value\n1,zz,a,0\n");
    CHECK_THROWS_AS(io::read_tensor_csv(unknown_vertex.string(), g), ValidationError);

    const auto interior_vertex = tmp_path("interior_vertex.csv");
    write_raw(interior_vertex, "# horizon=3 domain=boundary\nt,x_id,y_id,value\n1,b,a,0\n");
    CHECK_THROWS_AS(io::read_tensor_csv(interior_vertex.string(), g), ValidationError);

    const auto bad_time = tmp_path("bad_time.csv");
    write_raw(bad_time, "# horizon=3 domain=boundary\nt,x_id,y_id,value\n9,a,c,0\n");
    CHECK_THROWS_AS(io::read_tensor_csv(bad_time.string(), g), ValidationError);

    const auto bad_value = tmp_path("bad_value.csv");
    write_raw(bad_value, "# horizon=3 domain=boundary\nt,x_id,y_id,value\n1,a,c,xyz\n");
    CHECK_THROWS_AS(io::read_tensor_csv(bad_value.string(), g), ValidationError);

    const auto short_row = tmp_path("short_row.csv");
    write_raw(short_row, "# horizon=3 domain=boundary\nt,x_id,y_id,value\n1,a,c\n");
    CHECK_THROWS_AS(io::read_tensor_csv(short_row.string(), g), ValidationError);

    const auto no_horizon = tmp_path("no_horizon.csv");
    write_raw(no_horizon, "# domain=boundary\nt,x_id,y_id,value\n");
    CHECK_THROWS_AS(io::read_tensor_csv(no_horizon.string(), g), ValidationError);

    CHECK_THROWS_AS(io::read_tensor_csv(tmp_path("missing.csv").string(), g),
                    ValidationError);
}

TEST_CASE("vertex files round trip and classify their domain") {
    const Graph g = testsupport::make_p3();

    const VertexFunction interior{Domain::Interior, {1.75}};
    const auto pi = tmp_path("mu_interior.csv");
    io::write_vertex_csv(pi.string(), g, interior);
    const VertexFunction ri = io::read_vertex_csv(pi.string(), g);
    CHECK(ri.domain == Domain::Interior);
    REQUIRE(ri.values.size() == 1);
    CHECK(ri.values[0] == 1.75);

    const VertexFunction boundary{Domain::Boundary, {2.0, 3.0}};
    const auto pb = tmp_path("on_boundary.csv");
    io::write_vertex_csv(pb.string(), g, boundary);
    const VertexFunction rb = io::read_vertex_csv(pb.string(), g);
    CHECK(rb.domain == Domain::Boundary);
    CHECK(rb.values == Vector{2.0, 3.0});

    const VertexFunction full{Domain::Full, {0.5, 1.5, 2.5}};
    const auto pf = tmp_path("on_all.csv");
    io::write_vertex_csv(pf.string(), g, full);
    const VertexFunction rf = io::read_vertex_csv(pf.string(), g);
    CHECK(rf.domain == Domain::Full);
    CHECK(rf.values == Vector{0.5, 1.5, 2.5});
}

TEST_CASE("vertex reader rejects malformed files") {
    const Graph g = testsupport::make_p3();
    auto write_raw = [](const std::filesystem::path& p, const std::string& body) {
        std::ofstream out(p);
        out << body;
    };

    const auto bad_header = tmp_path("v_bad_header.csv");
    write_raw(bad_header, "id,value\nb,1\n");
    CHECK_THROWS_AS(io::read_vertex_csv(bad_header.string(), g), ValidationError);

    const auto duplicate = tmp_path("v_duplicate.csv");
    write_raw(duplicate, "vertex_id,value\nb,1\nb,2\n");
    CHECK_THROWS_AS(io::read_vertex_csv(duplicate.string(), g), ValidationError);

    const auto partial = tmp_path("v_partial.csv");
    write_raw(partial, "vertex_id,value\nb,1\na,2\n");  // interior + one boundary vertex
    CHECK_THROWS_AS(io::read_vertex_csv(partial.string(), g), ValidationError);
}

TEST_CASE("singular value files list indices in order") {
    const auto p = tmp_path("sv.csv");
    io::write_singular_csv(p.string(), {3.0, 2.0, 0.5});
    CHECK(slurp(p) == "index,value\n0,3\n1,2\n2,0.5\n");
}

TEST_CASE("metric files carry the fidelity row only when present") {
    const Graph g = testsupport::make_p3();
    metrics::MetricsReport m;
    m.domain = Domain::Interior;
    m.l2rne_percent = 1.5;
    m.error = {0.25};

    const auto p1 = tmp_path("metrics_plain.csv");
    io::write_metrics_csv(p1.string(), g, m);
    CHECK(slurp(p1) == "metric,value\nl2rne_percent,1.5\nerror_b,0.25\n");

    m.frne_percent = 0.75;
    const auto p2 = tmp_path("metrics_full.csv");
    io::write_metrics_csv(p2.string(), g, m);
    CHECK(slurp(p2) ==
          "metric,value\nfrne_percent,0.75\nl2rne_percent,1.5\nerror_b,0.25\n");
}

TEST_CASE("reconstruction report states rank, flags, and spectra deterministically") {
    const Graph g = testsupport::make_p3();
    const FptTensor r = exact_fpt(g, 3, TensorDomain::BoundaryByBoundary);
    const auto res = control::reconstruct_centrality(r, g, 3, 1e-12);

    const auto p1 = tmp_path("report_a.txt");
    const auto p2 = tmp_path("report_b.txt");
    io::write_report(p1.string(), g, res, 3);
    io::write_report(p2.string(), g, res, 3);
    const std::string text = slurp(p1);
    CHECK(text == slurp(p2));

    CHECK(text.find("rank of product system: 1 / 1 unknowns") != std::string::npos);
    CHECK(text.find("projection only: no") != std::string::npos);
    CHECK(text.find("horizon warning: no") != std::string::npos);
    CHECK(text.find("singular values, final-state gram:") != std::string::npos);
    CHECK(text.find("singular values, harmonic products:") != std::string::npos);
    CHECK(text.find("tolerance: 1e-12 (relative)") != std::string::npos);

    metrics::MetricsReport m;
    m.domain = Domain::Interior;
    m.l2rne_percent = 0.125;
    m.error = {0.5};
    m.frne_percent = 0.25;
    const auto p3 = tmp_path("report_metrics.txt");
    io::write_report(p3.string(), g, res, 3, &m);
    const std::string with_metrics = slurp(p3);
    CHECK(with_metrics.find("frne_percent 0.25") != std::string::npos);
    CHECK(with_metrics.find("l2rne_percent 0.125") != std::string::npos);
}
