#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "helpers.hpp"
#include "nlc/config.hpp"
#include "nlc/norms.hpp"
#include "nlc/snapshot.hpp"

using namespace nlc;

TEST_CASE("domain basics") {
    Domain dom(8);
    CHECK(dom.nx == 8);
    CHECK(dom.ny == 8);
    CHECK(dom.h == doctest::Approx(1.0 / 8).epsilon(1e-15));
    CHECK_THROWS_AS(Domain(3), validation_error);
}

TEST_CASE("params validation") {
    Params p;
    CHECK_NOTHROW(validate_params(p));
    p.mu = -1.0;
    CHECK_THROWS_AS(validate_params(p), validation_error);
    p.mu = 1.0;
    p.eta = 0.0;
    CHECK_THROWS_AS(validate_params(p), validation_error);
}

TEST_CASE("field arithmetic and no-slip zeroing") {
    Domain dom(8);
    Rng rng(1);
    VectorField2 a = testutil::random_velocity(dom, rng);
    VectorField2 b = testutil::random_velocity(dom, rng);
    VectorField2 c = a + b;
    c -= b;
    CHECK(testutil::max_abs_diff(a, c) == 0.0);
    for (int j = 0; j < dom.ny; ++j) {
        CHECK(a.u1()(0, j) == 0.0);
        CHECK(a.u1()(dom.nx, j) == 0.0);
    }
    for (int i = 0; i < dom.nx; ++i) {
        CHECK(a.u2()(i, 0) == 0.0);
        CHECK(a.u2()(i, dom.ny) == 0.0);
    }
}

TEST_CASE("inner product integrates constants exactly") {
    // trapezoid weights on the nodal grid: <1, 1> over three components
    Domain dom(12);
    DirectorField3 ones(dom);
    for (int k = 0; k < 3; ++k)
        for (double& x : ones.comp(k).data()) x = 1.0;
    CHECK(inner_h(ones, ones) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("hm norms against longhand sums") {
    Domain dom(10);
    Rng rng(7);
    DirectorField3 d = testutil::random_director(dom, rng, false);
    // m = 0 is just the weighted l2 norm
    double s = 0.0;
    for (int k = 0; k < 3; ++k)
        for (int j = 0; j <= dom.ny; ++j)
            for (int i = 0; i <= dom.nx; ++i) {
                const double wi = (i == 0 || i == dom.nx) ? 0.5 : 1.0;
                const double wj = (j == 0 || j == dom.ny) ? 0.5 : 1.0;
                s += wi * wj * d.comp(k)(i, j) * d.comp(k)(i, j);
            }
    s *= dom.h * dom.h;
    CHECK(norm_hm(d, 0) == doctest::Approx(std::sqrt(s)).epsilon(1e-13));
    CHECK(norm_hm(d, 2) >= norm_hm(d, 1));
    CHECK(norm_hm(d, 1) >= norm_hm(d, 0));
}

TEST_CASE("snapshot round trip is exact") {
    Domain dom(9);
    Rng rng(3);
    VectorField2 v = testutil::random_velocity(dom, rng);
    DirectorField3 d = testutil::random_director(dom, rng, false);
    const std::string dir = std::filesystem::temp_directory_path() / "nlc_snap_test";
    std::filesystem::create_directories(dir);
    write_snapshot(dir + "/v.nlcf", v, 1.25);
    write_snapshot(dir + "/d.nlcf", d, 2.5);

    SnapshotInfo info = read_snapshot_info(dir + "/v.nlcf");
    CHECK(info.nx == 9);
    CHECK(info.ncomp == 2);
    CHECK(info.time == 1.25);

    double tv = 0.0, td = 0.0;
    VectorField2 v2 = read_snapshot_velocity(dir + "/v.nlcf", &tv);
    DirectorField3 d2 = read_snapshot_director(dir + "/d.nlcf", &td);
    CHECK(tv == 1.25);
    CHECK(td == 2.5);
    CHECK(testutil::max_abs_diff(v, v2) == 0.0);
    CHECK(testutil::max_abs_diff(d, d2) == 0.0);
    CHECK_THROWS(read_snapshot_velocity(dir + "/d.nlcf"));
}

TEST_CASE("config serialization round-trips losslessly") {
    RunConfig cfg = default_run_config();
    cfg.domain = Domain(24);
    cfg.params.mu = 0.0125;
    cfg.params.sigmas = {0.5, 0.25};
    cfg.solver.dt = 2e-3;
    cfg.solver.boundary_mode = SolverConfig::BoundaryMode::jump;
    cfg.noise.seed = 987654321;
    cfg.noise.jump_rate = 3.0;
    cfg.initial.preset = "taylor-vortex";
    cfg.boundary_preset = "tilted";

    const std::string text = run_config_json(cfg);
    RunConfig back = parse_run_config(text);
    CHECK(run_config_json(back) == text);
    CHECK(config_hash(back) == config_hash(cfg));

    back.params.mu = 0.013;
    CHECK(config_hash(back) != config_hash(cfg));
}

TEST_CASE("config validation rejects bad fields") {
    CHECK_THROWS_AS(parse_run_config("{\"solver\":{\"scheme\":\"bogus\"}}"),
                    validation_error);
    CHECK_THROWS_AS(parse_run_config("{\"initial\":{\"preset\":\"bogus\"}}"),
                    validation_error);
    CHECK_THROWS_AS(parse_run_config("not json"), validation_error);
    RunConfig cfg = default_run_config();
    cfg.noise.rho = {1.0};  // size mismatch with w0_modes = 4
    CHECK_THROWS_AS(validate_run_config(cfg), validation_error);
}

TEST_CASE("initial presets produce admissible fields") {
    RunConfig cfg = default_run_config();
    cfg.domain = Domain(16);
    for (const char* preset : {"equilibrium", "taylor-vortex", "random-smooth"}) {
        cfg.initial.preset = preset;
        VectorField2 v;
        DirectorField3 d;
        make_initial_fields(cfg, v, d);
        CHECK(v.finite());
        CHECK(d.finite());
        // stream-function construction keeps the velocity discretely
        // divergence-free
        double maxdiv = 0.0;
        for (int j = 0; j < 16; ++j)
            for (int i = 0; i < 16; ++i)
                maxdiv = std::max(maxdiv,
                                  std::abs(v.u1()(i + 1, j) - v.u1()(i, j) + v.u2()(i, j + 1) -
                                           v.u2()(i, j)));
        CHECK(maxdiv <= 1e-13);
    }
    cfg.initial.preset = "equilibrium";
    VectorField2 v;
    DirectorField3 d;
    make_initial_fields(cfg, v, d);
    CHECK(norm_hm(v, 0) == 0.0);
    // constant-z preset is a unit director everywhere
    CHECK(d.comp(2)(3, 3) == doctest::Approx(1.0));
}
