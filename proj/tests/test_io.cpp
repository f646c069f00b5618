#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qicap/errors.hpp"
#include "qicap/io.hpp"
#include "qicap/sweep.hpp"

using namespace qicap;
using namespace qicap::io;

TEST_CASE("an empty config yields the reference-device defaults") {
    std::istringstream in("");
    const Config c = parse_config(in, "test");
    CHECK(c.model.t1_ns == 50.0);
    CHECK(c.model.t2_ns == doctest::Approx(0.035).epsilon(1e-15));
    CHECK(c.model.tr_ns == doctest::Approx(0.030).epsilon(1e-15));
    CHECK(c.model.amplitude.uev == doctest::Approx(1350.0));
    CHECK(c.model.eps_hat.uev == doctest::Approx(1350.0));
    CHECK(c.model.couplings.alpha_minus() == doctest::Approx(0.06).epsilon(1e-12));
    CHECK(c.model.vtg0.volts == 0.475);
    CHECK(units::ghz_from_omega(c.model.omega) == doctest::Approx(11.0));
    CHECK(c.model.delta.uev == 20.0);
    CHECK(c.model.circuit.q_factor == 40.0);
    CHECK(c.model.circuit.c_p_f == doctest::Approx(660e-15));
}

TEST_CASE("config parsing: comments, units, lists") {
    std::istringstream in(
        "# device\n"
        "delta_uev = 5       # small coupling\n"
        "t2_ps = 42\n"
        "freq_ghz = 21, 4.72, 11\n"
        "branch = 00-10\n"
        "sweep_points = 101\n"
        "fit_mask = t1, tr\n"
        "alpha_minus = 0.05\n"
        "alpha_plus = 0.5\n");
    const Config c = parse_config(in, "test");
    CHECK(c.model.delta.uev == 5.0);
    CHECK(c.model.t2_ns == doctest::Approx(0.042));
    REQUIRE(c.sweep.frequencies.size() == 3);
    CHECK(units::ghz_from_omega(c.model.omega) == doctest::Approx(21.0));
    CHECK(c.sweep.branch == Branch::dot00_10);
    CHECK(c.sweep.n_points == 101);
    CHECK(c.fit.mask.t1);
    CHECK(!c.fit.mask.t2);
    CHECK(c.fit.mask.tr);
    CHECK(c.model.couplings.alpha_minus() == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(c.model.couplings.alpha_plus() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("config errors name the key, the bound or the line") {
    auto expect_throw = [](const std::string& text, const std::string& needle) {
        std::istringstream in(text);
        CHECK_THROWS_WITH_AS(parse_config(in, "cfg"), doctest::Contains(needle.c_str()),
                             IoError);
    };
    expect_throw("t2_ps = -1\n", "t2_ps");
    expect_throw("foo = 1\n", "foo");
    expect_throw("t1_ns = fifty\n", "t1_ns");
    expect_throw("t1_ns 50\n", "cfg:1");
    expect_throw("t1_ns = 50\nt1_ns = 60\n", "duplicate");
    expect_throw("fit_mask = t9\n", "t9");
    expect_throw("sweep_points = 1\n", "sweep_points");
    expect_throw("eps_hat_mev = 5\n", "eps_hat");
}

TEST_CASE("trace CSV round trip is value-identical") {
    sweep::SweepSpec spec;  // default grid includes gap markers
    spec.n_points = 201;
    spec.frequencies = {units::omega_from_ghz(4.72), units::omega_from_ghz(11.0)};
    capacitance::ModelParams p;
    p.delta = Energy{5.0};
    const auto traces = sweep::simulate_trace(spec, p);

    std::ostringstream out;
    write_trace_csv(traces, out);
    std::istringstream in(out.str());
    const auto back = read_trace_csv(in, "mem");

    REQUIRE(back.size() == traces.size());
    for (size_t k = 0; k < traces.size(); ++k) {
        REQUIRE(back[k].size() == traces[k].size());
        CHECK(back[k].meta.branch == traces[k].meta.branch);
        CHECK(back[k].meta.axis == traces[k].meta.axis);
        CHECK(units::ghz_from_omega(back[k].meta.omega) ==
              doctest::Approx(units::ghz_from_omega(traces[k].meta.omega)).epsilon(1e-15));
        for (size_t i = 0; i < traces[k].size(); ++i) {
            CHECK(back[k].axis[i] == traces[k].axis[i]);
            CHECK(back[k].gaps[i] == traces[k].gaps[i]);
            if (!traces[k].gaps[i]) CHECK(back[k].values[i] == traces[k].values[i]);
        }
    }
}

TEST_CASE("trace CSV rejects malformed input") {
    const std::string header =
        "axis_name,axis_value,c_pm_farads,c_pm_norm,omega_ghz,branch,gap_flag\n";
    {
        std::istringstream in("nonsense\n");
        CHECK_THROWS_WITH_AS(read_trace_csv(in, "mem"), doctest::Contains("header"),
                             IoError);
    }
    {
        std::istringstream in(header);
        CHECK_THROWS_WITH_AS(read_trace_csv(in, "mem"), doctest::Contains("no data"),
                             IoError);
    }
    {
        std::istringstream in(header + "detuning-reduced,0.1,1e-18\n");
        CHECK_THROWS_WITH_AS(read_trace_csv(in, "mem"), doctest::Contains("row 2"),
                             IoError);
    }
    {
        std::istringstream in(header +
                              "detuning-reduced,0.2,1e-18,1,11,01-11,0\n"
                              "detuning-reduced,0.1,1e-18,1,11,01-11,0\n");
        CHECK_THROWS_WITH_AS(read_trace_csv(in, "mem"),
                             doctest::Contains("strictly increasing"), IoError);
    }
}

TEST_CASE("measured CSV grouping, monotonicity and the sanity band") {
    {
        std::istringstream in(
            "v_tg_volts,phase_norm,omega_ghz\n"
            "0.470,0.1,4.72\n"
            "0.471,0.2,4.72\n"
            "0.472,-0.3,4.72\n"
            "0.470,0.5,11\n"
            "0.471,0.4,11\n");
        const auto traces = read_measured_csv(in, "mem");
        REQUIRE(traces.size() == 2);
        CHECK(units::ghz_from_omega(traces[0].meta.omega) == doctest::Approx(4.72));
        CHECK(units::ghz_from_omega(traces[1].meta.omega) == doctest::Approx(11.0));
        CHECK(traces[0].meta.axis == SweepAxis::gate_voltage);
        CHECK(traces[0].values[2] == -0.3);
    }
    {
        // no omega column: the frequency stays unset for the consumer
        std::istringstream in(
            "v_tg_volts,phase_norm\n"
            "0.470,0.1\n"
            "0.471,0.2\n");
        const auto traces = read_measured_csv(in, "mem");
        REQUIRE(traces.size() == 1);
        CHECK(traces[0].meta.omega.rad_per_ns == 0.0);
    }
    {
        // a decreasing sweep is reversed into an increasing axis
        std::istringstream in(
            "v_tg_volts,phase_norm\n"
            "0.472,0.3\n"
            "0.471,0.2\n"
            "0.470,0.1\n");
        const auto traces = read_measured_csv(in, "mem");
        REQUIRE(traces.size() == 1);
        CHECK(traces[0].axis.front() == 0.470);
        CHECK(traces[0].values.front() == 0.1);
    }
    {
        std::istringstream in(
            "v_tg_volts,phase_norm\n"
            "0.470,0.1\n"
            "0.472,0.2\n"
            "0.471,0.3\n");
        CHECK_THROWS_WITH_AS(read_measured_csv(in, "mem"), doctest::Contains("monotone"),
                             IoError);
    }
    {
        std::istringstream in(
            "v_tg_volts,phase_norm\n"
            "0.470,2.1\n");
        CHECK_THROWS_WITH_AS(read_measured_csv(in, "mem"), doctest::Contains("sanity"),
                             IoError);
    }
    {
        std::istringstream in("v_tg_volts,phase_norm\n");
        CHECK_THROWS_AS(read_measured_csv(in, "mem"), IoError);
    }
}
