/*
   Copyright 2026 the lqtraj authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include "lqtraj/experiments.hpp"

using namespace lqtraj;
using Catch::Approx;

namespace {

ExperimentConfig small_fig1() {
    ExperimentConfig c;
    c.seed = 99;
    c.trajectories = 100;
    c.dim = 48;
    c.dt = 2e-3;
    c.grid = {0.0, 0.1};
    c.nbar = 1.0;
    c.alpha = 2.0;
    c.workers = 2;
    return c;
}

} // namespace

TEST_CASE("experiment config validation", "[experiments]") {
    ExperimentConfig c = small_fig1();

    SECTION("non-increasing grid is rejected") {
        c.grid = {0.0, 0.5, 0.5};
        REQUIRE_THROWS_AS(c.validate(), ArgumentError);
    }

    SECTION("empty grid is rejected") {
        c.grid.clear();
        REQUIRE_THROWS_AS(c.validate(), ArgumentError);
    }

    SECTION("zero trajectories are rejected") {
        c.trajectories = 0;
        REQUIRE_THROWS_AS(c.validate(), ArgumentError);
    }

    SECTION("tail violations surface as configuration errors") {
        c.nbar = 4.0; // needs dim ~ 128
        REQUIRE_THROWS_AS(run_fig1(c), TruncationError);
    }
}

TEST_CASE("run_fig1 output layout and anchors", "[experiments]") {
    ExperimentConfig c = small_fig1();
    c.oracle = false;
    const auto records = run_fig1(c);
    // two quadrature rows per abscissa: thermal then coherent
    REQUIRE(records.size() == 4);
    REQUIRE(records[0].abscissa == 0.0);
    REQUIRE(records[1].abscissa == 0.0);
    // nbar = 1: sigma^2 = nbar^2 + nbar = 2; |alpha|^2 = 4
    REQUIRE(records[0].value == Approx(std::sqrt(2.0)).margin(1e-9));
    REQUIRE(records[1].value == Approx(2.0).margin(1e-6));
    REQUIRE_FALSE(records[0].std_error.has_value());
    for (const auto& r : records) REQUIRE(r.method == Method::Quadrature);
}

TEST_CASE("run_fig1 collapse regime at tau = 2", "[experiments]") {
    ExperimentConfig c;
    c.dim = 128;
    c.grid = {2.0};
    c.nbar = 4.0;
    c.alpha = std::sqrt(20.0);
    c.trajectories = 1;
    const auto records = run_fig1(c);
    REQUIRE(records[0].value < 0.2);
    REQUIRE(records[1].value < 0.2);
}

TEST_CASE("run_fig1 is deterministic and worker-count independent",
          "[experiments]") {
    ExperimentConfig c = small_fig1();
    c.oracle = true;
    c.workers = 1;
    const std::string one = write_csv(run_fig1(c));
    const std::string again = write_csv(run_fig1(c));
    REQUIRE(one == again);
    c.workers = 3;
    const std::string three = write_csv(run_fig1(c));
    REQUIRE(one == three);
}

TEST_CASE("run_fig1 oracle rows agree with the quadrature rows",
          "[experiments][slow]") {
    ExperimentConfig c = small_fig1();
    c.oracle = true;
    c.trajectories = 2000;
    const auto records = run_fig1(c);
    REQUIRE(records.size() == 8);
    // abscissa 0.1: quadrature rows 4,5; monte-carlo rows 6,7
    for (int s = 0; s < 2; ++s) {
        const CurveRecord& quad = records[4 + s];
        const CurveRecord& mc = records[6 + s];
        REQUIRE(mc.method == Method::MonteCarlo);
        REQUIRE(mc.std_error.has_value());
        REQUIRE(std::abs(mc.value - quad.value) < 4.0 * *mc.std_error + 1e-3);
    }
}

TEST_CASE("run_ho_position emits the curve plus the steady-state row",
          "[experiments]") {
    ExperimentConfig c;
    c.dim = 48;
    c.r = 1.0;
    c.grid = {0.0, 0.5, 1.0};
    c.trajectories = 1;
    const auto records = run_ho_position(c);
    REQUIRE(records.size() == 4);
    REQUIRE(records[0].value == Approx(0.5)); // hbar / 2 m w
    const CurveRecord& steady = records.back();
    REQUIRE(steady.abscissa >= 20.0);
    const HOPositionModel hom(1.0, 1.0, 0.5);
    REQUIRE(steady.value == Approx(ho_steady_state_variance(hom)).epsilon(1e-12));
}

TEST_CASE("small r tracks the position", "[experiments]") {
    ExperimentConfig c;
    c.dim = 48;
    c.r = 0.01;
    c.grid = {8.0};
    c.trajectories = 1;
    const auto records = run_ho_position(c);
    // long-time sigma_x^2 far below the unmonitored hbar/(2 m w) = 0.5
    REQUIRE(records[0].value < 0.1);
}

TEST_CASE("run_ho_position oracle points sit on the closed-form curve",
          "[experiments][slow]") {
    ExperimentConfig c;
    c.seed = 7;
    c.dim = 64;
    c.r = 1.0;
    c.dt = 5e-4;
    c.grid = {1.0};
    c.trajectories = 3;
    c.oracle = true;
    c.workers = 2;
    const auto records = run_ho_position(c);
    REQUIRE(records.size() == 3);
    const CurveRecord& closed = records[0];
    const CurveRecord& mc = records[1];
    REQUIRE(mc.method == Method::MonteCarlo);
    REQUIRE(std::abs(mc.value - closed.value) / closed.value < 2e-2);
}

TEST_CASE("run_momentum_linear closed form, oracle and master rows",
          "[experiments][slow]") {
    ExperimentConfig c;
    c.seed = 21;
    c.dim = 40;
    c.k = 0.25;
    c.force = 0.4;
    c.dt = 1e-3;
    c.grid = {0.0, 0.5};
    c.trajectories = 3;
    c.oracle = true;
    c.workers = 2;
    const auto records = run_momentum_linear(c);
    // t = 0: closed form only; t = 0.5: closed form + MC + master
    REQUIRE(records.size() == 4);
    REQUIRE(records[0].value == Approx(0.5));
    const CurveRecord& closed = records[1];
    const CurveRecord& mc = records[2];
    const CurveRecord& master = records[3];
    REQUIRE(closed.value == Approx(0.5 / (1.0 + 8.0 * 0.25 * 0.5 * 0.5)));
    REQUIRE(mc.method == Method::MonteCarlo);
    REQUIRE(std::abs(mc.value - closed.value) / closed.value < 2e-2);
    // the ensemble-averaged variance stays at its initial value
    REQUIRE(master.method == Method::MasterEq);
    REQUIRE(master.value == Approx(0.5).margin(1e-5));
}

TEST_CASE("CSV format: header, field order, empty stderr for deterministic "
          "rows", "[experiments]") {
    std::vector<CurveRecord> records;
    records.push_back({0.5, 1.25, std::nullopt, Method::ClosedForm});
    records.push_back({0.5, 1.26, 0.01, Method::MonteCarlo});
    const std::string csv = write_csv(records);
    REQUIRE(csv.rfind("abscissa,value,stderr,method\n", 0) == 0);
    REQUIRE(csv.find("0.5,1.25,,closed-form\n") != std::string::npos);
    REQUIRE(csv.find("0.5,1.26,0.01,monte-carlo\n") != std::string::npos);
}

TEST_CASE("JSON mirrors the records", "[experiments]") {
    std::vector<CurveRecord> records;
    records.push_back({0.25, 2.0, std::nullopt, Method::Quadrature});
    records.push_back({0.5, 1.9, 0.05, Method::MonteCarlo});
    const auto parsed = nlohmann::json::parse(write_json(records));
    REQUIRE(parsed.is_array());
    REQUIRE(parsed.size() == 2);
    REQUIRE(parsed[0]["abscissa"] == 0.25);
    REQUIRE(parsed[0]["method"] == "quadrature");
    REQUIRE_FALSE(parsed[0].contains("stderr"));
    REQUIRE(parsed[1]["stderr"] == 0.05);
    REQUIRE(parsed[1]["method"] == "monte-carlo");
}
