#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"

#include "instances.hpp"
#include "rsqd/errors.hpp"
#include "rsqd/io.hpp"

using namespace rsqd;
using nlohmann::json;

namespace {

json instance_a_json() {
    return json::parse(R"({"dim": 3, "h0": [0.0, 0.1, 1.0],
        "v_re": [[0.0, 0.05, 0.2], [0.05, 0.0, 0.3], [0.2, 0.3, 0.0]],
        "model": [1, 2], "lambda": 1.0})");
}

} // namespace

TEST_CASE("instance from JSON") {
    auto inst = instance_from_json(instance_a_json());
    auto ref = rsqd::testing::instance_a();
    CHECK(inst.dim() == 3);
    CHECK(inst.model() == std::vector<int>{0, 1});
    CHECK((inst.v() - ref.v()).norm() == 0.0);
    CHECK(inst.gap() == doctest::Approx(0.9));

    auto j = instance_a_json();
    j.erase("lambda");
    CHECK(instance_from_json(j).lambda() == 1.0);
    j["v_im"] = json::parse("[[0, 0.1, 0], [-0.1, 0, 0], [0, 0, 0]]");
    CHECK(instance_from_json(j).v()(0, 1) == Complex(0.05, 0.1));
}

TEST_CASE("instance schema errors") {
    auto broken = [](auto edit) {
        json j = instance_a_json();
        edit(j);
        return j;
    };
    CHECK_THROWS_AS(instance_from_json(json::array()), ValidationError);
    CHECK_THROWS_AS(instance_from_json(broken([](json& j) { j.erase("dim"); })), ValidationError);
    CHECK_THROWS_AS(instance_from_json(broken([](json& j) { j["dim"] = 0; })), ValidationError);
    CHECK_THROWS_AS(instance_from_json(broken([](json& j) { j["dim"] = 2.5; })), ValidationError);
    CHECK_THROWS_AS(instance_from_json(broken([](json& j) { j["h0"] = {0.0, 1.0}; })), ValidationError);
    CHECK_THROWS_AS(instance_from_json(broken([](json& j) { j["h0"][0] = "x"; })), ValidationError);
    CHECK_THROWS_AS(instance_from_json(broken([](json& j) { j["v_re"][1] = {0.05, 0.0}; })), ValidationError);
    CHECK_THROWS_AS(instance_from_json(broken([](json& j) { j["v_re"][0][1] = 0.5; })), ValidationError);
    CHECK_THROWS_AS(instance_from_json(broken([](json& j) { j["model"] = {0, 1}; })), ValidationError);
    CHECK_THROWS_AS(instance_from_json(broken([](json& j) { j["model"] = {1, 4}; })), ValidationError);
    CHECK_THROWS_AS(instance_from_json(broken([](json& j) { j["model"] = {1, 2, 3}; })), ValidationError);
    CHECK_THROWS_AS(instance_from_json(broken([](json& j) { j["h0"] = {0.0, 1.0, 1.0}; })), ValidationError);
    CHECK_THROWS_AS(instance_from_json(broken([](json& j) { j["lambda"] = "big"; })), ValidationError);
}

TEST_CASE("instance JSON round trip") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 5; ++k) {
        auto inst = rsqd::testing::random_instance(rng);
        auto back = instance_from_json(json::parse(instance_to_json(inst).dump()));
        CHECK((back.v() - inst.v()).norm() == 0.0);
        CHECK((back.h0() - inst.h0()).norm() == 0.0);
        CHECK(back.model() == inst.model());
        CHECK(back.lambda() == inst.lambda());
    }
}

TEST_CASE("load instance files") {
    auto dir = std::filesystem::temp_directory_path() / "rsqd_io_test";
    std::filesystem::create_directories(dir);
    auto good = dir / "a.json";
    std::ofstream(good) << instance_a_json().dump();
    CHECK(load_instance(good.string()).dim() == 3);
    auto bad = dir / "bad.json";
    std::ofstream(bad) << "{ not json";
    CHECK_THROWS_AS(load_instance(bad.string()), ValidationError);
    CHECK_THROWS_AS(load_instance((dir / "missing.json").string()), ValidationError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("number formatting round-trips") {
    CHECK(format_number(0.9) == "0.9");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    for (double x : {1.0 / 3.0, 2.5e-17, -7.123456789012345e8}) CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("report CSV and summary") {
    ConvergenceReport report{ScanMethod::Series, {{0.1, 2, 1e-3, 2e-4}, {0.05, 2, 1.25e-4, 1e-5}}, {}};
    report.fits = fit_slopes(report.rows);
    std::ostringstream out;
    write_report_csv(out, report);
    CHECK(out.str() == "lambda,order_or_iter,err_vs_exact,lindgren_residual\n0.1,2,0.001,2e-04\n0.05,2,0.000125,1e-05\n");
    std::ostringstream with_method;
    write_report_csv(with_method, report, false, true);
    CHECK(with_method.str().rfind("series,0.1,2,", 0) == 0);

    auto js = report_summary(report);
    CHECK(js["method"] == "series");
    CHECK(js["rows"] == 2);
    REQUIRE(js["fits"].size() == 1);
    CHECK(js["fits"][0]["slope"].get<double>() == doctest::Approx(3.0));
}
