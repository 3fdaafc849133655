#include <doctest.h>

#include <cmath>
#include <fstream>
#include <string>

#include "builtins.hpp"
#include "config.hpp"
#include "mmlab/error.hpp"
#include "oracles.hpp"
#include "runner.hpp"

using namespace mmlab;
using namespace mmlab::cli;
using nlohmann::json;

namespace {

std::string command_line(const std::string& args) { return std::string(MMLAB_CLI_PATH) + " " + args; }

Error caught(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e;
    }
    return Error(ErrorKind::Io, "no error", "");
}

json minimal() {
    return json::parse(R"({
        "schema": "minimax-lab/1",
        "command": "path.solve",
        "problem": {"J": "x1", "Phi": "x1^2"},
        "domain": {"kind": "uniform", "lo": [-2.0], "hi": [2.0], "n": [401]},
        "params": {"r": 1.0}
    })");
}

std::string temp_file(const std::string& name, const std::string& body) {
    const std::string path = "/tmp/mmlab_test_cli_" + name;
    std::ofstream(path) << body;
    return path;
}

}  // namespace

TEST_CASE("every builtin round-trips through JSON") {
    REQUIRE(builtins().size() >= 10);
    for (const auto& info : builtins()) {
        INFO(info.name);
        const auto c = builtin_config(info.name);
        CHECK(c.builtin == info.name);
        CHECK_NOTHROW(validate(c));
        CHECK(config_from_json(to_json(c)) == c);
        CHECK(config_from_json(json::parse(to_json(c).dump())) == c);
    }
    CHECK(caught([] { builtin_config("no_such_fixture"); }).kind() == ErrorKind::Validation);
}

TEST_CASE("required builtins are present") {
    const auto c = builtin_config("remark_5_1");
    CHECK(c.expressions.at("F") == "-x1^3");
    CHECK(c.expressions.at("Phi") == "x1^2");
    CHECK(c.domain->at("n") == json::array({60001}));
    const auto ex = builtin_config("example_1_1");
    REQUIRE(ex.table.has_value());
    CHECK(ex.table->size() == 2 * 101);
}

TEST_CASE("unknown keys are rejected with their path") {
    auto j = minimal();
    CHECK_NOTHROW(validate(config_from_json(j)));
    j["problem"]["bogus"] = 1;
    const auto e = caught([&] { config_from_json(j); });
    CHECK(e.kind() == ErrorKind::Validation);
    CHECK(e.context().find("$.problem.bogus") != std::string::npos);

    auto top = minimal();
    top["extra"] = true;
    CHECK(caught([&] { config_from_json(top); }).context().find("$.extra") != std::string::npos);

    auto dom = minimal();
    dom["domain"]["step"] = 0.1;
    CHECK(caught([&] { config_from_json(dom); }).kind() == ErrorKind::Validation);
}

TEST_CASE("invalid values are validation errors") {
    auto tol = minimal();
    tol["tolerances"]["gap_tol"] = -1.0;
    CHECK(caught([&] { validate(config_from_json(tol)); }).kind() == ErrorKind::Validation);

    auto cmd = minimal();
    cmd["command"] = "path.fly";
    CHECK(caught([&] { validate(config_from_json(cmd)); }).kind() == ErrorKind::Validation);

    auto schema = minimal();
    schema["schema"] = "minimax-lab/0";
    CHECK(caught([&] { validate(config_from_json(schema)); }).kind() == ErrorKind::Validation);

    auto expr = minimal();
    expr["problem"]["J"] = "x1 +";
    CHECK_THROWS_AS(validate(config_from_json(expr)), Error);
}

TEST_CASE("loading failures map to Io and Parse") {
    CHECK(caught([] { load_config("/nonexistent/mmlab.json"); }).kind() == ErrorKind::Io);
    const auto bad = temp_file("bad.json", "{ \"schema\": ");
    CHECK(caught([&] { load_config(bad); }).kind() == ErrorKind::Parse);
    const auto good = temp_file("good.json", minimal().dump());
    CHECK(load_config(good) == config_from_json(minimal()));
}

TEST_CASE("in-process runs") {
    const auto out = run(config_from_json(minimal()));
    CHECK(out.exit_code == 0);
    CHECK(out.report["result"]["lambda_hat"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));

    const auto ex = run(builtin_config("example_1_1"));
    CHECK(ex.exit_code == 0);
    CHECK(ex.report["schema"] == kSchema);

    const auto r81 = run(builtin_config("remark_8_1"));
    CHECK(r81.exit_code == 2);
}

TEST_CASE("process exit codes") {
    const auto missing = oracle::run_command(command_line("path solve --config /nonexistent/mmlab.json"));
    CHECK(missing.first == 1);
    const auto err = json::parse(missing.second);
    CHECK(err["error"]["kind"] == "Io");

    const auto ok = oracle::run_command(command_line("path solve --builtin linear_quadratic"));
    REQUIRE(ok.first == 0);
    const auto rep = json::parse(ok.second);
    CHECK(rep["result"]["lambda_hat"].get<double>() == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(rep["result"]["x_hat"][0].get<double>() == doctest::Approx(-1.0));

    const auto viol = oracle::run_command(command_line("integral verify-82 --builtin remark_8_1"));
    REQUIRE(viol.first == 2);
    const auto tuple = json::parse(viol.second)["result"]["violation"]["tuple"];
    CHECK(tuple["objective"].get<double>() == 0.0);
    for (const auto& u : tuple["u"]) CHECK(u[0].get<double>() == 0.0);
}

TEST_CASE("repeated runs are byte-identical") {
    for (const char* args : {"path solve --builtin linear_quadratic", "minimax check --builtin example_1_1",
                             "theta compute --builtin double_well_theta"}) {
        INFO(args);
        const auto a = oracle::run_command(command_line(args));
        const auto b = oracle::run_command(command_line(args));
        CHECK(a.first == b.first);
        CHECK(a.second == b.second);
        CHECK_FALSE(a.second.empty());
    }
}
