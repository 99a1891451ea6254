#include <catch2/catch_amalgamated.hpp>

#include "bcn/model_io.hpp"
#include "test_support.hpp"

using namespace bcn;

namespace {
const std::string kModels = BCNKIT_MODELS_DIR;
}

TEST_CASE("equations-form files assemble to their matrices") {
    const BCN b = load_model_file(kModels + "/decomposable3.json");
    CHECK(b.n == 3);
    CHECK(b.m == 1);
    CHECK(b.p == 1);
    CHECK(b.L == fixtures::mixed3().L);
    CHECK(b.H == fixtures::mixed3().H);
    CHECK(b.state_names == std::vector<std::string>{"x1", "x2", "x3"});

    const BCN id = load_model_file(kModels + "/identity1.json");
    CHECK(id.m == 0);
    CHECK(id.L == LogicalMatrix(2, {1, 2}));
    CHECK(id.H == LogicalMatrix(2, {1, 2}));
}

TEST_CASE("matrix-form files load verbatim") {
    const BCN b = load_model_file(kModels + "/undecomposable2.json");
    CHECK(b.n == 2);
    CHECK(b.m == 0);
    CHECK(b.L == LogicalMatrix(4, {1, 2, 3, 1}));
    CHECK(b.H == LogicalMatrix(2, {1, 1, 1, 2}));

    const BCN nr = load_model_file(kModels + "/nonregular3.json");
    CHECK(nr.L == fixtures::nonunique3().L);
    CHECK(nr.H == fixtures::nonunique3().H);
}

TEST_CASE("form detection") {
    CHECK(is_equations_form(nlohmann::json{{"update", nlohmann::json::object()}}));
    CHECK_FALSE(is_equations_form(nlohmann::json{{"L", nlohmann::json::array()}}));
    CHECK_THROWS_AS(is_equations_form(nlohmann::json{{"update", 1}, {"L", 1}}), ValidationError);
    CHECK_THROWS_AS(is_equations_form(nlohmann::json{{"x", 1}}), ValidationError);
}

TEST_CASE("matrix model documents round-trip") {
    testgen::Rng rng(103);
    for (int trial = 0; trial < 30; ++trial) {
        const BCN b = testgen::random_bcn(1 + trial % 4, trial % 3, 1 + trial % 2, rng);
        const BCN back = model_from_json(matrix_model_json(b));
        CHECK(back.n == b.n);
        CHECK(back.m == b.m);
        CHECK(back.p == b.p);
        CHECK(back.L == b.L);
        CHECK(back.H == b.H);
    }
}

TEST_CASE("emitted equations reproduce the matrices exactly") {
    testgen::Rng rng(107);
    for (int trial = 0; trial < 30; ++trial) {
        const BCN b = testgen::random_bcn(1 + trial % 3, trial % 3, 1 + trial % 2, rng);
        const BCN back = model_from_json(nlohmann::json::parse(to_equations(b)));
        CHECK(back.L == b.L);
        CHECK(back.H == b.H);
    }
}

TEST_CASE("model validation failures carry context") {
    auto load = [](const nlohmann::json& j) { return model_from_json(j); };

    CHECK_THROWS_AS(load(nlohmann::json::parse(R"({"n":2,"m":0,"p":1,"L":[[1,2,3]],"H":[1,1,1,2]})")),
                    ValidationError);
    CHECK_THROWS_AS(load(nlohmann::json::parse(R"({"n":2,"m":0,"p":1,"L":[[1,2,3,5]],"H":[1,1,1,2]})")),
                    ValidationError);
    CHECK_THROWS_AS(load(nlohmann::json::parse(R"({"n":2,"m":1,"p":1,"L":[[1,2,3,4]],"H":[1,1,1,2]})")),
                    ValidationError);  // needs 2^m blocks
    CHECK_THROWS_AS(load(nlohmann::json::parse(R"({"n":0,"m":0,"p":1,"L":[[]],"H":[]})")),
                    ValidationError);

    try {
        load(nlohmann::json::parse(
            R"({"states":["x"],"outputs":["y"],"update":{"x":"x |"},"output_map":{"y":"x"}})"));
        FAIL("no exception");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("update.x") != std::string::npos);
        CHECK(std::string(e.what()).find("position") != std::string::npos);
    }

    CHECK_THROWS_AS(load(nlohmann::json::parse(
                        R"({"states":["2x"],"outputs":["y"],"update":{"2x":"1"},"output_map":{"y":"1"}})")),
                    ValidationError);
}

TEST_CASE("the state cap is enforced and adjustable") {
    nlohmann::json j;
    j["n"] = 3;
    j["m"] = 0;
    j["p"] = 1;
    nlohmann::json l = nlohmann::json::array();
    std::vector<int> id(8);
    std::iota(id.begin(), id.end(), 1);
    l.push_back(id);
    j["L"] = l;
    j["H"] = std::vector<int>{1, 1, 1, 1, 2, 2, 2, 2};
    CHECK_THROWS_AS(model_from_json(j, 2), ValidationError);
    CHECK(model_from_json(j, 3).n == 3);
}

TEST_CASE("missing and malformed files are validation errors") {
    CHECK_THROWS_AS(load_model_file(kModels + "/does_not_exist.json"), ValidationError);
}

TEST_CASE("delta rendering") {
    CHECK(delta_str(LogicalMatrix(8, {3, 1, 3, 1, 1, 3, 1, 3})) == "delta_8[3,1,3,1,1,3,1,3]");
    CHECK(delta_str(std::vector<int>{1, 2}, 2) == "delta_2[1,2]");
}
