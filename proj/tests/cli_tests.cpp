#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "bcn/cli.hpp"

namespace {

const std::string kModels = BCNKIT_MODELS_DIR;

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = bcn::cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream f(path);
    f << content;
    return path.string();
}

}  // namespace

TEST_CASE("convert prints the delta forms") {
    const CliResult r = run_cli({"convert", kModels + "/decomposable3.json"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "L_1 = delta_8[3,1,3,1,1,3,1,3]"));
    CHECK(contains(r.out, "L_2 = delta_8[4,5,4,5,4,5,4,5]"));
    CHECK(contains(r.out, "H = delta_2[2,1,1,1,1,1,1,2]"));

    const CliResult id = run_cli({"convert", kModels + "/identity1.json"});
    CHECK(contains(id.out, "L_1 = delta_2[1,2]"));
    CHECK(contains(id.out, "H = delta_2[1,2]"));

    const CliResult sr = run_cli({"convert", kModels + "/shift_register3.json"});
    CHECK(contains(sr.out, "L_1 = delta_8[1,3,5,7,1,3,5,7]"));
    CHECK(contains(sr.out, "L_2 = delta_8[2,4,6,8,2,4,6,8]"));
    CHECK(contains(sr.out, "H = delta_2[1,1,1,1,2,2,2,2]"));
}

TEST_CASE("convert requires an equations-form file") {
    const CliResult r = run_cli({"convert", kModels + "/undecomposable2.json"});
    CHECK(r.code == 1);
    CHECK(contains(r.err, "equations-form"));
}

TEST_CASE("converted output re-ingests as a matrix file with identical analyses") {
    const CliResult converted =
        run_cli({"convert", kModels + "/decomposable3.json", "--json"});
    REQUIRE(converted.code == 0);
    const std::string path = write_temp("bcnkit_cli_roundtrip.json", converted.out);

    for (const char* command : {"obsmat", "decompose"}) {
        const CliResult from_dsl = run_cli({command, kModels + "/decomposable3.json", "--json"});
        const CliResult from_matrix = run_cli({command, path, "--json"});
        CHECK(from_dsl.code == 0);
        CHECK(from_dsl.out == from_matrix.out);
    }
}

TEST_CASE("obsmat reports rows, partition and flags") {
    const CliResult r = run_cli({"obsmat", kModels + "/decomposable3.json"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "observability rows: 4"));
    CHECK(contains(r.out, "O[1] word \"\": delta_2[2,1,1,1,1,1,1,2]"));
    CHECK(contains(r.out, "O[2] word \"1\": delta_2[1,2,1,2,2,1,2,1]"));
    CHECK(contains(r.out, "O[4] word \"12\": delta_2[2,2,2,2,2,2,2,2]"));
    CHECK(contains(r.out, "C = {{1,8},{2,4,5,7},{3,6}}"));
    CHECK(contains(r.out, "observable (distinct columns): no"));
    CHECK(contains(r.out, "odd-size class rules out decomposition: no"));

    const CliResult r2 = run_cli({"obsmat", kModels + "/undecomposable2.json"});
    CHECK(contains(r2.out, "C = {{1,2,3},{4}}"));
    CHECK(contains(r2.out, "odd-size class rules out decomposition: yes"));

    const CliResult sr = run_cli({"obsmat", kModels + "/shift_register3.json"});
    CHECK(contains(sr.out, "observable (distinct columns): yes"));
}

TEST_CASE("obsmat json carries the structured report") {
    const CliResult r = run_cli({"obsmat", kModels + "/decomposable3.json", "--json"});
    REQUIRE(r.code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["schema_version"] == 1);
    CHECK(j["command"] == "obsmat");
    CHECK(j["rows"].size() == 4);
    CHECK(j["rows"][0]["word"].empty());
    CHECK(j["partition"] == nlohmann::json::parse("[[1,8],[2,4,5,7],[3,6]]"));
    CHECK(j["observable_columns"] == false);
    CHECK(j["odd_block_undecomposable"] == false);
    CHECK(j["model"]["L"][0] == nlohmann::json::parse("[3,1,3,1,1,3,1,3]"));
}

TEST_CASE("decompose reports the winning order and equations") {
    const CliResult r = run_cli({"decompose", kModels + "/decomposable3.json"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "order = 1 (retained coordinates s = 2)"));
    CHECK(contains(r.out, "partition = {{1,8},{2,7},{3,6},{4,5}}"));
    CHECK(contains(r.out, "alternatives at this order: 0"));
    CHECK(contains(r.out, "Q = delta_4[1,2,3,4,4,3,2,1]"));
    CHECK(contains(r.out, "z1'"));
    CHECK(contains(r.out, "y ="));
}

TEST_CASE("decompose handles undecomposable systems with exit code zero") {
    const CliResult r = run_cli({"decompose", kModels + "/shift_register3.json"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "order = 0"));
    CHECK(contains(r.out, "undecomposable with respect to outputs"));

    const CliResult r2 = run_cli({"decompose", kModels + "/undecomposable2.json", "--json"});
    CHECK(r2.code == 0);
    const nlohmann::json j = nlohmann::json::parse(r2.out);
    CHECK(j["order"] == 0);
    CHECK(j["decomposable"] == false);
}

TEST_CASE("decompose lists alternatives with --all") {
    const CliResult r = run_cli({"decompose", kModels + "/nonregular3.json", "--all"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "alternatives at this order: 2"));
    CHECK(contains(r.out, "partition[1] = {{1,7},{2,4},{3,5},{6,8}}"));
    CHECK(contains(r.out, "partition[2] = {{1,7},{2,6},{3,5},{4,8}}"));
    CHECK(contains(r.out, "partition[3] = {{1,7},{2,8},{3,5},{4,6}}"));

    const CliResult j = run_cli({"decompose", kModels + "/nonregular3.json", "--all", "--json"});
    const nlohmann::json doc = nlohmann::json::parse(j.out);
    CHECK(doc["all_partitions"].size() == 3);
    CHECK(doc["alternatives"] == 2);
}

TEST_CASE("decompose at a fixed order") {
    const CliResult r = run_cli({"decompose", kModels + "/shift_register3.json", "--order", "1"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "no decomposition of order 1 exists"));

    const CliResult bad = run_cli({"decompose", kModels + "/shift_register3.json", "--order", "0"});
    CHECK(bad.code == 1);

    const CliResult ok = run_cli({"decompose", kModels + "/decomposable3.json", "--order", "1"});
    CHECK(ok.code == 0);
    CHECK(contains(ok.out, "partition = {{1,8},{2,7},{3,6},{4,5}}"));
}

TEST_CASE("decompose json embeds a loadable equation system") {
    const CliResult r = run_cli({"decompose", kModels + "/decomposable3.json", "--json"});
    REQUIRE(r.code == 0);
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["order"] == 1);
    CHECK(j["s"] == 2);
    CHECK(j["T"].size() == 8);
    CHECK(j["G1"].size() == 2);
    CHECK(j["M"] == nlohmann::json::parse("[2,1,1,1]"));
    // the embedded equations describe the transformed system
    const bcn::BCN z = bcn::model_from_json(j["equations"]);
    CHECK(z.state_names == std::vector<std::string>{"z1", "z2", "z3"});
    const bcn::BCN original = bcn::model_from_json(j["model"]);
    const bcn::BCN moved = bcn::transform(original, bcn::LogicalMatrix(8, j["T"].get<std::vector<int>>()));
    CHECK(z.L == moved.L);
    CHECK(z.H == moved.H);
}

TEST_CASE("verify passes and fails with diagnostics") {
    const CliResult pass = run_cli({"verify", kModels + "/decomposable3.json", "--t",
                                    "3,6,1,8,7,2,5,4", "--s", "2"});
    CHECK(pass.code == 0);
    CHECK(contains(pass.out, "verification: PASS"));

    const CliResult fail = run_cli({"verify", kModels + "/decomposable3.json", "--t",
                                    "1,2,3,4,5,6,7,8", "--s", "2"});
    CHECK(fail.code == 0);
    CHECK(contains(fail.out, "verification: FAIL"));
    CHECK(contains(fail.out, "maps class"));

    const CliResult trivial = run_cli({"verify", kModels + "/decomposable3.json", "--t",
                                       "1,2,3,4,5,6,7,8", "--s", "3"});
    CHECK(contains(trivial.out, "verification: PASS"));

    const CliResult bad = run_cli({"verify", kModels + "/decomposable3.json", "--t", "1,1,3,4,5,6,7,8",
                                   "--s", "2"});
    CHECK(bad.code == 1);
    CHECK(contains(bad.err, "permutation"));
}

TEST_CASE("simulate walks trajectories") {
    const CliResult r = run_cli({"simulate", kModels + "/decomposable3.json", "--x0", "1",
                                 "--inputs", "1,1"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "states: 1 3 3"));
    CHECK(contains(r.out, "outputs: 2 1 1"));

    const CliResult bits = run_cli({"simulate", kModels + "/shift_register3.json", "--x0", "8",
                                    "--inputs", "1,1,1", "--bits"});
    CHECK(contains(bits.out, "states: 8 7 5 1"));
    CHECK(contains(bits.out, "outputs: 2 2 2 1"));
    CHECK(contains(bits.out, "(0,0,0) (0,0,1) (0,1,1) (1,1,1)"));

    const CliResult steps = run_cli({"simulate", kModels + "/undecomposable2.json", "--x0", "4",
                                     "--steps", "3"});
    CHECK(steps.code == 0);
    CHECK(contains(steps.out, "states: 4 1 1 1"));

    const CliResult zero = run_cli({"simulate", kModels + "/undecomposable2.json", "--x0", "2",
                                    "--steps", "0"});
    CHECK(contains(zero.out, "states: 2"));

    CHECK(run_cli({"simulate", kModels + "/decomposable3.json", "--x0", "1", "--steps", "3"}).code == 1);
    CHECK(run_cli({"simulate", kModels + "/decomposable3.json", "--x0", "9", "--inputs", "1"}).code == 1);
}

TEST_CASE("regularity compares two transformations") {
    const CliResult r = run_cli({"regularity", kModels + "/nonregular3.json", "--t1",
                                 "3,5,1,7,2,6,4,8", "--t2", "3,5,1,6,2,7,4,8", "--s", "2"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "R = 1/4 * [[3,1],[1,3]]"));
    CHECK(contains(r.out, "verdict: NotRegular"));

    const CliResult same = run_cli({"regularity", kModels + "/nonregular3.json", "--t1",
                                    "3,5,1,7,2,6,4,8", "--t2", "3,5,1,7,2,6,4,8", "--s", "2"});
    CHECK(contains(same.out, "R = [[1,0],[0,1]]"));
    CHECK(contains(same.out, "verdict: Inconclusive"));

    // a transformation that fails verification is an input error
    const CliResult bad = run_cli({"regularity", kModels + "/nonregular3.json", "--t1",
                                   "1,2,3,4,5,6,7,8", "--t2", "3,5,1,6,2,7,4,8", "--s", "2"});
    CHECK(bad.code == 1);
    CHECK(contains(bad.err, "--t1"));
}

TEST_CASE("regularity json prints exact rationals") {
    const CliResult r = run_cli({"regularity", kModels + "/nonregular3.json", "--t1",
                                 "3,5,1,7,2,6,4,8", "--t2", "3,5,1,6,2,7,4,8", "--s", "2", "--json"});
    const nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["R"]["denominator"] == 4);
    CHECK(j["R"]["numerators"] == nlohmann::json::parse("[[3,1],[1,3]]"));
    CHECK(j["r_is_logical"] == false);
    CHECK(j["verdict"] == "not_regular");
}

TEST_CASE("reports are byte-identical across runs") {
    for (const std::vector<std::string> args :
         {std::vector<std::string>{"obsmat", kModels + "/decomposable3.json", "--json"},
          std::vector<std::string>{"decompose", kModels + "/nonregular3.json", "--all", "--json"},
          std::vector<std::string>{"decompose", kModels + "/decomposable3.json"},
          std::vector<std::string>{"convert", kModels + "/decomposable3.json", "--json"}}) {
        const CliResult a = run_cli(args);
        const CliResult b = run_cli(args);
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
    }
}

TEST_CASE("quiet trims the human report") {
    const CliResult loud = run_cli({"obsmat", kModels + "/decomposable3.json"});
    const CliResult quiet = run_cli({"obsmat", kModels + "/decomposable3.json", "--quiet"});
    CHECK(contains(loud.out, "model: n = 3"));
    CHECK_FALSE(contains(quiet.out, "model: n = 3"));
    CHECK(contains(quiet.out, "C = {{1,8},{2,4,5,7},{3,6}}"));
}

TEST_CASE("input errors exit with code one") {
    CHECK(run_cli({"obsmat", kModels + "/missing.json"}).code == 1);
    CHECK(run_cli({"bogus-command"}).code == 1);
    CHECK(run_cli({}).code == 1);

    const std::string bad_json = write_temp("bcnkit_cli_bad.json", "{ not json");
    CHECK(run_cli({"obsmat", bad_json}).code == 1);

    const std::string mixed = write_temp("bcnkit_cli_mixed.json",
                                         R"({"update":{},"L":[[1]],"H":[1]})");
    CHECK(run_cli({"obsmat", mixed}).code == 1);
}

TEST_CASE("help exits cleanly") {
    const CliResult r = run_cli({"--help"});
    CHECK(r.code == 0);
    CHECK(contains(r.out, "decompose"));
}

TEST_CASE("the state cap is enforced and overridable") {
    // a 4-state model with a cap of 3
    const CliResult blocked = run_cli({"obsmat", kModels + "/shift_register4.json", "--max-n", "3"});
    CHECK(blocked.code == 1);
    CHECK(contains(blocked.err, "cap"));
    const CliResult fine = run_cli({"obsmat", kModels + "/shift_register4.json", "--max-n", "4"});
    CHECK(fine.code == 0);
}
