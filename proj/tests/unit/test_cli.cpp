#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <grpsel/io.hpp>

#include "helpers.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Outcome
{
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string quote(const std::string& s)
{
    std::string q = "'";
    for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return q + "'";
}

class Workspace
{
public:
    Workspace()
    {
        dir_ = fs::temp_directory_path() / ("grpsel_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir_);
    }
    ~Workspace() { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    Outcome run(const std::vector<std::string>& args) const
    {
        std::string cmd = quote(GRPSEL_CLI_PATH);
        for (const auto& a : args) cmd += " " + quote(a);
        cmd += " > " + quote(path("stdout.txt")) + " 2> " + quote(path("stderr.txt"));
        const int status = std::system(cmd.c_str());
        Outcome o;
        o.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        o.out = slurp(path("stdout.txt"));
        o.err = slurp(path("stderr.txt"));
        return o;
    }

private:
    fs::path dir_;
};

// A design-1 instance written as data.csv / data.schema.json.
const Workspace& workspace()
{
    static Workspace ws;
    static bool ready = false;
    if (!ready) {
        const auto o = ws.run({"simulate", "--design", "1", "--rho", "0.8", "--seed", "3", "--emit-data", ws.path("data")});
        REQUIRE(o.exit_code == 0);
        ready = true;
    }
    return ws;
}

std::vector<std::string> data_args(const Workspace& ws)
{
    return {"--data", ws.path("data.csv"), "--schema", ws.path("data.schema.json")};
}

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b)
{
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

std::vector<std::string> selected_names(const std::string& csv)
{
    const auto t = grpsel::parse_csv(csv);
    std::vector<std::string> out;
    for (const auto& r : t.rows) out.push_back(r[t.index_of("variable")]);
    return out;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("help and usage errors")
{
    const auto& ws = workspace();
    CHECK(ws.run({"--help"}).exit_code == 0);
    for (const char* sub : {"fit", "two-stage", "cluster", "screen", "simulate", "smote", "metrics", "penalty"}) {
        const auto o = ws.run({sub, "--help"});
        CHECK(o.exit_code == 0);
        const bool seeded = std::string(sub) != "metrics" && std::string(sub) != "penalty";
        if (seeded) CHECK(o.out.find("--seed") != std::string::npos);
    }
    CHECK(ws.run({}).exit_code == 2);
    CHECK(ws.run({"fit", "--bogus"}).exit_code == 2);
    CHECK(ws.run({"frobnicate"}).exit_code == 2);
    CHECK(ws.run({"simulate", "--design", "9"}).exit_code == 2);
}

TEST_CASE("validation failures exit with 2 and a one-line diagnostic")
{
    const auto& ws = workspace();
    const auto missing = ws.run({"fit", "--data", ws.path("data.csv"), "--schema", ws.path("nope.json")});
    CHECK(missing.exit_code == 2);
    CHECK(missing.err.find("nope.json") != std::string::npos);
    CHECK(std::count(missing.err.begin(), missing.err.end(), '\n') == 1);

    const auto mcp = ws.run(cat(cat({"fit"}, data_args(ws)), {"--family", "grmcp", "--gamma", "1.0"}));
    CHECK(mcp.exit_code == 2);
    CHECK(ws.run(cat(cat({"fit"}, data_args(ws)), {"--family", "grscad", "--gamma", "2.0"})).exit_code == 2);
    CHECK(ws.run(cat(cat({"fit"}, data_args(ws)), {"--cv", "1"})).exit_code == 2);
    CHECK(ws.run(cat(cat({"smote"}, data_args(ws)), {})).exit_code == 2);   // continuous response
}

TEST_CASE("numerical failures exit with 1")
{
    const auto& ws = workspace();
    auto t = grpsel::read_csv_file(ws.path("data.csv"));
    const auto yi = t.index_of("y");
    std::string text = grpsel::csv_line(t.header);
    for (auto& r : t.rows) {
        r[yi] = "1";
        text += grpsel::csv_line(r);
    }
    grpsel::write_text_file(ws.path("constant.csv"), text);
    const auto o = ws.run({"screen", "--data", ws.path("constant.csv"), "--schema", ws.path("data.schema.json")});
    CHECK(o.exit_code == 1);
}

TEST_CASE("fit writes a versioned path report")
{
    const auto& ws = workspace();
    const auto o = ws.run(cat(cat({"fit"}, data_args(ws)), {"--nlambda", "20", "--cv", "5", "--csv", ws.path("cv.csv"),
        "--selected-csv", ws.path("sel.csv")}));
    REQUIRE(o.exit_code == 0);
    const auto j = Json::parse(o.out);
    CHECK(j.at("schema_version") == 1);
    CHECK(j.contains("best_lambda"));
    const auto cv = grpsel::parse_csv(slurp(ws.path("cv.csv")));
    CHECK(cv.header == std::vector<std::string>{"lambda", "mean_loss", "sd_loss", "best"});
    CHECK(cv.rows.size() <= 20);
    CHECK(slurp(ws.path("cv.csv")).find("\r\n") != std::string::npos);
}

TEST_CASE("two-stage then fit on the emitted partition selects the same variables")
{
    const auto& ws = workspace();
    const auto common = std::vector<std::string>{"--nlambda", "30", "--cv", "5", "--seed", "11"};
    const auto ts = ws.run(cat(cat(cat({"two-stage"}, data_args(ws)), common),
        {"--j-boot", "5", "--partition-csv", ws.path("part.csv"), "--selected-csv", ws.path("ts_sel.csv"),
            "--stability-csv", ws.path("stab.csv")}));
    REQUIRE(ts.exit_code == 0);
    const auto j = Json::parse(ts.out);
    CHECK(j.at("schema_version") == 1);
    CHECK(j.at("screening").is_null());
    const auto fit = ws.run(cat(cat(cat({"fit"}, data_args(ws)), common),
        {"--groups", ws.path("part.csv"), "--selected-csv", ws.path("fit_sel.csv")}));
    REQUIRE(fit.exit_code == 0);
    CHECK(selected_names(slurp(ws.path("ts_sel.csv"))) == selected_names(slurp(ws.path("fit_sel.csv"))));
    CHECK(!selected_names(slurp(ws.path("ts_sel.csv"))).empty());
}

TEST_CASE("cluster, screen and penalty outputs")
{
    const auto& ws = workspace();
    const auto cl = ws.run(cat(cat({"cluster"}, data_args(ws)), {"--j-boot", "5", "--csv", ws.path("cl.csv")}));
    REQUIRE(cl.exit_code == 0);
    const auto cj = Json::parse(cl.out);
    CHECK(cj.at("schema_version") == 1);
    CHECK(cj.at("dendrogram").at("merges").size() == 29);
    CHECK(grpsel::parse_csv(slurp(ws.path("cl.csv"))).rows.size() == 30);
    const auto fixed = ws.run(cat(cat({"cluster"}, data_args(ws)), {"--m", "4"}));
    REQUIRE(fixed.exit_code == 0);
    CHECK(Json::parse(fixed.out).at("partition").at("cluster_count") == 4);

    const auto sc = ws.run(cat(cat({"screen"}, data_args(ws)), {"--csv", ws.path("sc.csv")}));
    REQUIRE(sc.exit_code == 0);
    CHECK(sc.err.find("warning") != std::string::npos);
    const auto st = grpsel::parse_csv(slurp(ws.path("sc.csv")));
    CHECK(st.header == std::vector<std::string>{"variable", "score", "rank", "kept"});
    CHECK(st.rows.size() == 30);

    const auto pen = ws.run({"penalty", "--family", "mcp", "--lambda", "1", "--points", "11"});
    REQUIRE(pen.exit_code == 0);
    const auto pt = grpsel::parse_csv(pen.out);
    CHECK(pt.rows.size() == 11);
    CHECK(std::stod(pt.rows.back()[1]) == doctest::Approx(1.5));   // gamma lambda^2 / 2
}

TEST_CASE("smote balances a 24:76 sample")
{
    const auto& ws = workspace();
    const Eigen::MatrixXd x = testutil::gaussian_matrix(100, 2, 5);
    std::string text = grpsel::csv_line({"a", "b", "y"});
    for (int i = 0; i < 100; ++i)
        text += grpsel::csv_line({grpsel::format_number(x(i, 0)), grpsel::format_number(x(i, 1)), i < 24 ? "1" : "0"});
    grpsel::write_text_file(ws.path("imb.csv"), text);
    grpsel::write_text_file(ws.path("imb.schema.json"),
        R"({"schema_version":1,"response":{"name":"y","kind":"binary"},"columns":{"a":"quantitative","b":"quantitative"}})");
    const auto o = ws.run({"smote", "--data", ws.path("imb.csv"), "--schema", ws.path("imb.schema.json"), "--json", ws.path("smote.json")});
    REQUIRE(o.exit_code == 0);
    const auto t = grpsel::parse_csv(o.out);
    CHECK(t.rows.size() == 152);
    std::size_t ones = 0, synthetic = 0;
    for (const auto& r : t.rows) {
        ones += r[t.index_of("y")] == "1";
        synthetic += r[t.index_of("synthetic")] == "1";
    }
    CHECK(ones == 76);
    CHECK(synthetic == 52);
    CHECK(Json::parse(slurp(ws.path("smote.json"))).at("schema_version") == 1);
}

TEST_CASE("metrics")
{
    const auto& ws = workspace();
    grpsel::write_text_file(ws.path("pred.csv"), "y,prediction\n1,0.9\n0,0.2\n1,0.4\n0,0.6\n");
    const auto o = ws.run({"metrics", "--predictions", ws.path("pred.csv"), "--kind", "classification"});
    REQUIRE(o.exit_code == 0);
    const auto j = Json::parse(o.out);
    CHECK(j.at("schema_version") == 1);
    CHECK(j.dump().find("0.75") != std::string::npos);   // AUC
    const auto sel = ws.run({"metrics", "--active", "1,2,3", "--selected", "1,2,4", "--p", "5", "--csv", ws.path("m.csv")});
    REQUIRE(sel.exit_code == 0);
    const std::string csv = slurp(ws.path("m.csv"));
    CHECK(csv.find("0.5") != std::string::npos);
    CHECK(ws.run({"metrics", "--active", "1,9", "--selected", "1", "--p", "5"}).exit_code == 2);
}

TEST_CASE("outputs are byte-identical across runs and worker counts")
{
    const auto& ws = workspace();
    const auto args = cat(cat({"two-stage"}, data_args(ws)), {"--j-boot", "4", "--nlambda", "20", "--cv", "4", "--seed", "5"});
    const auto a = ws.run(cat(args, {"--jobs", "1"}));
    const auto b = ws.run(cat(args, {"--jobs", "1"}));
    const auto c = ws.run(cat(args, {"--jobs", "3"}));
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    const std::vector<std::string> sim{"simulate", "--design", "1", "--rho", "0.8", "--replicates", "2", "--seed", "7",
        "--j-boot", "3", "--nlambda", "15", "--cv", "4", "--families", "grlasso"};
    const auto s1 = ws.run(sim);
    REQUIRE(s1.exit_code == 0);
    CHECK(s1.out == ws.run(sim).out);
    CHECK(s1.out == ws.run(cat(sim, {"--jobs", "2"})).out);
}

} // TEST_SUITE
