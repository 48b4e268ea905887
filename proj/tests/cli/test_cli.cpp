#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "jsmooth/jsmooth.h"
#include "run_config.hpp"

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

/// Runs the CLI through the shell; stderr goes to `dir`/stderr.txt.
Run cli(const std::string& args, const fs::path& dir, const std::string& stdin_text = "") {
    std::string cmd = "'" JSM_CLI_PATH "' " + args + " 2>'" + (dir / "stderr.txt").string() + "'";
    if (!stdin_text.empty()) {
        const fs::path in = dir / "stdin.txt";
        std::ofstream(in) << stdin_text;
        cmd += " <'" + in.string() + "'";
    } else {
        cmd += " </dev/null";
    }
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buffer[4096];
    size_t got;
    while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0) r.out.append(buffer, got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::vector<double> parse_row(const std::string& line) {
    std::vector<double> v(64);
    size_t n = 0;
    REQUIRE(jsm_parse_csv_row(line.c_str(), v.data(), v.size(), &n) == JSM_OK);
    v.resize(n);
    return v;
}

struct TempDir {
    fs::path path;
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "jsm_cli_XXXXXX").string();
        REQUIRE(mkdtemp(tmpl.data()) != nullptr);
        path = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

}  // namespace

TEST_SUITE("cli_config") {
    TEST_CASE("RunConfig survives a JSON round trip") {
        jsmcli::RunConfig c;
        c.views = {{"a.csv", "a"}, {"/abs/b.csv", "b"}, {"c.csv", ""}};
        c.kernel.kind = "knn";
        c.kernel.bandwidth = 0.125;
        c.kernel.bandwidth_factor = 0.7;
        c.kernel.k = 13;
        c.kernel.delta = 1.5;
        c.d = 77;
        c.m_max = 9;
        c.threshold.mode = "analytic";
        c.threshold.permutations = 11;
        c.threshold.rebuild = true;
        c.eigensolver = "lanczos";
        c.extension_cutoff = 1.0 / 3.0;
        c.seed = 18446744073709551615ull;
        c.output_dir = "out dir";
        const std::string text = jsmcli::to_json(c);
        const jsmcli::RunConfig back = jsmcli::run_config_from_json(text);
        CHECK(back == c);
        CHECK(jsmcli::to_json(back) == text);
        CHECK(jsmcli::run_config_from_json(jsmcli::to_json(jsmcli::RunConfig{})) == jsmcli::RunConfig{});
    }

    TEST_CASE("unknown keys and bad values are rejected") {
        CHECK_THROWS_AS(jsmcli::run_config_from_json(R"({"views": ["a", "b"], "sedd": 3})"), jsmcli::ConfigError);
        CHECK_THROWS_AS(jsmcli::run_config_from_json("{not json"), jsmcli::ConfigError);
        const jsmcli::RunConfig strings = jsmcli::run_config_from_json(R"({"views": ["a.csv", "b.csv"]})");
        REQUIRE(strings.views.size() == 2);
        CHECK(strings.views[1].path == "b.csv");

        jsmcli::RunConfig one;
        one.views = {{"a.csv", "a"}};
        try {
            jsmcli::validate(one, false);
            FAIL("single view accepted");
        } catch (const jsmcli::ConfigError& e) {
            CHECK(e.code == 1);
        }
        jsmcli::RunConfig missing;
        missing.views = {{"/nonexistent/a.csv", "a"}, {"/nonexistent/b.csv", "b"}};
        try {
            jsmcli::validate(missing, true);
            FAIL("missing file accepted");
        } catch (const jsmcli::ConfigError& e) {
            CHECK(e.code == 2);
        }
    }
}

TEST_SUITE("cli_pipeline") {
    TEST_CASE("generate, fit, threshold, select, extend, embed, plot-data") {
        TempDir tmp;
        const fs::path data = tmp.path / "data";
        REQUIRE(cli("generate toy --n 400 --seed 3 --out-dir '" + data.string() + "'", tmp.path).code == 0);
        for (const char* f : {"spiral.csv", "torus.csv", "truth.csv", "provenance.json", "config.json"})
            CHECK(fs::exists(data / f));

        // Relative paths in the generated config resolve against the config file, from any cwd.
        const fs::path model = data / "fit";
        Run fit = cli("fit --config '" + (data / "config.json").string() + "' --d 60 --save-bases", tmp.path);
        REQUIRE(fit.code == 0);
        CHECK(fit.out.find("sigma") != std::string::npos);
        for (const char* f : {"U.csv", "scores.json", "manifest.json", "threshold.json", "config.json"})
            CHECK(fs::exists(model / f));
        const std::string manifest = slurp(model / "manifest.json");
        CHECK(manifest.find("\"K\": 2") != std::string::npos);
        CHECK(manifest.find("\"N\": 400") != std::string::npos);
        CHECK(manifest.find("\"d\": 60") != std::string::npos);

        SUBCASE("threshold and select") {
            Run t = cli("threshold --model '" + model.string() + "' --mode analytic", tmp.path);
            REQUIRE(t.code == 0);
            double expect = 0.0;
            REQUIRE(jsm_analytic_threshold(400, 60, &expect) == JSM_OK);
            CHECK(std::stod(t.out) == doctest::Approx(expect).epsilon(1e-15));
            Run s = cli("select --model '" + model.string() + "' --threshold 0.999999", tmp.path);
            REQUIRE(s.code == 0);
            CHECK(std::stoi(s.out) >= 1);
            Run s2 = cli("select --model '" + model.string() + "'", tmp.path);  // reads threshold.json
            REQUIRE(s2.code == 0);
            CHECK(std::stoi(s2.out) >= std::stoi(s.out));
        }

        SUBCASE("extend streams rows and survives malformed lines") {
            const auto spiral = lines(slurp(data / "spiral.csv"));
            const auto torus = lines(slurp(data / "torus.csv"));
            std::string input = "# comment\n" + spiral[0] + "," + torus[0] + "\nnot,a,row\n\n" + spiral[1] + "," +
                                torus[1] + "\n1,2\n";
            Run e = cli("extend --model '" + model.string() + "'", tmp.path, input);
            CHECK(e.code == 2);  // some lines failed, all were answered
            const auto out = lines(e.out);
            REQUIRE(out.size() == 4);
            CHECK(out[1].find("nan") == 0);
            CHECK(out[3].find("nan") == 0);
            CHECK(slurp(tmp.path / "stderr.txt").find("line 3") != std::string::npos);

            // Same numbers as the library extender on the same rows.
            jsm_extender* ext = nullptr;
            REQUIRE(jsm_extender_load(model.c_str(), &ext) == JSM_OK);
            for (int r : {0, 1}) {
                std::vector<double> row = parse_row(spiral[r]);
                const std::vector<double> y = parse_row(torus[r]);
                row.insert(row.end(), y.begin(), y.end());
                std::vector<double> expect(jsm_extender_functions(ext));
                REQUIRE(jsm_extender_extend_row(ext, row.data(), row.size(), expect.data()) == JSM_OK);
                const std::vector<double> got = parse_row(out[r == 0 ? 0 : 2]);
                REQUIRE(got.size() == expect.size());
                for (size_t j = 0; j < got.size(); ++j) CHECK(got[j] == expect[j]);
            }
            jsm_extender_free(ext);

            Run ok = cli("extend --model '" + model.string() + "'", tmp.path, spiral[5] + "," + torus[5] + "\n");
            CHECK(ok.code == 0);

            Run mismatch = cli("extend --model '" + model.string() + "' --config '" +
                                   (tmp.path / "knn.json").string() + "'",
                               tmp.path);
            CHECK(mismatch.code == 2);  // config file missing
            std::ofstream(tmp.path / "knn.json") << R"({"kernel": {"kind": "knn"}})";
            mismatch = cli("extend --model '" + model.string() + "' --config '" + (tmp.path / "knn.json").string() + "'",
                           tmp.path);
            CHECK(mismatch.code == 1);
            CHECK(slurp(tmp.path / "stderr.txt").find("kernel") != std::string::npos);
        }

        SUBCASE("embed and plot-data") {
            Run e = cli("embed --model '" + model.string() + "' --coords 2 --functions 4", tmp.path);
            REQUIRE(e.code == 0);
            const auto emb = lines(slurp(model / "embedding.csv"));
            CHECK(emb.size() >= 400);
            Run p = cli("plot-data --model '" + model.string() + "' --truth '" + (data / "truth.csv").string() +
                            "' --truth-column z --out-dir '" + (tmp.path / "plot").string() + "'",
                        tmp.path);
            REQUIRE(p.code == 0);
            CHECK(fs::exists(tmp.path / "plot" / "functions_vs_truth.csv"));
            CHECK(fs::exists(tmp.path / "plot" / "scores.csv"));
        }
    }

    TEST_CASE("three views give a K=3 manifest") {
        TempDir tmp;
        const fs::path data = tmp.path / "d3";
        REQUIRE(cli("generate toy3 --n 300 --seed 2 --out-dir '" + data.string() + "'", tmp.path).code == 0);
        REQUIRE(cli("fit --config '" + (data / "config.json").string() + "' --d 40 --threshold analytic", tmp.path)
                    .code == 0);
        CHECK(slurp(data / "fit" / "manifest.json").find("\"K\": 3") != std::string::npos);
    }

    TEST_CASE("fits are byte-identical across runs") {
        TempDir tmp;
        const fs::path data = tmp.path / "data";
        REQUIRE(cli("generate toy --n 300 --seed 5 --out-dir '" + data.string() + "'", tmp.path).code == 0);
        for (const char* dir : {"a", "b"})
            REQUIRE(cli("fit --config '" + (data / "config.json").string() + "' --d 50 --out-dir '" +
                            (tmp.path / dir).string() + "'",
                        tmp.path)
                        .code == 0);
        for (const char* f : {"U.csv", "sigma.csv", "alpha_0.csv", "alpha_1.csv", "threshold.json", "scores.json"}) {
            INFO(f);
            CHECK(slurp(tmp.path / "a" / f) == slurp(tmp.path / "b" / f));
        }
        // Generators are byte-deterministic too.
        REQUIRE(cli("generate toy --n 300 --seed 5 --out-dir '" + (tmp.path / "again").string() + "'", tmp.path)
                    .code == 0);
        CHECK(slurp(data / "spiral.csv") == slurp(tmp.path / "again" / "spiral.csv"));
    }

    TEST_CASE("exit codes") {
        TempDir tmp;
        const fs::path data = tmp.path / "data";
        REQUIRE(cli("generate toy --n 200 --seed 1 --out-dir '" + data.string() + "'", tmp.path).code == 0);
        const std::string spiral = (data / "spiral.csv").string(), torus = (data / "torus.csv").string();

        CHECK(cli("", tmp.path).code == 1);
        CHECK(cli("fit --bogus", tmp.path).code == 1);
        CHECK(cli("fit --view '" + spiral + "' --out-dir '" + (tmp.path / "o").string() + "'", tmp.path).code == 1);
        CHECK(cli("fit --view '" + spiral + "' --view '" + (tmp.path / "nope.csv").string() + "'", tmp.path).code ==
              2);

        REQUIRE(cli("generate toy --n 150 --seed 1 --out-dir '" + (tmp.path / "short").string() + "'", tmp.path)
                    .code == 0);
        const Run mismatch = cli("fit --view x='" + spiral + "' --view y='" + (tmp.path / "short" / "torus.csv").string() +
                                     "' --out-dir '" + (tmp.path / "o").string() + "'",
                                 tmp.path);
        CHECK(mismatch.code == 2);
        const std::string why = slurp(tmp.path / "stderr.txt");
        CHECK(why.find("x") != std::string::npos);
        CHECK(why.find("y") != std::string::npos);

        std::ofstream(tmp.path / "bad.csv") << "1,2\n3,oops\n";
        CHECK(cli("fit --view '" + (tmp.path / "bad.csv").string() + "' --view '" + torus + "'", tmp.path).code == 2);
        CHECK(cli("generate nothing", tmp.path).code == 1);
        CHECK(cli("--version", tmp.path).code == 0);
    }

    TEST_CASE("flags override the config file") {
        TempDir tmp;
        const fs::path data = tmp.path / "data";
        REQUIRE(cli("generate toy --n 200 --seed 1 --out-dir '" + data.string() + "'", tmp.path).code == 0);
        const Run r = cli("fit --config '" + (data / "config.json").string() + "' --kernel knn --k 7 --print-config",
                          tmp.path);
        REQUIRE(r.code == 0);
        const jsmcli::RunConfig c = jsmcli::run_config_from_json(r.out);
        CHECK(c.kernel.kind == "knn");
        CHECK(c.kernel.k == 7);
        CHECK(c.seed == 1);
        CHECK(fs::path(c.views[0].path).is_absolute());
    }

    TEST_CASE("preprocess and bench") {
        TempDir tmp;
        const fs::path data = tmp.path / "data";
        REQUIRE(cli("generate toy --n 200 --seed 1 --out-dir '" + data.string() + "'", tmp.path).code == 0);
        const fs::path out = tmp.path / "pre.csv";
        REQUIRE(cli("preprocess --input '" + (data / "torus.csv").string() + "' --out '" + out.string() +
                        "' --step delay=2 --step pca=2",
                    tmp.path)
                    .code == 0);
        const auto rows = lines(slurp(out));
        REQUIRE(rows.size() == 198);
        CHECK(parse_row(rows[0]).size() == 2);
        CHECK(cli("preprocess --input '" + (data / "torus.csv").string() + "' --out '" + out.string() +
                      "' --step pca=0",
                  tmp.path)
                  .code != 0);

        const fs::path csv = tmp.path / "bench.csv";
        const Run b = cli("bench --n 300,600 --d 20 --reps 2 --out '" + csv.string() + "'", tmp.path);
        REQUIRE(b.code == 0);
        const auto table = lines(slurp(csv));
        REQUIRE(table.size() == 5);
        CHECK(table[0].rfind("kernel,n,d,m,rep,seed,status", 0) == 0);
        for (size_t i = 1; i < table.size(); ++i) CHECK(table[i].find(",ok,") != std::string::npos);
        const Run refused = cli("bench --kernel gaussian --n 6000 --d 10 --reps 1 --out '" + csv.string() + "'",
                                tmp.path);
        CHECK(refused.code == 0);
        CHECK(slurp(csv).find("refused") != std::string::npos);
    }
}
