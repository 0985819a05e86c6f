#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "kummer/distributions.hpp"
#include "kummer/specfun.hpp"
#include "kummer/transforms.hpp"
#include "kummer/trees.hpp"

// exercised through the installed binary so the exit-code and stream contracts
// are tested exactly as a shell user sees them
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kBin = KUMMER_CLI_BIN;

fs::path tmp_dir() {
    static const fs::path d =
        fs::temp_directory_path() / ("kummer_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

struct RunResult {
    int exit_code = -1;
    std::string out, err;
};

RunResult run(const std::string& args, const std::string& env_prefix = "") {
    static int counter = 0;
    const fs::path out_p = tmp_dir() / ("stdout." + std::to_string(counter));
    const fs::path err_p = tmp_dir() / ("stderr." + std::to_string(counter));
    ++counter;
    const std::string cmd = env_prefix + "'" + kBin + "' " + args + " > '" + out_p.string() +
                            "' 2> '" + err_p.string() + "'";
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(out_p);
    r.err = slurp(err_p);
    return r;
}

double parse_scalar(const std::string& text) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    REQUIRE(end != text.c_str());
    return v;
}

// rows of a CSV with the given number of columns, header skipped
std::vector<std::vector<double>> csv_body(const std::string& text, std::size_t cols) {
    std::vector<std::vector<double>> rows;
    std::istringstream ss(text);
    std::string line;
    REQUIRE(std::getline(ss, line));  // header
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string tok;
        while (std::getline(ls, tok, ',')) row.push_back(parse_scalar(tok));
        REQUIRE(row.size() == cols);
        rows.push_back(row);
    }
    return rows;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

TEST_CASE("help and usage errors") {
    const auto help = run("--help");
    CHECK(help.exit_code == 0);
    for (const char* sub :
         {"specfun", "dist", "transform", "tree", "recover", "characterize", "verify"})
        CHECK(help.out.find(sub) != std::string::npos);

    CHECK(run("").exit_code == 2);
    CHECK(run("nonsense").exit_code == 2);
    const auto unknown_flag = run("specfun u --a 1 --b 2 --z 2 --bogus 1");
    CHECK(unknown_flag.exit_code == 2);
    CHECK(!unknown_flag.err.empty());
    CHECK(run("verify").exit_code == 2);  // verb required
}

TEST_CASE("specfun u prints values and logs") {
    const auto triv = run("specfun u --a 1 --b 2 --z 2");
    CHECK(triv.exit_code == 0);
    CHECK(triv.out == "0.5\n");

    // independent oracle: U(1,1,1) = e E_1(1)
    const auto u111 = run("specfun u --a 1 --b 1 --z 1");
    CHECK(u111.exit_code == 0);
    CHECK(parse_scalar(u111.out) == doctest::Approx(0.59634736232319407434).epsilon(1e-9));

    const auto lg = run("specfun u --a 2 --b 1 --z 1 --log");
    CHECK(lg.exit_code == 0);
    CHECK(parse_scalar(lg.out) ==
          doctest::Approx(kummer::specfun::log_tricomi_u(2, 1, 1)).epsilon(1e-12));

    CHECK(run("specfun u --a -1 --b 2 --z 2").exit_code == 2);
    CHECK(run("specfun u --a 1 --b 2").exit_code == 2);  // missing --z
}

TEST_CASE("dist scalar verbs match the library") {
    const std::string spec = "'{\"family\":\"kummer\",\"a\":2,\"b\":1,\"c\":1}'";
    const auto spec_obj = kummer::dist::DistributionSpec::kummer(2, 1, 1);

    const auto pdf = run("dist pdf --spec " + spec + " --x 1");
    CHECK(pdf.exit_code == 0);
    CHECK(parse_scalar(pdf.out) ==
          doctest::Approx(std::exp(kummer::dist::log_pdf(spec_obj, 1.0))).epsilon(1e-12));

    const auto cdf = run("dist cdf --spec " + spec + " --x 1");
    CHECK(cdf.exit_code == 0);
    CHECK(parse_scalar(cdf.out) == doctest::Approx(0.71049584437617978087).epsilon(1e-12));

    const auto mom = run("dist moment --spec " + spec + " --s 1");
    CHECK(mom.exit_code == 0);
    CHECK(parse_scalar(mom.out) == doctest::Approx(0.82685467331679300099).epsilon(1e-12));

    CHECK(run("dist pdf --spec '{\"family\":\"cauchy\"}' --x 1").exit_code == 2);
    CHECK(run("dist pdf --spec 'not json' --x 1").exit_code == 2);
    CHECK(run("dist pdf --spec " + spec + " --x -3").exit_code == 2);
    // E X^{-3} does not exist for Gamma(2,1)
    CHECK(run("dist moment --spec '{\"family\":\"gamma\",\"shape\":2,\"rate\":1}' --s -3")
              .exit_code == 2);
}

TEST_CASE("dist sample is reproducible and lossless at 17 digits") {
    const std::string spec = "'{\"family\":\"gamma\",\"shape\":2,\"rate\":1}'";
    const fs::path f1 = tmp_dir() / "s1.csv", f2 = tmp_dir() / "s2.csv";
    CHECK(run("dist sample --spec " + spec + " --n 200 --seed 11 --out '" + f1.string() + "'")
              .exit_code == 0);
    CHECK(run("dist sample --spec " + spec + " --n 200 --seed 11 --out '" + f2.string() + "'")
              .exit_code == 0);
    const std::string text = slurp(f1);
    CHECK(text == slurp(f2));

    // CSV values equal the in-process draws bit for bit
    const auto batch = kummer::dist::sample(kummer::dist::DistributionSpec::gamma(2, 1), 200,
                                            11, 0);
    const auto rows = csv_body(text, 1);
    REQUIRE(rows.size() == 200);
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i][0] == batch.values[i]);

    // ...and re-rendering them reproduces the file text (lossless round-trip)
    std::string rebuilt = "value\n";
    for (const auto& row : rows) rebuilt += fmt17(row[0]) + "\n";
    CHECK(rebuilt == text);
}

TEST_CASE("seed policy: default constant, env override, flag wins") {
    const std::string spec = "'{\"family\":\"gamma\",\"shape\":1,\"rate\":1}'";
    const auto by_default = run("dist sample --spec " + spec + " --n 20");
    const auto by_flag = run("dist sample --spec " + spec + " --n 20 --seed 12648430");  // 0xC0FFEE
    CHECK(by_default.exit_code == 0);
    CHECK(by_default.out == by_flag.out);

    const auto by_env = run("dist sample --spec " + spec + " --n 20",
                            "KUMMER_FORGE_SEED=777 ");
    const auto by_seed777 = run("dist sample --spec " + spec + " --n 20 --seed 777");
    CHECK(by_env.out == by_seed777.out);
    CHECK(by_env.out != by_default.out);

    const auto env_beaten = run("dist sample --spec " + spec + " --n 20 --seed 12648430",
                                "KUMMER_FORGE_SEED=777 ");
    CHECK(env_beaten.out == by_default.out);

    CHECK(run("dist sample --spec " + spec + " --n 20", "KUMMER_FORGE_SEED=abc ").exit_code == 2);
}

TEST_CASE("transform verbs on CSV pairs") {
    const fs::path in = tmp_dir() / "pairs.csv";
    spit(in, "x,y\n1,2\n0.25,4\n3,0.5\n");

    const auto fwd = run("transform hv --in '" + in.string() + "'");
    CHECK(fwd.exit_code == 0);
    const auto out_rows = csv_body(fwd.out, 2);
    REQUIRE(out_rows.size() == 3);
    const auto p0 = kummer::maps::hv_forward(1, 2);
    CHECK(out_rows[0][0] == p0.first);
    CHECK(out_rows[0][1] == p0.second);

    // forward then inverse returns the inputs
    const fs::path mid = tmp_dir() / "mid.csv", back = tmp_dir() / "back.csv";
    CHECK(run("transform kv --in '" + in.string() + "' --out '" + mid.string() + "'")
              .exit_code == 0);
    CHECK(run("transform kv --inverse --in '" + mid.string() + "' --out '" + back.string() + "'")
              .exit_code == 0);
    const auto orig = csv_body(slurp(in), 2);
    const auto round = csv_body(slurp(back), 2);
    REQUIRE(round.size() == orig.size());
    for (std::size_t i = 0; i < orig.size(); ++i)
        for (int j : {0, 1})
            CHECK(round[i][j] == doctest::Approx(orig[i][j]).epsilon(1e-12));

    // line-numbered validation errors -> exit 2
    const fs::path bad = tmp_dir() / "bad.csv";
    spit(bad, "x,y\n1,2\n-1,0.25\n");
    const auto neg = run("transform kv --in '" + bad.string() + "'");
    CHECK(neg.exit_code == 2);
    CHECK(neg.err.find("bad.csv:3") != std::string::npos);

    spit(bad, "a,b\n1,2\n");
    CHECK(run("transform hv --in '" + bad.string() + "'").exit_code == 2);

    spit(bad, "u,v\n1.5,2\n");  // kv inverse needs u in (0,1)
    const auto unit = run("transform kv --inverse --in '" + bad.string() + "'");
    CHECK(unit.exit_code == 2);
    CHECK(unit.err.find(":2") != std::string::npos);

    CHECK(run("transform hv --in '" + (tmp_dir() / "missing.csv").string() + "'").exit_code == 2);
}

TEST_CASE("tree verbs: sample, transform, verify") {
    const fs::path tree_p = tmp_dir() / "path3.json";
    spit(tree_p, R"({"nodes":[{"id":1,"c":1.0},{"id":2,"c":1.0},{"id":3,"c":1.0}],)"
                 R"("edges":[{"u":1,"v":2,"c":1.0},{"u":2,"v":3,"c":1.0}]})");

    const fs::path smp = tmp_dir() / "tree_sample.csv";
    CHECK(run("tree sample --tree '" + tree_p.string() +
              "' --root 1 --a 4,3,2 --c 1 --n 40 --seed 9 --out '" + smp.string() + "'")
              .exit_code == 0);
    const auto rows = csv_body(slurp(smp), 3);
    REQUIRE(rows.size() == 40);

    // CLI transform agrees with the library on the sampled rows
    const fs::path fwd = tmp_dir() / "tree_fwd.csv";
    CHECK(run("tree transform --tree '" + tree_p.string() + "' --root 3 --in '" + smp.string() +
              "' --out '" + fwd.string() + "'")
              .exit_code == 0);
    const auto tree = kummer::trees::TreeSpec::from_json(json::parse(slurp(tree_p)));
    const auto fwd_rows = csv_body(slurp(fwd), 3);
    const auto expect = kummer::trees::phi_forward(tree, 3, rows[0]);
    for (int j : {0, 1, 2}) CHECK(fwd_rows[0][j] == doctest::Approx(expect[j]).epsilon(1e-15));

    // inverse brings the sample back
    const fs::path back = tmp_dir() / "tree_back.csv";
    CHECK(run("tree transform --tree '" + tree_p.string() + "' --root 3 --inverse --in '" +
              fwd.string() + "' --out '" + back.string() + "'")
              .exit_code == 0);
    const auto back_rows = csv_body(slurp(back), 3);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j : {0, 1, 2})
            CHECK(back_rows[i][j] == doctest::Approx(rows[i][j]).epsilon(1e-12));

    // bad inputs -> exit 2
    CHECK(run("tree transform --tree '" + tree_p.string() + "' --root 9 --in '" + smp.string() +
              "'")
              .exit_code == 2);
    CHECK(run("tree sample --tree '" + tree_p.string() + "' --root 1 --a 4,3 --n 10")
              .exit_code == 2);
    CHECK(run("tree sample --tree '" + tree_p.string() + "' --root 2 --a 4,3,2 --n 10")
              .exit_code == 2);  // root must be a leaf

    // the verify verb emits a passing report on a well-posed two-node run
    const fs::path two_p = tmp_dir() / "two.json";
    spit(two_p, R"({"nodes":[{"id":1,"c":1.0},{"id":2,"c":1.0}],)"
                R"("edges":[{"u":1,"v":2,"c":1.0}]})");
    const fs::path rep_p = tmp_dir() / "tree_rep.json";
    const auto vres = run("tree verify --tree '" + two_p.string() +
                          "' --a 3,2 --n 2000 --seed 5 --n-perm 199 --report '" +
                          rep_p.string() + "'");
    CHECK(vres.exit_code == 0);
    const json rep = json::parse(slurp(rep_p));
    CHECK(rep.at("pass").get<bool>());
    CHECK(rep.at("suite").get<std::string>() == "verify_tree");
}

TEST_CASE("recover verbs print fitted specs") {
    const auto hv = run("recover hv-reg --alpha 2 --beta 1 --c 3");
    CHECK(hv.exit_code == 0);
    const json j = json::parse(hv.out);
    CHECK(j.at("x").at("family") == "kummer");
    CHECK(j.at("x").at("a").get<double>() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(j.at("x").at("b").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(j.at("x").at("c").get<double>() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(j.at("y").at("shape").get<double>() == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(j.at("y").at("rate").get<double>() == doctest::Approx(1.0).epsilon(1e-12));

    const auto kv = run("recover kv-ratio --r 1 --alpha 0.5 --beta 0.6 --c 1");
    CHECK(kv.exit_code == 0);
    const json jk = json::parse(kv.out);
    CHECK(jk.at("x").at("a").get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(jk.at("x").at("b").get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    // ratio route and regression route agree where both apply; the ratio
    // constants are successive conditional-moment ratios: alpha_1 = A/p = 2,
    // alpha_2 = (A+1)/p = 3 for V ~ Gamma(2,1)
    const auto reg = run("recover hv-reg --alpha 2 --beta 1 --c 3");
    const auto rat = run("recover hv-ratio --r 1 --alpha 2 --beta 3 --c 3");
    CHECK(reg.exit_code == 0);
    CHECK(rat.exit_code == 0);
    CHECK(reg.out == rat.out);

    CHECK(run("recover hv-reg --alpha 0.5 --beta 1 --c 3").exit_code == 2);  // alpha*beta <= 1
    CHECK(run("recover hv-ratio --alpha 2 --beta 3 --c 3").exit_code == 2);  // missing --r
}

TEST_CASE("characterize pipeline over a CSV sample") {
    using kummer::dist::DistributionSpec;
    const std::size_t n = 20000;
    const auto xs = kummer::dist::sample(DistributionSpec::kummer(2, 1, 1), n, 404, 1);
    const auto ys = kummer::dist::sample(DistributionSpec::gamma(3, 1), n, 404, 2);
    std::string csv = "x,y\n";
    for (std::size_t i = 0; i < n; ++i)
        csv += fmt17(xs.values[i]) + "," + fmt17(ys.values[i]) + "\n";
    const fs::path in = tmp_dir() / "hv_pairs.csv";
    spit(in, csv);

    const fs::path rep_p = tmp_dir() / "char_rep.json";
    const auto res = run("characterize --family hv --in '" + in.string() + "' --seed 404 " +
                         "--report '" + rep_p.string() + "'");
    CHECK(res.exit_code == 0);
    const json rep = json::parse(slurp(rep_p));
    CHECK(rep.at("pass").get<bool>());
    double fit_a = 0, fit_shape = 0;
    for (const auto& c : rep.at("checks")) {
        if (c.at("name") == "info_fit_x_a") fit_a = c.at("statistic").get<double>();
        if (c.at("name") == "info_fit_y_shape") fit_shape = c.at("statistic").get<double>();
    }
    CHECK(fit_a == doctest::Approx(2.0).epsilon(0.10));
    CHECK(fit_shape == doctest::Approx(3.0).epsilon(0.10));

    // dependent pairs: suite reports failure -> exit 1
    std::string dep = "x,y\n";
    std::mt19937_64 g(7);
    std::normal_distribution<double> nd(0.0, 0.5);
    for (std::size_t i = 0; i < 1500; ++i) {
        const double x = xs.values[i];
        dep += fmt17(x) + "," + fmt17(x * std::exp(nd(g))) + "\n";
    }
    const fs::path dep_in = tmp_dir() / "dep_pairs.csv";
    spit(dep_in, dep);
    const auto bad = run("characterize --family hv --in '" + dep_in.string() + "' --seed 5");
    CHECK(bad.exit_code == 1);

    CHECK(run("characterize --family nope --in '" + in.string() + "'").exit_code == 2);
}

TEST_CASE("verify suites through the CLI") {
    // flags and config files produce identical reports; workers do not matter
    const fs::path r1 = tmp_dir() / "rec1.json", r2 = tmp_dir() / "rec2.json",
                   r3 = tmp_dir() / "rec3.json", r4 = tmp_dir() / "rec4.json";
    const std::string rec_args = "verify recurrences --n 20000 --seed 5 ";
    CHECK(run(rec_args + "--A 2 --c 3 --p 1 --report '" + r1.string() + "'").exit_code == 0);
    CHECK(run(rec_args + "--A 2 --c 3 --p 1 --report '" + r2.string() + "' --workers 1")
              .exit_code == 0);
    CHECK(run(rec_args + "--A 2 --c 3 --p 1 --report '" + r3.string() + "' --workers 4")
              .exit_code == 0);
    const fs::path cfg = tmp_dir() / "rec_cfg.json";
    spit(cfg, R"({"A":2,"c":3,"p":1,"k_max":10})");
    CHECK(run(rec_args + "--config '" + cfg.string() + "' --report '" + r4.string() + "'")
              .exit_code == 0);
    const std::string rep1 = slurp(r1);
    CHECK(rep1 == slurp(r2));
    CHECK(rep1 == slurp(r3));
    CHECK(rep1 == slurp(r4));
    CHECK(json::parse(rep1).at("suite").get<std::string>() == "verify_recurrences");

    // flags win over config keys
    const fs::path r5 = tmp_dir() / "rec5.json";
    spit(cfg, R"({"A":9,"c":3,"p":1})");
    CHECK(run(rec_args + "--config '" + cfg.string() + "' --A 2 --report '" + r5.string() + "'")
              .exit_code == 0);
    CHECK(slurp(r5) == rep1);

    // property suite to stdout; schema fields present
    const auto hv = run("verify hv --a 2 --b 3 --c 1 --n 4000 --n-perm 199 --seed 5");
    CHECK(hv.exit_code == 0);
    const json hv_rep = json::parse(hv.out);
    CHECK(hv_rep.at("suite").get<std::string>() == "verify_hv");
    CHECK(hv_rep.at("seed").get<std::uint64_t>() == 5);
    CHECK(hv_rep.at("pass").get<bool>());
    for (const char* key : {"name", "statistic", "threshold", "p_value", "pass"})
        CHECK(hv_rep.at("checks").at(0).contains(key));

    const auto gen = run("verify genfn --A 2 --c 3 --p 1 --z 0.5,-0.5");
    CHECK(gen.exit_code == 0);
    const json gen_rep = json::parse(gen.out);
    CHECK(gen_rep.at("pass").get<bool>());
    bool saw_series = false;
    for (const auto& c : gen_rep.at("checks"))
        if (c.at("name").get<std::string>().find("series_vs_integral") == 0) saw_series = true;
    CHECK(saw_series);

    CHECK(run("verify hv --b 3 --c 1 --n 4000").exit_code == 2);  // missing --a
    CHECK(run("verify recurrences --A 2 --c 3 --p 1 --k-max 99").exit_code == 2);
}
