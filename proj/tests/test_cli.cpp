#include "support.hpp"

#include "cli.hpp"

#include <filesystem>
#include <set>
#include <fstream>
#include <sstream>

using namespace support;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
    int status;
    std::string out, err;
};

Result run_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "schottky");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int status = schottky::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {status, out.str(), err.str()};
}

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("schottky_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
    fs::create_directories(dir);
    return dir / name;
}

fs::path write(const std::string& name, const std::string& text)
{
    const auto p = scratch(name);
    std::ofstream(p) << text;
    return p;
}

std::vector<std::string> lines(const std::string& csv)
{
    std::vector<std::string> out;
    std::istringstream in(csv);
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

} // namespace

TEST(VerifyTorus, FuchsianFixture)
{
    const auto r = run_cli({"verify-torus", "--group", data("torus_334.json"), "--max-sum", "40", "--tol", "1e-8"});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["schema"], 1);
    EXPECT_EQ(j["command"], "verify-torus");
    EXPECT_EQ(j["report"]["defect_k"], 0);
    EXPECT_TRUE(j["report"]["pass"].get<bool>());
    EXPECT_LT(j["report"]["residual"].get<double>(), 1e-8);
}

TEST(VerifyTorus, PantsFixtureHasThreeImaginaryTerms)
{
    const auto r = run_cli({"verify-torus", "--group", data("pants_222.json")});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto j = json::parse(r.out);
    ASSERT_EQ(j["imaginary_terms"].size(), 3u);
    std::set<std::string> slopes;
    for (const auto& t : j["imaginary_terms"]) {
        slopes.insert(t["slope"].get<std::string>());
        EXPECT_NEAR(t["term"][1].get<double>(), std::numbers::pi, 1e-9);
    }
    EXPECT_EQ(slopes, (std::set<std::string> {"0/1", "1/0", "1/1"}));
}

TEST(VerifyTorus, Deterministic)
{
    const std::vector<std::string> args {"verify-torus", "--group", data("complex_point.json"), "--tol", "1e-6"};
    const auto a = run_cli(args), b = run_cli(args);
    ASSERT_EQ(a.status, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
}

TEST(VerifyTorus, ThreadCountIndependent)
{
    const auto a = run_cli({"verify-torus", "--group", data("pants_222.json")});
    const auto b = run_cli({"verify-torus", "--group", data("pants_222.json"), "--threads", "4"});
    ASSERT_EQ(a.status, 0);
    ASSERT_EQ(b.status, 0);
    const auto ja = json::parse(a.out)["report"]["lhs"], jb = json::parse(b.out)["report"]["lhs"];
    EXPECT_NEAR(ja[0].get<double>(), jb[0].get<double>(), 1e-12);
    EXPECT_NEAR(ja[1].get<double>(), jb[1].get<double>(), 1e-12);
}

TEST(VerifyTorus, LiftAndExtendedPrecision)
{
    const auto a = run_cli({"verify-torus", "--group", data("complex_point.json"), "--tol", "1e-6", "--lift", "-,+"});
    EXPECT_EQ(a.status, 0) << a.err;
    const auto b = run_cli({"verify-torus", "--group", data("torus_334.json"), "--precision", "extended"});
    EXPECT_EQ(b.status, 0) << b.err;
    EXPECT_EQ(json::parse(b.out)["precision"], "extended");
}

TEST(VerifyTorus, WritesArtifacts)
{
    const auto out = scratch("torus.json"), csv = scratch("torus.csv");
    const auto r = run_cli({"verify-torus", "--group", data("torus_334.json"), "--out", out.string(), "--csv", csv.string()});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream jf(out);
    EXPECT_EQ(json::parse(jf)["report"]["defect_k"], 0);
    std::ifstream cf(csv);
    const std::string text((std::istreambuf_iterator<char>(cf)), {});
    const auto rows = lines(text);
    ASSERT_FALSE(rows.empty());
    EXPECT_EQ(rows[0], "p,q,class,label,term_re,term_im\r");
    EXPECT_EQ(rows.size(), signed_slopes_up_to(40).size() + 1);
}

TEST(Errors, MalformedJson)
{
    const auto bad = write("bad.json", "{\"torus\": [3, 3,");
    const auto out = scratch("never.json");
    const auto r = run_cli({"verify-torus", "--group", bad.string(), "--out", out.string()});
    EXPECT_EQ(r.status, 2);
    EXPECT_TRUE(r.out.empty());
    EXPECT_FALSE(fs::exists(out));
    const auto e = json::parse(r.err);
    EXPECT_EQ(e["error"]["kind"], "ConfigError");
}

TEST(Errors, ConfigProblems)
{
    EXPECT_EQ(run_cli({"verify-torus", "--group", data("torus_334.json"), "--lift", "+,+,+"}).status, 2);
    EXPECT_EQ(run_cli({"verify-torus", "--group", data("torus_334.json"), "--threads", "0"}).status, 2);
    EXPECT_EQ(run_cli({"verify-torus", "--group", data("torus_334.json"), "--precision", "quad"}).status, 2);
    EXPECT_EQ(run_cli({"verify-torus", "--group", "/nonexistent/group.json"}).status, 2);
    EXPECT_EQ(run_cli({"verify-weierstrass", "--group", data("torus_334.json"), "--class", "eveneven"}).status, 2);
    EXPECT_EQ(run_cli({"verify-torus", "--no-such-flag"}).status, 2);
    EXPECT_EQ(run_cli({}).status, 2);
    EXPECT_EQ(run_cli({"verify-general", "--group", data("pants_222.json")}).status, 2);
    EXPECT_EQ(run_cli({"verify-torus", "--group", write("two.json", R"({"torus": [3, 3, 4], "pants": [2, 2, 2]})").string()}).status, 2);
}

TEST(Errors, EngineFailureCarriesModule)
{
    const auto cusp = write("cusp.json", R"({"torus": [3, 3, 3]})");
    const auto r = run_cli({"verify-torus", "--group", cusp.string()});
    EXPECT_EQ(r.status, 3);
    const auto e = json::parse(r.err);
    EXPECT_EQ(e["schema"], 1);
    EXPECT_EQ(e["error"]["kind"], "CuspDegenerate");
    EXPECT_EQ(e["error"]["module"], "schottky");
}

TEST(Errors, IdentityFailureExitsOne)
{
    const auto empty = write("empty.json", R"({"boundary": ["BAba"], "pairs": [], "bj": []})");
    const auto r = run_cli({"verify-general", "--group", data("torus_334.json"), "--decomposition", empty.string()});
    EXPECT_EQ(r.status, 1) << r.err;
    EXPECT_FALSE(json::parse(r.out)["report"]["pass"].get<bool>());
}

TEST(Help, ExitsZero)
{
    const auto r = run_cli({"--help"});
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("verify-torus"), std::string::npos);
}

TEST(VerifyWeierstrass, AllClasses)
{
    const auto r = run_cli({"verify-weierstrass", "--group", data("torus_334.json")});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto j = json::parse(r.out);
    ASSERT_EQ(j["reports"].size(), 3u);
    const auto q = run_cli({"verify-weierstrass", "--group", data("complex_point.json"), "--class", "oddeven", "--quarter", "1"});
    EXPECT_EQ(q.status, 0) << q.err;
    EXPECT_EQ(json::parse(q.out)["reports"].size(), 1u);
}

TEST(VerifyMarkoff, PantsFixture)
{
    const auto r = run_cli({"verify-markoff", "--group", data("pants_222.json")});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["report"]["modulus"], "2*pi*i");
}

TEST(VerifyPantsTrivial, SweepAndSingleTriple)
{
    const auto csv = scratch("sweep.csv");
    const auto r = run_cli({"verify-pants-trivial", "--csv", csv.string()});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["triples"], 120);
    EXPECT_LT(j["max_residual"].get<double>(), 1e-10);
    const auto one = run_cli({"verify-pants-trivial", "--lengths", "2", "2", "2"});
    EXPECT_EQ(one.status, 0);
    EXPECT_EQ(json::parse(one.out)["triples"], 1);
}

TEST(VerifyGeneral, BuiltinAndExplicitPantsDecompositions)
{
    for (const auto* file : {"pants_own.json", "pants_explicit.json"}) {
        const auto r = run_cli({"verify-general", "--group", data("pants_222.json"), "--decomposition", data(file)});
        ASSERT_EQ(r.status, 0) << file << r.err;
        const auto j = json::parse(r.out);
        EXPECT_EQ(j["report"]["terms_used"], 3);
        EXPECT_EQ(j["report"]["truncation_bound"], 0);
    }
}

TEST(Certify, Examples)
{
    const auto r = run_cli({"certify", "--group", data("complex_point.json")});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_TRUE(j["certified"].get<bool>());
    EXPECT_GT(j["kappa"].get<double>(), 0);
    // the emitted group document, circles included, loads again
    const auto again = write("certified.json", j["group"].dump());
    EXPECT_EQ(run_cli({"verify-torus", "--group", again.string(), "--tol", "1e-6"}).status, 0);

    const auto shortg = write("short.json", R"({"parameters": {"fixed_points": [[-1, 0]], "lengths": [[0.1, 0], [0.1, 0]]}})");
    const auto s = run_cli({"certify", "--group", shortg.string()});
    EXPECT_EQ(s.status, 1) << s.err;
}

TEST(Deform, TorusToPants)
{
    const auto csv = scratch("deform.csv");
    const auto r = run_cli({"deform", "--group", data("torus_334.json"), "--target", data("pants_222.json"), "--word-length", "3",
        "--csv", csv.string()});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_GT(j["positivity"]["min_re"].get<double>(), 0);
    EXPECT_LT(j["round_trip_error"].get<double>(), 1e-9);
    EXPECT_LT(j["endpoint"]["residual"].get<double>(), 1e-6);
    EXPECT_TRUE(fs::exists(csv));
}

TEST(Deform, DirectSmallLengthPathIsAnEngineError)
{
    const auto a = write("small_a.json", R"({"parameters": {"fixed_points": [[-1, 0]], "lengths": [[0.5, 0], [0.5, 0]]}})");
    const auto b = write("small_b.json", R"({"parameters": {"fixed_points": [[2, 0]], "lengths": [[0.5, 0], [0.5, 0]]}})");
    const auto r = run_cli({"deform", "--group", a.string(), "--target", b.string(), "--strategy", "direct"});
    EXPECT_EQ(r.status, 3);
    EXPECT_EQ(json::parse(r.err)["error"]["kind"], "PathValidationFailed");
}

TEST(EmitGaps, PantsLayout)
{
    const auto r = run_cli({"emit-gaps", "--group", data("pants_222.json"), "--max-sum", "8"});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), signed_slopes_up_to(8).size() + 1);
    EXPECT_EQ(rows[0].rfind("p,q,class,g1,g2", 0), 0u);
    std::size_t opposite = 0;
    for (const auto& row : rows)
        opposite += row.find(",opposite") != std::string::npos;
    EXPECT_EQ(opposite, 3u);
}

TEST(EmitTraces, RowCountAndHeader)
{
    const auto r = run_cli({"emit-traces", "--group", data("torus_334.json"), "--max-sum", "10"});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto rows = lines(r.out);
    EXPECT_EQ(rows.size(), 65u);
    EXPECT_EQ(rows[0], "p,q,class,trace_re,trace_im,length_re,length_im\r");
}
