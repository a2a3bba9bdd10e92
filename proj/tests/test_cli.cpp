#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "res112/cli/commands.hpp"

using namespace res112::cli;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run_args(std::vector<std::string> args)
{
    std::ostringstream o, e;
    const int rc = run(args, o, e);
    return {rc, o.str(), e.str()};
}

}  // namespace

TEST(Table, CsvFormatting)
{
    Table t{"t", {"a", "b", "c"}, {}};
    t.add({0.1, std::int64_t{3}, std::string("x,y")});
    t.add({-0.0, std::int64_t{-1}, std::string("plain")});
    std::ostringstream os;
    write_table(os, t, Format::Csv);
    EXPECT_EQ(os.str(), "a,b,c\n0.10000000000000001,3,\"x,y\"\n0,-1,plain\n");
}

TEST(Table, JsonLines)
{
    Table t{"t", {"a", "s"}, {}};
    t.add({NAN, std::string("q")});
    std::ostringstream os;
    write_table(os, t, Format::Json);
    EXPECT_EQ(os.str(), "{\"a\":null,\"s\":\"q\"}\n");
    EXPECT_EQ(format_double(INFINITY), "inf");
}

TEST(Cli, FiberText)
{
    const auto r = run_args({"fiber", "--delta", "0", "--mu", "0", "--ell", "0", "--h", "0"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "CuspPinchedT3 ×1\n");
    EXPECT_EQ(run_args({"fiber", "--mu", "0.3", "--ell", "0.1", "--h", "-5"}).out, "Empty\n");
}

TEST(Cli, FiberInsideTheTetrahedron)
{
    FiberConfig c;
    c.params.delta = -1.0;
    c.mu = 0.02;
    c.ell = -0.465;
    c.h = -0.018;
    EXPECT_EQ(fiber_text(fiber_tables(c).front()), "Torus3 ×2");
}

TEST(Cli, MonodromyNamedLoops)
{
    auto r = run_args({"monodromy", "--delta", "0", "--loop", "gamma2"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("(m_N, m_J) = (0, 1)"), std::string::npos);
    r = run_args({"monodromy", "--delta", "0", "--loop", "gamma1", "--format", "csv"});
    EXPECT_NE(r.out.find("gamma1,1,-1,"), std::string::npos);
}

TEST(Cli, ExitCodes)
{
    EXPECT_EQ(run_args({"fiber", "--mu", "x", "--ell", "0", "--h", "0"}).code, 1);
    EXPECT_EQ(run_args({"critvals", "--kappa", "0"}).code, 1);
    EXPECT_EQ(run_args({"monodromy", "--delta", "1.5", "--loop", "gamma1"}).code, 1);
    EXPECT_EQ(run_args({"bifdiag", "--ell", "0.1", "--out", "/proc/no/such/dir"}).code, 3);
    EXPECT_EQ(run_args({"nosuch"}).code, 1);
    EXPECT_EQ(run_args({"selfcheck"}).code, 1);  // no suite wired in
}

TEST(Cli, AggregatedValidation)
{
    const auto r = run_args({"monodromy", "--points", "2", "--radius-scale", "-1"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("--loop"), std::string::npos);
    EXPECT_NE(r.err.find("--points"), std::string::npos);
    EXPECT_NE(r.err.find("--radius-scale"), std::string::npos);
}

TEST(Cli, OnePointLoopRejected)
{
    const auto path = std::filesystem::temp_directory_path() / "res112_one_point.csv";
    std::ofstream(path) << "mu,iota,h\n0.1,0.1,0.1\n0.1,0.1,0.1\n";
    EXPECT_EQ(run_args({"monodromy", "--loop-file", path.string()}).code, 1);
    std::filesystem::remove(path);
}

TEST(Cli, EmptyLambdaWindowGivesHeaders)
{
    const auto r = run_args({"bifdiag", "--ell", "0.1", "--lambda-range", "1,0"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out,
              "# bifdiag_slices\nell,lambda,mu,a,h,kind,source,boundary\n"
              "# bifdiag_surface\nsource,lambda,a,mu,ell,h,kind,boundary\n");
}

TEST(Cli, SlicesCarryProvenance)
{
    BifdiagConfig c;
    c.ells = {0.125};
    c.grid = 41;
    c.surface = false;
    const auto t = bifdiag_tables(c).front();
    ASSERT_FALSE(t.rows.empty());
    std::size_t oracle = 0, catalog = 0;
    for (const auto& row : t.rows) {
        const auto& src = std::get<std::string>(row[6]);
        ASSERT_FALSE(src.empty());
        (src == "numeric-oracle" ? oracle : catalog)++;
    }
    EXPECT_GT(oracle, 0u);
    EXPECT_GT(catalog, 0u);
}

TEST(Cli, KappaZeroSlicesHaveNoCusps)
{
    BifdiagConfig c;
    c.kappa = 0.0;
    c.ells = {-0.5, 0.0, 0.5};
    c.grid = 81;
    for (const auto& t : bifdiag_tables(c))
        for (const auto& row : t.rows)
            for (const auto& cell : row)
                if (auto s = std::get_if<std::string>(&cell)) {
                    EXPECT_NE(*s, "Cusp");
                    EXPECT_NE(*s, "HopfSuper");
                }
}

TEST(Cli, CritvalsLociAtPointFiveTwo)
{
    CritvalsConfig c;
    c.params.delta = 0.52;
    const auto tabs = critvals_tables(c);
    const auto& loci = tabs.back();
    bool star = false, lp = false, lm = false;
    for (const auto& row : loci.rows) {
        const auto& name = std::get<std::string>(row[0]);
        star |= name == "ell_star";
        lp |= name == "L+";
        lm |= name == "L-";
    }
    EXPECT_TRUE(star);
    EXPECT_TRUE(lp);
    EXPECT_TRUE(lm);
}

TEST(Cli, Deterministic)
{
    const std::vector<std::string> a{"critvals", "--delta", "-1", "--grid", "15", "--workers", "3"};
    EXPECT_EQ(run_args(a).out, run_args(a).out);
    const std::vector<std::string> b{"bifdiag", "--ell", "0.3125", "--grid", "51", "--format", "json"};
    EXPECT_EQ(run_args(b).out, run_args(b).out);
}

TEST(Cli, EnvironmentBelowFlags)
{
    setenv("RES112_DELTA", "1.5", 1);
    EXPECT_EQ(run_args({"monodromy", "--loop", "gamma1"}).code, 1);  // thread absent at 1.5
    EXPECT_EQ(run_args({"monodromy", "--loop", "gamma1", "--delta", "0"}).code, 0);
    unsetenv("RES112_DELTA");
}

TEST(Cli, ScaleRoundTrip)
{
    const auto a = run_args({"scale", "--kappa", "2", "--lambda", "2", "--mu", "4", "--ell", "8", "--to-kappa"});
    EXPECT_NE(a.out.find("to-kappa,2,1,1,2,"), std::string::npos);
    const auto b = run_args({"scale", "--kappa", "2", "--lambda", "1", "--mu", "1", "--ell", "2"});
    EXPECT_NE(b.out.find("to-unit,1,2,4,8,"), std::string::npos);
}
