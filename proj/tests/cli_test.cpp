/*
   Copyright 2026 The nestlogit Authors

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

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() / ("nestlogit_cli_" + std::to_string(::getpid()) + "_"
                                            + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write(const std::string& name, const std::string& text) const
    {
        std::ofstream(path(name), std::ios::binary) << text;
        return path(name);
    }

    static std::string read(const std::string& file)
    {
        std::ifstream in(file, std::ios::binary);
        std::ostringstream out;
        out << in.rdbuf();
        return out.str();
    }

    // Runs the CLI; standard error goes to err.txt in the scratch directory.
    int run(const std::string& args) const
    {
        const std::string command = std::string(NESTLOGIT_CLI_PATH) + " " + args + " 2> " + path("err.txt");
        const int status = std::system(command.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string err() const { return read(path("err.txt")); }

    std::string params(double s1, double s2, const std::string& name = "params.json") const
    {
        std::ostringstream text;
        text.precision(17);
        text << "{\"sigma1\": " << s1 << ", \"sigma2\": " << s2 << "}";
        return write(name, text.str());
    }

    fs::path dir_;
};

using Table = std::vector<std::map<std::string, std::string>>;

Table read_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> header;
    Table rows;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        if (header.empty()) {
            header = fields;
            continue;
        }
        std::map<std::string, std::string> row;
        for (std::size_t i = 0; i < header.size() && i < fields.size(); ++i) row[header[i]] = fields[i];
        rows.push_back(std::move(row));
    }
    return rows;
}

double num(const std::map<std::string, std::string>& row, const std::string& key)
{
    return std::stod(row.at(key));
}

std::string random_market(std::uint64_t seed, double lo, double hi)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::ostringstream csv;
    csv.precision(17);
    csv << "market_id,group_id,subgroup_id,product_id,value\n";
    int product = 0;
    for (int g = 0; g < 3; ++g) {
        for (int h = 0; h < 2 + g % 2; ++h) {
            for (int j = 0; j < 1 + (g + h) % 3; ++j) {
                csv << "r,g" << g << ",h" << h << ",p" << product++ << ',' << u(rng) << '\n';
            }
        }
    }
    return csv.str();
}

} // namespace

TEST_F(Cli, SharesTrivialMarket)
{
    const auto in = write("m.csv", "market_id,group_id,subgroup_id,product_id,value\nm,g,h,p,0\n");
    ASSERT_EQ(run("shares --input " + in + " --params " + params(0.3, 0.2) + " --output " + path("s.csv")), 0);
    const auto rows = read_csv(read(path("s.csv")));
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].at("product_id"), "p");
    EXPECT_DOUBLE_EQ(num(rows[0], "value"), 0.5);
    EXPECT_EQ(rows[1].at("product_id"), "_outside");
    EXPECT_DOUBLE_EQ(num(rows[1], "value"), 0.5);
}

TEST_F(Cli, SharesJsonFormat)
{
    const auto in = write("m.csv", "market_id,group_id,subgroup_id,product_id,value\nm,g,h,p,0\nm,g,k,q,1\n");
    ASSERT_EQ(run("shares --format json --input " + in + " --params " + params(0.3, 0.2) + " --output "
                  + path("s.json")),
              0);
    const auto doc = nlohmann::json::parse(read(path("s.json")));
    const auto& market = doc["markets"][0];
    EXPECT_EQ(market["market_id"], "m");
    double total = market["outside_share"].get<double>();
    for (const auto& p : market["products"]) total += p["share"].get<double>();
    EXPECT_NEAR(total, 1.0, 1e-15);
}

TEST_F(Cli, SharesParseAndDomainErrors)
{
    const auto p = params(0.3, 0.2);
    EXPECT_EQ(run("shares --input " + write("a.csv", "market_id,group_id,product_id,value\nm,g,p,0\n") + " --params " + p), 1);
    EXPECT_EQ(run("shares --input " + write("b.csv", "market_id,group_id,subgroup_id,product_id,value\nm,g,h,p\n")
                  + " --params " + p),
              1);
    EXPECT_EQ(run("shares --input " + write("c.csv", "market_id,group_id,subgroup_id,product_id,value\nm,g,h,p,abc\n")
                  + " --params " + p),
              1);
    EXPECT_NE(err().find("c.csv:2"), std::string::npos);
    const auto good = write("d.csv", "market_id,group_id,subgroup_id,product_id,value\nm,g,h,p,0\n");
    EXPECT_EQ(run("shares --input " + good + " --params " + params(1.0, 0.2, "domain.json")), 2);
    EXPECT_EQ(run("shares --input " + good + " --params " + write("bad.json", "{\"sigma1\": ")), 1);
    EXPECT_EQ(run("shares --input " + path("missing.csv") + " --params " + p), 1);
    EXPECT_EQ(run("shares --input " + write("e.csv", "market_id,group_id,subgroup_id,product_id,value\nm,g,h,p,0\nm,g,h,p,1\n")
                  + " --params " + p),
              1);
    EXPECT_NE(err().find("market 'm'"), std::string::npos);
    EXPECT_EQ(run("shares --input " + write("f.csv", "market_id,group_id,subgroup_id,product_id,value\nm,g,h,p,inf\n")
                  + " --params " + p),
              2);
    EXPECT_EQ(run("frobnicate"), 1);
}

TEST_F(Cli, PipelineRoundTrip)
{
    const auto in = write("m.csv", random_market(5, -4.0, 4.0));
    const auto p = params(0.7, 0.4);
    ASSERT_EQ(run("shares --input " + in + " --params " + p + " --output " + path("s.csv")), 0);
    ASSERT_EQ(run("invert --input " + path("s.csv") + " --params " + p + " --output " + path("d.csv")), 0);
    ASSERT_EQ(run("invert --method newton --tol 1e-12 --input " + path("s.csv") + " --params " + p + " --output "
                  + path("n.csv")),
              0);
    const auto original = read_csv(read(in));
    const auto closed = read_csv(read(path("d.csv")));
    const auto newton = read_csv(read(path("n.csv")));
    ASSERT_EQ(original.size(), closed.size());
    ASSERT_EQ(original.size(), newton.size());
    for (std::size_t i = 0; i < original.size(); ++i) {
        EXPECT_EQ(original[i].at("product_id"), closed[i].at("product_id"));
        EXPECT_NEAR(num(closed[i], "value"), num(original[i], "value"), 1e-9);
        EXPECT_NEAR(num(newton[i], "value"), num(closed[i], "value"), 1e-8);
    }
}

TEST_F(Cli, InvertRejectsBadShares)
{
    const auto p = params(0.5, 0.25);
    const std::string header = "market_id,group_id,subgroup_id,product_id,value\n";
    EXPECT_EQ(run("invert --input " + write("z.csv", header + "m,g,h,a,0.0\nm,g,h,b,0.5\nm,,,_outside,0.5\n")
                  + " --params " + p),
              2);
    EXPECT_EQ(run("invert --input " + write("s.csv", header + "m,g,h,a,0.2\nm,g,h,b,0.2\nm,,,_outside,0.5\n")
                  + " --params " + p),
              2);
    EXPECT_EQ(run("invert --input " + write("o.csv", header + "m,g,h,a,0.5\n") + " --params " + p), 1);
    EXPECT_EQ(run("invert --method magic --input " + path("o.csv") + " --params " + p), 1);
}

TEST_F(Cli, JacobianSymmetricSingleton)
{
    const auto in = write("m.csv", "market_id,group_id,subgroup_id,product_id,value\nm,g,h,p,0\n");
    ASSERT_EQ(run("jacobian --input " + in + " --params " + params(0.5, 0.2) + " --output " + path("j.csv")), 0);
    const auto rows = read_csv(read(path("j.csv")));
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_NEAR(num(rows[0], "value"), 0.25, 1e-15);
    EXPECT_EQ(rows[1].at("row_product_id"), "_outside");
    EXPECT_NEAR(num(rows[1], "value"), -0.25, 1e-15);
}

TEST_F(Cli, JacobianFiniteDifferenceCheck)
{
    const auto in = write("m.csv", random_market(9, -3.0, 3.0));
    ASSERT_EQ(run("jacobian --check-fd --input " + in + " --params " + params(0.6, 0.3) + " --output " + path("j.csv")),
              0);
    const auto message = err();
    const auto at = message.find("finite differences ");
    ASSERT_NE(at, std::string::npos);
    EXPECT_LE(std::stod(message.substr(at + 19)), 1e-6);
}

TEST_F(Cli, JacobianExtremeUtilities)
{
    const auto in = write("m.csv", "market_id,group_id,subgroup_id,product_id,value\n"
                                   "m,g1,h1,a,700\nm,g1,h1,b,-700\nm,g1,h2,c,700\nm,g2,h1,d,-700\n");
    ASSERT_EQ(run("jacobian --input " + in + " --params " + params(0.5, 0.25) + " --output " + path("j.csv")), 0);
    for (const auto& row : read_csv(read(path("j.csv")))) EXPECT_TRUE(std::isfinite(num(row, "value")));
}

TEST_F(Cli, SimulateSymmetricMarket)
{
    const auto in = write("m.csv", "market_id,group_id,subgroup_id,product_id,value\nm,g,h,a,0\nm,g,h,b,0\n"
                                   "m,g,k,c,0\nm,f,h,d,0\n");
    const auto p = params(0.5, 0.25);
    const std::string args = "simulate --draws 1000000 --seed 42 --input " + in + " --params " + p;
    ASSERT_EQ(run(args + " --output " + path("a.csv")), 0);
    ASSERT_EQ(run(args + " --threads 3 --output " + path("b.csv")), 0);
    const auto first = read(path("a.csv"));
    EXPECT_EQ(first, read(path("b.csv")));
    const auto rows = read_csv(first);
    ASSERT_EQ(rows.size(), 5u);
    for (const auto& row : rows) EXPECT_LT(std::abs(num(row, "z")), 4.0);
    EXPECT_EQ(run("simulate --draws 0 --input " + in + " --params " + p), 2);
}

TEST_F(Cli, SimulateRandomMarket)
{
    const auto in = write("m.csv", random_market(13, -2.0, 2.0));
    ASSERT_EQ(run("simulate --draws 1000000 --seed 7 --input " + in + " --params " + params(0.8, 0.3) + " --output "
                  + path("s.csv")),
              0);
    for (const auto& row : read_csv(read(path("s.csv")))) EXPECT_LE(std::abs(num(row, "z")), 5.0);
}

TEST_F(Cli, EstimateRecoversTruth)
{
    const auto config = write("c.json", R"({"n_groups": 3, "n_subgroups_per_group": 2, "n_products_per_subgroup": 3,
        "beta": [0.5, -1.5, 2.0], "sigma1": 0.65, "sigma2": 0.35, "xi_scale": 0, "seed": 11})");
    ASSERT_EQ(run("estimate --config " + config + " --output " + path("a.json")), 0);
    ASSERT_EQ(run("estimate --config " + config + " --output " + path("b.json")), 0);
    EXPECT_EQ(read(path("a.json")), read(path("b.json")));
    const auto doc = nlohmann::json::parse(read(path("a.json")));
    EXPECT_NEAR(doc["sigma1_hat"].get<double>(), 0.65, 1e-8);
    EXPECT_NEAR(doc["sigma2_hat"].get<double>(), 0.35, 1e-8);
    EXPECT_NEAR(doc["beta_hat"][2].get<double>(), 2.0, 1e-8);
    EXPECT_LE(doc["residual_norm"].get<double>(), 1e-10);
}

TEST_F(Cli, EstimateErrors)
{
    EXPECT_EQ(run("estimate --config " + write("a.json", R"({"n_subgroups_per_group": 1})")), 3);
    EXPECT_EQ(run("estimate --config " + write("b.json", R"({"sigma1": 1.2})")), 2);
    EXPECT_EQ(run("estimate --config " + write("c.json", R"({"n_groups": -1})")), 2);
    EXPECT_EQ(run("estimate --config " + write("d.json", R"({"colour": "red"})")), 2);
    EXPECT_EQ(run("estimate --config " + write("e.json", "{")), 1);
}
