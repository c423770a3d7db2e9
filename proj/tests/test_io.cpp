#include <gtest/gtest.h>

#include <filesystem>

#include "morrey/generators.hpp"
#include "morrey/hash.hpp"
#include "morrey/io.hpp"
#include "morrey/sparse.hpp"

using namespace morrey;

TEST(ContentHash, MatchesGitBlobIds) {
  EXPECT_EQ(content_hash("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
  EXPECT_EQ(content_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST(Json, CubeRoundTrip) {
  const DyadicCube q{-3, IndexVec{4, -7}};
  EXPECT_EQ(cube_json(q), json::parse("[2, -3, 4, -7]"));
  EXPECT_EQ(cube_from_json(cube_json(q)), q);
  EXPECT_THROW(cube_from_json(json::parse("[2, 0, 1]")), InvalidArgument);
}

TEST(Json, FunctionForms) {
  const auto v = function_from_json(json::parse(R"({"n": 1, "K": 1, "values": [1, 0]})"));
  EXPECT_EQ(v.m(), 1);
  EXPECT_EQ(v.root(), unit_cube(1));
  const auto c = function_from_json(json::parse(R"({"n": 1, "K": 2, "root": [1, 1, 3], "components": [[1, 2], [3, 4]]})"));
  EXPECT_EQ(c.m(), 2);
  EXPECT_EQ(c.root(), (DyadicCube{1, IndexVec{3}}));
  const auto g = function_from_json(json::parse(R"({"n": 2, "K": 3, "m": 2, "generator": {"kind": "random", "family": "log-normal-cells", "seed": 4}})"));
  EXPECT_EQ(g.m(), 2);
  EXPECT_FALSE(std::equal(g[0].values().begin(), g[0].values().end(), g[1].values().begin()));
  const auto ind = function_from_json(json::parse(R"({"n": 1, "K": 2, "generator": {"kind": "indicator", "cubes": [[1, 1, 0]]}})"));
  EXPECT_EQ(std::vector<double>(ind[0].values().begin(), ind[0].values().end()), (std::vector<double>{1, 1, 0, 0}));
  EXPECT_THROW(function_from_json(json::parse(R"({"n": 1, "K": 2})")), InvalidArgument);
  EXPECT_THROW(function_from_json(json::parse(R"({"n": 1, "K": 2, "values": [1]})")), InvalidArgument);
  const auto back = function_from_json(function_json(c));
  EXPECT_EQ(function_json(back), function_json(c));
}

TEST(Json, MeasureForms) {
  const auto mu = measure_from_json(json::parse(R"({"n": 1, "K_mu": 3, "atoms": [[0.3, 5.0]]})"));
  ASSERT_EQ(mu.atoms().size(), 1u);
  EXPECT_EQ(mu.atoms()[0].cell, IndexVec{2});
  EXPECT_EQ(measure_json(measure_from_json(measure_json(mu))), measure_json(mu));
  const auto plane = measure_from_json(json::parse(R"({"n": 2, "K_mu": 2, "generator": {"kind": "hyperplane", "offset": 1}})"));
  EXPECT_EQ(plane.atoms().size(), 4u);
  EXPECT_THROW(measure_from_json(json::parse(R"({"n": 1, "K_mu": 3, "atoms": [[0.3]]})")), InvalidArgument);
}

TEST(Json, CertificateRoundTrip) {
  Rng rng(2);
  const VectorFunction f{random_input(InputFamily::indicator_unions, unit_cube(2), 4, rng)};
  const auto fam = build_sparse(f, 2.0, LevelWindow::make(-1, 4, unit_cube(2)));
  std::string hash;
  const auto back = certificate_from_json(json::parse(certificate_json(fam, "abc").dump()), &hash);
  EXPECT_EQ(hash, "abc");
  EXPECT_EQ(back.eta, fam.eta);
  ASSERT_EQ(back.members.size(), fam.members.size());
  for (std::size_t i = 0; i < fam.members.size(); ++i) {
    EXPECT_EQ(back.members[i].cube, fam.members[i].cube);
    EXPECT_EQ(back.members[i].owned, fam.members[i].owned);
    EXPECT_EQ(back.members[i].stopping, fam.members[i].stopping);
  }
  EXPECT_TRUE(verify_sparse(back, 0.0).certified);
}

TEST(Json, ExponentsReportViolations) {
  const auto j = exponents_json(exponents(1, 2, {3.0, 3.0}, 1.2, 0.75, 0.5, Regime::integral_via_maximal));
  EXPECT_EQ(j.at("valid"), false);
  EXPECT_EQ(j.at("violations").at(0).at("hypothesis"), "p <= p0");
  EXPECT_EQ(j.at("regime"), "thm1.1");
}

TEST(Files, ErrorsNameThePath) {
  try {
    read_text_file("/nonexistent/x.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/x.json"), std::string::npos);
  }
  const auto p = std::filesystem::temp_directory_path() / "morrey_io_test.json";
  write_text_file(p.string(), "{\"a\": 1}");
  EXPECT_EQ(read_json_file(p.string()).at("a"), 1);
  std::filesystem::remove(p);
}
