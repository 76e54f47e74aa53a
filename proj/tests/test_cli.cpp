#include <gtest/gtest.h>

#include <cstdlib>

#include "report.hpp"

using namespace schottky;
using namespace schottky::cli;

TEST(ParseComplex, Forms)
{
  EXPECT_EQ(parse_complex("i"), Complex(0, 1));
  EXPECT_EQ(parse_complex("-i"), Complex(0, -1));
  EXPECT_EQ(parse_complex("2i"), Complex(0, 2));
  EXPECT_EQ(parse_complex("1.5"), Complex(1.5, 0));
  EXPECT_EQ(parse_complex("0.3+1.2i"), Complex(0.3, 1.2));
  EXPECT_EQ(parse_complex("1e-3-2.5e-1i"), Complex(1e-3, -0.25));
  EXPECT_EQ(parse_complex("-1e+2+i"), Complex(-100, 1));
  EXPECT_EQ(parse_complex(" 0.5 - 2i "), Complex(0.5, -2));
  for (const char* bad : {"", "abc", "1+", "i2", "1..2", "nan"}) EXPECT_THROW(parse_complex(bad), Error) << bad;
}

TEST(Config, DefaultsMatchAcceptanceThresholds)
{
  const verify::Config c;
  EXPECT_EQ(c.theta_eps, 1e-13);
  EXPECT_EQ(c.locus_tol, 1e-13);
  EXPECT_EQ(c.singular_tol, 1e-6);
  EXPECT_EQ(c.klein_tol, 1e-3);
  EXPECT_EQ(c.lattice_tol, 1e-8);
  EXPECT_EQ(c.proportionality_tol, 1e-4);
  EXPECT_EQ(c.weight8_tol, 1e-8);
  EXPECT_EQ(c.chi_modulus_tol, 1e-6);
  EXPECT_EQ(c.seeds, 5);
  EXPECT_NO_THROW(verify::validate(c));
}

TEST(Config, OverlayAndValidation)
{
  verify::Config c;
  apply_config(c, json{{"klein_tol", 2e-3}, {"im_range", {0.4, 0.8}}, {"seeds", 3}});
  EXPECT_EQ(c.klein_tol, 2e-3);
  EXPECT_EQ(c.im_low, 0.4);
  EXPECT_EQ(c.seeds, 3);

  verify::Config bad;
  apply_config(bad, json{{"locus_tol", -1.0}});
  EXPECT_THROW(verify::validate(bad), Error);
  verify::Config reversed;
  apply_config(reversed, json{{"im_range", {0.9, 0.5}}});
  EXPECT_THROW(verify::validate(reversed), Error);
  EXPECT_THROW(apply_config(c, json{{"no_such_key", 1}}), Error);
  EXPECT_THROW(apply_config(c, json{{"klein_tol", "small"}}), Error);
  EXPECT_THROW(apply_config(c, json{{"threads", 0}}), Error);
}

TEST(Config, RoundTripsThroughJson)
{
  verify::Config c;
  c.seeds = 7;
  c.klein_baseline = 1.5;
  verify::Config d;
  apply_config(d, to_json(c));
  EXPECT_EQ(to_json(c), to_json(d));
}

TEST(Report, CsvAndJsonShape)
{
  Report rep;
  rep.command = "verify test";
  verify::SuiteResult s;
  s.id = 1;
  s.name = "demo";
  s.checks.push_back(verify::at_most("a \"quoted\" name", "tag", 1e-3, 1e-2));
  s.checks.push_back(verify::failed("broken", "tag", 1, "why"));
  rep.suites.push_back(s);
  const auto j = rep.to_json();
  EXPECT_FALSE(j.at("pass").get<bool>());
  EXPECT_TRUE(j.at("suites")[0].at("checks")[1].at("measured").is_null());
  const auto csv = rep.to_csv();
  EXPECT_NE(csv.find("\"a \"\"quoted\"\" name\""), std::string::npos);
  EXPECT_NE(csv.find(",<=,1,false"), std::string::npos);
}

TEST(ExitCodes, Mapping)
{
  EXPECT_EQ(exit_code_for(ErrorCode::invalid_argument), exit_usage);
  EXPECT_EQ(exit_code_for(ErrorCode::non_convergent), exit_numeric);
  EXPECT_EQ(exit_code_for(ErrorCode::max_iter), exit_numeric);
}
