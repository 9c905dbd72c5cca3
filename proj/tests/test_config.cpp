#include <cmath>
#include <filesystem>
#include <numbers>

#include <gtest/gtest.h>

#include "dampex/config.hpp"

using namespace dampex;

namespace {

DataConfig parse(const char* text) { return parse_data_config(Json::parse(text)); }

}  // namespace

TEST(Config, ParsesCompositeData) {
  const auto cfg = parse(R"({"dimension": 2,
    "u0": [{"family": "gaussian", "scale": 4},
           {"family": "box", "half_width": 0.5, "weight": -1}],
    "u1": {"family": "dilated_translated", "center": [1, 0], "dilation": 2,
           "base": {"family": "gaussian_monomial", "beta": [1, 0], "scale": 1}}})");
  EXPECT_EQ(cfg.dimension, 2);
  EXPECT_EQ(cfg.u0.components().size(), 2u);
  ASSERT_EQ(cfg.u1.components().size(), 1u);
  const auto& c = cfg.u1.components()[0];
  EXPECT_EQ(c.family, Family::GaussianMonomial);
  EXPECT_DOUBLE_EQ(c.center[0], 1.0);
  EXPECT_DOUBLE_EQ(c.dilation[1], 2.0);
  const double x[] = {1.0, 0.0};
  EXPECT_DOUBLE_EQ(cfg.u1.value(x), 0.0);
}

TEST(Config, MissingDatumIsZero) {
  const auto cfg = parse(R"({"dimension": 1, "u0": {"family": "gauss_kernel", "t": 2}})");
  EXPECT_TRUE(cfg.u1.is_zero());
  EXPECT_NEAR(cfg.u0.raw_moment(MultiIndex{0}), 1.0, 1e-14);
}

TEST(Config, RejectsBadInput) {
  const char* bad[] = {
      R"({"u0": {"family": "gaussian"}})",
      R"({"dimension": 4})",
      R"({"dimension": 1.5})",
      R"({"dimension": 1, "extra": 1})",
      R"({"dimension": 1, "u0": {"family": "lorentzian"}})",
      R"({"dimension": 1, "u0": {"scale": 2}})",
      R"({"dimension": 1, "u0": {"family": "gaussian", "scale": -1}})",
      R"({"dimension": 1, "u0": {"family": "gaussian", "scale": "wide"}})",
      R"({"dimension": 1, "u0": {"family": "gaussian", "width": 2}})",
      R"({"dimension": 1, "u0": {"family": "gaussian", "samples": [1, 2, 3]}})",
      R"({"dimension": 1, "values": [1, 2, 3]})",
      R"({"dimension": 2, "u0": {"family": "gaussian_monomial", "beta": [1]}})",
      R"({"dimension": 1, "u0": {"family": "gaussian_monomial", "beta": [-1]}})",
      R"({"dimension": 1, "u0": {"family": "gauss_kernel", "t": 0}})",
      R"({"dimension": 2, "u0": {"family": "dilated_translated", "center": [1, 2, 3],
                                 "base": {"family": "box"}}})",
      R"({"dimension": 1, "u0": {"family": "dilated_translated", "dilation": -1,
                                 "base": {"family": "box"}}})",
      R"({"dimension": 1, "u0": {"family": "dilated_translated"}})",
      R"({"dimension": 1, "u0": {"family": "box", "half_width": 0}})",
  };
  for (const char* text : bad) EXPECT_THROW(parse(text), ConfigError) << text;
}

TEST(Config, ReadsShippedDataFiles) {
  const std::filesystem::path dir = std::filesystem::path(DAMPEX_CONFIG_DIR) / "data";
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto cfg = load_data_config(entry.path().string());
    EXPECT_FALSE((cfg.u0 + cfg.u1).is_zero()) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 5);
  EXPECT_THROW(load_data_config((dir / "missing.json").string()), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  const auto cfg = parse(R"({"dimension": 2, "u0": {"family": "dilated_translated", "center": [1, 1],
    "dilation": [1, 0.5], "base": {"family": "gaussian", "scale": 2}}})");
  const Json j = to_json(cfg.u0);
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["family"], "gaussian");
  EXPECT_EQ(j[0]["dilation"][1], 0.5);
  EXPECT_EQ(j[0]["center"][0], 1.0);
}
