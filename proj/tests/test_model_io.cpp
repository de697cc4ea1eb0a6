#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "gaussmc/errors.hpp"
#include "gaussmc/model_io.hpp"

using namespace gaussmc;
using nlohmann::json;

TEST(ModelJson, Identity) {
  const auto m = model_from_json(json::parse(R"({"type":"identity","d":4})"));
  EXPECT_EQ(m.kind(), ModelKind::Identity);
  EXPECT_EQ(m.dim(), 4u);
}

TEST(ModelJson, DenseInfersDim) {
  const auto m = model_from_json(json::parse(R"({"type":"dense","values":[1,0.5,0.5,1]})"));
  EXPECT_EQ(m.dim(), 2u);
  EXPECT_EQ(m.entry(0, 1), 0.5);
}

TEST(ModelJson, KernelDefaultsToGrid) {
  const auto m = model_from_json(json::parse(R"({"type":"scaledexp","d":9,"r":10,"ratio":0.93})"));
  EXPECT_EQ(m.kind(), ModelKind::ScaledExponential);
  ASSERT_EQ(m.locations().size(), 9u);
  EXPECT_DOUBLE_EQ(m.locations()[5].x, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.ratio(), 0.93);
}

TEST(ModelJson, ExplicitLocations) {
  const auto m = model_from_json(
      json::parse(R"({"type":"powexp","locations":[[0,0],[1,0],[0,2]],"r":2,"theta":1.5})"));
  EXPECT_EQ(m.dim(), 3u);
  EXPECT_NEAR(m.entry(0, 2), std::exp(-1.0), 1e-15);
}

TEST(ModelJson, RoundTrip) {
  for (const char* text : {R"({"type":"identity","d":3})", R"({"type":"dense","d":2,"values":[1,0.2,0.2,1]})",
                           R"({"type":"powexp","d":5,"r":0.5,"theta":2})",
                           R"({"type":"scaledexp","d":6,"r":3,"ratio":0.4})"}) {
    const auto m = model_from_json(json::parse(text));
    const auto back = model_from_json(model_to_json(m));
    ASSERT_EQ(back.dim(), m.dim());
    EXPECT_EQ(back.kind(), m.kind());
    for (std::size_t i = 0; i < m.dim(); ++i)
      for (std::size_t j = 0; j < m.dim(); ++j) EXPECT_EQ(back.entry(i, j), m.entry(i, j)) << text;
  }
}

TEST(ModelJson, SummaryOmitsData) {
  const auto m = model_from_json(json::parse(R"({"type":"dense","d":2,"values":[1,0.2,0.2,1]})"));
  EXPECT_FALSE(model_to_json(m, false).contains("values"));
  EXPECT_TRUE(model_to_json(m, true).contains("values"));
}

TEST(ModelJson, Errors) {
  for (const char* text : {R"({"type":"nope","d":3})", R"({"d":3})", R"({"type":"identity"})",
                           R"({"type":"dense","d":3,"values":[1,0,0,1]})", R"({"type":"identity","d":"x"})",
                           R"({"type":"powexp","d":4,"locations":[[0,0]]})", R"([1,2])"}) {
    EXPECT_THROW(model_from_json(json::parse(text)), ArgumentError) << text;
  }
}

TEST(ModelFile, LoadAndMissing) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / "gaussmc_model_io_test.json";
  {
    std::ofstream out(path);
    out << R"({"type":"identity","d":3})";
  }
  EXPECT_EQ(load_model_file(path).dim(), 3u);
  std::filesystem::remove(path);
  EXPECT_THROW(load_model_file(path), ArgumentError);
  const auto bad = dir / "gaussmc_model_io_bad.json";
  {
    std::ofstream out(bad);
    out << "{not json";
  }
  EXPECT_THROW(load_model_file(bad), ArgumentError);
  std::filesystem::remove(bad);
}
