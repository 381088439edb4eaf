#include <gtest/gtest.h>

#include <string>

#include <json.hpp>

#include "bubbles/cluster_io.hpp"
#include "bubbles/seeds.hpp"

using namespace bubbles;

namespace {

std::vector<Cluster> all_seeds() {
  const DensityField d{0.73};
  return {circle_seed(0.9, {1.0 / 3.0, -0.2}, d),
          standard_double_bubble({1.0, 0.6, 12}, DoublePlacement::vertex_at_origin, d),
          standard_double_bubble({1.0, 1.0, 12}, DoublePlacement::center_at_origin, d),
          triple_seed({3, 2, 1}, d),
          chain_seed({1, 2, 1}, d),
          quadruple_seed({30, 1, 30, 1}, d, CentralEnd::east)};
}

}  // namespace

TEST(ClusterIo, RoundTripIsIdentity) {
  for (const Cluster& c : all_seeds()) {
    const std::string text = save_cluster(c);
    const Cluster back = load_cluster(text);
    EXPECT_EQ(back, c);
    EXPECT_EQ(save_cluster(back), text);
  }
}

TEST(ClusterIo, ExteriorLiteral) {
  const std::string text = save_cluster(circle_seed(1.0, {2, 0}, {}));
  EXPECT_NE(text.find("\"right\": \"exterior\""), std::string::npos);
}

TEST(ClusterIo, LabelsAreEscaped) {
  Cluster c = circle_seed(1.0, {2, 0}, {});
  c.regions[0].label = "a \"quoted\"\\label";
  EXPECT_EQ(load_cluster(save_cluster(c)).regions[0].label, c.regions[0].label);
}

TEST(ClusterIo, ValidationErrorOnBadTopology) {
  Cluster c = triple_seed({1, 1, 1}, {});
  c.edges[0].right_region = c.edges[0].left_region;
  const std::string text = save_cluster(c);
  EXPECT_NO_THROW(parse_cluster(text));
  EXPECT_THROW(load_cluster(text), ValidationError);
}

TEST(ClusterIo, ParseErrors) {
  const std::string good = save_cluster(circle_seed(1.0, {2, 0}, {}));
  std::string missing = good;
  missing.replace(missing.find("\"density_exponent\""), 18, "\"exponent\"");
  try {
    load_cluster(missing);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("density_exponent"), std::string::npos);
  }
  auto doc = nlohmann::json::parse(good);
  doc["vertices"][3]["x"] = "s";
  try {
    load_cluster(doc.dump());
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("vertices[3].x"), std::string::npos);
  }
  EXPECT_THROW(load_cluster("{"), ParseError);
  EXPECT_THROW(load_cluster("[]"), ParseError);
  std::string bad_region = good;
  bad_region.replace(bad_region.find("\"exterior\""), 10, "\"outside\"");
  EXPECT_THROW(load_cluster(bad_region), ParseError);
}

TEST(ClusterIo, MissingFile) { EXPECT_THROW(read_cluster_file("/nonexistent/cluster.json"), Error); }
