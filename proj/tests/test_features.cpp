#include <doctest.h>

#include <radlesion/features.hpp>
#include <radlesion/mesh.hpp>

#include <algorithm>
#include <cmath>

#include "regions.hpp"

using namespace radlesion;

namespace {

void check_against_oracle(const fixtures::NamedRegion& named, double bin_width) {
  const auto expected = oracle::all_features(fixtures::to_oracle(named.region), bin_width);
  const FeatureVector got = extract_all(named.region, {bin_width});
  REQUIRE(expected.size() == static_cast<std::size_t>(kFeatureCount));
  const auto& cols = canonical_columns();
  for (int k = 0; k < kFeatureCount; ++k) {
    INFO(named.name << " " << cols[k] << " got " << got.values[k] << " want " << expected[k]);
    CHECK(fixtures::close_rel(got.values[k], expected[k], 1e-6));
  }
}

}  // namespace

TEST_CASE("all descriptors agree with the brute-force reference") {
  for (const auto& named : fixtures::standard_regions()) check_against_oracle(named, 25.0);
}

TEST_CASE("reference agreement holds at other bin widths") {
  for (const auto& named : fixtures::standard_regions()) {
    check_against_oracle(named, 7.0);
    check_against_oracle(named, 300.0);
  }
}

TEST_CASE("random blobs agree with the reference") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    check_against_oracle({"blob", fixtures::random_blob(seed, 40 + static_cast<int>(seed % 7) * 8)},
                         15.0);
  }
}
