// Copyright 2026 The supkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "sup/description_scorer.hpp"
#include "sup/errors.hpp"

using namespace sup;
using namespace sup::description;

namespace
{

KeyInfo event(std::string_view s) {return make_key_info(KeyKind::critical_event, std::nullopt, s);}
KeyInfo env(const char * f, std::string_view s) {return make_key_info(KeyKind::environment, f, s);}

// Similarities read from a fixed table.
class TableMatcher : public Matcher
{
public:
  explicit TableMatcher(std::vector<std::vector<double>> t) : t_(std::move(t)) {}
  double similarity(std::size_t g, const KeyInfo &, std::size_t o, const KeyInfo &) const override
  {
    return t_[g][o];
  }

private:
  std::vector<std::vector<double>> t_;
};

}  // namespace

TEST_SUITE("description") {

TEST_CASE("aggregate score examples")
{
  CHECK(aggregate_score(4, 0, 1, 9) == doctest::Approx(3.75 / 9.0).epsilon(1e-15));
  CHECK(aggregate_score(4, 0, 1, 9) == 3.75 / 9.0);
  CHECK(std::round(aggregate_score(4, 0, 1, 9) * 1000.0) / 1000.0 == 0.417);
  CHECK(aggregate_score(7, 0, 0, 7) == 1.0);
  CHECK(aggregate_score(0, 0, 2, 4) == -0.125);
  CHECK(aggregate_score(0, 3, 0, 6) == 0.25);
  CHECK_THROWS_AS(aggregate_score(1, 0, 0, 0), std::invalid_argument);
}

TEST_CASE("aggregate score is linear and scale invariant")
{
  std::mt19937_64 g(1);
  for (int i = 0; i < 500; ++i) {
    const std::size_t m = g() % 20;
    const std::size_t p = g() % 20;
    const std::size_t h = g() % 20;
    const std::size_t n = 1 + g() % 30;
    const double base = aggregate_score(m, p, h, n);
    CHECK(aggregate_score(2 * m, 2 * p, 2 * h, 2 * n) == doctest::Approx(base).epsilon(1e-14));
    CHECK(aggregate_score(m + 1, p, h, n) - base ==
      doctest::Approx(1.0 / static_cast<double>(n)).epsilon(1e-12));
    CHECK(aggregate_score(m, p + 1, h, n) - base ==
      doctest::Approx(0.5 / static_cast<double>(n)).epsilon(1e-12));
    CHECK(aggregate_score(m, p, h + 1, n) - base ==
      doctest::Approx(-0.25 / static_cast<double>(n)).epsilon(1e-12));
  }
}

TEST_CASE("key info invariants")
{
  CHECK_THROWS_AS(make_key_info(KeyKind::environment, std::nullopt, "sunny"), SchemaError);
  CHECK_THROWS_AS(make_key_info(KeyKind::critical_event, std::nullopt, " ..! "), SchemaError);
  const auto k = event("  A Truck,  STOPS here! ");
  CHECK(k.content == "a truck stops here");
  CHECK_FALSE(k.field_name.has_value());
}

TEST_CASE("structured record with four environment fields and two events")
{
  const auto r = fixtures::annotated_sample();
  const auto items = extract_key_info(r);
  REQUIRE(items.size() == 6);
  for (int i = 0; i < 4; ++i) {
    CHECK(items[i].kind == KeyKind::environment);
  }
  CHECK(*items[0].field_name == "weather");
  CHECK(items[0].content == "rainy");
  CHECK(items[4].kind == KeyKind::critical_event);
  CHECK(items[5].content == "a worker is directing traffic");
}

TEST_CASE("free text with labelled segments")
{
  const auto items = extract_key_info("Weather: Sunny. || Time: Day.");
  REQUIRE(items.size() == 2);
  CHECK(items[0] == env("weather", "sunny"));
  CHECK(items[1] == env("time", "day"));
  CHECK_THROWS_AS(extract_key_info("   \n "), SchemaError);
}

TEST_CASE("reference description with five environment items and four events")
{
  const auto text = io::read_file(fixtures::data_path("reference.txt"));
  const auto items = extract_key_info(text);
  REQUIRE(items.size() == 9);
  std::size_t n_env = 0;
  for (const auto & k : items) {
    n_env += k.kind == KeyKind::environment;
  }
  CHECK(n_env == 5);
  CHECK(items[3] == env("lane", "left lane own lane"));
  CHECK(items[8] == event("A pedestrian waits at the corner."));
}

TEST_CASE("sentence splitting")
{
  const auto s = split_sentences("Speed is 2.5 m/s. Wait!  Go? end");
  REQUIRE(s.size() == 4);
  CHECK(s[0] == "Speed is 2.5 m/s.");
  CHECK(s[3] == "end");
}

TEST_CASE("rendered description reads back to the record's items")
{
  const auto r = fixtures::annotated_sample();
  CHECK(extract_key_info(render_description(r)) == extract_key_info(r));
}

TEST_CASE("identical lists score 1")
{
  const auto r = fixtures::annotated_sample();
  const auto items = extract_key_info(r);
  const auto b = classify_matches(items, items);
  CHECK(b.n_matched == items.size());
  CHECK(b.n_hallucination == 0);
  CHECK(b.score == 1.0);

  std::mt19937_64 g(3);
  const char * words[] = {"car", "stops", "left", "a", "truck", "red", "light", "walks", "the"};
  for (int i = 0; i < 200; ++i) {
    std::vector<KeyInfo> x;
    const std::size_t n = 1 + g() % 6;
    for (std::size_t j = 0; j < n; ++j) {
      std::string s;
      for (std::size_t w = 0; w < 1 + g() % 5; ++w) {
        s += std::string(words[g() % 9]) + " ";
      }
      x.push_back(g() % 3 == 0 ? env("road", s) : event(s));
    }
    CHECK(classify_matches(x, x).score == 1.0);
  }
}

TEST_CASE("matched items and one extra output item")
{
  const auto gt = extract_key_info(io::read_file(fixtures::data_path("reference.txt")));
  const auto out = extract_key_info(io::read_file(fixtures::data_path("output.txt")));
  REQUIRE(out.size() == 5);
  const auto b = classify_matches(gt, out);
  CHECK(b.n_matched == 4);
  CHECK(b.n_partial == 0);
  CHECK(b.n_hallucination == 1);
  CHECK(b.n_gt == 9);
  CHECK(b.score == aggregate_score(4, 0, 1, 9));
  std::vector<std::size_t> matched_gt;
  for (const auto & p : b.pairs) {
    matched_gt.push_back(p.gt);
  }
  std::sort(matched_gt.begin(), matched_gt.end());
  CHECK(matched_gt == std::vector<std::size_t>{0, 1, 5, 6});
}

TEST_CASE("greedy matching against a hand-enumerated similarity table")
{
  const std::vector<KeyInfo> gt{event("a red car stops ahead"),
    event("a child runs across the road"), event("rain is falling")};
  const std::vector<KeyInfo> out{event("a red car stops ahead"),
    event("a child runs over the street")};
  // gt0/out0 1.0, gt0/out1 1/10, gt1/out0 1/10, gt1/out1 4/8, gt2 nothing.
  CHECK(token_jaccard(gt[0].content, out[1].content) == 0.1);
  CHECK(token_jaccard(gt[1].content, out[0].content) == 0.1);
  CHECK(token_jaccard(gt[1].content, out[1].content) == 0.5);
  CHECK(token_jaccard(gt[2].content, out[0].content) == 0.0);
  const auto b = classify_matches(gt, out);
  CHECK(b.n_matched == 1);
  CHECK(b.n_partial == 1);
  CHECK(b.n_hallucination == 0);
  CHECK(b.score == 0.5);

  // 3 shared tokens out of 5 sits exactly on the match threshold.
  const std::vector<KeyInfo> gt2{event("child runs across road")};
  const std::vector<KeyInfo> out2{event("child runs across street")};
  const auto b2 = classify_matches(gt2, out2);
  CHECK(b2.n_matched == 1);
  CHECK(b2.pairs.at(0).similarity == 0.6);
}

TEST_CASE("greedy picks the highest pair first even when a better total exists")
{
  // Optimal assignment would pair (0,1) and (1,0) for 1.4; greedy takes 0.9.
  const TableMatcher m({{0.9, 0.7}, {0.7, 0.0}});
  const std::vector<KeyInfo> two{event("x"), event("y")};
  const auto b = classify_matches(two, two, m);
  REQUIRE(b.pairs.size() == 1);
  CHECK(b.pairs[0].gt == 0);
  CHECK(b.pairs[0].out == 0);
  CHECK(b.n_matched == 1);
  CHECK(b.n_hallucination == 1);
}

TEST_CASE("similarity ties go to the lower indices")
{
  const TableMatcher m({{0.8, 0.8}, {0.8, 0.8}});
  const std::vector<KeyInfo> two{event("x"), event("y")};
  const auto b = classify_matches(two, two, m);
  REQUIRE(b.pairs.size() == 2);
  CHECK(b.pairs[0].gt == 0);
  CHECK(b.pairs[0].out == 0);
  CHECK(b.pairs[1].gt == 1);
  CHECK(b.pairs[1].out == 1);
}

TEST_CASE("environment similarity")
{
  const DefaultMatcher m;
  CHECK(m.similarity(0, env("weather", "Sunny"), 0, env("weather", "sunny")) == 1.0);
  CHECK(m.similarity(0, env("weather", "sunny"), 0, env("weather", "rainy")) == 0.5);
  CHECK(m.similarity(0, env("weather", "sunny"), 0, env("time", "sunny")) == 0.0);
  CHECK(m.similarity(0, env("weather", "sunny"), 0, event("sunny")) == 0.0);
  const std::vector<KeyInfo> gt{env("weather", "sunny"), env("time", "day")};
  const std::vector<KeyInfo> out{env("weather", "cloudy"), env("time", "day")};
  const auto b = classify_matches(gt, out);
  CHECK(b.n_matched == 1);
  CHECK(b.n_partial == 1);
  CHECK(b.score == 0.75);
}

TEST_CASE("each unmatched output item costs a quarter over n_gt")
{
  const auto gt = extract_key_info(fixtures::annotated_sample());
  auto out = gt;
  out.pop_back();
  double prev = classify_matches(gt, out).score;
  const double n = static_cast<double>(gt.size());
  const char * extras[] = {"zebra crossing paint is fresh", "birds fly high overhead",
    "music plays loudly nearby"};
  for (const char * e : extras) {
    out.push_back(event(e));
    const double s = classify_matches(gt, out).score;
    CHECK(s - prev == doctest::Approx(-0.25 / n).epsilon(1e-12));
    prev = s;
  }
}

TEST_CASE("empty ground truth is rejected")
{
  CHECK_THROWS_AS(classify_matches({}, {event("x")}), std::invalid_argument);
}

}  // TEST_SUITE
