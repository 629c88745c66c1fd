// Copyright 2026 The resp Authors
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


#include <gtest/gtest.h>

#include "resp/json_io.hpp"

namespace resp {
namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::InvalidArgument;  // sentinel: nothing thrown
}

TEST(JsonIo, FloatsUseSeventeenDigits) {
  Json j{{"a", 0.1}, {"b", 1}, {"c", "x"}, {"d", {1.0, -2.5}}};
  EXPECT_EQ(dump_json(j),
            "{\n  \"a\": 1.0000000000000001e-01,\n  \"b\": 1,\n  \"c\": \"x\",\n"
            "  \"d\": [\n    1.0000000000000000e+00,\n    -2.5000000000000000e+00\n  ]\n}\n");
}

TEST(JsonIo, NonFiniteBecomesNull) {
  EXPECT_EQ(dump_json(Json{{"x", INFINITY}}), "{\n  \"x\": null\n}\n");
}

TEST(JsonIo, KeyOrderIsInsertionOrder) {
  Json j;
  j["z"] = 1;
  j["a"] = 2;
  EXPECT_LT(dump_json(j).find("\"z\""), dump_json(j).find("\"a\""));
}

TEST(JsonIo, SyntaxErrorReportsLineAndColumn) {
  try {
    parse_json_text("{\n  \"alpha\": \"golden\",\n  \"model\": {oops}\n}");
    FAIL() << "no throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
    EXPECT_NE(std::string(e.what()).find("line 3, column 13"), std::string::npos) << e.what();
  }
}

TEST(JsonIo, UnknownKeysRejectedInEverySection) {
  for (const char* text : {R"({"bogus": 1})", R"({"model": {"goth_n": 3, "zz": 0}})", R"({"budget": {"eta": 1}})",
                           R"({"solve": {"eps": 1}})", R"({"simulate": {"x": 0}})", R"({"trees": {"kmax": 2}})",
                           R"({"output": {"pdf": ""}})", R"({"alpha": {"kind": "golden", "q": 1}})"}) {
    EXPECT_EQ(kind_of([&] { parse_config(Json::parse(text)); }), ErrorKind::ConfigError) << text;
  }
}

TEST(JsonIo, DefaultsToCubicGoldenModel) {
  const auto cfg = parse_config(Json::object());
  EXPECT_EQ(cfg.model.goth_n, 3);
  EXPECT_EQ(cfg.model.g_coeffs, (std::vector<double>{0, 0, 0, 1}));
  EXPECT_DOUBLE_EQ(cfg.model.f[Mode(1, 0)].real(), 0.5);
  EXPECT_FALSE(cfg.has_epsilon);
}

TEST(JsonIo, GothnSetsMonomialWhenGAbsent) {
  const auto cfg = parse_config(Json::parse(R"({"model": {"goth_n": 5}})"));
  EXPECT_EQ(cfg.model.g_coeffs.size(), 6u);
  EXPECT_EQ(cfg.budget.goth_n, 5);
}

TEST(JsonIo, FieldFillsConjugates) {
  const auto f = field_from_json(Json::parse(R"([{"nu": [1, -2], "re": 0.25, "im": 0.5}])"), "f");
  EXPECT_EQ(f.N_modes(), 2);
  EXPECT_EQ(f[Mode(-1, 2)], cplx(0.25, -0.5));
  EXPECT_EQ(f.reality_defect(), 0.0);
}

TEST(JsonIo, FieldAmpIsCosine) {
  const auto f = field_from_json(Json::parse(R"([{"nu": [0, 1], "amp": 0.6}])"), "f");
  EXPECT_DOUBLE_EQ(f[Mode(0, 1)].real(), 0.3);
  EXPECT_DOUBLE_EQ(f[Mode(0, -1)].real(), 0.3);
}

TEST(JsonIo, FieldRejectsNonRealData) {
  auto bad = Json::parse(R"([{"nu": [1, 0], "re": 1}, {"nu": [-1, 0], "re": 2}])");
  EXPECT_EQ(kind_of([&] { field_from_json(bad, "f"); }), ErrorKind::ConfigError);
}

TEST(JsonIo, AlphaKinds) {
  EXPECT_EQ(alpha_from_json("golden").describe(), "[1;1,...]");
  EXPECT_EQ(alpha_from_json(Json::parse(R"({"kind": "list", "a0": 1, "quotients": [2]})")).describe(), "[1;2,...]");
  const auto e = convergents(alpha_from_json("euler"), 8);
  EXPECT_EQ(e[7].p, 193);
  EXPECT_EQ(e[7].q, 71);
}

TEST(JsonIo, EulerQuotients) {
  PartialQuotientSource src = alpha_from_json("euler");
  PartialQuotientSource::Stream st(src);
  std::vector<int> got;
  for (int i = 0; i < 10; ++i) got.push_back(st.next()->convert_to<int>());
  EXPECT_EQ(got, (std::vector<int>{2, 1, 2, 1, 1, 4, 1, 1, 6, 1}));
}

TEST(JsonIo, UnknownAlphaKind) {
  EXPECT_EQ(kind_of([] { alpha_from_json("pi"); }), ErrorKind::ConfigError);
}

TEST(JsonIo, AdmissibleSerialization) {
  RegularityBudget b;
  b.xi = 4;
  const auto r = build_frakJ(PartialQuotientSource::golden(), b, 20);
  const Json j = admissible_to_json(r.set);
  ASSERT_EQ(j["holes"].size(), 1u);
  EXPECT_GT(j["holes"][0]["width"].get<double>(), 0.0);
  EXPECT_EQ(j["N"], 9);
  EXPECT_EQ(j["intervals"][0]["n"], 0);
  EXPECT_FALSE(j["hole_free"].get<bool>());
}

}  // namespace
}  // namespace resp
