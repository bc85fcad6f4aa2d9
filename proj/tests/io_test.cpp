// Copyright 2026 The angmetric Authors.
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

#include "angmetric/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>
#include <sstream>

#include "angmetric/error.hpp"

namespace angmetric {
namespace {

FeatureFile parse(const std::string& text) {
  std::istringstream in(text);
  return parse_feature_file(in);
}

EncoderModel parse_model_text(const std::string& text) {
  std::istringstream in(text);
  return parse_model(in);
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

TEST(FormatDouble, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(2.0), "2");
  EXPECT_EQ(format_double(-1.5e-300), "-1.5000000000000001e-300");
}

TEST(FeatureFile, ParsesCommentsAndRows) {
  const FeatureFile f = parse("# hello\n#x\n\n3,1.5,-2\n0, 4 ,+5e-1\r\n");
  EXPECT_EQ(f.comments, (std::vector<std::string>{"hello", "x"}));
  ASSERT_EQ(f.data.size(), 2u);
  EXPECT_EQ(f.data.label(0), 3);
  EXPECT_EQ(f.data.sample(0), (Vector{1.5, -2}));
  EXPECT_EQ(f.data.sample(1), (Vector{4, 0.5}));
}

TEST(FeatureFile, ParseErrorsCarryLineNumbers) {
  const std::pair<const char*, const char*> cases[] = {
      {"0,1,2\n1,3\n", "line 2"},
      {"0,1\n-1,2\n", "line 2"},
      {"#c\nx,1\n", "line 2"},
      {"0,abc\n", "line 1"},
      {"0,nan\n", "line 1"},
      {"0,1e999\n", "line 1"},
      {"0\n", "line 1"},
      {"0,1,\n", "line 1"},
      {"1.5,2\n", "line 1"},
  };
  for (const auto& [text, where] : cases) {
    try {
      parse(text);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const ParseError& e) {
      EXPECT_NE(std::string(e.what()).find(where), std::string::npos) << e.what();
    }
  }
}

TEST(FeatureFile, EmptyInputGivesEmptyDataset) {
  EXPECT_TRUE(parse("# only a comment\n").data.empty());
}

TEST(FeatureFile, RoundTripIsExact) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> expo(-300, 300);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    const std::size_t dim = 1 + rng() % 8;
    std::vector<Vector> x(n, Vector(dim));
    std::vector<Label> y(n);
    for (auto& v : x) {
      for (double& c : v) c = std::ldexp(g(rng), expo(rng) % 60);
    }
    x[0][0] = std::numeric_limits<double>::denorm_min();
    if (dim > 1) x[0][1] = -0.0;
    for (auto& l : y) l = static_cast<Label>(rng() % 1000000);
    const LabeledDataset d(x, y);
    const std::string text = serialize_feature_file(d, {"seed 5", "trial"});
    const FeatureFile back = parse(text);
    EXPECT_EQ(back.comments, (std::vector<std::string>{"seed 5", "trial"}));
    ASSERT_EQ(back.data.size(), n);
    EXPECT_EQ(back.data.labels(), y);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < dim; ++k) {
        ASSERT_TRUE(bit_equal(back.data.sample(i)[k], x[i][k]));
      }
    }
    EXPECT_EQ(serialize_feature_file(back.data, back.comments), text);
  }
}

TEST(ModelFile, RoundTripIsBitExact) {
  for (auto kind : {EncoderKind::kIdentity, EncoderKind::kLinear, EncoderKind::kMlp}) {
    for (bool normalize : {false, true}) {
      EncoderSpec s;
      s.kind = kind;
      s.input_dim = 5;
      s.embed_dim = kind == EncoderKind::kIdentity ? 5 : 3;
      s.hidden_dim = kind == EncoderKind::kMlp ? 4 : 0;
      s.normalize_output = normalize;
      const EncoderModel m = EncoderModel::initialized(s, 77);
      const std::string text = serialize_model(m);
      const EncoderModel back = parse_model_text(text);
      EXPECT_EQ(back.spec().kind, kind);
      EXPECT_EQ(back.spec().normalize_output, normalize);
      EXPECT_EQ(back.spec().input_dim, 5u);
      const Vector a = m.flat_parameters();
      const Vector b = back.flat_parameters();
      ASSERT_EQ(a.size(), b.size());
      for (std::size_t i = 0; i < a.size(); ++i) ASSERT_TRUE(bit_equal(a[i], b[i]));
      EXPECT_EQ(serialize_model(back), text);
    }
  }
}

TEST(ModelFile, LayoutOfLinearModel) {
  EncoderSpec s;
  s.kind = EncoderKind::kLinear;
  s.input_dim = 2;
  s.embed_dim = 2;
  EncoderModel m(s);
  m.set_layers({DenseLayer{Matrix::identity(2), Vector{0.5, -1}}});
  EXPECT_EQ(serialize_model(m),
            "angmetric-model kind=linear input_dim=2 embed_dim=2 normalize=0 hidden_dim=0\n"
            "1 0\n0 1\n0.5 -1\n");
}

TEST(ModelFile, ParseErrors) {
  const char* bad[] = {
      "",
      "not-a-model kind=linear\n",
      "angmetric-model kind=linear input_dim=2 normalize=0\n",
      "angmetric-model kind=conv input_dim=2 embed_dim=2 normalize=0\n",
      "angmetric-model kind=linear input_dim=2 embed_dim=2 normalize=yes\n",
      "angmetric-model kind=identity input_dim=2 embed_dim=3 normalize=0\n",
      "angmetric-model kind=linear input_dim=2 embed_dim=2 normalize=0\n1 0\n0 1\n",
      "angmetric-model kind=linear input_dim=2 embed_dim=2 normalize=0\n1 0\n0 1 2\n0 0\n",
      "angmetric-model kind=linear input_dim=2 embed_dim=2 normalize=0\n1 0\n0 1\n0 0\n7\n",
      "angmetric-model kind=linear input_dim=-2 embed_dim=2 normalize=0\n",
  };
  for (const char* text : bad) {
    EXPECT_THROW(parse_model_text(text), ParseError) << text;
  }
}

TEST(Files, MissingPathsAreIoErrors) {
  EXPECT_THROW(read_feature_file("/nonexistent/dir/x.csv"), IoError);
  EXPECT_THROW(read_model_file("/nonexistent/dir/m.txt"), IoError);
  EXPECT_THROW(write_text_file("/nonexistent/dir/out.txt", "x"), IoError);
}

TEST(Files, WriteThenRead) {
  const auto path = std::filesystem::temp_directory_path() / "angmetric_io_test.csv";
  write_text_file(path.string(), "1,2,3\n1,4,5\n");
  const FeatureFile f = read_feature_file(path.string());
  EXPECT_EQ(f.data.size(), 2u);
  std::filesystem::remove(path);
  write_text_file(path.string(), "1,2\nbroken\n");
  try {
    read_feature_file(path.string());
    ADD_FAILURE();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(path.string()), std::string::npos);
  }
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace angmetric
