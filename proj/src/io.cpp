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

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string_view>
#include <type_traits>

namespace angmetric {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw ParseError("line " + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view tok, std::size_t line) {
  tok = trim(tok);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    fail(line, "not a number: '" + std::string(tok) + "'");
  }
  if (!std::isfinite(v)) fail(line, "non-finite value");
  return v;
}

template <class Int>
Int parse_uint(std::string_view tok, std::size_t line, const char* what) {
  tok = trim(tok);
  Int v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  bool negative = false;
  if constexpr (std::is_signed_v<Int>) negative = v < 0;
  if (ec != std::errc() || ptr != tok.data() + tok.size() || negative) {
    fail(line, std::string(what) + " must be a nonnegative integer, got '" +
                   std::string(tok) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<double> parse_row(std::string_view text, std::size_t expect,
                              std::size_t line) {
  std::vector<double> out;
  std::istringstream ss{std::string(text)};
  std::string tok;
  while (ss >> tok) out.push_back(parse_double(tok, line));
  if (out.size() != expect) {
    fail(line, "expected " + std::to_string(expect) + " values, got " +
                   std::to_string(out.size()));
  }
  return out;
}

std::string join_row(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ' ';
    out += format_double(values[i]);
  }
  out += '\n';
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

FeatureFile parse_feature_file(std::istream& in) {
  FeatureFile file;
  std::vector<Vector> rows;
  std::vector<Label> labels;
  std::size_t columns = 0;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      line.remove_prefix(1);
      if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
      file.comments.emplace_back(line);
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() < 2) fail(line_no, "row needs a label and at least one value");
    if (columns == 0) columns = fields.size();
    if (fields.size() != columns) {
      fail(line_no, "expected " + std::to_string(columns) + " columns, got " +
                        std::to_string(fields.size()));
    }
    labels.push_back(parse_uint<Label>(fields[0], line_no, "label"));
    Vector v;
    v.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      v.push_back(parse_double(fields[i], line_no));
    }
    rows.push_back(std::move(v));
  }
  file.data = LabeledDataset(std::move(rows), std::move(labels));
  return file;
}

std::string serialize_feature_file(const LabeledDataset& data,
                                   const std::vector<std::string>& comments) {
  std::string out;
  for (const auto& c : comments) out += "# " + c + '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out += std::to_string(data.label(i));
    for (double v : data.sample(i)) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

FeatureFile read_feature_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return parse_feature_file(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << contents;
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::string serialize_model(const EncoderModel& model) {
  const EncoderSpec& s = model.spec();
  std::string out = "angmetric-model kind=" +
                    std::string(encoder_kind_name(s.kind)) +
                    " input_dim=" + std::to_string(s.input_dim) +
                    " embed_dim=" + std::to_string(s.embed_dim) +
                    " normalize=" + (s.normalize_output ? "1" : "0") +
                    " hidden_dim=" + std::to_string(s.hidden_dim) + '\n';
  for (const auto& layer : model.layers()) {
    for (std::size_t r = 0; r < layer.weight.rows; ++r) {
      out += join_row(layer.weight.row(r));
    }
    out += join_row(layer.bias);
  }
  return out;
}

EncoderModel parse_model(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) fail(1, "empty model file");
  std::istringstream hs(header);
  std::string magic, tok;
  hs >> magic;
  if (magic != "angmetric-model") fail(1, "missing 'angmetric-model' header");
  std::map<std::string, std::string> fields;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) fail(1, "malformed header field '" + tok + "'");
    fields[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  auto field = [&](const char* key) -> const std::string& {
    const auto it = fields.find(key);
    if (it == fields.end()) fail(1, std::string("header lacks ") + key);
    return it->second;
  };
  EncoderSpec spec;
  const auto kind = parse_encoder_kind(field("kind"));
  if (!kind) fail(1, "unknown encoder kind '" + field("kind") + "'");
  spec.kind = *kind;
  spec.input_dim = parse_uint<std::size_t>(field("input_dim"), 1, "input_dim");
  spec.embed_dim = parse_uint<std::size_t>(field("embed_dim"), 1, "embed_dim");
  const std::string& norm_flag = field("normalize");
  if (norm_flag != "0" && norm_flag != "1") fail(1, "normalize must be 0 or 1");
  spec.normalize_output = norm_flag == "1";
  if (fields.count("hidden_dim")) {
    spec.hidden_dim = parse_uint<std::size_t>(fields["hidden_dim"], 1, "hidden_dim");
  }
  EncoderModel model = [&] {
    try {
      return EncoderModel(spec);
    } catch (const InvalidInput& e) {
      fail(1, e.what());
    }
  }();

  std::vector<DenseLayer> layers = model.layers();
  std::size_t line_no = 1;
  std::string line;
  auto next_line = [&]() -> std::string_view {
    while (std::getline(in, line)) {
      ++line_no;
      if (!trim(line).empty()) return line;
    }
    fail(line_no, "unexpected end of model file");
  };
  for (auto& layer : layers) {
    for (std::size_t r = 0; r < layer.weight.rows; ++r) {
      const auto row = parse_row(next_line(), layer.weight.cols, line_no);
      std::copy(row.begin(), row.end(), layer.weight.row(r).begin());
    }
    layer.bias = parse_row(next_line(), layer.bias.size(), line_no);
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) fail(line_no, "trailing data after last layer");
  }
  model.set_layers(std::move(layers));
  return model;
}

EncoderModel read_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return parse_model(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace angmetric
