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

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "angmetric/dataset.hpp"
#include "angmetric/encoder.hpp"

namespace angmetric {

/// Decimal text with 17 significant digits; parses back to the same double.
std::string format_double(double v);

/// Feature file: optional `#` comment lines, then rows `label,v1,...,vD`.
struct FeatureFile {
  /// Comment text with the leading `#` and one following space removed.
  std::vector<std::string> comments;
  LabeledDataset data;
};

/// Throws ParseError naming the offending line.
FeatureFile parse_feature_file(std::istream& in);
std::string serialize_feature_file(const LabeledDataset& data,
                                   const std::vector<std::string>& comments = {});

/// Throws IoError when the file cannot be opened.
FeatureFile read_feature_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

/// Model file: a header line
///   angmetric-model kind=<k> input_dim=<n> embed_dim=<n> normalize=<0|1>
///   hidden_dim=<n>
/// followed, per layer, by the weight matrix one row per line and the bias
/// on one line, values space separated.
std::string serialize_model(const EncoderModel& model);
EncoderModel parse_model(std::istream& in);
EncoderModel read_model_file(const std::string& path);

}  // namespace angmetric
