#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "taldiag/dataset.hpp"
#include "taldiag/types.hpp"

namespace taldiag {

/// Malformed JSON. `byte_offset` points at the offending byte.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string file, std::size_t byte_offset, const std::string& detail);
  const std::string& file() const { return file_; }
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::string file_;
  std::size_t byte_offset_ = 0;
};

/// Well-formed JSON of the wrong shape. `field_path` names the violating
/// field, e.g. "database/v_abc/annotations/2/segment".
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string file, std::string field_path, const std::string& detail);
  const std::string& file() const { return file_; }
  const std::string& field_path() const { return field_path_; }

 private:
  std::string file_;
  std::string field_path_;
};

/// Invariant violations in otherwise well-formed input.
class ValidationFailure : public std::runtime_error {
 public:
  explicit ValidationFailure(std::vector<ValidationIssue> issues);
  const std::vector<ValidationIssue>& issues() const { return issues_; }

 private:
  std::vector<ValidationIssue> issues_;
};

struct GroundTruthLoad {
  Dataset dataset;
  std::vector<ValidationIssue> warnings;
};

/// Loads a ground-truth file: {"database": {video_id: {"duration": s,
/// "subset": tag, "annotations": [{"label": l, "segment": [a,b]}, ...]}}}.
/// `subset` keeps only videos carrying that tag. Throws ParseError,
/// SchemaError or ValidationFailure.
GroundTruthLoad load_ground_truth(const std::filesystem::path& path,
                                  const std::optional<std::string>& subset = std::nullopt);

struct PredictionsLoad {
  std::vector<Prediction> predictions;
  std::vector<ValidationIssue> warnings;
};

/// Loads a prediction file: {"results": {video_id: [{"label": l, "segment":
/// [a,b], "score": s}, ...]}}. Prediction ids follow file order. Predictions
/// on videos absent from the dataset are dropped with a warning; predictions
/// on known videos without ground truth are kept (background errors).
PredictionsLoad load_predictions(const std::filesystem::path& path, const Dataset& dataset);

/// Loads a characteristics file keyed by "<video_id>_<annotation_index>" and
/// merges it into the dataset profiles via derive_characteristics.
/// Returns the warnings; throws on errors.
std::vector<ValidationIssue> load_characteristics(const std::filesystem::path& path,
                                                  Dataset& dataset);

/// Instance key used by the characteristics file.
std::string characteristics_key(const std::string& video_id, std::size_t annotation_index);

}  // namespace taldiag
