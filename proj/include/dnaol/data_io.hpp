#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "dnaol/train.hpp"

namespace dnaol {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! CSV with one sample per row; an optional non-numeric header row is
//! skipped.  Returns samples as columns (n x N).  Ragged or non-numeric
//! rows raise ParseError naming the line.
Matrix load_matrix_csv(const std::string& path);

//! "DNAM" | u32 rows | u32 cols | row-major float64 (little endian), one
//! sample per row.  Truncation raises ParseError with the byte offset.
Matrix load_matrix_binary(const std::string& path);

//! Sniffs the magic bytes and dispatches to the CSV or binary loader.
Matrix load_matrix(const std::string& path);

void save_matrix_csv(const std::string& path, const Matrix& X);
void save_matrix_binary(const std::string& path, const Matrix& X);

//! One integer label per line.
std::vector<int> load_labels(const std::string& path);
void save_labels(const std::string& path, const std::vector<int>& labels);

struct NormalizeResult {
  Matrix X;
  int zero_columns = 0;  // columns left untouched because their norm is 0
};

//! Rescale every column to unit Euclidean norm.
NormalizeResult normalize_unit_l2(const Matrix& X);

struct SyntheticDataset {
  Matrix X;                 // dim x (classes * per_class)
  std::vector<int> labels;  // grouped by class
  Matrix means;             // dim x classes
};

//! Gaussian blobs: class means drawn uniformly on the sphere of radius
//! `separation`, samples mean + noise * N(0, I).
SyntheticDataset gen_synthetic(int classes, int per_class, int dim,
                               double separation, double noise,
                               std::uint64_t seed);

struct SplitResult {
  Matrix train_X;
  std::vector<int> train_labels;
  Matrix test_X;
  std::vector<int> test_labels;
  std::vector<int> train_index;  // column indices into the original X
  std::vector<int> test_index;
};

//! Random per-class split taking train_per_class samples per class for
//! training; errors if any class is smaller than that.
SplitResult split_train_test(const Matrix& X, const std::vector<int>& labels,
                             int train_per_class, std::uint64_t seed);

using TrainedModel = std::variant<SepModel, NonSepModel>;

//! "DNMO" | u32 version | u8 scheme | hyperparameters | model blocks.
//! Round trips are bitwise exact.
void save_model(const std::string& path, const TrainedModel& model,
                const HyperParams& hp);

struct LoadedModel {
  TrainedModel model;
  HyperParams hp;
};

LoadedModel load_model(const std::string& path);

}  // namespace dnaol
