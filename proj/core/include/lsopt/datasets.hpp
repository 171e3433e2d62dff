#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lsopt/errors.hpp"
#include "lsopt/types.hpp"

namespace lsopt {

/// Sparse design matrix with binary labels. Feature indices are 1-based in
/// files (the usual sparse text convention) and 0-based here; conversion
/// happens at the parse boundary only. Indices within a row are strictly
/// increasing.
struct SparseDataset {
    std::vector<std::vector<std::pair<int, double>>> rows;
    std::vector<double> labels; // normalized to {0,1}
    int n = 0;
    int d = 0;
};

/// Parses `label idx:val idx:val ...` lines. Labels -1/+1 map to 0/1 and
/// 0/1 pass through; anything else is rejected. Throws ParseError with the
/// offending line number on malformed tokens or nonincreasing indices.
SparseDataset parse_libsvm(std::istream& in);

/// Inverse of parse_libsvm; values are written with 17 significant digits so
/// a parse of the output reproduces the dataset bit-exactly.
void serialize_libsvm(const SparseDataset& dataset, std::ostream& out);

SparseDataset load_libsvm_file(const std::string& path);

SparseMatrix to_sparse_matrix(const SparseDataset& dataset);
Vector labels_vector(const SparseDataset& dataset);

struct LogisticSynthesis {
    SparseDataset data;
    Vector planted_weights;
};

/// Gaussian features with labels drawn from the logistic model at the
/// planted weights (scaled by weight_scale). Pure function of its arguments.
LogisticSynthesis synth_logistic(int n, int d, std::uint64_t seed, double weight_scale = 1.0);

struct LinearInverseSynthesis {
    Matrix A;
    Vector y;
    Vector planted_signal;
};

/// Gaussian sensing matrix, a planted signal with `sparsity` nonzeros, and
/// measurements y = A x* + noise * eps with standard Gaussian eps.
LinearInverseSynthesis synth_linear_inverse(int n, int d, int sparsity, double noise,
                                            std::uint64_t seed);

/// Sparse nonnegative integer matrix resembling a ratings table: each entry
/// is 0 with probability 1 - density, otherwise uniform in {1,...,5}.
Matrix synth_ratings_matrix(int m, int n, double density, std::uint64_t seed);

/// Comma-delimited dense matrix, one row per line.
Matrix parse_dense_csv(std::istream& in);
void serialize_dense_csv(const Matrix& A, std::ostream& out);

/// Names accepted by the synthetic-instance registry.
const std::vector<std::string>& registered_synthetic_datasets();
bool is_registered_dataset(const std::string& name);

/// Directory that relative dataset paths resolve against: the explicit
/// override when nonempty, else $LSOPT_DATA_DIR, else the current directory.
std::string resolve_data_dir(const std::string& override_dir);

/// Joins `data_dir` and `name` unless `name` is already absolute.
std::string resolve_dataset_path(const std::string& name, const std::string& data_dir);

} // namespace lsopt
