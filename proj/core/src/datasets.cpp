#include "lsopt/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

namespace lsopt {

namespace {

bool parse_int(const std::string& token, int& out) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

bool parse_double(const std::string& token, double& out) {
    if (token.empty()) return false;
    char* end = nullptr;
    out = std::strtod(token.c_str(), &end);
    return end == token.c_str() + token.size();
}

void format_value(char* buf, std::size_t size, double v) {
    std::snprintf(buf, size, "%.17g", v);
}

} // namespace

SparseDataset parse_libsvm(std::istream& in) {
    SparseDataset dataset;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        std::istringstream tokens(line);
        std::string token;
        if (!(tokens >> token)) continue; // blank line

        double raw_label;
        if (!parse_double(token, raw_label))
            throw ParseError(line_number, "label is not numeric: '" + token + "'");
        double label;
        if (raw_label == -1.0 || raw_label == 0.0)
            label = 0.0;
        else if (raw_label == 1.0)
            label = 1.0;
        else
            throw ParseError(line_number, "label must be -1, 0 or 1");

        std::vector<std::pair<int, double>> row;
        int previous_index = 0;
        while (tokens >> token) {
            const auto colon = token.find(':');
            if (colon == std::string::npos)
                throw ParseError(line_number, "expected idx:val, got '" + token + "'");
            int index;
            double value;
            if (!parse_int(token.substr(0, colon), index) || index < 1)
                throw ParseError(line_number, "feature index must be a positive integer");
            if (!parse_double(token.substr(colon + 1), value))
                throw ParseError(line_number, "feature value is not numeric");
            if (index <= previous_index)
                throw ParseError(line_number, "feature indices must be strictly increasing");
            previous_index = index;
            row.emplace_back(index - 1, value);
            dataset.d = std::max(dataset.d, index);
        }
        dataset.rows.push_back(std::move(row));
        dataset.labels.push_back(label);
    }
    dataset.n = static_cast<int>(dataset.rows.size());
    return dataset;
}

void serialize_libsvm(const SparseDataset& dataset, std::ostream& out) {
    char buf[64];
    for (int i = 0; i < dataset.n; ++i) {
        out << (dataset.labels[i] == 1.0 ? '1' : '0');
        for (const auto& [index, value] : dataset.rows[i]) {
            format_value(buf, sizeof buf, value);
            out << ' ' << (index + 1) << ':' << buf;
        }
        out << '\n';
    }
}

SparseDataset load_libsvm_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    return parse_libsvm(in);
}

SparseMatrix to_sparse_matrix(const SparseDataset& dataset) {
    std::vector<Eigen::Triplet<double>> triplets;
    for (int i = 0; i < dataset.n; ++i)
        for (const auto& [index, value] : dataset.rows[i])
            triplets.emplace_back(i, index, value);
    SparseMatrix A(dataset.n, dataset.d);
    A.setFromTriplets(triplets.begin(), triplets.end());
    return A;
}

Vector labels_vector(const SparseDataset& dataset) {
    Vector y(dataset.n);
    for (int i = 0; i < dataset.n; ++i) y[i] = dataset.labels[i];
    return y;
}

LogisticSynthesis synth_logistic(int n, int d, std::uint64_t seed, double weight_scale) {
    if (n < 1 || d < 1) throw std::invalid_argument("n and d must be at least 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    LogisticSynthesis out;
    out.planted_weights = Vector(d);
    for (int j = 0; j < d; ++j) out.planted_weights[j] = weight_scale * normal(rng);

    out.data.n = n;
    out.data.d = d;
    out.data.rows.resize(n);
    out.data.labels.resize(n);
    for (int i = 0; i < n; ++i) {
        auto& row = out.data.rows[i];
        row.reserve(d);
        double z = 0.0;
        for (int j = 0; j < d; ++j) {
            const double value = normal(rng);
            row.emplace_back(j, value);
            z += value * out.planted_weights[j];
        }
        const double probability = 1.0 / (1.0 + std::exp(-z));
        out.data.labels[i] = uniform(rng) < probability ? 1.0 : 0.0;
    }
    return out;
}

LinearInverseSynthesis synth_linear_inverse(int n, int d, int sparsity, double noise,
                                            std::uint64_t seed) {
    if (n < 1 || d < 1) throw std::invalid_argument("n and d must be at least 1");
    if (sparsity < 0 || sparsity > d) throw std::invalid_argument("sparsity must lie in [0, d]");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    LinearInverseSynthesis out;
    out.A = Matrix(n, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) out.A(i, j) = normal(rng);

    // Partial Fisher-Yates selects the support.
    std::vector<int> indices(d);
    for (int j = 0; j < d; ++j) indices[j] = j;
    out.planted_signal = Vector::Zero(d);
    for (int k = 0; k < sparsity; ++k) {
        std::uniform_int_distribution<int> pick(k, d - 1);
        std::swap(indices[k], indices[pick(rng)]);
        out.planted_signal[indices[k]] = normal(rng);
    }

    out.y = out.A * out.planted_signal;
    if (noise != 0.0)
        for (int i = 0; i < n; ++i) out.y[i] += noise * normal(rng);
    return out;
}

Matrix synth_ratings_matrix(int m, int n, double density, std::uint64_t seed) {
    if (m < 1 || n < 1) throw std::invalid_argument("m and n must be at least 1");
    if (!(density >= 0.0 && density <= 1.0))
        throw std::invalid_argument("density must lie in [0,1]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::uniform_int_distribution<int> rating(1, 5);

    Matrix A = Matrix::Zero(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            if (uniform(rng) < density) A(i, j) = double(rating(rng));
    return A;
}

Matrix parse_dense_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_number = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            double value;
            if (!parse_double(cell, value))
                throw ParseError(line_number, "cell is not numeric: '" + cell + "'");
            row.push_back(value);
        }
        if (width == 0) width = row.size();
        if (row.size() != width)
            throw ParseError(line_number, "inconsistent column count");
        rows.push_back(std::move(row));
    }
    Matrix A(rows.size(), width);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < width; ++j) A(Eigen::Index(i), Eigen::Index(j)) = rows[i][j];
    return A;
}

void serialize_dense_csv(const Matrix& A, std::ostream& out) {
    char buf[64];
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            format_value(buf, sizeof buf, A(i, j));
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

const std::vector<std::string>& registered_synthetic_datasets() {
    static const std::vector<std::string> names = {"synth_logistic", "synth_lasso",
                                                   "synth_ratings"};
    return names;
}

bool is_registered_dataset(const std::string& name) {
    const auto& names = registered_synthetic_datasets();
    return std::find(names.begin(), names.end(), name) != names.end();
}

std::string resolve_data_dir(const std::string& override_dir) {
    if (!override_dir.empty()) return override_dir;
    if (const char* env = std::getenv("LSOPT_DATA_DIR")) return env;
    return ".";
}

std::string resolve_dataset_path(const std::string& name, const std::string& data_dir) {
    if (!name.empty() && name.front() == '/') return name;
    return data_dir + "/" + name;
}

} // namespace lsopt
