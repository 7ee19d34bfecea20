#ifndef EDT_DATASET_HPP
#define EDT_DATASET_HPP

#include "edt/types.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace edt {

enum class Direction { Direct, Inverse };

struct ColumnSchema {
    std::string name;
    Direction direction = Direction::Direct;
};

// Column schema for a raw table. The optional label column holds row names
// and takes no part in the fitness matrix.
struct Schema {
    std::vector<ColumnSchema> columns;
    std::optional<std::string> label_column;

    [[nodiscard]] auto find(std::string const& name) const -> ColumnSchema const*;
};

// Parses the key-value sidecar format, one entry per line:
//
//   # comment
//   store    = label
//   distance = inverse
//   space    = direct
//
// ':' is accepted in place of '='.
auto parse_schema(std::istream& in) -> Schema;
auto load_schema_file(std::string const& path) -> Schema;

struct RawTable {
    Matrix values; // n x m_raw, columns in schema-declared order of the header
    Labels column_names;
    Labels row_labels;

    [[nodiscard]] auto rows() const -> Eigen::Index { return values.rows(); }
    [[nodiscard]] auto cols() const -> Eigen::Index { return values.cols(); }
};

// Reads a comma separated table with a header row. Every header column must be
// declared in the schema and vice versa.
auto load_table(std::istream& source, Schema const& schema) -> RawTable;
auto load_table_file(std::string const& path, Schema const& schema) -> RawTable;

struct Provenance {
    Labels removed_constant;
    std::vector<std::pair<std::string, std::string>> merged; // (kept, dropped)

    [[nodiscard]] auto empty() const -> bool { return removed_constant.empty() && merged.empty(); }
};

// The normalized probability matrix Phi with entries in [0,1], larger is fitter.
class FitnessMatrix {
public:
    // Validates shape, label counts and that all entries are finite and in [0,1].
    FitnessMatrix(Matrix values, Labels column_labels, Labels row_labels, Provenance provenance = {});

    // Convenience for generated data; labels default to g1..gm and o1..on.
    static auto from_values(Matrix values) -> FitnessMatrix;

    [[nodiscard]] auto values() const -> Matrix const& { return values_; }
    [[nodiscard]] auto column_labels() const -> Labels const& { return column_labels_; }
    [[nodiscard]] auto row_labels() const -> Labels const& { return row_labels_; }
    [[nodiscard]] auto provenance() const -> Provenance const& { return provenance_; }
    [[nodiscard]] auto organisms() const -> Eigen::Index { return values_.rows(); }
    [[nodiscard]] auto genes() const -> Eigen::Index { return values_.cols(); }

private:
    Matrix values_;
    Labels column_labels_;
    Labels row_labels_;
    Provenance provenance_;
};

// Per-column fitness function. Extension point for non-numeric genes; only the
// direct and inverse maps are built in.
using GeneFitness = std::function<double(double value, double column_max)>;

auto direct_fitness(double value, double column_max) -> double;  // x / max
auto inverse_fitness(double value, double column_max) -> double; // 1 - x / max

auto normalize(RawTable const& raw, Schema const& schema) -> FitnessMatrix;

// Removes constant columns and merges exact duplicates (first label is kept).
auto sanitize(FitnessMatrix const& phi) -> FitnessMatrix;

enum class DispersionNormalization {
    DistinctPairs, // mean of |a - b| over the k(k-1) ordered pairs with a != b
    AllPairs,      // (1/k^2) sum over all k^2 ordered pairs, self pairs included
};

struct Moments {
    Vector column_means;    // length m
    Matrix second_moments;  // m x m, (1/n) Phi^T Phi
    double gene_dispersion = 0.0;
    Vector harmonic_fitness; // length n, row means
    double organism_dispersion = 0.0;
};

auto compute_moments(FitnessMatrix const& phi,
    DispersionNormalization normalization = DispersionNormalization::DistinctPairs) -> Moments;

// Average absolute difference of the entries of v under the given normalization.
auto mean_absolute_difference(Vector const& v, DispersionNormalization normalization) -> double;

enum class KinshipNorm { L1, L2 };

// Default kinship norm. L2 is the norm that reproduces the supermarket
// reference payoff matrices (see README).
inline constexpr KinshipNorm kDefaultKinshipNorm = KinshipNorm::L2;

struct KinshipMatrices {
    Matrix gene;     // m x m, 1 - ||g_j - g_l|| / n
    Matrix organism; // n x n, 1 - ||w_i - w_t|| / m
    KinshipNorm norm = kDefaultKinshipNorm;
};

auto compute_kinship(FitnessMatrix const& phi, KinshipNorm norm = kDefaultKinshipNorm) -> KinshipMatrices;

auto to_string(Direction direction) -> std::string;
auto to_string(KinshipNorm norm) -> std::string;
auto parse_kinship_norm(std::string const& text) -> KinshipNorm;

} // namespace edt

#endif
