#include "edt/dataset.hpp"

#include "edt/error.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

namespace edt {

namespace {

auto trim(std::string_view s) -> std::string
{
    auto const* ws = " \t\r\n";
    auto const first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) {
        return {};
    }
    auto const last = s.find_last_not_of(ws);
    return std::string(s.substr(first, last - first + 1));
}

// Splits one CSV record. Double quotes group fields and "" escapes a quote.
auto split_csv_line(std::string const& line, std::size_t line_number) -> std::vector<std::string>
{
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t k = 0; k < line.size(); ++k) {
        char const c = line[k];
        if (quoted) {
            if (c == '"') {
                if (k + 1 < line.size() && line[k + 1] == '"') {
                    field.push_back('"');
                    ++k;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(trim(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    if (quoted) {
        throw Error(ErrorKind::Parse, "line " + std::to_string(line_number) + ": unterminated quote");
    }
    fields.push_back(trim(field));
    return fields;
}

auto parse_number(std::string const& text, double& value) -> bool
{
    if (text.empty()) {
        return false;
    }
    char* end = nullptr;
    errno = 0;
    value = std::strtod(text.c_str(), &end);
    return errno == 0 && end == text.c_str() + text.size() && std::isfinite(value);
}

auto default_labels(std::string const& prefix, Eigen::Index count) -> Labels
{
    Labels labels;
    labels.reserve(static_cast<std::size_t>(count));
    for (Eigen::Index k = 0; k < count; ++k) {
        labels.push_back(prefix + std::to_string(k + 1));
    }
    return labels;
}

} // namespace

auto Schema::find(std::string const& name) const -> ColumnSchema const*
{
    auto it = std::find_if(columns.begin(), columns.end(), [&](auto const& c) { return c.name == name; });
    return it == columns.end() ? nullptr : &*it;
}

auto parse_schema(std::istream& in) -> Schema
{
    Schema schema;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        auto const body = trim(line.substr(0, line.find('#')));
        if (body.empty()) {
            continue;
        }
        auto const sep = body.find_first_of("=:");
        if (sep == std::string::npos) {
            throw Error(ErrorKind::Schema, "schema line " + std::to_string(line_number) + ": expected 'name = direct|inverse|label'");
        }
        auto name = trim(std::string_view(body).substr(0, sep));
        auto kind = trim(std::string_view(body).substr(sep + 1));
        std::transform(kind.begin(), kind.end(), kind.begin(), [](unsigned char c) { return std::tolower(c); });
        if (name.empty()) {
            throw Error(ErrorKind::Schema, "schema line " + std::to_string(line_number) + ": empty column name");
        }
        if (!seen.insert(name).second) {
            throw Error(ErrorKind::Schema, "schema line " + std::to_string(line_number) + ": column '" + name + "' declared twice");
        }
        if (kind == "label") {
            if (schema.label_column) {
                throw Error(ErrorKind::Schema, "schema line " + std::to_string(line_number) + ": more than one label column");
            }
            schema.label_column = name;
        } else if (kind == "direct") {
            schema.columns.push_back({name, Direction::Direct});
        } else if (kind == "inverse") {
            schema.columns.push_back({name, Direction::Inverse});
        } else {
            throw Error(ErrorKind::Schema, "schema line " + std::to_string(line_number) + ": unknown direction '" + kind + "' for column '" + name + "'");
        }
    }
    if (schema.columns.empty()) {
        throw Error(ErrorKind::Schema, "schema declares no data columns");
    }
    return schema;
}

auto load_schema_file(std::string const& path) -> Schema
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open schema file '" + path + "'");
    }
    return parse_schema(in);
}

auto load_table(std::istream& source, Schema const& schema) -> RawTable
{
    std::string line;
    std::size_t line_number = 0;
    std::vector<std::string> header;
    while (std::getline(source, line)) {
        ++line_number;
        if (!trim(line).empty()) {
            header = split_csv_line(line, line_number);
            break;
        }
    }
    if (header.empty()) {
        throw Error(ErrorKind::Parse, "empty table: no header row");
    }

    std::optional<std::size_t> label_index;
    std::vector<std::size_t> data_index;
    RawTable table;
    std::set<std::string> header_names;
    for (std::size_t k = 0; k < header.size(); ++k) {
        auto const& name = header[k];
        if (!header_names.insert(name).second) {
            throw Error(ErrorKind::Schema, "header column '" + name + "' appears twice");
        }
        if (schema.label_column && *schema.label_column == name) {
            label_index = k;
        } else if (schema.find(name) != nullptr) {
            data_index.push_back(k);
            table.column_names.push_back(name);
        } else {
            throw Error(ErrorKind::Schema, "header column '" + name + "' has no schema entry");
        }
    }
    for (auto const& c : schema.columns) {
        if (header_names.count(c.name) == 0) {
            throw Error(ErrorKind::Schema, "schema column '" + c.name + "' is missing from the header");
        }
    }
    if (schema.label_column && !label_index) {
        throw Error(ErrorKind::Schema, "label column '" + *schema.label_column + "' is missing from the header");
    }

    std::vector<std::vector<double>> rows;
    while (std::getline(source, line)) {
        ++line_number;
        if (trim(line).empty()) {
            continue;
        }
        auto fields = split_csv_line(line, line_number);
        if (fields.size() != header.size()) {
            throw Error(ErrorKind::Parse, "row " + std::to_string(rows.size() + 1) + " (line " + std::to_string(line_number) + "): expected "
                    + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
        }
        std::vector<double> row(data_index.size());
        for (std::size_t c = 0; c < data_index.size(); ++c) {
            auto const& cell = fields[data_index[c]];
            if (!parse_number(cell, row[c])) {
                throw Error(ErrorKind::Parse, "row " + std::to_string(rows.size() + 1) + " (line " + std::to_string(line_number) + "), column '"
                        + header[data_index[c]] + "': not a finite number: '" + cell + "'");
            }
        }
        table.row_labels.push_back(label_index ? fields[*label_index] : "row" + std::to_string(rows.size() + 1));
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) {
        throw Error(ErrorKind::Parse, "table needs at least 2 data rows, found " + std::to_string(rows.size()));
    }

    table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(data_index.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < data_index.size(); ++j) {
            table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return table;
}

auto load_table_file(std::string const& path, Schema const& schema) -> RawTable
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open input file '" + path + "'");
    }
    return load_table(in, schema);
}

FitnessMatrix::FitnessMatrix(Matrix values, Labels column_labels, Labels row_labels, Provenance provenance)
    : values_(std::move(values))
    , column_labels_(std::move(column_labels))
    , row_labels_(std::move(row_labels))
    , provenance_(std::move(provenance))
{
    if (values_.rows() < 1 || values_.cols() < 1) {
        throw Error(ErrorKind::Dimension, "fitness matrix must not be empty");
    }
    if (static_cast<Eigen::Index>(column_labels_.size()) != values_.cols()
        || static_cast<Eigen::Index>(row_labels_.size()) != values_.rows()) {
        throw Error(ErrorKind::Dimension, "fitness matrix label count does not match its shape");
    }
    for (Eigen::Index j = 0; j < values_.cols(); ++j) {
        for (Eigen::Index i = 0; i < values_.rows(); ++i) {
            double const v = values_(i, j);
            if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
                throw Error(ErrorKind::Domain, "fitness entry (" + row_labels_[static_cast<std::size_t>(i)] + ", "
                        + column_labels_[static_cast<std::size_t>(j)] + ") = " + std::to_string(v) + " is outside [0,1]");
            }
        }
    }
}

auto FitnessMatrix::from_values(Matrix values) -> FitnessMatrix
{
    auto cols = default_labels("g", values.cols());
    auto rows = default_labels("o", values.rows());
    return {std::move(values), std::move(cols), std::move(rows)};
}

auto direct_fitness(double value, double column_max) -> double { return value / column_max; }

auto inverse_fitness(double value, double column_max) -> double { return 1.0 - value / column_max; }

auto normalize(RawTable const& raw, Schema const& schema) -> FitnessMatrix
{
    Matrix phi(raw.rows(), raw.cols());
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
        auto const& name = raw.column_names[static_cast<std::size_t>(j)];
        auto const* column = schema.find(name);
        if (column == nullptr) {
            throw Error(ErrorKind::Schema, "column '" + name + "' has no schema entry");
        }
        auto const values = raw.values.col(j);
        for (Eigen::Index i = 0; i < raw.rows(); ++i) {
            if (values(i) < 0.0) {
                throw Error(ErrorKind::Domain, "column '" + name + "', row '" + raw.row_labels[static_cast<std::size_t>(i)]
                        + "': negative value " + std::to_string(values(i)));
            }
        }
        double const max = values.maxCoeff();
        if (max <= 0.0) {
            throw Error(ErrorKind::DegenerateColumn, "column '" + name + "' is all zero and cannot be normalized");
        }
        GeneFitness const fitness = column->direction == Direction::Direct ? GeneFitness(direct_fitness) : GeneFitness(inverse_fitness);
        for (Eigen::Index i = 0; i < raw.rows(); ++i) {
            phi(i, j) = std::clamp(fitness(values(i), max), 0.0, 1.0);
        }
    }
    return {std::move(phi), raw.column_names, raw.row_labels};
}

auto sanitize(FitnessMatrix const& phi) -> FitnessMatrix
{
    auto const& values = phi.values();
    auto const& labels = phi.column_labels();
    Provenance report = phi.provenance();
    std::vector<Eigen::Index> kept;
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
        auto const col = values.col(j);
        if ((col.array() == col(0)).all()) {
            report.removed_constant.push_back(labels[static_cast<std::size_t>(j)]);
            continue;
        }
        auto dup = std::find_if(kept.begin(), kept.end(), [&](Eigen::Index k) { return values.col(k) == col; });
        if (dup != kept.end()) {
            report.merged.emplace_back(labels[static_cast<std::size_t>(*dup)], labels[static_cast<std::size_t>(j)]);
            continue;
        }
        kept.push_back(j);
    }
    if (kept.size() < 2) {
        throw Error(ErrorKind::UnusableData, "only " + std::to_string(kept.size())
                + " informative column(s) remain after removing constant and duplicate columns; need at least 2");
    }
    if (values.rows() < 2) {
        throw Error(ErrorKind::UnusableData, "need at least 2 organisms");
    }
    Matrix out(values.rows(), static_cast<Eigen::Index>(kept.size()));
    Labels out_labels;
    for (std::size_t k = 0; k < kept.size(); ++k) {
        out.col(static_cast<Eigen::Index>(k)) = values.col(kept[k]);
        out_labels.push_back(labels[static_cast<std::size_t>(kept[k])]);
    }
    return {std::move(out), std::move(out_labels), phi.row_labels(), std::move(report)};
}

auto mean_absolute_difference(Vector const& v, DispersionNormalization normalization) -> double
{
    auto const k = v.size();
    if (k < 2) {
        return 0.0;
    }
    // sum_{a,b} |x_a - x_b| = 2 sum_k (2k - K + 1) x_(k) over the ascending order.
    std::vector<double> sorted(v.data(), v.data() + k);
    std::sort(sorted.begin(), sorted.end());
    double total = 0.0;
    for (Eigen::Index r = 0; r < k; ++r) {
        total += static_cast<double>(2 * r - k + 1) * sorted[static_cast<std::size_t>(r)];
    }
    total *= 2.0;
    auto const kd = static_cast<double>(k);
    double const pairs = normalization == DispersionNormalization::DistinctPairs ? kd * (kd - 1.0) : kd * kd;
    return std::max(0.0, total / pairs);
}

auto compute_moments(FitnessMatrix const& phi, DispersionNormalization normalization) -> Moments
{
    auto const& values = phi.values();
    auto const n = static_cast<double>(values.rows());
    Moments moments;
    moments.column_means = values.colwise().mean().transpose();
    Matrix xi = (values.transpose() * values) / n;
    moments.second_moments = xi.selfadjointView<Eigen::Upper>(); // exact symmetry
    moments.harmonic_fitness = values.rowwise().mean();
    moments.gene_dispersion = mean_absolute_difference(moments.column_means, normalization);
    moments.organism_dispersion = mean_absolute_difference(moments.harmonic_fitness, normalization);
    return moments;
}

namespace {

auto distance(Eigen::Ref<Vector const> const& a, Eigen::Ref<Vector const> const& b, KinshipNorm norm) -> double
{
    return norm == KinshipNorm::L1 ? (a - b).lpNorm<1>() : (a - b).norm();
}

} // namespace

auto compute_kinship(FitnessMatrix const& phi, KinshipNorm norm) -> KinshipMatrices
{
    auto const& values = phi.values();
    auto const n = values.rows();
    auto const m = values.cols();
    KinshipMatrices kin;
    kin.norm = norm;
    kin.gene = Matrix::Identity(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index l = j + 1; l < m; ++l) {
            double const k = 1.0 - distance(values.col(j), values.col(l), norm) / static_cast<double>(n);
            kin.gene(j, l) = k;
            kin.gene(l, j) = k;
        }
    }
    Matrix const rows = values.transpose();
    kin.organism = Matrix::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index t = i + 1; t < n; ++t) {
            double const k = 1.0 - distance(rows.col(i), rows.col(t), norm) / static_cast<double>(m);
            kin.organism(i, t) = k;
            kin.organism(t, i) = k;
        }
    }
    return kin;
}

auto to_string(Direction direction) -> std::string { return direction == Direction::Direct ? "direct" : "inverse"; }

auto to_string(KinshipNorm norm) -> std::string { return norm == KinshipNorm::L1 ? "l1" : "l2"; }

auto parse_kinship_norm(std::string const& text) -> KinshipNorm
{
    if (text == "l1" || text == "L1") {
        return KinshipNorm::L1;
    }
    if (text == "l2" || text == "L2") {
        return KinshipNorm::L2;
    }
    throw Error(ErrorKind::Config, "unknown kinship norm '" + text + "' (expected l1 or l2)");
}

} // namespace edt
