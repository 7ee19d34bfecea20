#include "edt/report.hpp"

#include "edt/error.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace edt {

namespace {

auto csv_field(std::string const& text) -> std::string
{
    if (text.find_first_of(",\"\n") == std::string::npos) {
        return text;
    }
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') {
            quoted += '"';
        }
        quoted += c;
    }
    return quoted + '"';
}

auto to_array(Vector const& v) -> nlohmann::json
{
    auto out = nlohmann::json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        out.push_back(v(k));
    }
    return out;
}

} // namespace

auto format_number(double value) -> std::string
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", value == 0.0 ? 0.0 : value); // no "-0"
    return buf;
}

void write_file_atomic(std::filesystem::path const& path, std::string const& contents)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorKind::Io, "cannot write '" + tmp.string() + "'");
        }
        out << contents;
        out.flush();
        if (!out) {
            throw Error(ErrorKind::Io, "failed writing '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorKind::Io, "cannot move '" + tmp.string() + "' to '" + path.string() + "'");
    }
}

auto matrix_csv(Matrix const& m, Labels const& labels) -> std::string
{
    if (static_cast<Eigen::Index>(labels.size()) != m.rows() || m.rows() != m.cols()) {
        throw Error(ErrorKind::Dimension, "matrix_csv: expected a square matrix with one label per row");
    }
    std::ostringstream out;
    out << "gene";
    for (auto const& l : labels) {
        out << ',' << csv_field(l);
    }
    out << '\n';
    for (Eigen::Index j = 0; j < m.rows(); ++j) {
        out << csv_field(labels[static_cast<std::size_t>(j)]);
        for (Eigen::Index l = 0; l < m.cols(); ++l) {
            out << ',' << format_number(m(j, l));
        }
        out << '\n';
    }
    return out.str();
}

auto trajectory_csv(Trajectory const& trajectory, Labels const& genes) -> std::string
{
    std::ostringstream out;
    out << "iteration,gene,gamma\n";
    for (auto const& it : trajectory.iterates) {
        for (Eigen::Index j = 0; j < it.gamma.size(); ++j) {
            out << it.iteration << ',' << csv_field(genes[static_cast<std::size_t>(j)]) << ',' << format_number(it.gamma(j)) << '\n';
        }
    }
    return out.str();
}

auto ranking_csv(Ranking const& ranking) -> std::string
{
    std::ostringstream out;
    out << "label,score,rank\n";
    for (auto const& e : ranking.entries) {
        out << csv_field(e.label) << ',' << format_number(e.score) << ',' << e.rank << '\n';
    }
    return out.str();
}

auto distribution_csv(DistributionPlan const& plan) -> std::string
{
    auto const ranking = rank_scores(plan.shares, plan.labels);
    std::vector<int> rank_of(plan.labels.size());
    for (auto const& e : ranking.entries) {
        rank_of[static_cast<std::size_t>(e.index)] = e.rank;
    }
    std::ostringstream out;
    out << "label,share,deviation,rank\n";
    for (std::size_t i = 0; i < plan.labels.size(); ++i) {
        auto const k = static_cast<Eigen::Index>(i);
        out << csv_field(plan.labels[i]) << ',' << format_number(plan.shares(k)) << ',' << format_number(plan.deviations(k)) << ','
            << rank_of[i] << '\n';
    }
    return out.str();
}

auto persistence_csv(PersistenceReport const& report, Labels const& genes) -> std::string
{
    std::ostringstream out;
    out << "gene,min_gamma,final_gamma,persistent\n";
    for (Eigen::Index j = 0; j < report.final_gamma.size(); ++j) {
        out << csv_field(genes[static_cast<std::size_t>(j)]) << ',' << format_number(report.min_gamma_seen(j)) << ','
            << format_number(report.final_gamma(j)) << ',' << (report.final_gamma(j) > report.threshold ? "true" : "false") << '\n';
    }
    return out.str();
}

auto to_json(RestPoint const& rest, Labels const& genes) -> nlohmann::json
{
    nlohmann::json j;
    j["genes"] = genes;
    j["gamma"] = to_array(rest.gamma);
    j["bc_residual"] = rest.bc_residual;
    j["iterations"] = rest.iterations;
    j["converged"] = rest.converged;
    j["method"] = to_string(rest.method);
    j["tail"] = to_string(rest.tail);
    j["step_halvings"] = rest.step_halvings;
    j["persistent"] = rest.persistent();
    return j;
}

auto to_json(Ranking const& ranking) -> nlohmann::json
{
    nlohmann::json j;
    j["tie_policy"] = ranking.tie_policy;
    auto entries = nlohmann::json::array();
    for (auto const& e : ranking.entries) {
        entries.push_back({{"label", e.label}, {"score", e.score}, {"rank", e.rank}, {"index", e.index}});
    }
    j["entries"] = entries;
    return j;
}

auto to_json(DistributionPlan const& plan) -> nlohmann::json
{
    nlohmann::json j;
    j["labels"] = plan.labels;
    j["shares"] = to_array(plan.shares);
    j["deviations"] = to_array(plan.deviations);
    return j;
}

auto to_json(PersistenceReport const& report, Labels const& genes) -> nlohmann::json
{
    nlohmann::json j;
    j["genes"] = genes;
    j["min_gamma_seen"] = to_array(report.min_gamma_seen);
    j["final_gamma"] = to_array(report.final_gamma);
    j["persistent"] = report.persistent;
    j["threshold"] = report.threshold;
    return j;
}

} // namespace edt
