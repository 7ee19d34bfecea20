#include "edt/cli.hpp"

#include "edt/analysis.hpp"
#include "edt/dataset.hpp"
#include "edt/error.hpp"
#include "edt/report.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace edt::cli {

namespace fs = std::filesystem;

namespace {

auto read_initial_gamma(fs::path const& path, Eigen::Index genes) -> Vector
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Io, "cannot open initial gamma file '" + path.string() + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto text = buffer.str();
    std::replace(text.begin(), text.end(), ',', ' ');
    std::istringstream tokens(text);
    std::vector<double> values;
    std::string token;
    while (tokens >> token) {
        char* end = nullptr;
        double const v = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size()) {
            throw Error(ErrorKind::Parse, "initial gamma file '" + path.string() + "': not a number: '" + token + "'");
        }
        values.push_back(v);
    }
    if (static_cast<Eigen::Index>(values.size()) != genes) {
        throw Error(ErrorKind::Dimension, "initial gamma file '" + path.string() + "' has " + std::to_string(values.size())
                + " values, expected " + std::to_string(genes) + " (one per gene after sanitizing)");
    }
    return Eigen::Map<Vector>(values.data(), genes);
}

struct Prepared {
    Game game;
    RunResult result;
    std::optional<MultiStartResult> multistart;
};

auto load_game(RunManifest const& manifest) -> Game
{
    auto const schema = load_schema_file(manifest.schema.string());
    auto const raw = load_table_file(manifest.input.string(), schema);
    return Game(sanitize(normalize(raw, schema)), manifest.norm);
}

auto solve(RunManifest const& manifest, bool record) -> Prepared
{
    Prepared p {load_game(manifest), {}, std::nullopt};
    auto const& game = p.game;
    auto config = manifest.engine;
    config.record_trajectory = record;
    if (manifest.init_file) {
        config.initial_gamma = read_initial_gamma(*manifest.init_file, game.genes());
    }

    switch (manifest.method) {
    case Method::Iterated:
        p.result = run(game, manifest.strategy, config);
        break;
    case Method::ClosedForm:
        p.result.rest_point = dombal_rest_point(game.moments());
        break;
    case Method::Lv: {
        auto lv = lv_rest_point(game.dombal_payoff());
        if (!lv) {
            throw Error(ErrorKind::Degenerate, "no interior Lotka-Volterra rest point: " + lv_fixed_point(game.dombal_payoff()).diagnostic);
        }
        p.result.rest_point = *lv;
        break;
    }
    }
    if (manifest.starts > 1) {
        auto const starts = random_interior_starts(game.genes(), manifest.starts, manifest.seed);
        p.multistart = run_multistart(game, manifest.strategy, config, starts);
    }
    return p;
}

auto base_report(RunManifest const& manifest, Prepared const& p) -> nlohmann::json
{
    auto const& genes = p.game.phi().column_labels();
    nlohmann::json j;
    j["strategy"] = to_string(manifest.strategy.kind);
    if (manifest.strategy.kind == StrategyKind::Mixed) {
        j["mix"] = to_string(manifest.strategy.mix);
    }
    j["kinship_norm"] = to_string(manifest.norm);
    j["step_size"] = manifest.engine.step_size;
    j["max_iterations"] = manifest.engine.max_iterations;
    j["tolerance"] = manifest.engine.convergence_tolerance;
    j["rest_point"] = to_json(p.result.rest_point, genes);
    auto const& prov = p.game.phi().provenance();
    j["provenance"] = {{"removed_constant", prov.removed_constant}, {"merged", prov.merged}};
    if (p.multistart) {
        auto starts = nlohmann::json::array();
        for (auto const& r : p.multistart->rest_points) {
            starts.push_back(to_json(r, genes));
        }
        j["multistart"] = {{"seed", manifest.seed},
            {"runs", starts},
            {"all_converged", p.multistart->all_converged},
            {"max_disagreement", p.multistart->max_disagreement},
            {"anomaly", p.multistart->anomaly}};
    }
    return j;
}

void write_json(fs::path const& path, nlohmann::json const& j) { write_file_atomic(path, j.dump(2) + "\n"); }

auto report_convergence(Prepared const& p, std::ostream& out) -> int
{
    auto const& rest = p.result.rest_point;
    if (rest.converged) {
        return kExitConverged;
    }
    out << "not converged after " << rest.iterations << " iterations (tail: " << to_string(rest.tail)
        << ", residual " << format_number(rest.bc_residual) << ")\n";
    return kExitNotConverged;
}

void print_gamma(Prepared const& p, std::ostream& out)
{
    auto const& genes = p.game.phi().column_labels();
    auto const& gamma = p.result.rest_point.gamma;
    for (Eigen::Index j = 0; j < gamma.size(); ++j) {
        out << "  " << genes[static_cast<std::size_t>(j)] << ": " << format_number(gamma(j)) << '\n';
    }
}

void add_common_options(CLI::App& cmd, RunManifest& manifest, std::string& strategy, std::string& mix, std::string& init,
    std::string& norm, std::string& method, std::string& out_dir)
{
    cmd.set_help_flag("--help", "print this help and exit"); // -h would clash with --h
    cmd.add_option("--input", manifest.input, "CSV table with a header row")->required();
    cmd.add_option("--schema", manifest.schema, "column schema sidecar (name = direct|inverse|label)")->required();
    cmd.add_option("--strategy", strategy, "dombal, altsel or mixed")->capture_default_str();
    cmd.add_option("--mix", mix, "mixing weights, e.g. g:dom=0.5,w:bal=0.5 (strategy=mixed)");
    cmd.add_option("--h", manifest.engine.step_size, "replicator step size in (0,1)")->capture_default_str();
    cmd.add_option("--max-iter", manifest.engine.max_iterations, "iteration budget")->capture_default_str();
    cmd.add_option("--tol", manifest.engine.convergence_tolerance, "tolerance on max |gamma' - gamma|")->capture_default_str();
    cmd.add_option("--init", init, "'uniform' or a file with one starting weight per gene")->capture_default_str();
    cmd.add_option("--norm", norm, "kinship norm: l1 or l2")->capture_default_str();
    cmd.add_option("--method", method, "iterated, closed-form or lv (closed-form and lv need dombal)")->capture_default_str();
    cmd.add_option("--out", out_dir, std::string("output directory (default $") + kOutputDirEnv + " or ./edt_out)");
    cmd.add_flag("--export-trajectory", manifest.export_trajectory, "also write trajectory.csv");
    cmd.add_option("--starts", manifest.starts, "number of random interior starts for a uniqueness check")->capture_default_str();
    cmd.add_option("--seed", manifest.seed, "seed for the random starts")->capture_default_str();
}

} // namespace

void RunManifest::validate() const
{
    for (auto const* path : {&input, &schema}) {
        std::ifstream probe(*path);
        if (!probe) {
            throw Error(ErrorKind::Io, "cannot read '" + path->string() + "'");
        }
    }
    if (init_file) {
        std::ifstream probe(*init_file);
        if (!probe) {
            throw Error(ErrorKind::Io, "cannot read '" + init_file->string() + "'");
        }
    }
    if (strategy.kind == StrategyKind::Mixed) {
        strategy.mix.validate();
    }
    if ((method == Method::ClosedForm || method == Method::Lv) && strategy.kind != StrategyKind::DomBal) {
        throw Error(ErrorKind::Config, "closed-form and lv methods exist only for the dombal strategy");
    }
    if (starts < 1) {
        throw Error(ErrorKind::Config, "--starts must be at least 1");
    }
    if (output_dir.empty()) {
        throw Error(ErrorKind::Config, "no output directory");
    }
}

auto cmd_run(RunManifest const& manifest, std::ostream& out) -> int
{
    manifest.validate();
    auto const p = solve(manifest, true);
    auto const& genes = p.game.phi().column_labels();
    fs::create_directories(manifest.output_dir);

    auto const persistence = persistence_report(p.result.trajectory, p.result.rest_point);
    auto report = base_report(manifest, p);
    report["persistence"] = to_json(persistence, genes);
    write_json(manifest.output_dir / "restpoint.json", report);
    write_file_atomic(manifest.output_dir / "trajectory.csv", trajectory_csv(p.result.trajectory, genes));
    write_file_atomic(manifest.output_dir / "persistence.csv", persistence_csv(persistence, genes));

    auto const& rest = p.result.rest_point;
    out << to_string(manifest.strategy.kind) << " rest point (" << to_string(rest.method) << ", " << rest.iterations
        << " iterations, residual " << format_number(rest.bc_residual) << ")\n";
    print_gamma(p, out);
    if (p.multistart && p.multistart->anomaly) {
        out << "warning: random starts disagree by " << format_number(p.multistart->max_disagreement) << '\n';
    }
    if (!persistence.persistent) {
        out << "warning: some genes fell below the persistence threshold\n";
    }
    return report_convergence(p, out);
}

auto cmd_rank(RunManifest const& manifest, Axis axis, std::ostream& out) -> int
{
    manifest.validate();
    auto const p = solve(manifest, manifest.export_trajectory);
    auto const& genes = p.game.phi().column_labels();
    fs::create_directories(manifest.output_dir);
    auto report = base_report(manifest, p);
    if (manifest.export_trajectory) {
        write_file_atomic(manifest.output_dir / "trajectory.csv", trajectory_csv(p.result.trajectory, genes));
    }
    if (!p.result.rest_point.converged) {
        write_json(manifest.output_dir / "restpoint.json", report);
        return report_convergence(p, out);
    }
    auto const ranking = axis == Axis::Genes ? rank_genes(p.result.rest_point, genes) : rank_organisms(p.result.rest_point, p.game.phi());
    auto const name = axis == Axis::Genes ? std::string("genes") : std::string("organisms");
    report["axis"] = name;
    report["ranking"] = to_json(ranking);
    write_file_atomic(manifest.output_dir / ("ranking_" + name + ".csv"), ranking_csv(ranking));
    write_json(manifest.output_dir / ("ranking_" + name + ".json"), report);
    for (auto const& e : ranking.entries) {
        out << e.rank << ". " << e.label << " " << format_number(e.score) << '\n';
    }
    return kExitConverged;
}

auto cmd_distribute(RunManifest const& manifest, std::ostream& out) -> int
{
    manifest.validate();
    auto const p = solve(manifest, manifest.export_trajectory);
    auto const& genes = p.game.phi().column_labels();
    fs::create_directories(manifest.output_dir);
    auto report = base_report(manifest, p);
    if (manifest.export_trajectory) {
        write_file_atomic(manifest.output_dir / "trajectory.csv", trajectory_csv(p.result.trajectory, genes));
    }
    if (!p.result.rest_point.converged) {
        write_json(manifest.output_dir / "restpoint.json", report);
        return report_convergence(p, out);
    }
    auto const plan = distribution(p.result.rest_point, p.game.phi());
    report["distribution"] = to_json(plan);
    write_file_atomic(manifest.output_dir / "distribution.csv", distribution_csv(plan));
    write_json(manifest.output_dir / "distribution.json", report);
    for (std::size_t i = 0; i < plan.labels.size(); ++i) {
        auto const k = static_cast<Eigen::Index>(i);
        out << plan.labels[i] << " share " << format_number(plan.shares(k)) << " deviation " << format_number(plan.deviations(k)) << '\n';
    }
    return kExitConverged;
}

auto cmd_payoff(RunManifest const& manifest, std::ostream& out) -> int
{
    manifest.validate();
    auto const game = load_game(manifest);
    auto const& genes = game.phi().column_labels();
    bool const linear = manifest.strategy.kind != StrategyKind::AltSel;
    bool const altsel = manifest.strategy.kind != StrategyKind::DomBal;
    // Build first so nothing is written for degenerate data.
    PayoffBundle const* bundle = altsel ? &game.payoff() : nullptr;
    fs::create_directories(manifest.output_dir);
    if (linear) {
        write_file_atomic(manifest.output_dir / "payoff_A.csv", matrix_csv(game.dombal_payoff(), genes));
        out << "wrote payoff_A.csv\n";
    }
    if (bundle != nullptr) {
        write_file_atomic(manifest.output_dir / "payoff_Dg.csv", matrix_csv(bundle->gene, genes));
        write_file_atomic(manifest.output_dir / "payoff_Dw.csv", matrix_csv(bundle->organism, genes));
        write_file_atomic(manifest.output_dir / "payoff_D.csv", matrix_csv(bundle->combined, genes));
        out << "wrote payoff_Dg.csv payoff_Dw.csv payoff_D.csv (rank D = " << rank_of(bundle->combined) << " of " << game.genes() << ")\n";
        if (rank_of(bundle->combined) < game.genes()) {
            out << "warning: D is rank deficient; uniqueness of the AltSel rest point is not guaranteed\n";
        }
    }
    return kExitConverged;
}

auto main(int argc, char const* const* argv, std::ostream& out, std::ostream& err) -> int
{
    CLI::App app {"Evolutionary data analysis: replicator dynamics on tabular data"};
    app.require_subcommand(1);

    RunManifest manifest;
    std::string strategy = "dombal";
    std::string mix;
    std::string init = "uniform";
    std::string norm = to_string(kDefaultKinshipNorm);
    std::string method = "iterated";
    std::string out_dir;
    std::string axis = "genes";

    auto* run_cmd = app.add_subcommand("run", "iterate to a rest point; write restpoint.json, trajectory.csv, persistence.csv");
    auto* rank_cmd = app.add_subcommand("rank", "rank genes or organisms at the rest point");
    auto* dist_cmd = app.add_subcommand("distribute", "delivery shares and deviations from the uniform rate");
    auto* payoff_cmd = app.add_subcommand("payoff", "export payoff matrices as CSV");
    for (auto* cmd : {run_cmd, rank_cmd, dist_cmd, payoff_cmd}) {
        add_common_options(*cmd, manifest, strategy, mix, init, norm, method, out_dir);
    }
    rank_cmd->add_option("--axis", axis, "genes or organisms")->check(CLI::IsMember({"genes", "organisms"}))->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int const code = app.exit(e, out, err);
        return code == 0 ? kExitConverged : kExitError;
    }

    try {
        manifest.strategy.kind = parse_strategy_kind(strategy);
        if (manifest.strategy.kind == StrategyKind::AltSel) {
            manifest.strategy.mix = StrategyMix::altsel();
        }
        if (!mix.empty()) {
            if (manifest.strategy.kind != StrategyKind::Mixed) {
                throw Error(ErrorKind::Config, "--mix requires --strategy mixed");
            }
            manifest.strategy.mix = parse_mix(mix);
        } else if (manifest.strategy.kind == StrategyKind::Mixed) {
            throw Error(ErrorKind::Config, "--strategy mixed requires --mix");
        }
        if (init != "uniform") {
            manifest.init_file = init;
        }
        manifest.norm = parse_kinship_norm(norm);
        if (method == "iterated") {
            manifest.method = Method::Iterated;
        } else if (method == "closed-form") {
            manifest.method = Method::ClosedForm;
        } else if (method == "lv") {
            manifest.method = Method::Lv;
        } else {
            throw Error(ErrorKind::Config, "unknown method '" + method + "'");
        }
        if (out_dir.empty()) {
            char const* env = std::getenv(kOutputDirEnv);
            out_dir = env != nullptr && *env != '\0' ? env : "edt_out";
        }
        manifest.output_dir = out_dir;

        if (run_cmd->parsed()) {
            return cmd_run(manifest, out);
        }
        if (rank_cmd->parsed()) {
            return cmd_rank(manifest, axis == "genes" ? Axis::Genes : Axis::Organisms, out);
        }
        if (dist_cmd->parsed()) {
            return cmd_distribute(manifest, out);
        }
        return cmd_payoff(manifest, out);
    } catch (Error const& e) {
        err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return kExitError;
    } catch (std::exception const& e) {
        err << "error: " << e.what() << '\n';
        return kExitError;
    }
}

} // namespace edt::cli
