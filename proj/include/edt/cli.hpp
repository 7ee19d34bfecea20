#ifndef EDT_CLI_HPP
#define EDT_CLI_HPP

#include "edt/engine.hpp"
#include "edt/strategies.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace edt::cli {

inline constexpr int kExitConverged = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

// Environment variable naming the default output directory.
inline constexpr char const* kOutputDirEnv = "EDT_OUTPUT_DIR";

enum class Method { Iterated, ClosedForm, Lv };

struct RunManifest {
    std::filesystem::path input;
    std::filesystem::path schema;
    StrategySpec strategy;
    ReplicatorConfig engine;
    std::optional<std::filesystem::path> init_file;
    std::filesystem::path output_dir;
    bool export_trajectory = false;
    KinshipNorm norm = kDefaultKinshipNorm;
    Method method = Method::Iterated;
    int starts = 1;
    std::uint64_t seed = 0;

    // Throws ErrorKind::Config / ErrorKind::Io.
    void validate() const;
};

enum class Axis { Genes, Organisms };

auto cmd_run(RunManifest const& manifest, std::ostream& out) -> int;
auto cmd_rank(RunManifest const& manifest, Axis axis, std::ostream& out) -> int;
auto cmd_distribute(RunManifest const& manifest, std::ostream& out) -> int;
auto cmd_payoff(RunManifest const& manifest, std::ostream& out) -> int;

// Parses arguments and dispatches; errors go to err and yield kExitError.
auto main(int argc, char const* const* argv, std::ostream& out, std::ostream& err) -> int;

} // namespace edt::cli

#endif
