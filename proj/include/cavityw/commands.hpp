#pragma once

#include <iosfwd>
#include <optional>
#include <string>

namespace cavityw {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitNumeric = 3,
    kExitThreshold = 4,
};

struct CliRequest {
    std::string command;  // check | transfer | sweep-b | sweep-r | oracle
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<int> workers;
    std::optional<double> tolerance;
};

inline constexpr const char* kOutDirEnv = "CAVITYW_OUT";

/// --out, then run.out_dir from the config, then $CAVITYW_OUT, then ./cavityw-out.
std::string resolve_out_dir(const CliRequest& request, const std::optional<std::string>& configured);

/// Runs one command, writing artifacts and manifest.json into the output
/// directory. Progress goes to `out`, errors to `err` as "error[<class>]: ...".
int run_command(const CliRequest& request, std::ostream& out, std::ostream& err);

}  // namespace cavityw
