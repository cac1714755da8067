#pragma once

#include "hyperspace/pipeline.hpp"

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace hyperspace::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (args excludes the program name) and returns the
/// exit code. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Recompute server over already parsed inputs. POST /recompute takes plot
/// options as JSON (merged over `base`) and answers with a scene document.
std::unique_ptr<httplib::Server> make_server(std::vector<PlotInput> inputs, PlotOptions base);

}  // namespace hyperspace::cli
