#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qst::cli {

using Params = std::map<std::string, std::string>;

// Bad flags, unknown keys, malformed numbers. Maps to exit code 2.
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

struct Command {
  std::string verb;  // fields, spectrum, evolve, report, sweep, tstar, exp-ratio
  Params params;     // canonical snake_case keys
  bool dump_config = false;
  bool help = false;
  std::string help_text;
};

const std::vector<std::string>& verbs();
const std::vector<std::string>& known_keys();

// Figure presets: fig2 .. fig6.
const std::map<std::string, Params>& presets();

// Flat JSON object; arrays become comma-separated lists, numbers use the
// shortest round-trip spelling. Unknown keys throw UsageError.
Params parse_config_json(const std::string& text);
Params load_config(const std::string& path);
std::string dump_config_json(const Params& params);

// argv without the program name. Layering: preset, then --config, then flags.
Command parse_command(const std::vector<std::string>& args);

// Executes a parsed command; tables go to --out or `out`.
void run_command(const Command& cmd, std::ostream& out);

// Full CLI entry: parse, run, map exceptions to exit codes.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qst::cli
