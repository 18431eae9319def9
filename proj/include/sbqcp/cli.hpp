#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace sbqcp::cli {

inline constexpr const char* kVersion = "1.0.0";

struct GridSpec {
    double start{0.0};
    double stop{0.0};
    int count{1};
    bool log{false};

    std::vector<double> values() const;
    std::string str() const;
};

// "x" or "start:stop:count[:log]".
GridSpec parse_grid(const std::string& text);

using KeyValues = std::map<std::string, std::string>;

struct RunConfig {
    std::string command;
    double s{1.0};
    std::string alpha{"0.1"};  // single value or grid spec
    double delta{0.1};
    double omega_c{1.0};
    int panels{64};
    int nodes{16};
    std::string output;  // empty: stdout, no manifest
    std::string format{"csv"};
    bool strict{false};
    int modes{3};
    int nmax{10};
    std::string scheme{"linear"};
    double lambda{2.0};
    std::string s_list{"0.25,0.5,0.75,1"};
    std::string method{"sup"};
    double ohmic_sh_delta{1e-3};
    std::string sensitivity;  // comma-separated Delta values for the table1 sweep
    double eps_rho{1e-8};
    bool deterministic{true};

    KeyValues to_map() const;
    static RunConfig from_map(const KeyValues& kv);  // UsageError names the offending key
    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

const std::vector<std::string>& config_keys();
const std::vector<std::string>& commands();

// Flat key=value text; '#' starts a comment.
KeyValues read_config_file(const std::string& path);

// Flags override file values, which override defaults.
// Thrown by parse_config for --help and --version; the text goes to stdout.
struct InfoRequest {
    std::string text;
};

RunConfig parse_config(int argc, const char* const* argv);

// Shortest round-trip decimal; empty for NaN.
std::string format_number(double x);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string to_csv(const Table& t);
std::string to_json(const Table& t);
// Temp file plus rename; IoError on failure.
void write_atomic(const std::string& path, const std::string& content);
void emit_csv(const Table& t, const std::string& path);

// Exit status 0 success, 1 computation failure, 2 usage error.
int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sbqcp::cli
