#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kd::cli {

enum Exit { kOk = 0, kVerifyFailed = 1, kBadInput = 2 };

// line-oriented key=value experiment description, # starts a comment
struct ExperimentConfig {
    std::string subcommand;
    std::vector<std::pair<std::string, std::string>> params;  // file order

    std::string serialize() const;
    bool operator==(const ExperimentConfig&) const = default;
};

struct ConfigError : std::runtime_error {
    std::size_t line;
    ConfigError(std::size_t line, const std::string& what);
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

using Row = std::vector<std::string>;

// RFC 4180 quoting, CRLF line ends
std::string emit_csv(const Row& header, const std::vector<Row>& rows);
// 17 significant digits, integers without exponent
std::string format_number(double v);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace kd::cli
