#pragma once

#include <string>
#include <variant>
#include <vector>

namespace amprb::cli {

using Cell = std::variant<double, long long, bool, std::string>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

/// 17 significant digits; inf and nan spelled out.
std::string format_double(double x);

std::string to_csv(const Table& t);

/// Entry point of the command-line tool. Returns 0 on success, 1 on a
/// configuration error and 2 on a numerical failure.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace amprb::cli
