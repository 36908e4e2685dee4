#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace amprb::cli {

struct ParamSpec {
    std::string key;
    std::string default_value;
    std::string help;
};

/// Ordered set of string-valued parameters with typed accessors. Only keys
/// declared up front may be set.
class ParamSet {
public:
    ParamSet() = default;
    explicit ParamSet(const std::vector<ParamSpec>& specs);

    bool has(const std::string& key) const;
    /// Throws std::invalid_argument for an undeclared key.
    void set(const std::string& key, const std::string& value);
    const std::string& str(const std::string& key) const;
    double num(const std::string& key) const;
    long long integer(const std::string& key) const;
    bool flag(const std::string& key) const;
    /// Comma list "a,b,c", "lin:a:b:n" (inclusive) or "log:e0:e1:n" (powers of ten).
    std::vector<double> list(const std::string& key) const;

    const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }

private:
    std::size_t index(const std::string& key) const;
    std::vector<std::pair<std::string, std::string>> items_;
};

std::vector<double> parse_list(const std::string& text);

/// Flat INI: "[section]" headers, "key = value" lines, '#' or ';' comments.
/// Keys before the first header belong to section "".
struct IniFile {
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;

    static IniFile parse(std::istream& in, const std::string& origin = "<config>");
    static IniFile load(const std::string& path);
};

}  // namespace amprb::cli
