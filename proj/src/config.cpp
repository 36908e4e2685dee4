#include "amprb/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace amprb::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(what + ": not a number: '" + s + "'");
    }
    if (used != s.size()) throw std::invalid_argument(what + ": trailing characters in '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

}  // namespace

ParamSet::ParamSet(const std::vector<ParamSpec>& specs) {
    for (const auto& s : specs) items_.emplace_back(s.key, s.default_value);
}

std::size_t ParamSet::index(const std::string& key) const {
    for (std::size_t k = 0; k < items_.size(); ++k)
        if (items_[k].first == key) return k;
    throw std::invalid_argument("unknown parameter '" + key + "'");
}

bool ParamSet::has(const std::string& key) const {
    return std::any_of(items_.begin(), items_.end(), [&](const auto& kv) { return kv.first == key; });
}

void ParamSet::set(const std::string& key, const std::string& value) { items_[index(key)].second = value; }

const std::string& ParamSet::str(const std::string& key) const { return items_[index(key)].second; }

double ParamSet::num(const std::string& key) const { return to_double(str(key), key); }

long long ParamSet::integer(const std::string& key) const {
    const double v = num(key);
    if (v != std::floor(v) || std::abs(v) > 9.0e15)
        throw std::invalid_argument(key + ": expected an integer, got '" + str(key) + "'");
    return static_cast<long long>(v);
}

bool ParamSet::flag(const std::string& key) const {
    const std::string& v = str(key);
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw std::invalid_argument(key + ": expected a boolean, got '" + v + "'");
}

std::vector<double> ParamSet::list(const std::string& key) const {
    try {
        return parse_list(str(key));
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(key + ": " + e.what());
    }
}

std::vector<double> parse_list(const std::string& text) {
    const std::string t = trim(text);
    if (t.rfind("lin:", 0) == 0 || t.rfind("log:", 0) == 0) {
        const auto parts = split(t.substr(4), ':');
        if (parts.size() != 3) throw std::invalid_argument("range needs three fields: '" + t + "'");
        const double a = to_double(parts[0], "range start"), b = to_double(parts[1], "range end");
        const double nd = to_double(parts[2], "range count");
        if (nd < 1 || nd != std::floor(nd)) throw std::invalid_argument("range count must be a positive integer");
        const int n = static_cast<int>(nd);
        std::vector<double> out(n);
        for (int k = 0; k < n; ++k) {
            const double x = n == 1 ? a : a + (b - a) * k / (n - 1);
            out[k] = t[1] == 'o' ? std::pow(10.0, x) : x;
        }
        return out;
    }
    std::vector<double> out;
    for (const auto& item : split(t, ',')) {
        if (item.empty()) throw std::invalid_argument("empty list entry in '" + t + "'");
        out.push_back(to_double(item, "list entry"));
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

IniFile IniFile::parse(std::istream& in, const std::string& origin) {
    IniFile ini;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno);
        auto cut = line.find_first_of("#;");
        std::string s = trim(cut == std::string::npos ? line : line.substr(0, cut));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw std::invalid_argument(where + ": unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            ini.sections[section];
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw std::invalid_argument(where + ": expected key = value");
        std::string key = trim(s.substr(0, eq));
        if (key.empty()) throw std::invalid_argument(where + ": empty key");
        ini.sections[section].emplace_back(std::move(key), trim(s.substr(eq + 1)));
    }
    return ini;
}

IniFile IniFile::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config file '" + path + "'");
    return parse(f, path);
}

}  // namespace amprb::cli
