#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "objstab/pencil.hpp"

namespace objstab {

/// 17 significant digits: lossless double round-trip in decimal.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string format_extended(const ExtendedReal& v) {
    if (v.is_plus_inf()) return "inf";
    if (v.is_minus_inf()) return "-inf";
    return format_double(v.value);
}

/// CSV document with '#'-prefixed metadata lines, deterministic output.
class CsvWriter {
public:
    void meta(const std::string& key, const std::string& value) {
        meta_.push_back("# " + key + " = " + value);
    }
    void header(const std::vector<std::string>& cols) { header_ = join(cols); }
    void row(const std::vector<std::string>& cells) { rows_.push_back(join(cells)); }

    std::string str() const {
        std::string out;
        for (const auto& m : meta_) out += m + "\n";
        if (!header_.empty()) out += header_ + "\n";
        for (const auto& r : rows_) out += r + "\n";
        return out;
    }

    void save(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("csv: cannot write " + path);
        f << str();
    }

private:
    std::vector<std::string> meta_, rows_;
    std::string header_;

    static std::string join(const std::vector<std::string>& cells) {
        std::string out;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ",";
            out += cells[i];
        }
        return out;
    }
};

} // namespace objstab
