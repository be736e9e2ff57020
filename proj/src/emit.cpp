#include "ara/emit.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace ara::emit {

std::string format_number(double value, int precision) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general,
                                   precision);
    return std::string(buf, res.ptr);
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (const char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char esc[8];
                    std::snprintf(esc, sizeof esc, "\\u%04x", ch);
                    out += esc;
                } else {
                    out += ch;
                }
        }
    }
    return out + "\"";
}

namespace {

std::string cell(const Value& v, config::Format format, int precision) {
    if (const auto* d = std::get_if<double>(&v)) {
        const std::string s = format_number(*d, precision);
        // JSON has no literal for non-finite numbers.
        if (format == config::Format::Json && !std::isfinite(*d)) return quote(s);
        return s;
    }
    if (const auto* i = std::get_if<long long>(&v)) return std::to_string(*i);
    const auto& s = std::get<std::string>(v);
    if (format == config::Format::Json) return quote(s);
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return out + "\"";
}

}  // namespace

std::string render(const Table& table, config::Format format, int precision) {
    std::string out;
    if (format == config::Format::Csv) {
        for (std::size_t c = 0; c < table.columns.size(); ++c)
            out += (c ? "," : "") + table.columns[c];
        out += '\n';
        for (const auto& row : table.rows) {
            for (std::size_t c = 0; c < row.size(); ++c)
                out += (c ? "," : "") + cell(row[c], format, precision);
            out += '\n';
        }
        return out;
    }
    out += "[";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out += r ? ",\n {" : "\n {";
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            if (c) out += ", ";
            out += quote(table.columns[c]) + ": " + cell(table.rows[r][c], format, precision);
        }
        out += "}";
    }
    out += table.rows.empty() ? "]\n" : "\n]\n";
    return out;
}

void write_all(const std::vector<PendingFile>& files) {
    namespace fs = std::filesystem;
    std::vector<std::string> temps;
    auto cleanup = [&temps] {
        std::error_code ec;
        for (const auto& t : temps) fs::remove(t, ec);
    };
    for (const auto& f : files) {
        const std::string tmp = f.path + ".partial";
        const fs::path parent = fs::path(f.path).parent_path();
        std::error_code dir_ec;
        if (!parent.empty()) fs::create_directories(parent, dir_ec);
        temps.push_back(tmp);
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << f.content;
        out.close();
        if (!out) {
            cleanup();
            throw IoError("cannot write '" + f.path + "'");
        }
    }
    for (std::size_t k = 0; k < files.size(); ++k) {
        std::error_code ec;
        fs::rename(temps[k], files[k].path, ec);
        if (ec) {
            cleanup();
            throw IoError("cannot move output into place at '" + files[k].path +
                          "': " + ec.message());
        }
    }
}

std::string strip_extension(const std::string& path) {
    for (const std::string ext : {".csv", ".json"}) {
        if (path.size() > ext.size() &&
            path.compare(path.size() - ext.size(), ext.size(), ext) == 0)
            return path.substr(0, path.size() - ext.size());
    }
    return path;
}

std::string output_path(const std::string& path, const std::string& suffix,
                        config::Format format) {
    return strip_extension(path) + suffix + "." + config::to_string(format);
}

std::string sidecar_path(const std::string& data_path) { return data_path + ".config.json"; }

}  // namespace ara::emit
