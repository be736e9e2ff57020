#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "ara/config.hpp"

namespace ara::emit {

// Output files could not be written. The CLI maps this to exit code 1.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Value = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Value>> rows;
};

// Shortest form that is still `precision` significant digits of %g style, independent of the
// C locale. Non-finite values are written as nan / inf / -inf.
std::string format_number(double value, int precision = 17);

// CSV: header line plus one line per row. JSON: an array of row objects keyed by column.
std::string render(const Table& table, config::Format format, int precision = 17);

// JSON string literal with the required escapes.
std::string quote(const std::string& s);

struct PendingFile {
    std::string path;
    std::string content;
};

// Writes every file to a temporary sibling first and renames only after all of them were
// written, so a failure leaves none of the targets half-written. Missing parent directories
// are created.
void write_all(const std::vector<PendingFile>& files);

// `path` without a trailing ".csv" / ".json".
std::string strip_extension(const std::string& path);

// "<stem><suffix>.<ext>" with stem = strip_extension(path).
std::string output_path(const std::string& path, const std::string& suffix,
                        config::Format format);

// Path of the resolved-config sidecar that accompanies a data file.
std::string sidecar_path(const std::string& data_path);

}  // namespace ara::emit
