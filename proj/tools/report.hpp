#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace mfgsplit {

inline constexpr const char* kReportSchema = "mfgsplit-report/1";
inline constexpr const char* kVersion = "0.1.0";

/// CSV table whose '#' header lines describe every column.
class CsvTable {
public:
    void comment(std::string line) { comments_.push_back(std::move(line)); }
    /// Declares a column with its unit or meaning.
    void column(std::string name, std::string meaning);
    void row(const std::vector<double>& values);
    [[nodiscard]] std::size_t rows() const noexcept { return rows_.size(); }
    void write(const std::string& path) const;

private:
    std::vector<std::string> comments_;
    std::vector<std::string> names_, meanings_;
    std::vector<std::vector<double>> rows_;
};

/// Shortest round-trip decimal form; "nan" and "inf" spelled out.
std::string formatNumber(double v);

/// NaN and infinities become null.
nlohmann::ordered_json number(double v);

void writeJson(const nlohmann::ordered_json& doc, const std::string& path);

}  // namespace mfgsplit
