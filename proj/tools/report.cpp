#include "report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace mfgsplit {

void CsvTable::column(std::string name, std::string meaning) {
    names_.push_back(std::move(name));
    meanings_.push_back(std::move(meaning));
}

void CsvTable::row(const std::vector<double>& values) {
    if (values.size() != names_.size()) throw std::logic_error("CsvTable::row: column count mismatch");
    rows_.push_back(values);
}

void CsvTable::write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error(path + ": cannot write");
    for (const auto& c : comments_) f << "# " << c << '\n';
    for (std::size_t i = 0; i < names_.size(); ++i) f << "# " << names_[i] << ": " << meanings_[i] << '\n';
    for (std::size_t i = 0; i < names_.size(); ++i) f << (i ? "," : "") << names_[i];
    f << '\n';
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) f << (i ? "," : "") << formatNumber(r[i]);
        f << '\n';
    }
}

std::string formatNumber(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

nlohmann::ordered_json number(double v) {
    if (!std::isfinite(v)) return nullptr;
    return v;
}

void writeJson(const nlohmann::ordered_json& doc, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error(path + ": cannot write");
    f << doc.dump(2) << '\n';
}

}  // namespace mfgsplit
