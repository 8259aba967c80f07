#ifndef PSKC_CSV_HPP
#define PSKC_CSV_HPP

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pskc/common.hpp"
#include "pskc/engine.hpp"

namespace pskc {

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line,
                                                  std::vector<std::string_view>& out) {
    out.clear();
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

inline double parse_real(std::string_view cell, std::size_t line_no) {
    double v{};
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size())
        throw io_error("line " + std::to_string(line_no) + ": not a number: '" +
                       std::string(cell) + "'");
    return v;
}

}  // namespace detail

// Comma-separated reals, one point per line. When label_col_last is set
// the final column is read as an integer ground-truth label.
inline LabeledDataset load_csv(const std::string& path, bool label_col_last = false) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open: " + path);
    LabeledDataset out;
    std::string line;
    std::vector<std::string_view> cells;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        detail::split_commas(line, cells);
        if (width == 0) {
            width = cells.size();
            if (label_col_last && width < 2)
                throw io_error("line 1: need at least one feature column before the label");
        } else if (cells.size() != width) {
            throw io_error("line " + std::to_string(line_no) + ": expected " +
                           std::to_string(width) + " columns, got " +
                           std::to_string(cells.size()));
        }
        std::size_t n_features = label_col_last ? width - 1 : width;
        if (out.data.d == 0) out.data.d = n_features;
        for (std::size_t c = 0; c < n_features; ++c)
            out.data.coords.push_back(detail::parse_real(cells[c], line_no));
        ++out.data.n;
        if (label_col_last) {
            double lv = detail::parse_real(cells[width - 1], line_no);
            out.truth.push_back(static_cast<int>(lv));
        }
    }
    if (out.data.n == 0) throw io_error("empty dataset: " + path);
    return out;
}

inline void write_csv(const std::string& path, const LabeledDataset& ds) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open for writing: " + path);
    out.precision(17);
    for (std::size_t i = 0; i < ds.data.n; ++i) {
        auto p = ds.data.point(i);
        for (std::size_t c = 0; c < p.size(); ++c) {
            if (c) out << ',';
            out << p[c];
        }
        if (ds.has_truth()) out << ',' << ds.truth[i];
        out << '\n';
    }
    if (!out) throw io_error("write failed: " + path);
}

// Labels file: "index,label" header, noise written as -1.
inline void write_labels(const std::string& path, const ClusteringResult& result) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open for writing: " + path);
    out << "index,label\n";
    for (std::size_t i = 0; i < result.labels.size(); ++i)
        out << i << ',' << result.labels[i] << '\n';
    if (!out) throw io_error("write failed: " + path);
}

}  // namespace pskc

#endif
