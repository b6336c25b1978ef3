#include "ina/matrix_format.hpp"

#include "ina/error.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace ina {

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find('\t', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename T>
T parse_integer(std::string_view text, const char* what) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw Error(ErrorCode::ParseError, std::string("bad ") + what + ": '" + std::string(text) + "'");
    return value;
}

bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
    if (!std::getline(in, line)) return false;
    ++line_no;
    return true;
}

}  // namespace

std::string format_real(double value) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) throw Error(ErrorCode::ParseError, "cannot format real");
    return std::string(buf.data(), ptr);
}

double parse_real(std::string_view text) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw Error(ErrorCode::ParseError, "bad real: '" + std::string(text) + "'");
    return value;
}

void write_matrix(std::ostream& out, const InformationMatrix& matrix) {
    const auto& classes = matrix.classes();
    const auto& features = matrix.features();
    out << "features=" << features.size() << " classes=" << classes.size() << '\n';
    for (std::size_t j = 0; j < classes.size(); ++j)
        out << classes.name(j) << '\t' << matrix.class_count(j) << '\t' << format_real(matrix.bias(j)) << '\n';
    for (const auto& f : features.names()) out << f << '\n';
    for (const auto& cell : matrix.cells())
        out << cell.feature << '\t' << cell.cls << '\t' << format_real(cell.weight) << '\n';
}

std::string matrix_to_string(const InformationMatrix& matrix) {
    std::ostringstream out;
    write_matrix(out, matrix);
    return out.str();
}

InformationMatrix read_matrix(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!next_line(in, line, line_no)) throw Error(ErrorCode::ParseError, "missing matrix header");

    std::size_t n_features = 0;
    std::size_t n_classes = 0;
    {
        const auto space = line.find(' ');
        const std::string_view header(line);
        if (space == std::string::npos || !header.starts_with("features=") ||
            !header.substr(space + 1).starts_with("classes="))
            throw Error(ErrorCode::ParseError, "bad matrix header: '" + line + "'");
        n_features = parse_integer<std::size_t>(header.substr(9, space - 9), "feature count");
        n_classes = parse_integer<std::size_t>(header.substr(space + 1 + 8), "class count");
    }

    std::vector<std::string> classes;
    std::vector<std::uint64_t> counts;
    std::vector<double> bias;
    for (std::size_t j = 0; j < n_classes; ++j) {
        if (!next_line(in, line, line_no)) throw Error(ErrorCode::ParseError, "truncated class vocabulary");
        auto fields = split_tabs(line);
        if (fields.size() != 3)
            throw Error(ErrorCode::ParseError, "class line " + std::to_string(line_no) + " needs 3 fields");
        classes.emplace_back(fields[0]);
        counts.push_back(parse_integer<std::uint64_t>(fields[1], "class count"));
        bias.push_back(parse_real(fields[2]));
    }

    std::vector<std::string> features;
    features.reserve(n_features);
    for (std::size_t i = 0; i < n_features; ++i) {
        if (!next_line(in, line, line_no)) throw Error(ErrorCode::ParseError, "truncated feature vocabulary");
        features.push_back(line);
    }

    std::vector<MatrixCell> cells;
    while (next_line(in, line, line_no)) {
        if (line.empty()) continue;
        auto fields = split_tabs(line);
        if (fields.size() != 3)
            throw Error(ErrorCode::ParseError, "cell line " + std::to_string(line_no) + " needs 3 fields");
        cells.push_back({parse_integer<std::size_t>(fields[0], "feature index"),
                         parse_integer<std::size_t>(fields[1], "class index"), parse_real(fields[2])});
    }

    return InformationMatrix::from_cells(std::move(classes), std::move(features), cells, std::move(bias),
                                         std::move(counts));
}

InformationMatrix matrix_from_string(const std::string& text) {
    std::istringstream in(text);
    return read_matrix(in);
}

}  // namespace ina
