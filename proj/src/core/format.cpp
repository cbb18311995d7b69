#include "pinv/format.hpp"

#include "pinv/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

namespace pinv {

std::string format_number(double value)
{
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc())
        throw Error(ErrorCode::NonFinite, "cannot format number");
    return std::string(buf, end);
}

double parse_number(std::string_view token)
{
    std::string_view body = token;
    if (!body.empty() && body.front() == '+')
        body.remove_prefix(1);
    const bool had_plus = body.size() != token.size();
    if (body.empty() || body.front() == '+' || (had_plus && body.front() == '-') ||
        !(std::isdigit(static_cast<unsigned char>(body.front())) || body.front() == '-' ||
          body.front() == '.'))
        throw Error(ErrorCode::ParseError, "not a number: '" + std::string(token) + "'");
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value,
                                     std::chars_format::general);
    if (ec != std::errc() || ptr != body.data() + body.size() || !std::isfinite(value))
        throw Error(ErrorCode::ParseError, "not a number: '" + std::string(token) + "'");
    return value;
}

std::string join_numbers(std::span<const double> values)
{
    std::string out;
    out.reserve(values.size() * 8);
    char buf[32];
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            out.push_back(',');
        auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), values[i]);
        if (ec != std::errc())
            throw Error(ErrorCode::NonFinite, "cannot format number");
        out.append(buf, end);
    }
    return out;
}

std::vector<double> split_numbers(std::string_view text)
{
    std::vector<double> out;
    if (text.empty())
        return out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = text.find(',', start);
        out.push_back(parse_number(text.substr(start, comma == std::string_view::npos
                                                          ? std::string_view::npos
                                                          : comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

std::string to_r_string(const DenseMatrix& a)
{
    std::string out;
    out.reserve(a.size() * 8);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        if (i)
            out.push_back(',');
        out += join_numbers(a.row(i));
    }
    return out;
}

DenseMatrix from_r_string(std::string_view text, std::size_t rows, std::size_t cols, Backend backend)
{
    const std::vector<double> values = split_numbers(text);
    return DenseMatrix::from_row_major(rows, cols, values, backend);
}

std::vector<std::string> to_mr_records(const DenseMatrix& a)
{
    std::vector<std::string> out;
    out.reserve(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        out.push_back(join_numbers(a.row(i)));
    return out;
}

DenseMatrix from_mr_records(const std::vector<std::string>& records, std::size_t cols, Backend backend)
{
    if (records.empty())
        throw Error(ErrorCode::Empty, "no mR records");
    DenseMatrix out(records.size(), cols, backend);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const std::vector<double> values = split_numbers(records[i]);
        if (values.size() != cols)
            throw Error(ErrorCode::LengthMismatch,
                        "mR record " + std::to_string(i) + " has " + std::to_string(values.size()) +
                            " elements, expected " + std::to_string(cols));
        std::copy(values.begin(), values.end(), out.row(i).begin());
    }
    return out;
}

namespace {

bool is_blank(char c)
{
    return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && is_blank(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_blank(s.back()))
        s.remove_suffix(1);
    return s;
}

std::vector<double> parse_line(std::string_view line, bool commas)
{
    std::vector<double> out;
    if (commas) {
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            const std::string_view token =
                trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                         : comma - start));
            out.push_back(parse_number(token));
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        return out;
    }
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && is_blank(line[i]))
            ++i;
        std::size_t j = i;
        while (j < line.size() && !is_blank(line[j]))
            ++j;
        if (j > i)
            out.push_back(parse_number(line.substr(i, j - i)));
        i = j;
    }
    return out;
}

} // namespace

DenseMatrix parse_matrix_text(std::string_view text, Backend backend)
{
    const bool commas = text.find(',') != std::string_view::npos;
    std::vector<std::vector<double>> rows;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t nl = text.find('\n', start);
        const std::string_view line =
            trim(text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start));
        if (!line.empty()) {
            rows.push_back(parse_line(line, commas));
            if (rows.back().size() != rows.front().size())
                throw Error(ErrorCode::RaggedRows,
                            "row " + std::to_string(rows.size()) + " has " +
                                std::to_string(rows.back().size()) + " elements, expected " +
                                std::to_string(rows.front().size()));
        }
        if (nl == std::string_view::npos)
            break;
        start = nl + 1;
    }
    if (rows.empty())
        throw Error(ErrorCode::Empty, "matrix text has no rows");
    return DenseMatrix::from_rows(rows, backend);
}

std::string dimension_string(std::size_t rows, std::size_t cols)
{
    return std::to_string(rows) + "x" + std::to_string(cols);
}

Dimension parse_dimension(std::string_view text)
{
    const std::size_t x = text.find('x');
    if (x == std::string_view::npos || x == 0 || x + 1 >= text.size())
        throw Error(ErrorCode::ParseError, "bad dimension '" + std::string(text) + "'");
    auto read = [&](std::string_view part) {
        std::size_t v = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc() || ptr != part.data() + part.size() || v == 0)
            throw Error(ErrorCode::ParseError, "bad dimension '" + std::string(text) + "'");
        return v;
    };
    return {read(text.substr(0, x)), read(text.substr(x + 1))};
}

std::string display_round(double value, int places)
{
    if (places < 0)
        places = 0;
    const double factor = std::pow(10.0, places);
    double rounded = value;
    if (std::abs(value) * factor < 1e15)
        rounded = std::round(value * factor) / factor; // std::round rounds halves away from zero
    if (rounded == 0.0)
        return "0";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", places, rounded);
    std::string out(buf);
    if (out.find('.') != std::string::npos) {
        while (out.back() == '0')
            out.pop_back();
        if (out.back() == '.')
            out.pop_back();
    }
    if (out == "-0")
        return "0";
    return out;
}

std::vector<std::string> display_round(const DenseMatrix& a, int places)
{
    std::vector<std::string> out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (double v : a.row(i))
            out.push_back(display_round(v, places));
    return out;
}

} // namespace pinv
