#include "oap/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace oap::mm {
namespace {

enum class Layout { coordinate, array };

struct Header {
    Layout layout;
    Index rows = 0;
    Index cols = 0;
    Index entries = 0;  // nnz for coordinate, rows * cols for array
};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    // Next line that is neither blank nor a comment; false at end of input.
    bool next_data(std::string& line) {
        while (std::getline(in_, line)) {
            ++number_;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '%') continue;
            return true;
        }
        return false;
    }

    bool next_raw(std::string& line) {
        if (!std::getline(in_, line)) return false;
        ++number_;
        return true;
    }

    std::size_t number() const noexcept { return number_; }

private:
    std::istream& in_;
    std::size_t number_ = 0;
};

std::vector<std::string_view> split(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        const std::size_t start = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

template <typename T>
T parse_number(std::string_view token, std::size_t line, const char* what) {
    T value{};
    // from_chars rejects a leading '+', which some writers emit.
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw ParseError(line, std::string("invalid ") + what + " '" + std::string(token) + "'");
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) throw ParseError(line, "non-finite value");
    }
    return value;
}

Header read_header(LineReader& reader) {
    std::string line;
    if (!reader.next_raw(line)) throw ParseError(1, "empty input");
    const auto tokens = split(line);
    if (tokens.size() != 5 || tokens[0] != "%%MatrixMarket")
        throw ParseError(reader.number(), "malformed header, expected '%%MatrixMarket matrix <format> real general'");
    if (lower(std::string(tokens[1])) != "matrix") throw ParseError(reader.number(), "object must be 'matrix'");
    const std::string format = lower(std::string(tokens[2]));
    const std::string field = lower(std::string(tokens[3]));
    const std::string symmetry = lower(std::string(tokens[4]));
    Header h{};
    if (format == "coordinate") {
        h.layout = Layout::coordinate;
    } else if (format == "array") {
        h.layout = Layout::array;
    } else {
        throw ParseError(reader.number(), "unknown format '" + format + "'");
    }
    if (field != "real") throw ParseError(reader.number(), "field '" + field + "' is not supported, only 'real'");
    if (symmetry != "general")
        throw ParseError(reader.number(), "symmetry '" + symmetry + "' is not supported, only 'general'");

    if (!reader.next_data(line)) throw ParseError(reader.number(), "missing size line");
    const auto size = split(line);
    const std::size_t expected = h.layout == Layout::coordinate ? 3 : 2;
    if (size.size() != expected) throw ParseError(reader.number(), "malformed size line");
    h.rows = parse_number<Index>(size[0], reader.number(), "row count");
    h.cols = parse_number<Index>(size[1], reader.number(), "column count");
    if (h.rows < 0 || h.cols < 0) throw ParseError(reader.number(), "negative dimension");
    h.entries = h.layout == Layout::coordinate ? parse_number<Index>(size[2], reader.number(), "entry count")
                                               : h.rows * h.cols;
    if (h.entries < 0) throw ParseError(reader.number(), "negative entry count");
    return h;
}

CsrMatrix<double> read_coordinate(LineReader& reader, const Header& h) {
    std::vector<std::tuple<Index, Index, double, std::size_t>> entries;
    entries.reserve(static_cast<std::size_t>(h.entries));
    std::string line;
    for (Index e = 0; e < h.entries; ++e) {
        if (!reader.next_data(line)) throw ParseError(reader.number(), "unexpected end of input in entries");
        const auto t = split(line);
        if (t.size() != 3) throw ParseError(reader.number(), "coordinate entry needs 'row col value'");
        const Index i = parse_number<Index>(t[0], reader.number(), "row index");
        const Index j = parse_number<Index>(t[1], reader.number(), "column index");
        if (i < 1 || i > h.rows || j < 1 || j > h.cols) throw ParseError(reader.number(), "index out of bounds");
        entries.emplace_back(i - 1, j - 1, parse_number<double>(t[2], reader.number(), "value"), reader.number());
    }
    if (reader.next_data(line)) throw ParseError(reader.number(), "more entries than declared");

    std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    std::vector<int> offsets(static_cast<std::size_t>(h.rows) + 1, 0);
    std::vector<int> cols;
    std::vector<double> vals;
    cols.reserve(entries.size());
    vals.reserve(entries.size());
    for (std::size_t p = 0; p < entries.size(); ++p) {
        const auto& [i, j, v, where] = entries[p];
        if (p > 0 && std::get<0>(entries[p - 1]) == i && std::get<1>(entries[p - 1]) == j)
            throw ParseError(where, "duplicate entry");
        ++offsets[static_cast<std::size_t>(i) + 1];
        cols.push_back(static_cast<int>(j));
        vals.push_back(v);
    }
    for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] += offsets[i - 1];
    return make_csr<double>(h.rows, h.cols, offsets, cols, vals);
}

DenseMatrix<double> read_array(LineReader& reader, const Header& h) {
    DenseMatrix<double> m(h.rows, h.cols);
    std::string line;
    Index filled = 0;
    while (filled < h.entries) {
        if (!reader.next_data(line)) throw ParseError(reader.number(), "unexpected end of input in array values");
        for (auto token : split(line)) {
            if (filled == h.entries) throw ParseError(reader.number(), "more values than declared");
            m(filled % h.rows, filled / h.rows) = parse_number<double>(token, reader.number(), "value");
            ++filled;
        }
    }
    if (reader.next_data(line)) throw ParseError(reader.number(), "more values than declared");
    return m;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
}

std::string format_real(double v) {
    if (!std::isfinite(v)) throw Error("Matrix Market writer: non-finite value");
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

}  // namespace

LinearOperator<double> read_matrix(std::istream& in) {
    LineReader reader(in);
    const Header h = read_header(reader);
    if (h.layout == Layout::coordinate) return LinearOperator<double>(read_coordinate(reader, h));
    return LinearOperator<double>(read_array(reader, h));
}

LinearOperator<double> read_matrix(const std::string& path) {
    auto in = open_in(path);
    return read_matrix(in);
}

Vector<double> read_vector(std::istream& in) {
    LineReader reader(in);
    const Header h = read_header(reader);
    if (h.cols != 1 && h.rows != 1) throw ParseError(reader.number(), "a vector must have one row or one column");
    if (h.layout == Layout::array) {
        DenseMatrix<double> m = read_array(reader, h);
        return Eigen::Map<const Vector<double>>(m.data(), m.size());
    }
    CsrMatrix<double> m = read_coordinate(reader, h);
    return Vector<double>(DenseMatrix<double>(m).reshaped());
}

Vector<double> read_vector(const std::string& path) {
    auto in = open_in(path);
    return read_vector(in);
}

void write_matrix(std::ostream& out, const LinearOperator<double>& A) {
    if (const auto* s = A.sparse()) {
        out << "%%MatrixMarket matrix coordinate real general\n";
        out << s->rows() << ' ' << s->cols() << ' ' << s->nonZeros() << '\n';
        for (Index i = 0; i < s->outerSize(); ++i)
            for (CsrMatrix<double>::InnerIterator it(*s, i); it; ++it)
                out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << format_real(it.value()) << '\n';
        return;
    }
    const auto& d = *A.dense();
    out << "%%MatrixMarket matrix array real general\n";
    out << d.rows() << ' ' << d.cols() << '\n';
    for (Index j = 0; j < d.cols(); ++j)
        for (Index i = 0; i < d.rows(); ++i) out << format_real(d(i, j)) << '\n';
}

void write_matrix(const std::string& path, const LinearOperator<double>& A) {
    auto out = open_out(path);
    write_matrix(out, A);
    finish(out, path);
}

void write_vector(std::ostream& out, const Vector<double>& v) {
    out << "%%MatrixMarket matrix array real general\n";
    out << v.size() << " 1\n";
    for (Index i = 0; i < v.size(); ++i) out << format_real(v(i)) << '\n';
}

void write_vector(const std::string& path, const Vector<double>& v) {
    auto out = open_out(path);
    write_vector(out, v);
    finish(out, path);
}

}  // namespace oap::mm
