#include "ppmm/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "ppmm/error.hpp"

namespace ppmm {

namespace {

// Reads one logical record; returns false at end of input.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
    fields.clear();
    int ch = in.peek();
    if (ch == std::char_traits<char>::eof()) return false;
    ++line;
    const std::size_t start_line = line;

    std::string field;
    bool quoted = false;
    bool field_was_quoted = false;
    while (true) {
        ch = in.get();
        if (ch == std::char_traits<char>::eof()) {
            if (quoted) throw Error(ErrorCode::Parse, "unterminated quoted field starting on line " + std::to_string(start_line));
            break;
        }
        const char c = static_cast<char>(ch);
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    field.push_back('"');
                    in.get();
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && field.empty() && !field_was_quoted) {
            quoted = true;
            field_was_quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
            field_was_quoted = false;
        } else if (c == '\n') {
            break;
        } else if (c == '\r') {
            if (in.peek() == '\n') in.get();
            break;
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return true;
}

}  // namespace

RawTable parse_csv(std::istream& in) {
    RawTable table;
    std::vector<std::string> fields;
    std::size_t line = 0;
    if (!read_record(in, fields, line)) throw Error(ErrorCode::Parse, "empty CSV: header row required");
    if (!fields.empty() && fields.front().starts_with("\xEF\xBB\xBF")) fields.front().erase(0, 3);
    table.names = fields;
    table.columns.resize(fields.size());

    while (read_record(in, fields, line)) {
        if (fields.size() == 1 && fields.front().empty()) continue;  // blank line
        if (fields.size() != table.names.size()) {
            throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": expected " +
                                              std::to_string(table.names.size()) + " fields, found " +
                                              std::to_string(fields.size()));
        }
        for (std::size_t c = 0; c < fields.size(); ++c) table.columns[c].push_back(std::move(fields[c]));
    }
    return table;
}

RawTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Parse, "cannot open '" + path + "'");
    return parse_csv(in);
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void write_series_csv(std::ostream& out, const CurveSeries& series) {
    out << "abscissa,value,valid\n";
    for (const auto& p : series.points) {
        out << format_double(p.abscissa) << ',' << (p.value ? format_double(*p.value) : std::string{}) << ','
            << (p.valid() ? 1 : 0) << '\n';
    }
}

void write_dataset_csv(std::ostream& out, const SimulatedDataset& data) {
    out << "x,y,r\n";
    for (std::size_t i = 0; i < data.size(); ++i) {
        out << format_double(data.x[i]) << ',' << format_double(data.y[i]) << ',' << static_cast<int>(data.r[i])
            << '\n';
    }
}

}  // namespace ppmm
