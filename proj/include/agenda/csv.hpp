#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace agenda::csv {

using Record = std::vector<std::string>;

/// RFC-4180 reader: quoted fields, doubled quotes, embedded newlines, CRLF or LF.
std::vector<Record> parse(std::istream& in);
std::vector<Record> parse(std::string_view text);

void write_record(std::ostream& out, const std::vector<std::string>& fields);

/// Field quoted only when it holds a comma, quote, CR or LF.
std::string quote(std::string_view field);

/// Shortest round-trip decimal representation, locale independent.
std::string format_number(double value);
double parse_number(std::string_view text);
long long parse_integer(std::string_view text);

/// Header-addressed view of a parsed file.
class Table {
public:
    static Table read(const std::filesystem::path& path);
    static Table from_records(std::vector<Record> records, std::string source = "<memory>");

    const Record& header() const { return header_; }
    const std::vector<Record>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }

    /// Column index for `name`; throws InputError naming the source when absent.
    std::size_t column(std::string_view name) const;
    bool has_column(std::string_view name) const;
    const std::string& source() const { return source_; }

private:
    std::string source_;
    Record header_;
    std::vector<Record> rows_;
};

} // namespace agenda::csv
