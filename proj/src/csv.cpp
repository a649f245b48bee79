#include "agenda/csv.hpp"

#include "agenda/common.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace agenda::csv {

std::vector<Record> parse(std::string_view text)
{
    std::vector<Record> records;
    Record record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (field_started && !field.empty())
                throw InputError("stray quote inside unquoted CSV field");
            in_quotes = true;
            field_started = true;
            break;
        case ',':
            end_field();
            break;
        case '\r':
            if (i + 1 < text.size() && text[i + 1] == '\n')
                ++i;
            end_record();
            break;
        case '\n':
            end_record();
            break;
        default:
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes)
        throw InputError("unterminated quoted CSV field");
    if (field_started || !record.empty())
        end_record();
    return records;
}

std::vector<Record> parse(std::istream& in)
{
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

std::string quote(std::string_view field)
{
    if (field.find_first_of(",\"\r\n") == std::string_view::npos)
        return std::string(field);
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char c : field) {
        if (c == '"')
            out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_record(std::ostream& out, const std::vector<std::string>& fields)
{
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out << ',';
        out << quote(fields[i]);
    }
    out << '\n';
}

std::string format_number(double value)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

double parse_number(std::string_view text)
{
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw InputError("invalid number '" + std::string(text) + "'");
    return value;
}

long long parse_integer(std::string_view text)
{
    long long value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw InputError("invalid integer '" + std::string(text) + "'");
    return value;
}

Table Table::read(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open " + path.string());
    return from_records(parse(in), path.string());
}

Table Table::from_records(std::vector<Record> records, std::string source)
{
    if (records.empty())
        throw InputError(source + ": empty CSV file");
    Table table;
    table.source_ = std::move(source);
    table.header_ = std::move(records.front());
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].size() == 1 && records[i][0].empty())
            continue;
        if (records[i].size() != table.header_.size())
            throw InputError(table.source_ + ": row " + std::to_string(i + 1) + " has " +
                             std::to_string(records[i].size()) + " fields, expected " +
                             std::to_string(table.header_.size()));
        table.rows_.push_back(std::move(records[i]));
    }
    return table;
}

std::size_t Table::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header_.size(); ++i)
        if (header_[i] == name)
            return i;
    throw InputError(source_ + ": missing column '" + std::string(name) + "'");
}

bool Table::has_column(std::string_view name) const
{
    for (const auto& h : header_)
        if (h == name)
            return true;
    return false;
}

} // namespace agenda::csv
