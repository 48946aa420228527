#pragma once

#include <cstddef>
#include <initializer_list>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <grpsel/core_data.hpp>

namespace grpsel {

struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column position of `name`; throws ParseError when absent.
    std::size_t index_of(std::string_view name) const;
};

/// RFC-4180 parsing: quoted fields, doubled quotes, CRLF or LF line ends.
CsvTable parse_csv(std::string_view text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);
CsvTable read_csv_file(const std::string& path);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string csv_escape(std::string_view field);
std::string csv_line(std::initializer_list<std::string> fields);
std::string csv_line(const std::vector<std::string>& fields);

/// Shortest decimal string that reads back to the same double.
std::string format_number(double v);

/**
 * Column typing for a data CSV:
 * {"schema_version": 1, "response": {"name": "y", "kind": "continuous"|"binary"},
 *  "columns": {"x1": "quantitative", "g": "qualitative", ...}}
 * Columns of the CSV that the schema does not list are ignored.
 */
struct DataSchema
{
    std::string response_name;
    ResponseKind response_kind = ResponseKind::Continuous;
    std::vector<std::pair<std::string, VariableKind>> columns;   // in file order
};

DataSchema parse_schema(std::string_view json_text);
DataSchema read_schema_file(const std::string& path);
std::string schema_json(const DataSchema& s);

struct LoadedData
{
    Dataset dataset;
    std::size_t dropped_rows = 0;   // rows with an empty or NA cell in a used column
};

/// Builds a Dataset from a CSV table. `require_response` false tolerates a missing response column.
LoadedData dataset_from_csv(const CsvTable& table, const DataSchema& schema, bool require_response = true);
LoadedData load_dataset(const std::string& csv_path, const std::string& schema_path, bool require_response = true);

/// CSV with the predictors in order followed by the response (when present).
std::string dataset_csv(const Dataset& d, const std::string& response_name = "y");
DataSchema schema_of(const Dataset& d, const std::string& response_name = "y");

/// variable,group CSV (1-based groups) read into labels for the named variables.
std::map<std::string, int> read_groups_file(const std::string& path);

} // namespace grpsel
