#include <grpsel/io.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace grpsel {

std::size_t CsvTable::index_of(std::string_view name) const
{
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw Error(ErrorCode::ParseError, "CSV has no column named '" + std::string(name) + "'");
}

CsvTable parse_csv(std::string_view text)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;

    auto end_field = [&]() {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&]() {
        end_field();
        // A blank line yields one empty field; skip it.
        if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
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
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field_started) throw Error(ErrorCode::ParseError, "stray quote on line " + std::to_string(line));
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                end_field();
                break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
                end_record();
                ++line;
                break;
            case '\n':
                end_record();
                ++line;
                break;
            default:
                field.push_back(c);
                field_started = true;
        }
    }
    if (in_quotes) throw Error(ErrorCode::ParseError, "unterminated quoted field");
    if (field_started || !record.empty()) end_record();
    if (records.empty()) throw Error(ErrorCode::ParseError, "CSV has no header row");

    CsvTable t;
    t.header = std::move(records.front());
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != t.header.size()) {
            throw Error(ErrorCode::ParseError, "CSV record " + std::to_string(r + 1) + " has " +
                std::to_string(records[r].size()) + " fields, header has " + std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(records[r]));
    }
    return t;
}

std::string read_text_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

CsvTable read_csv_file(const std::string& path)
{
    return parse_csv(read_text_file(path));
}

std::string csv_escape(std::string_view field)
{
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string csv_line(const std::vector<std::string>& fields)
{
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += csv_escape(fields[i]);
    }
    out += "\r\n";
    return out;
}

std::string csv_line(std::initializer_list<std::string> fields)
{
    return csv_line(std::vector<std::string>(fields));
}

std::string format_number(double v)
{
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

bool is_missing(std::string_view cell)
{
    cell = trim(cell);
    return cell.empty() || cell == "NA" || cell == "NaN" || cell == "na" || cell == "nan";
}

double parse_number(std::string_view cell, const std::string& column, std::size_t row)
{
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw Error(ErrorCode::ParseError, "column '" + column + "' row " + std::to_string(row) +
            ": '" + std::string(cell) + "' is not a finite number");
    }
    return v;
}

} // namespace

DataSchema parse_schema(std::string_view json_text)
{
    nlohmann::ordered_json j;
    try {
        j = nlohmann::ordered_json::parse(json_text);
    } catch (const nlohmann::ordered_json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("schema is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "schema must be a JSON object");
    if (j.value("schema_version", 0) != 1) throw Error(ErrorCode::ParseError, "schema_version must be 1");
    DataSchema s;
    if (j.contains("response")) {
        const auto& r = j.at("response");
        if (!r.is_object() || !r.contains("name")) throw Error(ErrorCode::ParseError, "response must name a column");
        s.response_name = r.at("name").get<std::string>();
        const auto kind = r.value("kind", std::string("continuous"));
        if (kind == "continuous") s.response_kind = ResponseKind::Continuous;
        else if (kind == "binary") s.response_kind = ResponseKind::Binary;
        else throw Error(ErrorCode::ParseError, "response kind must be continuous or binary, got '" + kind + "'");
    }
    if (!j.contains("columns") || !j.at("columns").is_object()) throw Error(ErrorCode::ParseError, "schema needs a columns object");
    for (const auto& [name, kind] : j.at("columns").items()) {
        const auto k = kind.get<std::string>();
        if (k == "quantitative") s.columns.emplace_back(name, VariableKind::Quantitative);
        else if (k == "qualitative") s.columns.emplace_back(name, VariableKind::Qualitative);
        else throw Error(ErrorCode::ParseError, "column '" + name + "' has unknown kind '" + k + "'");
    }
    if (s.columns.empty()) throw Error(ErrorCode::ParseError, "schema lists no predictor columns");
    return s;
}

DataSchema read_schema_file(const std::string& path)
{
    return parse_schema(read_text_file(path));
}

std::string schema_json(const DataSchema& s)
{
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    if (!s.response_name.empty()) {
        j["response"] = {{"name", s.response_name}, {"kind", s.response_kind == ResponseKind::Binary ? "binary" : "continuous"}};
    }
    nlohmann::ordered_json cols = nlohmann::ordered_json::object();
    for (const auto& [name, kind] : s.columns) cols[name] = kind == VariableKind::Qualitative ? "qualitative" : "quantitative";
    j["columns"] = cols;
    return j.dump(2) + "\n";
}

LoadedData dataset_from_csv(const CsvTable& table, const DataSchema& schema, bool require_response)
{
    std::vector<std::size_t> pos;
    for (const auto& [name, kind] : schema.columns) pos.push_back(table.index_of(name));
    bool has_y = !schema.response_name.empty();
    std::size_t ypos = 0;
    if (has_y) {
        const auto it = std::find(table.header.begin(), table.header.end(), schema.response_name);
        if (it == table.header.end()) {
            if (require_response) throw Error(ErrorCode::ParseError, "CSV has no response column '" + schema.response_name + "'");
            has_y = false;
        } else {
            ypos = static_cast<std::size_t>(it - table.header.begin());
        }
    } else if (require_response) {
        throw Error(ErrorCode::InvalidArgument, "schema names no response");
    }

    LoadedData out;
    std::vector<const std::vector<std::string>*> kept;
    for (const auto& row : table.rows) {
        bool missing = has_y && is_missing(row[ypos]);
        for (std::size_t p : pos) missing = missing || is_missing(row[p]);
        if (missing) ++out.dropped_rows;
        else kept.push_back(&row);
    }
    if (kept.empty()) throw Error(ErrorCode::TooFewObservations, "no complete rows in the data");

    std::vector<Column> cols;
    for (std::size_t c = 0; c < pos.size(); ++c) {
        const auto& [name, kind] = schema.columns[c];
        if (kind == VariableKind::Quantitative) {
            std::vector<double> v;
            for (std::size_t r = 0; r < kept.size(); ++r) v.push_back(parse_number((*kept[r])[pos[c]], name, r + 1));
            cols.push_back(Column::quantitative(name, std::move(v)));
        } else {
            std::vector<std::string> labels;
            for (const auto* row : kept) labels.emplace_back(trim((*row)[pos[c]]));
            cols.push_back(Column::qualitative_from_labels(name, labels));
        }
    }
    if (has_y) {
        Eigen::VectorXd y(static_cast<Eigen::Index>(kept.size()));
        for (std::size_t r = 0; r < kept.size(); ++r) y[static_cast<Eigen::Index>(r)] = parse_number((*kept[r])[ypos], schema.response_name, r + 1);
        out.dataset = Dataset(std::move(cols), std::move(y), schema.response_kind);
    } else {
        out.dataset = Dataset(std::move(cols));
    }
    return out;
}

LoadedData load_dataset(const std::string& csv_path, const std::string& schema_path, bool require_response)
{
    const DataSchema schema = read_schema_file(schema_path);
    return dataset_from_csv(read_csv_file(csv_path), schema, require_response);
}

std::string dataset_csv(const Dataset& d, const std::string& response_name)
{
    std::vector<std::string> header = d.column_names();
    if (d.has_response()) header.push_back(response_name);
    std::string out = csv_line(header);
    std::vector<std::string> row(header.size());
    for (std::size_t i = 0; i < d.n(); ++i) {
        for (std::size_t j = 0; j < d.p(); ++j) {
            const auto& c = d.column(j);
            row[j] = c.is_qualitative() ? c.levels[static_cast<std::size_t>(c.codes[i])] : format_number(c.values[i]);
        }
        if (d.has_response()) row.back() = format_number(d.y()[static_cast<Eigen::Index>(i)]);
        out += csv_line(row);
    }
    return out;
}

DataSchema schema_of(const Dataset& d, const std::string& response_name)
{
    DataSchema s;
    if (d.has_response()) {
        s.response_name = response_name;
        s.response_kind = d.response_kind();
    }
    for (const auto& c : d.columns()) s.columns.emplace_back(c.name, c.kind);
    return s;
}

std::map<std::string, int> read_groups_file(const std::string& path)
{
    const CsvTable t = read_csv_file(path);
    const std::size_t vi = t.index_of("variable");
    const std::size_t gi = t.index_of("group");
    std::map<std::string, int> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const std::string name(trim(t.rows[r][vi]));
        const double g = parse_number(t.rows[r][gi], "group", r + 1);
        if (g < 1.0 || g != std::floor(g)) throw Error(ErrorCode::ParseError, "group of '" + name + "' must be a positive integer");
        if (!out.emplace(name, static_cast<int>(g)).second) throw Error(ErrorCode::ParseError, "variable '" + name + "' listed twice");
    }
    if (out.empty()) throw Error(ErrorCode::ParseError, "groups file lists no variables");
    return out;
}

} // namespace grpsel
