#include "reprocs/io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

static_assert(std::endian::native == std::endian::little,
              "the RPCA container assumes a little-endian host");

namespace reprocs::io {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw Error("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path, bool binary) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw Error("cannot open for reading: " + path.string());
    return in;
}

std::string escape_field(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

std::vector<double> to_row_major(const Matrix& m) {
    std::vector<double> flat;
    flat.reserve(m.size());
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) flat.push_back(m(i, j));
    }
    return flat;
}

Matrix from_row_major(const std::vector<double>& flat, Index rows,
                      Index cols) {
    if (static_cast<Index>(flat.size()) != rows * cols) {
        throw Error("matrix payload size mismatch");
    }
    Matrix m(rows, cols);
    size_t k = 0;
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) m(i, j) = flat[k++];
    }
    return m;
}

json matrix_to_json(const Matrix& m) {
    return json{{"rows", m.rows()}, {"cols", m.cols()},
                {"data", to_row_major(m)}};
}

Matrix matrix_from_json(const json& j) {
    return from_row_major(j.at("data").get<std::vector<double>>(),
                          j.at("rows").get<Index>(), j.at("cols").get<Index>());
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    auto out = open_out(path, true);  // binary keeps CRLF exact
    auto write_row = [&out](const std::vector<std::string>& fields) {
        for (size_t i = 0; i < fields.size(); ++i) {
            if (i > 0) out << ',';
            out << escape_field(fields[i]);
        }
        out << "\r\n";
    };
    write_row(header);
    for (const auto& row : rows) write_row(row);
}

Csv read_csv(const std::filesystem::path& path) {
    auto in = open_in(path, false);
    Csv csv;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.eof()) break;
        std::vector<std::string> fields;
        std::string field;
        bool quoted = false;
        for (size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        field += '"';
                        ++i;
                    } else {
                        quoted = false;
                    }
                } else {
                    field += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
            } else {
                field += c;
            }
        }
        fields.push_back(std::move(field));
        if (first) {
            csv.header = std::move(fields);
            first = false;
        } else {
            csv.rows.push_back(std::move(fields));
        }
    }
    return csv;
}

void write_stream_csv(const std::filesystem::path& path, const Matrix& m) {
    std::vector<std::string> header;
    header.reserve(m.rows() + 1);
    header.emplace_back("t");
    for (Index i = 0; i < m.rows(); ++i) {
        header.push_back("m_" + std::to_string(i + 1));
    }
    std::vector<std::vector<std::string>> rows;
    rows.reserve(m.cols());
    for (Index t = 0; t < m.cols(); ++t) {
        std::vector<std::string> row;
        row.reserve(m.rows() + 1);
        row.push_back(std::to_string(t + 1));
        for (Index i = 0; i < m.rows(); ++i) {
            row.push_back(format_double(m(i, t)));
        }
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

Matrix read_stream_csv(const std::filesystem::path& path) {
    const Csv csv = read_csv(path);
    if (csv.header.empty() || csv.header[0] != "t") {
        throw Error("stream CSV must start with a 't' column: " + path.string());
    }
    const Index n = static_cast<Index>(csv.header.size()) - 1;
    Matrix m(n, static_cast<Index>(csv.rows.size()));
    for (size_t r = 0; r < csv.rows.size(); ++r) {
        if (static_cast<Index>(csv.rows[r].size()) != n + 1) {
            throw Error("ragged stream CSV row in " + path.string());
        }
        for (Index i = 0; i < n; ++i) {
            m(i, static_cast<Index>(r)) = std::stod(csv.rows[r][i + 1]);
        }
    }
    return m;
}

void write_rpca(const std::filesystem::path& path, const Matrix& m) {
    auto out = open_out(path, true);
    out.write("RPCA", 4);
    const std::uint32_t rows = static_cast<std::uint32_t>(m.rows());
    const std::uint32_t cols = static_cast<std::uint32_t>(m.cols());
    out.write(reinterpret_cast<const char*>(&rows), 4);
    out.write(reinterpret_cast<const char*>(&cols), 4);
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            out.write(reinterpret_cast<const char*>(&v), 8);
        }
    }
}

Matrix read_rpca(const std::filesystem::path& path) {
    auto in = open_in(path, true);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "RPCA", 4) != 0) {
        throw Error("bad RPCA magic in " + path.string());
    }
    std::uint32_t rows = 0, cols = 0;
    in.read(reinterpret_cast<char*>(&rows), 4);
    in.read(reinterpret_cast<char*>(&cols), 4);
    Matrix m(rows, cols);
    for (std::uint32_t i = 0; i < rows; ++i) {
        for (std::uint32_t j = 0; j < cols; ++j) {
            double v;
            in.read(reinterpret_cast<char*>(&v), 8);
            m(i, j) = v;
        }
    }
    if (!in) throw Error("truncated RPCA container: " + path.string());
    return m;
}

void write_metrics_csv(const std::filesystem::path& path,
                       const analysis::MetricsLog& log) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(log.rows.size());
    for (const auto& r : log.rows) {
        rows.push_back({std::to_string(r.t), format_double(r.se),
                        format_double(r.x_err), format_double(r.rel_x_err),
                        r.support_exact ? "1" : "0",
                        std::to_string(r.solver_inner)});
    }
    write_csv(path, {"t", "se", "x_err", "rel_x_err", "support_exact",
                     "solver_iters"},
              rows);
}

void save_checkpoint(const std::filesystem::path& path,
                     const ReprocsParams& params, const TrackerState& state) {
    json j;
    j["schema_version"] = 1;
    j["params"] = {{"xi", params.xi},
                   {"omega", params.omega},
                   {"alpha", params.alpha},
                   {"K", params.K},
                   {"change_times", params.change_times},
                   {"c_new", params.c_new},
                   {"support_size_hint", params.support_size_hint},
                   {"solver_tol", params.solver.tol},
                   {"solver_max_inner", params.solver.max_inner},
                   {"solver_max_outer", params.solver.max_outer}};
    j["state"] = {{"p_star", matrix_to_json(state.p_star)},
                  {"p_new", matrix_to_json(state.p_new)},
                  {"j", state.j},
                  {"k", state.k},
                  {"last_t", state.last_t},
                  {"buffer", matrix_to_json(state.buffer)},
                  {"buffer_filled", state.buffer_filled}};
    auto out = open_out(path, false);
    out << j.dump(2) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    auto in = open_in(path, false);
    json j;
    in >> j;
    if (j.at("schema_version").get<int>() != 1) {
        throw ConfigError("unsupported checkpoint schema version");
    }
    Checkpoint cp;
    const json& p = j.at("params");
    cp.params.xi = p.at("xi").get<double>();
    cp.params.omega = p.at("omega").get<double>();
    cp.params.alpha = p.at("alpha").get<long>();
    cp.params.K = p.at("K").get<int>();
    cp.params.change_times = p.at("change_times").get<std::vector<long>>();
    cp.params.c_new = p.at("c_new").get<std::vector<int>>();
    cp.params.support_size_hint = p.at("support_size_hint").get<int>();
    cp.params.solver.tol = p.at("solver_tol").get<double>();
    cp.params.solver.max_inner = p.at("solver_max_inner").get<int>();
    cp.params.solver.max_outer = p.at("solver_max_outer").get<int>();
    const json& s = j.at("state");
    cp.state.p_star = matrix_from_json(s.at("p_star"));
    cp.state.p_new = matrix_from_json(s.at("p_new"));
    cp.state.j = s.at("j").get<int>();
    cp.state.k = s.at("k").get<int>();
    cp.state.last_t = s.at("last_t").get<long>();
    cp.state.buffer = matrix_from_json(s.at("buffer"));
    cp.state.buffer_filled = s.at("buffer_filled").get<long>();
    return cp;
}

}  // namespace reprocs::io
