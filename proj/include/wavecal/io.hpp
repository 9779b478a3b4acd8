// Sensor dataset loading: the seven-field binary IMU record format,
// delimited text tables, and the SensorDataset container.
#pragma once

#include <wavecal/error.hpp>

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace wavecal {

enum class ChannelKind { Gyro, Accel };

struct Channel {
    ChannelKind kind = ChannelKind::Gyro;
    char axis = 'X';
    std::string label; ///< header name when read from a table
    std::vector<double> samples;
};

struct SensorDataset {
    std::vector<Channel> channels;
    std::vector<double> time; ///< optional, empty when absent
    double freq = 0.0;        ///< Hz
    std::string source_path;
    std::string imu_type;

    std::size_t length() const { return channels.empty() ? 0 : channels[0].samples.size(); }

    const Channel* find(ChannelKind kind, char axis) const {
        for (const auto& c : channels)
            if (c.kind == kind && c.axis == axis) return &c;
        return nullptr;
    }
};

enum class FieldEncoding { F64LE, F64BE, F32LE, I32LE, I16LE };

inline std::size_t encoding_width(FieldEncoding e) {
    switch (e) {
    case FieldEncoding::F64LE:
    case FieldEncoding::F64BE: return 8;
    case FieldEncoding::F32LE:
    case FieldEncoding::I32LE: return 4;
    case FieldEncoding::I16LE: return 2;
    }
    return 8;
}

inline FieldEncoding encoding_from_name(const std::string& s) {
    if (s == "f64le") return FieldEncoding::F64LE;
    if (s == "f64be") return FieldEncoding::F64BE;
    if (s == "f32le") return FieldEncoding::F32LE;
    if (s == "i32le") return FieldEncoding::I32LE;
    if (s == "i16le") return FieldEncoding::I16LE;
    throw UsageError("unknown field encoding '" + s + "' (f64le, f64be, f32le, i32le, i16le)");
}

inline const char* encoding_name(FieldEncoding e) {
    switch (e) {
    case FieldEncoding::F64LE: return "f64le";
    case FieldEncoding::F64BE: return "f64be";
    case FieldEncoding::F32LE: return "f32le";
    case FieldEncoding::I32LE: return "i32le";
    case FieldEncoding::I16LE: return "i16le";
    }
    return "f64le";
}

/// Fixed seven-field record: time, gyro X/Y/Z, accel X/Y/Z.
struct ImuBinarySchema {
    std::string imu_type;
    std::array<FieldEncoding, 7> fields{FieldEncoding::F64LE, FieldEncoding::F64LE,
                                        FieldEncoding::F64LE, FieldEncoding::F64LE,
                                        FieldEncoding::F64LE, FieldEncoding::F64LE,
                                        FieldEncoding::F64LE};
    /// Multipliers applied to fields 2..7 on read (divided out on write).
    /// NOTE: the built-in registry ships 1.0 placeholders; real deployments
    /// must supply device factors via a schema config file.
    std::array<double, 6> scale{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    double freq = 100.0;

    std::size_t record_size() const {
        std::size_t n = 0;
        for (auto e : fields) n += encoding_width(e);
        return n;
    }
};

/// Built-in schema registry. All entries use the default encoding (seven
/// little-endian 64-bit floats) and unit scale factors; override per device
/// with a JSON schema config.
inline const std::map<std::string, ImuBinarySchema>& imu_schema_registry() {
    static const std::map<std::string, ImuBinarySchema> reg = [] {
        std::map<std::string, ImuBinarySchema> r;
        auto add = [&](const char* name, double freq) {
            ImuBinarySchema s;
            s.imu_type = name;
            s.freq = freq;
            r[name] = s;
        };
        add("IMAR", 400.0);
        add("LN200", 400.0);
        add("LN200IG", 400.0);
        add("IXSEA", 100.0);
        add("NAVCHIP_INT", 250.0);
        add("NAVCHIP_FLT", 250.0);
        return r;
    }();
    return reg;
}

inline ImuBinarySchema imu_schema(const std::string& name) {
    auto it = imu_schema_registry().find(name);
    if (it == imu_schema_registry().end()) throw DataError("unknown imu_type '" + name + "'");
    return it->second;
}

/// Load a schema (or overrides to a registry schema) from a JSON config:
/// { "imu_type": ..., "base": "LN200", "freq": ..., "fields": [7 encoding
/// names], "scale": [6 numbers] }.
inline ImuBinarySchema imu_schema_from_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open schema config '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("schema config '" + path + "': " + e.what());
    }
    ImuBinarySchema s;
    if (j.contains("base")) s = imu_schema(j.at("base").get<std::string>());
    if (j.contains("imu_type")) s.imu_type = j.at("imu_type").get<std::string>();
    if (j.contains("freq")) s.freq = j.at("freq").get<double>();
    if (j.contains("fields")) {
        auto arr = j.at("fields");
        if (arr.size() != 7) throw DataError("schema config: 'fields' must have 7 entries");
        for (std::size_t i = 0; i < 7; ++i)
            s.fields[i] = encoding_from_name(arr[i].get<std::string>());
    }
    if (j.contains("scale")) {
        auto arr = j.at("scale");
        if (arr.size() != 6) throw DataError("schema config: 'scale' must have 6 entries");
        for (std::size_t i = 0; i < 6; ++i) s.scale[i] = arr[i].get<double>();
    }
    if (s.freq <= 0.0) throw DataError("schema config: freq must be > 0");
    return s;
}

namespace detail {

inline double decode_field(const unsigned char* p, FieldEncoding e) {
    auto load = [&](auto value, std::size_t w, bool big) {
        std::uint64_t u = 0;
        for (std::size_t i = 0; i < w; ++i)
            u |= static_cast<std::uint64_t>(p[i]) << (8 * (big ? w - 1 - i : i));
        std::memcpy(&value, &u, sizeof(value));
        return value;
    };
    switch (e) {
    case FieldEncoding::F64LE: return load(double{}, 8, false);
    case FieldEncoding::F64BE: return load(double{}, 8, true);
    case FieldEncoding::F32LE: return static_cast<double>(load(float{}, 4, false));
    case FieldEncoding::I32LE: return static_cast<double>(load(std::int32_t{}, 4, false));
    case FieldEncoding::I16LE: return static_cast<double>(load(std::int16_t{}, 2, false));
    }
    return 0.0;
}

inline void encode_field(unsigned char* p, FieldEncoding e, double v) {
    auto store = [&](auto value, std::size_t w, bool big) {
        std::uint64_t u = 0;
        std::memcpy(&u, &value, sizeof(value));
        for (std::size_t i = 0; i < w; ++i)
            p[i] = static_cast<unsigned char>(u >> (8 * (big ? w - 1 - i : i)));
    };
    switch (e) {
    case FieldEncoding::F64LE: store(v, 8, false); break;
    case FieldEncoding::F64BE: store(v, 8, true); break;
    case FieldEncoding::F32LE: store(static_cast<float>(v), 4, false); break;
    case FieldEncoding::I32LE: store(static_cast<std::int32_t>(std::llround(v)), 4, false); break;
    case FieldEncoding::I16LE: store(static_cast<std::int16_t>(std::llround(v)), 2, false); break;
    }
}

} // namespace detail

inline SensorDataset read_imu_binary(const std::string& path, const ImuBinarySchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::vector<unsigned char> raw((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    const std::size_t rec = schema.record_size();
    if (raw.size() % rec != 0)
        throw DataError("'" + path + "': file size " + std::to_string(raw.size()) +
                        " is not a multiple of the record size " + std::to_string(rec));
    const std::size_t n = raw.size() / rec;

    SensorDataset ds;
    ds.freq = schema.freq;
    ds.source_path = path;
    ds.imu_type = schema.imu_type;
    ds.time.resize(n);
    const char axes[3] = {'X', 'Y', 'Z'};
    for (int c = 0; c < 6; ++c) {
        Channel ch;
        ch.kind = c < 3 ? ChannelKind::Gyro : ChannelKind::Accel;
        ch.axis = axes[c % 3];
        ch.label = std::string(c < 3 ? "gyro_" : "accel_") + ch.axis;
        ch.samples.resize(n);
        ds.channels.push_back(std::move(ch));
    }
    std::array<std::size_t, 7> off{};
    for (int f = 1; f < 7; ++f) off[f] = off[f - 1] + encoding_width(schema.fields[f - 1]);
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned char* p = raw.data() + i * rec;
        ds.time[i] = detail::decode_field(p + off[0], schema.fields[0]);
        for (int c = 0; c < 6; ++c) {
            double v = detail::decode_field(p + off[c + 1], schema.fields[c + 1]) * schema.scale[c];
            if (std::isnan(v))
                throw DataError("'" + path + "': NaN value in record " + std::to_string(i));
            ds.channels[c].samples[i] = v;
        }
    }
    return ds;
}

inline void write_imu_binary(const std::string& path, const SensorDataset& ds,
                             const ImuBinarySchema& schema) {
    if (ds.channels.size() != 6)
        throw UsageError("write_imu_binary: dataset must have exactly 6 channels");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    const std::size_t n = ds.length();
    const std::size_t rec = schema.record_size();
    std::vector<unsigned char> buf(rec);
    std::array<std::size_t, 7> off{};
    for (int f = 1; f < 7; ++f) off[f] = off[f - 1] + encoding_width(schema.fields[f - 1]);
    for (std::size_t i = 0; i < n; ++i) {
        double t = i < ds.time.size() ? ds.time[i] : static_cast<double>(i) / schema.freq;
        detail::encode_field(buf.data() + off[0], schema.fields[0], t);
        for (int c = 0; c < 6; ++c)
            detail::encode_field(buf.data() + off[c + 1], schema.fields[c + 1],
                                 ds.channels[c].samples[i] / schema.scale[c]);
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(rec));
    }
    if (!out) throw DataError("write failed for '" + path + "'");
}

// ===== delimited tables =====

struct TableOptions {
    char delimiter = ',';
    bool header = false;
    double freq = 0.0;
    std::vector<int> gyro_cols;  ///< 1-based column indices
    std::vector<int> accel_cols; ///< 1-based column indices
    int time_col = 0;            ///< 1-based, 0 = none
};

namespace detail {

inline std::vector<std::string> split_row(const std::string& line, char delim) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == delim) {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    cells.push_back(cur);
    return cells;
}

inline double parse_cell(const std::string& s, std::size_t row, std::size_t col) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("non-numeric cell '" + s + "' at row " + std::to_string(row) + ", column " +
                        std::to_string(col));
    }
}

} // namespace detail

inline SensorDataset read_table(const std::string& path, const TableOptions& opt) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    if (opt.freq <= 0.0) throw UsageError("read_table: freq must be > 0");

    std::vector<std::string> header;
    std::vector<std::vector<double>> cols;
    std::string line;
    std::size_t row = 0, width = 0;
    bool want_header = opt.header;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells = detail::split_row(line, opt.delimiter);
        if (want_header) {
            header = cells;
            width = cells.size();
            want_header = false;
            continue;
        }
        ++row;
        if (width == 0) {
            width = cells.size();
            cols.resize(width);
        }
        if (cells.size() != width)
            throw DataError("ragged row " + std::to_string(row) + ": expected " +
                            std::to_string(width) + " cells, got " + std::to_string(cells.size()));
        if (cols.empty()) cols.resize(width);
        for (std::size_t c = 0; c < width; ++c)
            cols[c].push_back(detail::parse_cell(cells[c], row, c + 1));
    }
    if (row == 0) throw DataError("'" + path + "': no data rows");

    SensorDataset ds;
    ds.freq = opt.freq;
    ds.source_path = path;
    auto take = [&](int one_based, std::size_t r) -> std::vector<double>& {
        if (one_based < 1 || static_cast<std::size_t>(one_based) > width)
            throw DataError("column index " + std::to_string(one_based) + " out of range (table has " +
                            std::to_string(width) + " columns), row " + std::to_string(r));
        return cols[static_cast<std::size_t>(one_based) - 1];
    };
    const char axes[3] = {'X', 'Y', 'Z'};
    auto add = [&](const std::vector<int>& idx, ChannelKind kind, const char* prefix) {
        for (std::size_t i = 0; i < idx.size(); ++i) {
            Channel ch;
            ch.kind = kind;
            ch.axis = i < 3 ? axes[i] : static_cast<char>('A' + i);
            std::size_t c = static_cast<std::size_t>(idx[i]) - 1;
            ch.label = (!header.empty() && c < header.size() && !header[c].empty())
                           ? header[c]
                           : std::string(prefix) + ch.axis;
            ch.samples = take(idx[i], 1);
            ds.channels.push_back(std::move(ch));
        }
    };
    add(opt.gyro_cols, ChannelKind::Gyro, "gyro_");
    add(opt.accel_cols, ChannelKind::Accel, "accel_");
    if (opt.time_col > 0) ds.time = take(opt.time_col, 1);
    if (ds.channels.empty()) {
        // no mapping given: every column becomes a generic gyro channel
        for (std::size_t c = 0; c < width; ++c) {
            Channel ch;
            ch.kind = ChannelKind::Gyro;
            ch.axis = static_cast<char>(c < 3 ? "XYZ"[c] : 'A' + c);
            ch.label = (!header.empty() && c < header.size() && !header[c].empty())
                           ? header[c]
                           : "col" + std::to_string(c + 1);
            ch.samples = cols[c];
            ds.channels.push_back(std::move(ch));
        }
    }
    return ds;
}

/// Read a single-column series (plain numbers, one per line, optional header
/// handled by read_table when delimited). Convenience for CLI pipelines.
inline std::vector<double> read_series(std::istream& in) {
    std::vector<double> out;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        ++row;
        if (row == 1) {
            // tolerate a non-numeric header line
            try {
                std::size_t pos = 0;
                out.push_back(std::stod(line, &pos));
            } catch (const std::exception&) {
            }
            continue;
        }
        out.push_back(detail::parse_cell(line, row, 1));
    }
    if (out.empty()) throw DataError("no numeric input rows");
    return out;
}

} // namespace wavecal
