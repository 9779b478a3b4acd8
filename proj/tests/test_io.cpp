// Dataset loading: binary IMU records (golden fixtures, every encoding,
// schema configs, round trips) and delimited text tables.
#include <wavecal/error.hpp>
#include <wavecal/io.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

using namespace wavecal;

namespace {

std::string fixture(const std::string& name) {
    return std::string(WAVECAL_FIXTURE_DIR) + "/" + name;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    out << text;
}

std::vector<unsigned char> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

// ===== binary records =====

TEST(ImuBinary, GoldenDefaultSchemaFixture) {
    SensorDataset ds = read_imu_binary(fixture("navchip_flt.bin"), imu_schema("NAVCHIP_FLT"));
    ASSERT_EQ(ds.length(), 16u);
    ASSERT_EQ(ds.channels.size(), 6u);
    EXPECT_DOUBLE_EQ(ds.freq, 250.0);
    EXPECT_EQ(ds.imu_type, "NAVCHIP_FLT");
    for (std::size_t i = 0; i < 16; ++i) {
        const double k = static_cast<double>(i);
        EXPECT_DOUBLE_EQ(ds.time[i], k / 250.0);
        EXPECT_DOUBLE_EQ(ds.channels[0].samples[i], 0.25 + 0.001 * k);
        EXPECT_DOUBLE_EQ(ds.channels[1].samples[i], -1.5 + 0.002 * k);
        EXPECT_DOUBLE_EQ(ds.channels[2].samples[i], 0.125 * k);
        EXPECT_DOUBLE_EQ(ds.channels[3].samples[i], 9.8 + 0.01 * k);
        EXPECT_DOUBLE_EQ(ds.channels[4].samples[i], -0.5 * k);
        EXPECT_DOUBLE_EQ(ds.channels[5].samples[i], 2.0 - 0.25 * k);
    }
    EXPECT_EQ(ds.channels[0].kind, ChannelKind::Gyro);
    EXPECT_EQ(ds.channels[0].axis, 'X');
    EXPECT_EQ(ds.channels[5].kind, ChannelKind::Accel);
    EXPECT_EQ(ds.channels[5].axis, 'Z');
}

TEST(ImuBinary, GoldenMixedEncodingFixture) {
    ImuBinarySchema schema = imu_schema_from_json(fixture("mixed_schema.json"));
    EXPECT_EQ(schema.imu_type, "BENCH_MIXED");
    EXPECT_DOUBLE_EQ(schema.freq, 125.0);
    EXPECT_EQ(schema.record_size(), 28u);
    SensorDataset ds = read_imu_binary(fixture("mixed.bin"), schema);
    ASSERT_EQ(ds.length(), 12u);
    for (std::size_t i = 0; i < 12; ++i) {
        const double k = static_cast<double>(i);
        EXPECT_DOUBLE_EQ(ds.time[i], k / 125.0);
        // float32 fields scaled by 0.5, then the integer fields by their factors
        EXPECT_DOUBLE_EQ(ds.channels[0].samples[i], 0.5 * (1.0 + 0.5 * k));
        EXPECT_DOUBLE_EQ(ds.channels[1].samples[i], 0.5 * (-2.0 * k));
        EXPECT_DOUBLE_EQ(ds.channels[2].samples[i], 0.5 * (0.25 * k));
        EXPECT_DOUBLE_EQ(ds.channels[3].samples[i], 0.001 * (1000.0 * k - 3000.0));
        EXPECT_DOUBLE_EQ(ds.channels[4].samples[i], 0.01 * (10.0 * k - 50.0));
        EXPECT_DOUBLE_EQ(ds.channels[5].samples[i], 0.01 * (-4.0 * k));
    }
}

TEST(ImuBinary, RoundTripIsBitIdenticalForEveryRegistrySchema) {
    SensorDataset src = read_imu_binary(fixture("navchip_flt.bin"), imu_schema("NAVCHIP_FLT"));
    for (const auto& [name, schema] : imu_schema_registry()) {
        const std::string path = temp_path("wc_rt_" + name + ".bin");
        write_imu_binary(path, src, schema);
        SensorDataset back = read_imu_binary(path, schema);
        ASSERT_EQ(back.length(), src.length()) << name;
        for (int c = 0; c < 6; ++c)
            for (std::size_t i = 0; i < src.length(); ++i)
                EXPECT_DOUBLE_EQ(back.channels[c].samples[i], src.channels[c].samples[i])
                    << name << " channel " << c << " record " << i;
        // writing the read-back dataset must reproduce the file byte for byte
        const std::string path2 = temp_path("wc_rt2_" + name + ".bin");
        write_imu_binary(path2, back, schema);
        EXPECT_EQ(slurp(path), slurp(path2)) << name;
        std::remove(path.c_str());
        std::remove(path2.c_str());
    }
}

TEST(ImuBinary, RoundTripPreservesMixedEncodingsAndScales) {
    ImuBinarySchema schema = imu_schema_from_json(fixture("mixed_schema.json"));
    SensorDataset src = read_imu_binary(fixture("mixed.bin"), schema);
    const std::string path = temp_path("wc_mixed_rt.bin");
    write_imu_binary(path, src, schema);
    EXPECT_EQ(slurp(path), slurp(fixture("mixed.bin")));
    std::remove(path.c_str());
}

TEST(ImuBinary, BigEndianFieldsDecodeAndRoundTrip) {
    ImuBinarySchema schema;
    schema.imu_type = "BE";
    schema.freq = 10.0;
    schema.fields.fill(FieldEncoding::F64BE);
    SensorDataset src;
    src.freq = 10.0;
    src.time = {0.0, 0.1, 0.2};
    const char axes[3] = {'X', 'Y', 'Z'};
    for (int c = 0; c < 6; ++c) {
        Channel ch;
        ch.kind = c < 3 ? ChannelKind::Gyro : ChannelKind::Accel;
        ch.axis = axes[c % 3];
        ch.samples = {1.25 * (c + 1), -0.5 * c, 1e-3 + c};
        src.channels.push_back(std::move(ch));
    }
    const std::string path = temp_path("wc_be.bin");
    write_imu_binary(path, src, schema);
    // spot-check the byte order of the first field (1.0*0 = time 0.0 is all
    // zero, so look at the second record's time 0.1 instead)
    auto bytes = slurp(path);
    ASSERT_EQ(bytes.size(), 3u * 56u);
    EXPECT_EQ(bytes[56], 0x3f); // big endian stores the exponent byte first
    SensorDataset back = read_imu_binary(path, schema);
    for (int c = 0; c < 6; ++c)
        for (std::size_t i = 0; i < 3; ++i)
            EXPECT_DOUBLE_EQ(back.channels[c].samples[i], src.channels[c].samples[i]);
    std::remove(path.c_str());
}

TEST(ImuBinary, TruncatedFileIsRejected) {
    auto bytes = slurp(fixture("navchip_flt.bin"));
    bytes.resize(bytes.size() - 5);
    const std::string path = temp_path("wc_trunc.bin");
    std::ofstream(path, std::ios::binary)
        .write(reinterpret_cast<const char*>(bytes.data()),
               static_cast<std::streamsize>(bytes.size()));
    EXPECT_THROW(read_imu_binary(path, imu_schema("NAVCHIP_FLT")), DataError);
    std::remove(path.c_str());
}

TEST(ImuBinary, NanSampleIsRejected) {
    SensorDataset src = read_imu_binary(fixture("navchip_flt.bin"), imu_schema("NAVCHIP_FLT"));
    src.channels[2].samples[7] = std::numeric_limits<double>::quiet_NaN();
    const std::string path = temp_path("wc_nan.bin");
    write_imu_binary(path, src, imu_schema("IMAR"));
    EXPECT_THROW(read_imu_binary(path, imu_schema("IMAR")), DataError);
    std::remove(path.c_str());
}

TEST(ImuBinary, UnknownTypeAndMissingFileAreErrors) {
    EXPECT_THROW(imu_schema("NOT_A_DEVICE"), DataError);
    EXPECT_THROW(read_imu_binary(temp_path("wc_no_such_file.bin"), imu_schema("IXSEA")), DataError);
}

TEST(ImuBinary, SchemaConfigOverridesRegistryBase) {
    const std::string path = temp_path("wc_schema.json");
    write_text(path, R"({"base": "LN200", "freq": 512.0, "scale": [2, 2, 2, 1, 1, 1]})");
    ImuBinarySchema s = imu_schema_from_json(path);
    EXPECT_EQ(s.imu_type, "LN200");
    EXPECT_DOUBLE_EQ(s.freq, 512.0);
    EXPECT_DOUBLE_EQ(s.scale[0], 2.0);
    EXPECT_DOUBLE_EQ(s.scale[5], 1.0);
    EXPECT_EQ(s.fields[0], FieldEncoding::F64LE);
    std::remove(path.c_str());
}

TEST(ImuBinary, SchemaConfigValidation) {
    const std::string path = temp_path("wc_schema_bad.json");
    write_text(path, R"({"fields": ["f64le", "f64le"]})");
    EXPECT_THROW(imu_schema_from_json(path), DataError);
    write_text(path, R"({"freq": -1})");
    EXPECT_THROW(imu_schema_from_json(path), DataError);
    write_text(path, R"({"fields": ["f64le","f64le","f64le","f64le","f64le","f64le","u8"]})");
    EXPECT_THROW(imu_schema_from_json(path), UsageError);
    write_text(path, "not json at all");
    EXPECT_THROW(imu_schema_from_json(path), DataError);
    std::remove(path.c_str());
}

// ===== delimited tables =====

TEST(Table, CommaAndTabGiveIdenticalData) {
    const std::string csv = temp_path("wc_tbl.csv");
    const std::string tsv = temp_path("wc_tbl.tsv");
    write_text(csv, "0.0,1.5,-2.5\n0.1,1.6,-2.4\n0.2,1.7,-2.3\n");
    write_text(tsv, "0.0\t1.5\t-2.5\n0.1\t1.6\t-2.4\n0.2\t1.7\t-2.3\n");
    TableOptions a, b;
    a.freq = b.freq = 100.0;
    a.time_col = b.time_col = 1;
    a.gyro_cols = b.gyro_cols = {2, 3};
    b.delimiter = '\t';
    SensorDataset da = read_table(csv, a);
    SensorDataset db = read_table(tsv, b);
    ASSERT_EQ(da.length(), 3u);
    ASSERT_EQ(da.channels.size(), db.channels.size());
    for (std::size_t c = 0; c < da.channels.size(); ++c)
        EXPECT_EQ(da.channels[c].samples, db.channels[c].samples);
    EXPECT_EQ(da.time, db.time);
    std::remove(csv.c_str());
    std::remove(tsv.c_str());
}

TEST(Table, HeaderNamesBecomeChannelLabels) {
    const std::string path = temp_path("wc_hdr.csv");
    write_text(path, "t,wx,az\n0,0.5,9.81\n0.01,0.6,9.80\n");
    TableOptions opt;
    opt.freq = 100.0;
    opt.header = true;
    opt.time_col = 1;
    opt.gyro_cols = {2};
    opt.accel_cols = {3};
    SensorDataset ds = read_table(path, opt);
    ASSERT_EQ(ds.channels.size(), 2u);
    EXPECT_EQ(ds.channels[0].label, "wx");
    EXPECT_EQ(ds.channels[0].kind, ChannelKind::Gyro);
    EXPECT_EQ(ds.channels[1].label, "az");
    EXPECT_EQ(ds.channels[1].kind, ChannelKind::Accel);
    EXPECT_EQ(ds.length(), 2u);
    std::remove(path.c_str());
}

TEST(Table, CommentLinesAreSkipped) {
    const std::string path = temp_path("wc_cmt.csv");
    write_text(path, "# produced by a bench run\n1.0,2.0\n# midstream note\n3.0,4.0\n");
    TableOptions opt;
    opt.freq = 50.0;
    SensorDataset ds = read_table(path, opt);
    ASSERT_EQ(ds.channels.size(), 2u);
    EXPECT_EQ(ds.channels[0].samples, (std::vector<double>{1.0, 3.0}));
    EXPECT_EQ(ds.channels[1].samples, (std::vector<double>{2.0, 4.0}));
    std::remove(path.c_str());
}

TEST(Table, MalformedInputsAreErrors) {
    const std::string path = temp_path("wc_bad.csv");
    TableOptions opt;
    opt.freq = 100.0;
    write_text(path, "1,2,3\n4,5\n");
    EXPECT_THROW(read_table(path, opt), DataError); // ragged row
    write_text(path, "1,2\n3,oops\n");
    EXPECT_THROW(read_table(path, opt), DataError); // non-numeric cell
    write_text(path, "# only comments\n");
    EXPECT_THROW(read_table(path, opt), DataError); // no data rows
    write_text(path, "1,2\n");
    TableOptions bad = opt;
    bad.gyro_cols = {5};
    EXPECT_THROW(read_table(path, bad), DataError); // column out of range
    TableOptions nofreq;
    EXPECT_THROW(read_table(path, nofreq), UsageError);
    std::remove(path.c_str());
}

TEST(Table, SingleColumnStreamReader) {
    std::istringstream in("# seed=1\nvalue\n1.5\n-2.25\n3.75\r\n");
    std::vector<double> v = read_series(in);
    EXPECT_EQ(v, (std::vector<double>{1.5, -2.25, 3.75}));
    std::istringstream empty("# nothing\n");
    EXPECT_THROW(read_series(empty), DataError);
}
