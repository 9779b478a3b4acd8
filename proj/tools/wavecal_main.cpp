// wavecal: command line front end.
// Workflow: import -> wvar/avar/hvar -> fit -> rank/auto -> plot.
#include <wavecal/wavecal.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace wavecal;

namespace {

// ---- shared option bundles ------------------------------------------------

struct GlobalOpts {
    std::uint64_t seed = 0;
    double freq = 1.0;
    bool robust = false;
    double eff = 0.6;
    bool json = false;
    int threads = 1;
};

struct InputOpts {
    std::string input;   ///< path, or "-" / empty for stdin
    std::string format;  ///< "", csv, tsv, bin
    std::string imu_type;
    std::string schema_path;
    std::string channel; ///< e.g. gyro:Y, accel:X, or 1-based column number
    bool header = false;
    std::vector<int> gyro_cols, accel_cols;
    int time_col = 0;
};

void add_global(CLI::App* cmd, GlobalOpts& g) {
    cmd->add_option("--seed", g.seed, "RNG seed");
    cmd->add_option("--freq", g.freq, "sampling frequency in Hz")->check(CLI::PositiveNumber);
    cmd->add_flag("--robust", g.robust, "use the robust wavelet-variance estimator");
    cmd->add_option("--eff", g.eff, "robust estimator efficiency in (0, 1]")
        ->check(CLI::Range(1e-3, 1.0));
    cmd->add_flag("--json", g.json, "JSON output (and JSON errors on stderr)");
    cmd->add_option("--threads", g.threads, "worker threads (0 = hardware)");
}

void add_input(CLI::App* cmd, InputOpts& in) {
    cmd->add_option("-i,--input", in.input, "input file ('-' or absent: stdin)");
    cmd->add_option("--format", in.format, "input format: csv, tsv, bin")
        ->check(CLI::IsMember({"csv", "tsv", "bin"}));
    cmd->add_option("--imu-type", in.imu_type, "binary schema registry name");
    cmd->add_option("--schema", in.schema_path, "binary schema config (JSON)");
    cmd->add_option("--channel", in.channel, "channel label gyro:Y / accel:X, or column number");
    cmd->add_flag("--header", in.header, "first table row is a header");
    cmd->add_option("--gyro-cols", in.gyro_cols, "1-based gyro column indices");
    cmd->add_option("--accel-cols", in.accel_cols, "1-based accel column indices");
    cmd->add_option("--time-col", in.time_col, "1-based time column index");
}

std::string guess_format(const InputOpts& in) {
    if (!in.format.empty()) return in.format;
    if (!in.imu_type.empty() || !in.schema_path.empty()) return "bin";
    auto dot = in.input.rfind('.');
    std::string ext = dot == std::string::npos ? "" : in.input.substr(dot + 1);
    if (ext == "tsv") return "tsv";
    if (ext == "bin" || ext == "imu" || ext == "dat") return "bin";
    return "csv";
}

SensorDataset load_dataset(const InputOpts& in, const GlobalOpts& g) {
    std::string fmt = guess_format(in);
    if (fmt == "bin") {
        if (in.input.empty() || in.input == "-")
            throw UsageError("binary input requires --input with a file path");
        ImuBinarySchema schema;
        if (!in.schema_path.empty()) schema = imu_schema_from_json(in.schema_path);
        else if (!in.imu_type.empty()) schema = imu_schema(in.imu_type);
        else throw UsageError("binary input requires --imu-type or --schema");
        SensorDataset ds = read_imu_binary(in.input, schema);
        if (g.freq != 1.0) ds.freq = g.freq;
        return ds;
    }
    TableOptions topt;
    topt.delimiter = fmt == "tsv" ? '\t' : ',';
    topt.header = in.header;
    topt.freq = g.freq;
    topt.gyro_cols = in.gyro_cols;
    topt.accel_cols = in.accel_cols;
    topt.time_col = in.time_col;
    if (in.input.empty() || in.input == "-") {
        // stdin: single column pipeline mode
        SensorDataset ds;
        ds.freq = g.freq;
        Channel ch;
        ch.label = "stdin";
        ch.samples = read_series(std::cin);
        ds.channels.push_back(std::move(ch));
        return ds;
    }
    // single-column files (no delimiter in the first data line) go through the
    // tolerant series reader, so simulate output feeds straight into fit
    if (in.gyro_cols.empty() && in.accel_cols.empty() && in.time_col == 0 && !in.header) {
        std::ifstream probe(in.input);
        if (!probe) throw DataError("cannot open '" + in.input + "'");
        std::string line;
        while (std::getline(probe, line) && (line.empty() || line[0] == '#')) {
        }
        if (line.find(topt.delimiter) == std::string::npos) {
            probe.clear();
            probe.seekg(0);
            SensorDataset ds;
            ds.freq = g.freq;
            ds.source_path = in.input;
            Channel ch;
            ch.label = "series";
            ch.samples = read_series(probe);
            ds.channels.push_back(std::move(ch));
            return ds;
        }
    }
    return read_table(in.input, topt);
}

const Channel& select_channel(const SensorDataset& ds, const std::string& spec) {
    if (ds.channels.empty()) throw DataError("dataset has no channels");
    if (spec.empty()) return ds.channels[0];
    auto colon = spec.find(':');
    if (colon != std::string::npos) {
        std::string kind = spec.substr(0, colon);
        std::string axis = spec.substr(colon + 1);
        ChannelKind k;
        if (kind == "gyro") k = ChannelKind::Gyro;
        else if (kind == "accel") k = ChannelKind::Accel;
        else throw UsageError("channel kind must be gyro or accel, got '" + kind + "'");
        if (axis.size() != 1) throw UsageError("channel axis must be a single letter");
        char a = static_cast<char>(std::toupper(static_cast<unsigned char>(axis[0])));
        if (const Channel* c = ds.find(k, a)) return *c;
        throw DataError("no channel '" + spec + "' in dataset");
    }
    // label match, then numeric fallback
    for (const auto& c : ds.channels)
        if (c.label == spec) return c;
    try {
        std::size_t pos = 0;
        long idx = std::stol(spec, &pos);
        if (pos == spec.size() && idx >= 1 && static_cast<std::size_t>(idx) <= ds.channels.size())
            return ds.channels[static_cast<std::size_t>(idx - 1)];
    } catch (const std::exception&) {
    }
    throw UsageError("cannot resolve channel '" + spec + "'");
}

std::vector<double> load_signal(const InputOpts& in, const GlobalOpts& g) {
    SensorDataset ds = load_dataset(in, g);
    return select_channel(ds, in.channel).samples;
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path, std::ios::binary | std::ios::trunc);
    if (!file) throw DataError("cannot open '" + path + "' for writing");
    return file;
}

std::string channel_name(const Channel& c) {
    if (!c.label.empty()) return c.label;
    return std::string(c.kind == ChannelKind::Gyro ? "gyro:" : "accel:") + c.axis;
}

PlotSeries wv_series(const WvSeries& wv, const std::string& label, const std::string& color,
                     bool dashed = false) {
    PlotSeries s;
    s.label = label;
    s.color = color;
    s.dashed = dashed;
    s.x = wv.tau;
    s.y = wv.est;
    s.band_lo = wv.lo;
    s.band_hi = wv.hi;
    return s;
}

// ---- subcommand bodies ----------------------------------------------------

int run_simulate(const GlobalOpts& g, const std::string& model_str, long T, long burn,
                 const std::string& out_path) {
    LatentModel model = parse_model(model_str, g.freq);
    if (!model.fully_specified())
        throw UsageError("simulate requires every parameter to have a value");
    SimSpec spec{model, static_cast<std::size_t>(T), g.seed};
    if (burn >= 0) spec.burn_in = burn;
    std::vector<double> y = simulate(spec);
    std::ofstream file;
    std::ostream& os = open_output(file, out_path);
    os << "# model=\"" << render_model(model) << "\" seed=" << g.seed << "\r\n";
    os << "value\r\n";
    for (double v : y) os << fmt_g17(v) << "\r\n";
    return 0;
}

int run_wvar(const GlobalOpts& g, const InputOpts& in, int levels, const std::string& transform,
             double alpha, const std::string& out_path) {
    std::vector<double> y = load_signal(in, g);
    WvOptions opt;
    opt.levels = levels;
    opt.alpha = alpha;
    opt.transform = transform == "dwt" ? Transform::DWT : Transform::MODWT;
    WvSeries s = g.robust ? wvar_robust(y, g.eff, opt) : wvar(y, opt);
    std::ofstream file;
    std::ostream& os = open_output(file, out_path);
    if (g.json) os << to_json(s).dump(2) << '\n';
    else write_csv(os, s);
    return 0;
}

int run_avar(const GlobalOpts& g, const InputOpts& in, const std::string& variant, bool overlapped,
             const std::string& out_path) {
    std::vector<double> y = load_signal(in, g);
    AvSeries s = avar(y, variant == "modified" ? AvVariant::Modified : AvVariant::Traditional,
                      overlapped);
    std::ofstream file;
    std::ostream& os = open_output(file, out_path);
    if (g.json) os << to_json(s).dump(2) << '\n';
    else write_csv(os, s);
    return 0;
}

int run_hvar(const GlobalOpts& g, const InputOpts& in, const std::string& out_path) {
    std::vector<double> y = load_signal(in, g);
    HvSeries s = hvar(y);
    std::ofstream file;
    std::ostream& os = open_output(file, out_path);
    if (g.json) os << to_json(s).dump(2) << '\n';
    else write_csv(os, s);
    return 0;
}

int run_compare(const GlobalOpts& g, const InputOpts& in, int levels, const std::string& out_path) {
    std::vector<double> y = load_signal(in, g);
    WvOptions opt;
    opt.levels = levels;
    WvSeries cls = wvar(y, opt);
    WvSeries rob = wvar_robust(y, g.eff, opt);
    ComparisonReport rep = compare_wvar(cls, rob);
    std::ofstream file;
    std::ostream& os = open_output(file, out_path);
    if (g.json) {
        nlohmann::json j;
        j["schema"] = "wavecal.compare/1";
        j["scales"] = rep.tau;
        j["ratio"] = rep.ratio;
        std::vector<int> ov(rep.ci_overlap.begin(), rep.ci_overlap.end());
        j["ci_overlap"] = ov;
        j["disagreeing_scales"] = rep.disagreeing_scales;
        j["verdict"] = rep.verdict;
        os << j.dump(2) << '\n';
    } else {
        os << "scale,ratio_robust_over_classical,ci_overlap\r\n";
        for (std::size_t j = 0; j < rep.tau.size(); ++j)
            os << fmt_g17(rep.tau[j]) << ',' << fmt_g17(rep.ratio[j]) << ','
               << (rep.ci_overlap[j] ? 1 : 0) << "\r\n";
        os << "# verdict: " << rep.verdict << "\r\n";
    }
    return 0;
}

int run_fit(const GlobalOpts& g, const InputOpts& in, const std::string& model_str, int levels,
            int G, int H, bool no_inference, bool one_step, const std::string& out_path) {
    std::vector<double> y = load_signal(in, g);
    LatentModel model = parse_model(model_str, g.freq);
    FitOptions opt;
    opt.robust = g.robust;
    opt.efficiency = g.eff;
    opt.G = G;
    opt.H = H;
    opt.seed = g.seed;
    opt.levels = levels;
    opt.inference = !no_inference;
    opt.two_step = !one_step;
    opt.threads = g.threads;
    FitResult fr = gmwm_fit(y, model, opt);
    std::ofstream file;
    std::ostream& os = open_output(file, out_path);
    if (g.json) {
        os << to_json(fr).dump(2) << '\n';
        return 0;
    }
    os << "model: " << render_model(fr.model) << '\n';
    os << "objective: " << fmt_g17(fr.objective) << (fr.converged ? "" : "  (NOT converged)")
       << '\n';
    std::vector<std::string> labels = fr.model.param_labels();
    std::vector<double> theta = fr.model.theta_labeled();
    for (std::size_t k = 0; k < theta.size(); ++k) {
        os << "  " << labels[k] << " = " << fmt_g17(theta[k]);
        if (k < fr.se.size() && fr.se[k] > 0)
            os << "  (se " << fmt_g17(fr.se[k]) << ", ci [" << fmt_g17(fr.ci_lo[k]) << ", "
               << fmt_g17(fr.ci_hi[k]) << "]" << (fr.ci_truncated[k] ? ", truncated" : "") << ")";
        os << '\n';
    }
    if (fr.has_gof)
        os << "gof: stat " << fmt_g17(fr.gof.stat) << ", dof " << fr.gof.dof << ", p "
           << fmt_g17(fr.gof.p_value) << '\n';
    os << "wall: " << fr.wall_seconds << " s\n";
    return 0;
}

int run_rank(const GlobalOpts& g, const InputOpts& in, const std::vector<std::string>& model_strs,
             int levels, int G, int H, const std::string& method, const std::string& out_path) {
    std::vector<double> y = load_signal(in, g);
    std::vector<LatentModel> candidates;
    for (const auto& s : model_strs) candidates.push_back(parse_model(s, g.freq));
    RankOptions opt;
    opt.G = G;
    opt.H = H;
    opt.seed = g.seed;
    opt.levels = levels;
    opt.robust = g.robust;
    opt.efficiency = g.eff;
    opt.threads = g.threads;
    opt.method = method == "fast" ? WicMethod::Fast : WicMethod::Bootstrap;
    RankingTable table = rank_models(y, candidates, opt);
    std::ofstream file;
    std::ostream& os = open_output(file, out_path);
    if (g.json) os << to_json(table).dump(2) << '\n';
    else if (!out_path.empty() && out_path != "-") write_csv(os, table);
    else print_table(os, table);
    return 0;
}

int run_auto(const GlobalOpts& g, const InputOpts& in, const std::string& model_str, int levels,
             int G, int H, const std::string& method, int max_candidates,
             const std::string& out_prefix, const std::string& plot_path) {
    SensorDataset ds = load_dataset(in, g);
    std::vector<const Channel*> chans;
    if (!in.channel.empty()) chans.push_back(&select_channel(ds, in.channel));
    else
        for (const auto& c : ds.channels) chans.push_back(&c);
    LatentModel full = parse_model(model_str, g.freq);
    RankOptions opt;
    opt.G = G;
    opt.H = H;
    opt.levels = levels;
    opt.robust = g.robust;
    opt.efficiency = g.eff;
    opt.threads = g.threads;
    opt.max_candidates = max_candidates;
    opt.method = method == "bootstrap" ? WicMethod::Bootstrap : WicMethod::Fast;

    nlohmann::json all = nlohmann::json::array();
    std::vector<PlotSeries> grid;
    const char* palette[] = {"#1f6fb5", "#d1495b", "#3e8e5a", "#8e6fb5", "#c47f2a", "#4aa3a0"};
    for (std::size_t c = 0; c < chans.size(); ++c) {
        opt.seed = derive_seed(g.seed, 0xC0, c);
        RankingTable table = auto_rank(chans[c]->samples, full, opt);
        std::string name = channel_name(*chans[c]);
        if (g.json) {
            nlohmann::json j = to_json(table);
            j["channel"] = name;
            all.push_back(std::move(j));
        } else if (!out_prefix.empty()) {
            std::string safe = name;
            for (char& ch : safe)
                if (ch == ':' || ch == '/' || ch == ' ') ch = '_';
            std::ofstream f(out_prefix + safe + ".csv", std::ios::binary | std::ios::trunc);
            if (!f) throw DataError("cannot write ranking CSV for channel " + name);
            write_csv(f, table);
            std::cout << name << ": best " << table.rows[0].model_string << " (wic "
                      << fmt_g17(table.rows[0].wic) << ")\n";
        } else {
            std::cout << "== " << name << " ==\n";
            print_table(std::cout, table);
        }
        if (!plot_path.empty()) {
            WvOptions wopt;
            wopt.levels = levels;
            WvSeries wv = g.robust ? wvar_robust(chans[c]->samples, g.eff, wopt)
                                   : wvar(chans[c]->samples, wopt);
            grid.push_back(wv_series(wv, name, palette[c % 6]));
            for (const auto& row : table.rows)
                if (!row.failed) {
                    PlotSeries imp;
                    imp.label = name + " best: " + row.model_string;
                    imp.color = palette[c % 6];
                    imp.dashed = true;
                    imp.x = wv.tau;
                    imp.y = implied_wv_total(row.model, wv.levels());
                    imp.band_lo.clear();
                    grid.push_back(std::move(imp));
                    break;
                }
        }
    }
    if (g.json) std::cout << all.dump(2) << '\n';
    if (!plot_path.empty()) {
        PlotSpec ps;
        ps.kind = PlotKind::AutoGrid;
        ps.title = "wavelet variance by channel with selected models";
        write_plot(plot_path, ps, grid);
    }
    return 0;
}

int run_import(const GlobalOpts& g, const InputOpts& in, const std::string& out_path,
               const std::string& to_binary_type) {
    SensorDataset ds = load_dataset(in, g);
    if (!to_binary_type.empty()) {
        if (out_path.empty() || out_path == "-")
            throw UsageError("binary export requires --output with a file path");
        write_imu_binary(out_path, ds, imu_schema(to_binary_type));
        return 0;
    }
    std::ofstream file;
    std::ostream& os = open_output(file, out_path);
    os << "time";
    for (const auto& c : ds.channels) os << ',' << channel_name(c);
    os << "\r\n";
    for (std::size_t i = 0; i < ds.length(); ++i) {
        os << fmt_g17(i < ds.time.size() ? ds.time[i] : static_cast<double>(i) / ds.freq);
        for (const auto& c : ds.channels) os << ',' << fmt_g17(c.samples[i]);
        os << "\r\n";
    }
    return 0;
}

int run_plot(const GlobalOpts& g, const InputOpts& in, const std::string& kind,
             const std::string& model_str, const std::string& from_csv,
             const std::string& out_path, int levels) {
    if (out_path.empty()) throw UsageError("plot requires --output <file.svg>");
    PlotSpec spec;
    if (!from_csv.empty()) {
        // regenerate from a companion CSV: series,scale,value,band_lo,band_hi
        std::ifstream f(from_csv);
        if (!f) throw DataError("cannot open '" + from_csv + "'");
        std::string line;
        std::getline(f, line); // header
        std::vector<PlotSeries> series;
        const char* palette[] = {"#1f6fb5", "#d1495b", "#3e8e5a", "#8e6fb5", "#c47f2a", "#4aa3a0"};
        std::size_t row = 1;
        while (std::getline(f, line)) {
            if (line.empty()) continue;
            ++row;
            std::string rest = line;
            std::string label;
            if (!rest.empty() && rest[0] == '"') {
                auto q = rest.find('"', 1);
                if (q == std::string::npos) throw DataError("unterminated quote in plot CSV");
                label = rest.substr(1, q - 1);
                rest = rest.substr(q + 2);
            }
            auto cells = detail::split_row(rest, ',');
            if (cells.size() < 2) throw DataError("short row in plot CSV");
            PlotSeries* s = nullptr;
            for (auto& ex : series)
                if (ex.label == label) s = &ex;
            if (!s) {
                series.push_back({});
                s = &series.back();
                s->label = label;
                s->color = palette[(series.size() - 1) % 6];
                s->dashed = label.find("implied") != std::string::npos ||
                            label.find("best:") != std::string::npos;
            }
            s->x.push_back(detail::parse_cell(cells[0], row, 2));
            s->y.push_back(detail::parse_cell(cells[1], row, 3));
            if (cells.size() > 2 && !cells[2].empty())
                s->band_lo.push_back(detail::parse_cell(cells[2], row, 4));
            if (cells.size() > 3 && !cells[3].empty())
                s->band_hi.push_back(detail::parse_cell(cells[3], row, 5));
        }
        spec.title = "regenerated";
        write_plot(out_path, spec, series);
        return 0;
    }

    std::vector<double> y = load_signal(in, g);
    WvOptions wopt;
    wopt.levels = levels;
    std::vector<PlotSeries> series;
    if (kind == "wv") {
        spec.kind = PlotKind::Wv;
        spec.title = "wavelet variance";
        WvSeries wv = g.robust ? wvar_robust(y, g.eff, wopt) : wvar(y, wopt);
        series.push_back(wv_series(wv, g.robust ? "robust WV" : "WV", "#1f6fb5"));
    } else if (kind == "compare") {
        spec.kind = PlotKind::WvCompare;
        spec.title = "classical vs robust wavelet variance";
        series.push_back(wv_series(wvar(y, wopt), "classical", "#1f6fb5"));
        series.push_back(wv_series(wvar_robust(y, g.eff, wopt), "robust", "#d1495b"));
    } else if (kind == "fit" || kind == "decomp") {
        if (model_str.empty()) throw UsageError("plot --kind " + kind + " requires --model");
        LatentModel model = parse_model(model_str, g.freq);
        FitOptions fopt;
        fopt.robust = g.robust;
        fopt.efficiency = g.eff;
        fopt.seed = g.seed;
        fopt.levels = levels;
        fopt.inference = false;
        fopt.threads = g.threads;
        FitResult fr = gmwm_fit(y, model, fopt);
        spec.kind = kind == "fit" ? PlotKind::FitOverlay : PlotKind::FitDecomposition;
        spec.title = "wavelet variance and fit: " + render_model(fr.model);
        series.push_back(wv_series(fr.wv, "empirical WV", "#1f6fb5"));
        PlotSeries imp;
        imp.label = "implied WV";
        imp.color = "#d1495b";
        imp.dashed = true;
        imp.x = fr.wv.tau;
        imp.y = fr.implied;
        series.push_back(std::move(imp));
        if (kind == "decomp") {
            ImpliedWv dec = implied_wv(fr.model, fr.wv.levels());
            const char* palette[] = {"#3e8e5a", "#8e6fb5", "#c47f2a", "#4aa3a0", "#777777"};
            for (std::size_t b = 0; b < dec.by_block.size(); ++b) {
                PlotSeries ps;
                ps.label = "block " + std::to_string(b + 1) + ": " +
                           render_model(LatentModel{{fr.model.blocks[b]}, fr.model.freq});
                ps.color = palette[b % 5];
                ps.dashed = true;
                ps.x = fr.wv.tau;
                ps.y = dec.by_block[b];
                series.push_back(std::move(ps));
            }
        }
    } else {
        throw UsageError("unknown plot kind '" + kind + "' (wv, compare, fit, decomp)");
    }
    write_plot(out_path, spec, series);
    return 0;
}

bool wants_json(int argc, char** argv) {
    for (int i = 1; i < argc; ++i)
        if (std::string(argv[i]) == "--json") return true;
    return false;
}

} // namespace

int main(int argc, char** argv) {
    const bool json_errors = wants_json(argc, argv);
    auto fail = [&](const char* kind, const std::string& msg, int code) {
        if (json_errors) {
            nlohmann::json j;
            j["error"] = {{"kind", kind}, {"message", msg}, {"exit_code", code}};
            std::cerr << j.dump() << '\n';
        } else {
            std::cerr << "error (" << kind << "): " << msg << '\n';
        }
        return code;
    };

    CLI::App app{"wavelet-variance calibration of inertial sensor stochastic errors"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file supplying flag defaults");
    app.allow_config_extras(CLI::config_extras_mode::ignore_all);

    GlobalOpts g;
    InputOpts in;
    std::string model_str, out_path, transform = "modwt", variant = "traditional";
    std::vector<std::string> model_strs;
    std::string method = "bootstrap", plot_kind = "wv", from_csv, plot_path, to_binary;
    int levels = 0, G = 1000, H = 100, max_candidates = 64;
    long T = 0, burn = -1;
    double alpha = 0.05;
    bool overlapped = false, no_inference = false, one_step = false;

    auto* c_sim = app.add_subcommand("simulate", "simulate a model realization to CSV");
    add_global(c_sim, g);
    c_sim->add_option("--model", model_str, "model string")->required();
    c_sim->add_option("-T,--length", T, "number of samples")->required()->check(CLI::PositiveNumber);
    c_sim->add_option("--burn-in", burn, "burn-in samples (default: automatic)");
    c_sim->add_option("-o,--output", out_path, "output CSV (default stdout)");

    auto* c_wv = app.add_subcommand("wvar", "wavelet variance with confidence intervals");
    add_global(c_wv, g);
    add_input(c_wv, in);
    c_wv->add_option("--levels", levels, "number of dyadic scales");
    c_wv->add_option("--transform", transform, "modwt or dwt")
        ->check(CLI::IsMember({"modwt", "dwt"}));
    c_wv->add_option("--alpha", alpha, "CI significance level")->check(CLI::Range(1e-6, 0.5));
    c_wv->add_option("-o,--output", out_path, "output file (default stdout)");

    auto* c_av = app.add_subcommand("avar", "Allan variance");
    add_global(c_av, g);
    add_input(c_av, in);
    c_av->add_option("--variant", variant, "traditional or modified")
        ->check(CLI::IsMember({"traditional", "modified"}));
    c_av->add_flag("--overlapped", overlapped, "overlapped estimator (traditional only)");
    c_av->add_option("-o,--output", out_path, "output file (default stdout)");

    auto* c_hv = app.add_subcommand("hvar", "Hadamard variance");
    add_global(c_hv, g);
    add_input(c_hv, in);
    c_hv->add_option("-o,--output", out_path, "output file (default stdout)");

    auto* c_cmp = app.add_subcommand("compare", "classical vs robust wavelet variance");
    add_global(c_cmp, g);
    add_input(c_cmp, in);
    c_cmp->add_option("--levels", levels, "number of dyadic scales");
    c_cmp->add_option("-o,--output", out_path, "output file (default stdout)");

    auto* c_fit = app.add_subcommand("fit", "estimate model parameters from the wavelet variance");
    add_global(c_fit, g);
    add_input(c_fit, in);
    c_fit->add_option("--model", model_str, "model string")->required();
    c_fit->add_option("--levels", levels, "number of dyadic scales");
    c_fit->add_option("-G,--guesses", G, "starting-value draws")->check(CLI::PositiveNumber);
    c_fit->add_option("-H,--replicates", H, "bootstrap replicates")->check(CLI::PositiveNumber);
    c_fit->add_flag("--no-inference", no_inference, "skip bootstrap covariance, CIs, GoF");
    c_fit->add_flag("--one-step", one_step, "skip the covariance-reweighted second step");
    c_fit->add_option("-o,--output", out_path, "output file (default stdout)");

    auto* c_rank = app.add_subcommand("rank", "rank candidate models by information criterion");
    add_global(c_rank, g);
    add_input(c_rank, in);
    c_rank->add_option("--model", model_strs, "candidate model string (repeatable)")->required();
    c_rank->add_option("--levels", levels, "number of dyadic scales");
    c_rank->add_option("-G,--guesses", G, "starting-value draws");
    c_rank->add_option("-H,--replicates", H, "bootstrap replicates");
    c_rank->add_option("--method", method, "bootstrap or fast")
        ->check(CLI::IsMember({"bootstrap", "fast"}));
    c_rank->add_option("-o,--output", out_path, "output file (default: console table)");

    auto* c_auto = app.add_subcommand("auto", "rank all nested sub-models, per channel");
    add_global(c_auto, g);
    add_input(c_auto, in);
    c_auto->add_option("--model", model_str, "full model string")->required();
    c_auto->add_option("--levels", levels, "number of dyadic scales");
    c_auto->add_option("-G,--guesses", G, "starting-value draws");
    c_auto->add_option("-H,--replicates", H, "bootstrap replicates");
    std::string auto_method = "fast";
    c_auto->add_option("--method", auto_method, "fast or bootstrap")
        ->check(CLI::IsMember({"bootstrap", "fast"}));
    c_auto->add_option("--max-candidates", max_candidates, "enumeration cap");
    c_auto->add_option("-o,--output", out_path, "per-channel ranking CSV path prefix");
    c_auto->add_option("--plot", plot_path, "grid plot SVG path");

    auto* c_imp = app.add_subcommand("import", "convert sensor data to a normalized CSV or binary");
    add_global(c_imp, g);
    add_input(c_imp, in);
    c_imp->add_option("-o,--output", out_path, "output file (default stdout)");
    c_imp->add_option("--to-binary", to_binary, "write binary with this registry schema");

    auto* c_plot = app.add_subcommand("plot", "log-log SVG plots with companion CSV");
    add_global(c_plot, g);
    add_input(c_plot, in);
    c_plot->add_option("--kind", plot_kind, "wv, compare, fit, decomp")
        ->check(CLI::IsMember({"wv", "compare", "fit", "decomp"}));
    c_plot->add_option("--model", model_str, "model string (fit/decomp kinds)");
    c_plot->add_option("--from-csv", from_csv, "regenerate the SVG from a companion CSV");
    c_plot->add_option("--levels", levels, "number of dyadic scales");
    c_plot->add_option("-o,--output", out_path, "output SVG path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        if (json_errors) return fail("usage", e.what(), 1);
        app.exit(e);
        return 1;
    }

    try {
        if (*c_sim) return run_simulate(g, model_str, T, burn, out_path);
        if (*c_wv) return run_wvar(g, in, levels, transform, alpha, out_path);
        if (*c_av) return run_avar(g, in, variant, overlapped, out_path);
        if (*c_hv) return run_hvar(g, in, out_path);
        if (*c_cmp) return run_compare(g, in, levels, out_path);
        if (*c_fit) return run_fit(g, in, model_str, levels, G, H, no_inference, one_step, out_path);
        if (*c_rank) return run_rank(g, in, model_strs, levels, G, H, method, out_path);
        if (*c_auto)
            return run_auto(g, in, model_str, levels, G, H, auto_method, max_candidates, out_path,
                            plot_path);
        if (*c_imp) return run_import(g, in, out_path, to_binary);
        if (*c_plot) return run_plot(g, in, plot_kind, model_str, from_csv, out_path, levels);
        return fail("usage", "no subcommand", 1);
    } catch (const DataError& e) {
        return fail("data", e.what(), 2);
    } catch (const NumericError& e) {
        return fail("numeric", e.what(), 3);
    } catch (const UsageError& e) {
        return fail("usage", e.what(), 1);
    } catch (const std::exception& e) {
        return fail("numeric", e.what(), 3);
    }
}
