#include "cli.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <map>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "cdesim/flops.hpp"

namespace cdesim::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw invalid_parameter_error("config key '" + key + "': cannot parse number '" +
                                      value + "'");
    }
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw invalid_parameter_error("config key '" + key + "': cannot parse integer '" +
                                      value + "'");
    }
}

}  // namespace

const std::vector<std::string>& valid_config_keys() {
    static const std::vector<std::string> keys = {
        "n",    "n_cp", "sigma",   "snr_db",    "eps_max", "tau",    "alpha",
        "iters", "seed", "profile", "equalizer", "cfo_err_pct", "delta_h"};
    return keys;
}

std::vector<double> parse_snr_list(const std::string& text) {
    std::vector<double> out;
    const std::string t = trim(text);
    if (t.empty()) throw invalid_parameter_error("empty snr_db list");
    if (t.find(':') != std::string::npos) {
        double start = 0, step = 0, stop = 0;
        std::istringstream is(t);
        char c1 = 0, c2 = 0;
        if (!(is >> start >> c1 >> step >> c2 >> stop) || c1 != ':' || c2 != ':' ||
            !(step > 0) || stop < start) {
            throw invalid_parameter_error("snr_db range must be start:step:stop, got '" + t +
                                          "'");
        }
        for (double v = start; v <= stop + 1e-9; v += step) out.push_back(v);
        return out;
    }
    std::istringstream is(t);
    std::string item;
    while (std::getline(is, item, ',')) {
        out.push_back(parse_double("snr_db", trim(item)));
    }
    return out;
}

void apply_config_key(SimConfig& config, const std::string& key, const std::string& value) {
    if (key == "n") {
        config.n = static_cast<int>(parse_int(key, value));
    } else if (key == "n_cp") {
        config.ncp = static_cast<int>(parse_int(key, value));
    } else if (key == "sigma") {
        config.sigma = static_cast<int>(parse_int(key, value));
    } else if (key == "snr_db") {
        config.snr_db = parse_snr_list(value);
    } else if (key == "eps_max") {
        config.epsilon_max = parse_double(key, value);
    } else if (key == "tau") {
        config.tau = static_cast<int>(parse_int(key, value));
    } else if (key == "alpha") {
        config.alpha = parse_double(key, value);
    } else if (key == "iters") {
        config.iterations = static_cast<int>(parse_int(key, value));
    } else if (key == "seed") {
        config.master_seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "profile") {
        config.profile = value;
    } else if (key == "equalizer") {
        const auto kind = equalizer_from_name(value);
        if (!kind) {
            throw invalid_parameter_error(
                "config key 'equalizer': unknown kind '" + value +
                "' (valid: lzf-cde, lmmse-cde, lzf-fde, lmmse-fde, jlcrlzf-cde)");
        }
        config.equalizer = *kind;
    } else if (key == "cfo_err_pct") {
        config.cfo_error_percent = parse_double(key, value);
    } else if (key == "delta_h") {
        config.channel_error_delta = parse_double(key, value);
    } else {
        std::string keys;
        for (const auto& k : valid_config_keys()) keys += (keys.empty() ? "" : ", ") + k;
        throw invalid_parameter_error("unknown config key '" + key +
                                      "' (valid keys: " + keys + ")");
    }
}

SimConfig parse_config_file(const std::string& path, SimConfig base) {
    std::ifstream in(path);
    if (!in) throw invalid_parameter_error("cannot read config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw invalid_parameter_error("config line " + std::to_string(lineno) +
                                          " is not key=value: '" + t + "'");
        }
        apply_config_key(base, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    base.validate();
    return base;
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw invalid_parameter_error("cannot read '" + path + "' for checksum");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
        if (!in) break;
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        char b[3];
        std::snprintf(b, sizeof(b), "%02x", digest[i]);
        hex += b;
    }
    return hex;
}

namespace {

// ---------------------------------------------------------------- plotting

struct Curve {
    std::string label;
    std::vector<std::pair<double, double>> points;  // (snr, ber)
};

void write_svg_ber_plot(const std::string& path, const std::string& title,
                        const std::vector<Curve>& curves) {
    const int width = 720, height = 480;
    const double ml = 70, mr = 160, mt = 40, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 0.0, ymax = -300.0;
    for (const auto& c : curves) {
        for (auto [x, y] : c.points) {
            if (y <= 0.0) continue;
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymax = std::max(ymax, std::log10(y));
            ymin = std::min(ymin, std::log10(y));
        }
    }
    if (xmax <= xmin) {
        xmin = 0;
        xmax = 1;
    }
    if (ymax <= ymin) {
        ymin = -6;
        ymax = 0;
    }
    ymin = std::floor(ymin);
    ymax = std::ceil(std::min(0.0, ymax));
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto py = [&](double logy) {
        return height - mb - (logy - ymin) / (ymax - ymin) * (height - mt - mb);
    };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
                                   "#bcbd22", "#e377c2", "#333333"};
    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<text x='" << width / 2 << "' y='22' text-anchor='middle' font-size='15'>" << title
        << "</text>\n";
    // axes and grid
    for (int e = static_cast<int>(ymin); e <= static_cast<int>(ymax); ++e) {
        const double y = py(e);
        svg << "<line x1='" << ml << "' y1='" << y << "' x2='" << width - mr << "' y2='" << y
            << "' stroke='#dddddd'/>\n";
        svg << "<text x='" << ml - 8 << "' y='" << y + 4
            << "' text-anchor='end' font-size='11'>1e" << e << "</text>\n";
    }
    const double xstep = (xmax - xmin) / 10.0 > 0 ? (xmax - xmin) / 10.0 : 1.0;
    for (double x = xmin; x <= xmax + 1e-9; x += xstep) {
        svg << "<line x1='" << px(x) << "' y1='" << mt << "' x2='" << px(x) << "' y2='"
            << height - mb << "' stroke='#eeeeee'/>\n";
        svg << "<text x='" << px(x) << "' y='" << height - mb + 16
            << "' text-anchor='middle' font-size='11'>" << fmt_double(x) << "</text>\n";
    }
    svg << "<rect x='" << ml << "' y='" << mt << "' width='" << width - ml - mr << "' height='"
        << height - mt - mb << "' fill='none' stroke='black'/>\n";
    svg << "<text x='" << (ml + width - mr) / 2 << "' y='" << height - 12
        << "' text-anchor='middle' font-size='12'>SNR (dB)</text>\n";
    svg << "<text x='18' y='" << height / 2
        << "' text-anchor='middle' font-size='12' transform='rotate(-90 18 " << height / 2
        << ")'>BER</text>\n";
    int ci = 0;
    for (const auto& c : curves) {
        const char* color = colors[ci % 11];
        std::ostringstream pts;
        for (auto [x, y] : c.points) {
            if (y <= 0.0) continue;  // zero-error points are off a log axis
            pts << px(x) << "," << py(std::log10(y)) << " ";
        }
        svg << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='"
            << pts.str() << "'/>\n";
        const double ly = mt + 16 + 16 * ci;
        svg << "<line x1='" << width - mr + 10 << "' y1='" << ly << "' x2='" << width - mr + 34
            << "' y2='" << ly << "' stroke='" << color << "' stroke-width='2'/>\n";
        svg << "<text x='" << width - mr + 40 << "' y='" << ly + 4 << "' font-size='11'>"
            << c.label << "</text>\n";
        ++ci;
    }
    svg << "</svg>\n";
    std::ofstream out(path, std::ios::binary);
    out << svg.str();
}

// ---------------------------------------------------------------- manifest

json config_json(const SimConfig& c) {
    json j;
    j["n"] = c.n;
    j["n_cp"] = c.ncp;
    j["sigma"] = c.sigma;
    j["snr_db"] = c.snr_db;
    j["eps_max"] = c.epsilon_max;
    j["tau"] = c.tau;
    j["alpha"] = c.alpha;
    j["iters"] = c.iterations;
    j["seed"] = c.master_seed;
    j["profile"] = c.profile;
    j["equalizer"] = equalizer_name(c.equalizer);
    j["cfo_err_pct"] = c.cfo_error_percent;
    j["delta_h"] = c.channel_error_delta;
    return j;
}

struct RunContext {
    std::string subcommand;
    SimConfig config;
    fs::path out_dir;
    bool plot = false;
    bool check = false;
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();
    std::optional<json> previous_manifest;

    fs::path manifest_path() const { return out_dir / "manifest.json"; }

    void prepare() {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (check && fs::exists(manifest_path())) {
            std::ifstream in(manifest_path());
            json j;
            in >> j;
            previous_manifest = j;
        } else if (check) {
            throw invalid_parameter_error("--check: no manifest at " +
                                          manifest_path().string());
        }
    }

    std::ofstream open_output(const std::string& name) {
        const fs::path p = out_dir / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << p.string() << "\n";
            std::exit(2);
        }
        outputs.push_back(name);
        return out;
    }

    void note_output(const std::string& name) { outputs.push_back(name); }

    // Returns the process exit status: nonzero when a --check comparison
    // fails.
    int finish() {
        int status = 0;
        json manifest;
        manifest["subcommand"] = subcommand;
        manifest["config"] = config_json(config);
        json outs = json::array();
        for (const auto& name : outputs) {
            json o;
            o["path"] = name;
            const fs::path p = out_dir / name;
            o["sha256"] = sha256_file(p.string());
            o["bytes"] = static_cast<std::uint64_t>(fs::file_size(p));
            outs.push_back(o);
        }
        manifest["outputs"] = outs;
        manifest["elapsed_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

        if (previous_manifest) {
            std::map<std::string, std::string> prior;
            for (const auto& o : (*previous_manifest)["outputs"]) {
                prior[o["path"].get<std::string>()] = o["sha256"].get<std::string>();
            }
            for (const auto& o : outs) {
                const std::string name = o["path"].get<std::string>();
                const auto it = prior.find(name);
                if (it == prior.end()) {
                    std::cout << "check: " << name << " NEW (not in manifest)\n";
                    status = 1;
                } else if (it->second != o["sha256"].get<std::string>()) {
                    std::cout << "check: " << name << " MISMATCH\n";
                    status = 1;
                } else {
                    std::cout << "check: " << name << " ok\n";
                }
            }
        }

        std::ofstream out(manifest_path(), std::ios::binary);
        out << manifest.dump(2) << "\n";
        return status;
    }
};

std::string csv_config_suffix(const SimConfig& c) {
    std::ostringstream os;
    os << equalizer_name(c.equalizer) << "," << c.tau << "," << fmt_double(c.alpha) << ","
       << fmt_double(c.epsilon_max) << "," << c.master_seed;
    return os.str();
}

void write_points_csv(std::ofstream& out, const SimConfig& cfg,
                      const std::vector<BerPoint>& points) {
    out << "snr_db,ber,total_bits,failed_iters,equalizer,tau,alpha,eps_max,seed\n";
    for (const auto& p : points) {
        out << fmt_double(p.snr_db) << "," << fmt_double(p.ber) << "," << p.total_bits << ","
            << p.failed_iterations << "," << csv_config_suffix(cfg) << "\n";
    }
}

void write_sweep_csv(std::ofstream& out, const SweepResult& sweep) {
    out << "param,value,snr_db,ber,total_bits,failed_iters,equalizer,tau,alpha,eps_max,seed\n";
    for (const auto& row : sweep.rows) {
        for (const auto& p : row.points) {
            out << sweep.parameter << "," << row.label << "," << fmt_double(p.snr_db) << ","
                << fmt_double(p.ber) << "," << p.total_bits << "," << p.failed_iterations << ","
                << csv_config_suffix(sweep.config) << "\n";
        }
    }
}

std::vector<Curve> sweep_curves(const SweepResult& sweep) {
    std::vector<Curve> curves;
    for (const auto& row : sweep.rows) {
        Curve c;
        c.label = sweep.parameter + "=" + row.label;
        for (const auto& p : row.points) c.points.emplace_back(p.snr_db, p.ber);
        curves.push_back(std::move(c));
    }
    return curves;
}

// ---------------------------------------------------------------- commands

int cmd_ber(RunContext& ctx) {
    const BerResult result = run_ber(ctx.config);
    {
        auto out = ctx.open_output("ber.csv");
        write_points_csv(out, result.config, result.points);
    }
    if (ctx.plot) {
        Curve c;
        c.label = equalizer_name(ctx.config.equalizer);
        for (const auto& p : result.points) c.points.emplace_back(p.snr_db, p.ber);
        write_svg_ber_plot((ctx.out_dir / "ber.svg").string(), "BER vs SNR", {c});
        ctx.note_output("ber.svg");
    }
    for (const auto& p : result.points) {
        std::cout << "snr " << fmt_double(p.snr_db) << " dB  ber " << fmt_double(p.ber)
                  << "  errors " << p.bit_errors << "/" << p.total_bits << "  failed "
                  << p.failed_iterations << "\n";
    }
    return 0;
}

std::vector<AlphaSpec> parse_alpha_grid(const std::vector<std::string>& grid) {
    std::vector<AlphaSpec> out;
    for (const auto& g : grid) {
        if (g == "1/snr" || g == "inv_snr") {
            out.push_back(AlphaSpec::one_over_snr());
        } else {
            out.push_back(AlphaSpec::fixed(parse_double("alpha grid", g)));
        }
    }
    return out;
}

std::vector<TauSpec> parse_tau_grid(const std::vector<std::string>& grid) {
    std::vector<TauSpec> out;
    for (const auto& g : grid) {
        if (g == "full") {
            out.push_back(TauSpec::full());
        } else if (g == "nocfo") {
            out.push_back(TauSpec::no_cfo());
        } else {
            out.push_back(TauSpec::of(static_cast<int>(parse_int("tau grid", g))));
        }
    }
    return out;
}

std::vector<double> parse_double_grid(const std::vector<std::string>& grid, const char* what) {
    std::vector<double> out;
    for (const auto& g : grid) out.push_back(parse_double(what, g));
    return out;
}

int cmd_sweep(RunContext& ctx, const std::string& kind, std::vector<std::string> grid) {
    SweepResult sweep;
    if (kind == "alpha") {
        if (grid.empty()) {
            grid = {"100", "10",   "1",    "0.1", "0.01", "0.001",
                    "1e-4", "1e-5", "1e-6", "0",   "1/snr"};
        }
        sweep = sweep_alpha(ctx.config, parse_alpha_grid(grid));
    } else if (kind == "tau") {
        if (grid.empty()) grid = {"0", "5", "10", "15", "20", "full", "nocfo"};
        sweep = sweep_tau(ctx.config, parse_tau_grid(grid));
    } else if (kind == "cfo") {
        if (grid.empty()) grid = {"0", "0.025", "0.05", "0.075", "0.1"};
        sweep = sweep_cfo(ctx.config, parse_double_grid(grid, "eps grid"));
    } else if (kind == "cfo-error") {
        if (grid.empty()) grid = {"0", "5", "10", "15", "20"};
        sweep = sweep_cfo_error(ctx.config, parse_double_grid(grid, "percent grid"));
    } else if (kind == "channel-error") {
        if (grid.empty()) grid = {"0", "0.001", "0.01"};
        sweep = sweep_channel_error(ctx.config, parse_double_grid(grid, "delta grid"));
    } else {
        throw invalid_parameter_error(
            "unknown sweep kind '" + kind +
            "' (valid: alpha, tau, cfo, cfo-error, channel-error)");
    }
    const std::string stem = "sweep_" + kind;
    {
        auto out = ctx.open_output(stem + ".csv");
        write_sweep_csv(out, sweep);
    }
    if (ctx.plot) {
        write_svg_ber_plot((ctx.out_dir / (stem + ".svg")).string(),
                           "BER vs SNR by " + sweep.parameter, sweep_curves(sweep));
        ctx.note_output(stem + ".svg");
    }
    for (const auto& row : sweep.rows) {
        std::cout << sweep.parameter << "=" << row.label << ":";
        for (const auto& p : row.points) std::cout << " " << fmt_double(p.ber);
        std::cout << "\n";
    }
    return 0;
}

std::string with_thousands(const Flops& f) {
    if (f.denominator() != 1) return flops_str(f);
    std::string digits = std::to_string(f.numerator());
    std::string out;
    int count = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        if (count != 0 && count % 3 == 0 && *it != '-') out += ',';
        out += *it;
        ++count;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

int cmd_flops(RunContext& ctx) {
    const SimConfig& c = ctx.config;
    const std::vector<EqualizerKind> kinds = {
        EqualizerKind::lzf_cde, EqualizerKind::lmmse_cde, EqualizerKind::lzf_fde,
        EqualizerKind::lmmse_fde, EqualizerKind::jlcrlzf_cde};
    {
        auto out = ctx.open_output("flops.csv");
        out << "equalizer,sigma,n,tau,flops\n";
        for (int sigma = 1; sigma <= 6; ++sigma) {
            for (auto kind : kinds) {
                const FlopModel m = flops_equalizer(kind, sigma, c.n, c.tau);
                out << equalizer_name(kind) << "," << sigma << "," << c.n << "," << c.tau << ","
                    << flops_str(m.flops) << "\n";
            }
        }
    }
    std::cout << "modeled flops at n=" << c.n << ", tau=" << c.tau << ", sigma=" << c.sigma
              << " (M=" << (1 << c.sigma) * c.n << "):\n";
    for (auto kind : kinds) {
        const FlopModel m = flops_equalizer(kind, c.sigma, c.n, c.tau);
        std::printf("  %-12s %s\n", equalizer_name(kind), with_thousands(m.flops).c_str());
    }
    std::cout << "\n" << recursion_audit(6, c.n, c.tau).str();
    {
        auto out = ctx.open_output("recursion_audit.txt");
        out << recursion_audit(6, c.n, c.tau).str();
    }
    return 0;
}

int cmd_bench(RunContext& ctx, const std::vector<int>& sigmas) {
    const auto rows = bench_time(ctx.config, sigmas);
    {
        auto out = ctx.open_output("bench.csv");
        out << "sigma,equalizer,seconds,eta_percent_vs_jlcrlzf\n";
        for (const auto& row : rows) {
            out << row.sigma << "," << equalizer_name(row.kind) << ","
                << fmt_double(row.seconds) << "," << fmt_double(row.eta_percent) << "\n";
        }
    }
    // table mirroring the per-sigma time-reduction layout
    std::cout << "time reduction vs jlcrlzf-cde (positive: jlcrlzf faster); local machine, "
                 "absolute times are hardware-specific\n";
    std::printf("%-12s", "equalizer");
    for (int s : sigmas) std::printf("  sigma=%-6d", s);
    std::printf("\n");
    for (auto kind : {EqualizerKind::lzf_cde, EqualizerKind::lmmse_cde, EqualizerKind::lzf_fde,
                      EqualizerKind::lmmse_fde}) {
        std::printf("%-12s", equalizer_name(kind));
        for (int s : sigmas) {
            for (const auto& row : rows) {
                if (row.sigma == s && row.kind == kind) {
                    std::printf("  %8.2f%%   ", row.eta_percent);
                }
            }
        }
        std::printf("\n");
    }
    return 0;
}

}  // namespace

int run_app(int argc, char** argv) {
    CLI::App app{"MIMO multicarrier cosine-domain equalizer simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    bool plot = false;
    bool check = false;
    int threads = 0;
    std::vector<std::pair<std::string, std::string>> overrides;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "flat key=value config file");
        sub->add_option("--out", out_dir, "output directory (default: CDESIM_OUT_DIR or ./out)");
        sub->add_flag("--plot", plot, "also write SVG line charts");
        sub->add_flag("--check", check,
                      "verify output checksums against the existing manifest");
        sub->add_option("--threads", threads, "worker threads (0 = hardware)");
        for (const auto& key : valid_config_keys()) {
            std::string flag = "--" + key;
            std::replace(flag.begin(), flag.end(), '_', '-');
            sub->add_option_function<std::string>(
                flag,
                [&overrides, key](const std::string& v) { overrides.emplace_back(key, v); },
                "config key " + key);
        }
    };

    std::vector<std::string> grid;
    std::vector<int> sigmas = {1, 2, 3, 4};

    auto* ber = app.add_subcommand("ber", "BER vs SNR for one configuration");
    add_common(ber);

    auto* sweep = app.add_subcommand("sweep", "parameter sweep with shared randomness");
    std::string sweep_kind;
    sweep->add_option("kind", sweep_kind, "alpha | tau | cfo | cfo-error | channel-error")
        ->required();
    sweep->add_option("--grid", grid, "sweep grid values")->delimiter(',');
    add_common(sweep);

    auto* flops = app.add_subcommand("flops", "analytic flop models and recursion audit");
    add_common(flops);

    auto* bench = app.add_subcommand("bench", "wall-clock equalizer comparison");
    bench->add_option("--sigmas", sigmas, "antenna exponents to benchmark")->delimiter(',');
    add_common(bench);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        SimConfig config;
        if (!config_path.empty()) config = parse_config_file(config_path);
        for (const auto& [key, value] : overrides) apply_config_key(config, key, value);
        config.validate();

        if (out_dir.empty()) {
            const char* env = std::getenv("CDESIM_OUT_DIR");
            out_dir = env != nullptr ? env : "out";
        }

        RunContext ctx;
        ctx.config = config;
        ctx.config.threads = threads;
        ctx.out_dir = out_dir;
        ctx.plot = plot;
        ctx.check = check;

        int status = 0;
        if (ber->parsed()) {
            ctx.subcommand = "ber";
            ctx.prepare();
            status = cmd_ber(ctx);
        } else if (sweep->parsed()) {
            ctx.subcommand = "sweep " + sweep_kind;
            ctx.prepare();
            status = cmd_sweep(ctx, sweep_kind, grid);
        } else if (flops->parsed()) {
            ctx.subcommand = "flops";
            ctx.prepare();
            status = cmd_flops(ctx);
        } else if (bench->parsed()) {
            ctx.subcommand = "bench";
            ctx.prepare();
            status = cmd_bench(ctx, sigmas);
        }
        if (status != 0) return status;
        return ctx.finish();
    } catch (const invalid_parameter_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const invalid_dimension_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "simulation failed: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace cdesim::cli
