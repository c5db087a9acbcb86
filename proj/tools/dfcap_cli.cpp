#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dfcap/cli.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

struct Flags {
    double kx = 0.0;
    double ky = 0.0;
    double snr_x = 0.0, snr_y = 0.0, snr_x_db = 0.0, snr_y_db = 0.0;
    std::string sweep;
    std::string scheme = "all";
    double tol = 1e-12;
    int terms = 512;
    std::int64_t mc_samples = 0;
    std::uint64_t seed = 20250801;
    double asym_ratio = 1.0;
    std::vector<int> term_levels;
    std::string format = "csv";
    std::string out = "-";
    std::string config_path;
};

void add_common_options(CLI::App* sub, Flags& f) {
    sub->add_option("--kx", f.kx, "Rician K factor of the first hop");
    sub->add_option("--ky", f.ky, "Rician K factor of the second hop");
    sub->add_option("--snr-x", f.snr_x, "mean SNR of the first hop (linear)");
    sub->add_option("--snr-y", f.snr_y, "mean SNR of the second hop (linear)");
    sub->add_option("--snr-x-db", f.snr_x_db, "mean SNR of the first hop (dB)");
    sub->add_option("--snr-y-db", f.snr_y_db, "mean SNR of the second hop (dB)");
    sub->add_option("--sweep", f.sweep, "start:stop:points[:db]");
    sub->add_option("--scheme", f.scheme, "ora|opra|tifr|all (default all)");
    sub->add_option("--tol", f.tol, "series truncation tolerance");
    sub->add_option("--terms", f.terms, "series term cap");
    sub->add_option("--mc-samples", f.mc_samples, "Monte Carlo sample count (0: off)");
    sub->add_option("--seed", f.seed, "Monte Carlo seed");
    sub->add_option("--asym-ratio", f.asym_ratio,
                    "capacity sweep: snr_y = snr_x / ratio (default 1)");
    sub->add_option("--terms-compare", f.term_levels,
                    "dist: extra CDF columns at these term caps")
        ->delimiter(',');
    sub->add_option("--format", f.format, "csv|json");
    sub->add_option("--out", f.out, "output path ('-' = stdout)");
    sub->add_option("--config", f.config_path,
                    "flat key=value config file (flags override)");
}

// Defaults, then the config file, then whatever flags were actually given.
dfcap::cli::RunConfig build_config(const Flags& f, const CLI::App* sub) {
    dfcap::cli::RunConfig config;
    if (sub->count("--config") > 0) dfcap::cli::apply_config_file(config, f.config_path);
    if (sub->count("--kx") > 0) config.hop_x.k_factor = f.kx;
    if (sub->count("--ky") > 0) config.hop_y.k_factor = f.ky;
    if (sub->count("--snr-x") > 0) config.hop_x.mean_snr = f.snr_x;
    if (sub->count("--snr-x-db") > 0) config.hop_x.mean_snr_db = f.snr_x_db;
    if (sub->count("--snr-y") > 0) config.hop_y.mean_snr = f.snr_y;
    if (sub->count("--snr-y-db") > 0) config.hop_y.mean_snr_db = f.snr_y_db;
    if (sub->count("--sweep") > 0) config.sweep = dfcap::cli::parse_sweep(f.sweep);
    if (sub->count("--scheme") > 0) {
        if (f.scheme == "all") {
            config.schemes = {dfcap::AdaptiveScheme::ora, dfcap::AdaptiveScheme::opra,
                              dfcap::AdaptiveScheme::tifr};
        } else {
            config.schemes = {dfcap::cli::scheme_from_name(f.scheme)};
        }
    }
    if (sub->count("--tol") > 0) config.series_tolerance = f.tol;
    if (sub->count("--terms") > 0) config.max_terms = f.terms;
    if (sub->count("--mc-samples") > 0) config.mc_samples = f.mc_samples;
    if (sub->count("--seed") > 0) config.mc_seed = f.seed;
    if (sub->count("--asym-ratio") > 0) config.asym_ratio = f.asym_ratio;
    if (sub->count("--terms-compare") > 0) config.term_levels = f.term_levels;
    if (sub->count("--format") > 0) {
        if (f.format == "csv")
            config.format = dfcap::cli::OutputFormat::csv;
        else if (f.format == "json")
            config.format = dfcap::cli::OutputFormat::json;
        else
            throw dfcap::cli::config_error("unknown format '" + f.format + "'");
    }
    if (sub->count("--out") > 0) config.out_path = f.out;
    return config;
}

int write_output(const std::string& text, const std::string& path) {
    if (path == "-") {
        std::cout << text;
        return kExitOk;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "dfcap: cannot open output file '" << path << "'\n";
        return kExitConfigError;
    }
    out << text;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dfcap: distribution and adaptive-transmission capacity of a "
                 "dual-hop decode-and-forward link over Rician fading"};
    app.require_subcommand(1);

    Flags flags_dist, flags_capacity, flags_cutoff, flags_validate;
    CLI::App* sub_dist =
        app.add_subcommand("dist", "CDF/PDF tables of the min hop SNR");
    add_common_options(sub_dist, flags_dist);
    CLI::App* sub_capacity =
        app.add_subcommand("capacity", "ergodic capacity per adaptive scheme");
    add_common_options(sub_capacity, flags_capacity);
    CLI::App* sub_cutoff =
        app.add_subcommand("cutoff", "optimal cutoffs for one parameter point");
    add_common_options(sub_cutoff, flags_cutoff);
    CLI::App* sub_validate =
        app.add_subcommand("validate", "analytic vs Monte Carlo cross-check");
    add_common_options(sub_validate, flags_validate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        const Flags* flags = nullptr;
        const CLI::App* sub = nullptr;
        if (sub_dist->parsed()) flags = &flags_dist, sub = sub_dist;
        if (sub_capacity->parsed()) flags = &flags_capacity, sub = sub_capacity;
        if (sub_cutoff->parsed()) flags = &flags_cutoff, sub = sub_cutoff;
        if (sub_validate->parsed()) flags = &flags_validate, sub = sub_validate;
        const dfcap::cli::RunConfig config = build_config(*flags, sub);

        if (sub_validate->parsed()) {
            const dfcap::cli::ValidationReport report = dfcap::cli::run_validate(config);
            const std::string text = config.format == dfcap::cli::OutputFormat::csv
                                         ? dfcap::cli::render_csv(report)
                                         : dfcap::cli::render_json(report);
            const int io = write_output(text, config.out_path);
            if (io != kExitOk) return io;
            return report.all_pass ? kExitOk : kExitValidationFailure;
        }

        dfcap::cli::Table table;
        if (sub_dist->parsed()) table = dfcap::cli::run_dist(config);
        if (sub_capacity->parsed()) table = dfcap::cli::run_capacity(config);
        if (sub_cutoff->parsed()) table = dfcap::cli::run_cutoff(config);
        const std::string text = config.format == dfcap::cli::OutputFormat::csv
                                     ? dfcap::cli::render_csv(table)
                                     : dfcap::cli::render_json(table);
        return write_output(text, config.out_path);
    } catch (const dfcap::cli::config_error& e) {
        std::cerr << "dfcap: config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "dfcap: config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "dfcap: numerical error: " << e.what() << "\n";
        return kExitNumericalError;
    }
}
