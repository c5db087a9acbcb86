#ifndef DFCAP_CLI_HPP
#define DFCAP_CLI_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dfcap/capacity.hpp"
#include "dfcap/distribution.hpp"

namespace dfcap::cli {

class config_error : public std::runtime_error {
  public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

enum class OutputFormat { csv, json };

struct HopConfig {
    double k_factor = 0.0;
    std::optional<double> mean_snr;     // linear
    std::optional<double> mean_snr_db;  // dB; exactly one of the two may be set
};

struct SweepSpec {
    double start = 0.0;
    double stop = 0.0;
    int points = 0;
    bool db = false;  // values are dB and converted at the boundary
};

struct RunConfig {
    HopConfig hop_x, hop_y;
    std::vector<AdaptiveScheme> schemes{AdaptiveScheme::ora, AdaptiveScheme::opra,
                                        AdaptiveScheme::tifr};
    std::optional<SweepSpec> sweep;
    double series_tolerance = 1e-12;
    int max_terms = 512;
    std::int64_t mc_samples = 0;  // 0: no Monte Carlo columns
    std::uint64_t mc_seed = 20250801;
    double asym_ratio = 1.0;  // capacity sweep: mean_snr_y = mean_snr_x / ratio
    std::vector<int> term_levels;  // dist: extra CDF columns per truncation cap
    OutputFormat format = OutputFormat::csv;
    std::string out_path = "-";
};

/// Numeric table with a stable, versioned column schema. Cells may be empty
/// (failed row); `row_status` carries "ok" or the per-row error tag.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::optional<double>>> rows;
    std::vector<std::string> row_status;
};

struct ValidationCheck {
    std::string name;
    double analytic = 0.0;
    double estimate = 0.0;
    double standard_error = 0.0;
    double z = 0.0;
    bool pass = true;
};

struct BackendCheck {
    std::string name;
    double value = 0.0;
    double relative_disagreement = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    std::vector<BackendCheck> backend_checks;
    std::int64_t mc_samples = 0;
    std::uint64_t seed = 0;
    bool all_pass = true;
};

double snr_from_db(double db);
double snr_to_db(double linear);
AdaptiveScheme scheme_from_name(const std::string& name);
std::string scheme_name(AdaptiveScheme scheme);
SweepSpec parse_sweep(const std::string& text);  // "start:stop:points[:db]"

/// Applies a flat key=value config file onto `config`. Keys are the CLI flag
/// names without the leading dashes (kx, snr-x-db, sweep, ...); blank lines
/// and '#' comments are skipped. Command-line flags are applied afterwards
/// by the caller, so they take precedence.
void apply_config_file(RunConfig& config, const std::string& path);

/// Resolves a hop config to a validated RicianHop (throws config_error).
RicianHop resolve_hop(const HopConfig& hop, const char* label);

/// gamma, cdf_analytic, pdf_analytic [, cdf_terms_N ...] [, cdf_mc, mc_stderr]
Table run_dist(const RunConfig& config);

/// snr_db, snr_x, snr_y, c_ora, c_opra, gamma0, c_tifr_opt, beta0_opt, p_out
/// [, c_ora_mc, c_ora_mc_stderr]; one row per sweep point.
Table run_capacity(const RunConfig& config);

/// Single row: gamma0 and the constrained TIFR optimum for the configured hops.
Table run_cutoff(const RunConfig& config);

/// Analytic-vs-simulation comparison plus series/quadrature agreement checks.
ValidationReport run_validate(const RunConfig& config);

std::string render_csv(const Table& table);
std::string render_json(const Table& table);
std::string render_csv(const ValidationReport& report);
std::string render_json(const ValidationReport& report);

/// Twelve significant digits, the table output precision.
std::string format_number(double value);

}  // namespace dfcap::cli

#endif
