#include "dfcap/cli.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dfcap/montecarlo.hpp"

namespace dfcap::cli {

double snr_from_db(double db) { return std::pow(10.0, db / 10.0); }
double snr_to_db(double linear) { return 10.0 * std::log10(linear); }

std::string format_number(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

AdaptiveScheme scheme_from_name(const std::string& name) {
    if (name == "ora") return AdaptiveScheme::ora;
    if (name == "opra") return AdaptiveScheme::opra;
    if (name == "tifr") return AdaptiveScheme::tifr;
    throw config_error("unknown scheme '" + name + "' (expected ora|opra|tifr|all)");
}

std::string scheme_name(AdaptiveScheme scheme) {
    switch (scheme) {
        case AdaptiveScheme::ora: return "ora";
        case AdaptiveScheme::opra: return "opra";
        case AdaptiveScheme::tifr: return "tifr";
    }
    return "?";
}

SweepSpec parse_sweep(const std::string& text) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ':')) parts.push_back(item);
    if (parts.size() != 3 && parts.size() != 4)
        throw config_error("sweep must be start:stop:points[:db], got '" + text + "'");
    SweepSpec spec;
    try {
        spec.start = std::stod(parts[0]);
        spec.stop = std::stod(parts[1]);
        spec.points = std::stoi(parts[2]);
    } catch (const std::exception&) {
        throw config_error("sweep has non-numeric fields: '" + text + "'");
    }
    if (parts.size() == 4) {
        if (parts[3] != "db")
            throw config_error("sweep qualifier must be 'db', got '" + parts[3] + "'");
        spec.db = true;
    }
    if (spec.points < 2) throw config_error("sweep needs at least 2 points");
    return spec;
}

namespace {

std::string strip(const std::string& text) {
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = text.find_last_not_of(" \t\r");
    return text.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double parsed = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return parsed;
    } catch (const std::exception&) {
        throw config_error("config key '" + key + "' has non-numeric value '" +
                           value + "'");
    }
}

}  // namespace

void apply_config_file(RunConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot read config file '" + path + "'");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string entry = strip(line);
        if (entry.empty() || entry[0] == '#') continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(line_no) +
                               " is not key=value: '" + entry + "'");
        const std::string key = strip(entry.substr(0, eq));
        const std::string value = strip(entry.substr(eq + 1));

        if (key == "kx") config.hop_x.k_factor = parse_double(key, value);
        else if (key == "ky") config.hop_y.k_factor = parse_double(key, value);
        else if (key == "snr-x") config.hop_x.mean_snr = parse_double(key, value);
        else if (key == "snr-y") config.hop_y.mean_snr = parse_double(key, value);
        else if (key == "snr-x-db") config.hop_x.mean_snr_db = parse_double(key, value);
        else if (key == "snr-y-db") config.hop_y.mean_snr_db = parse_double(key, value);
        else if (key == "sweep") config.sweep = parse_sweep(value);
        else if (key == "scheme") {
            if (value == "all")
                config.schemes = {AdaptiveScheme::ora, AdaptiveScheme::opra,
                                  AdaptiveScheme::tifr};
            else
                config.schemes = {scheme_from_name(value)};
        } else if (key == "tol") config.series_tolerance = parse_double(key, value);
        else if (key == "terms") config.max_terms = static_cast<int>(parse_double(key, value));
        else if (key == "mc-samples") config.mc_samples = static_cast<std::int64_t>(parse_double(key, value));
        else if (key == "seed") config.mc_seed = static_cast<std::uint64_t>(parse_double(key, value));
        else if (key == "asym-ratio") config.asym_ratio = parse_double(key, value);
        else if (key == "terms-compare") {
            config.term_levels.clear();
            std::istringstream items(value);
            std::string item;
            while (std::getline(items, item, ','))
                config.term_levels.push_back(static_cast<int>(parse_double(key, strip(item))));
        } else if (key == "format") {
            if (value == "csv") config.format = OutputFormat::csv;
            else if (value == "json") config.format = OutputFormat::json;
            else throw config_error("config key 'format' must be csv or json");
        } else if (key == "out") config.out_path = value;
        else throw config_error("unknown config key '" + key + "'");
    }
}

RicianHop resolve_hop(const HopConfig& hop, const char* label) {
    if (hop.mean_snr && hop.mean_snr_db)
        throw config_error(std::string(label) +
                           ": give exactly one of mean SNR (linear) or mean SNR (dB)");
    if (!hop.mean_snr && !hop.mean_snr_db)
        throw config_error(std::string(label) + ": mean SNR is required");
    const double snr = hop.mean_snr ? *hop.mean_snr : snr_from_db(*hop.mean_snr_db);
    if (!(snr > 0.0))
        throw config_error(std::string(label) + ": mean SNR must be positive");
    if (!(hop.k_factor >= 0.0))
        throw config_error(std::string(label) + ": K factor must be nonnegative");
    return RicianHop(hop.k_factor, snr);
}

namespace {

void check_common(const RunConfig& config) {
    if (!(config.series_tolerance > 0.0))
        throw config_error("series tolerance must be positive");
    if (config.max_terms < 1) throw config_error("max terms must be >= 1");
    if (!(config.asym_ratio > 0.0)) throw config_error("asymmetry ratio must be positive");
    if (config.mc_samples < 0) throw config_error("mc samples must be nonnegative");
    for (int level : config.term_levels)
        if (level < 1) throw config_error("term-comparison levels must be >= 1");
}

std::vector<double> sweep_grid(const SweepSpec& spec) {
    if (spec.points < 2) throw config_error("sweep needs at least 2 points");
    std::vector<double> grid(static_cast<std::size_t>(spec.points));
    for (int i = 0; i < spec.points; ++i)
        grid[static_cast<std::size_t>(i)] =
            spec.start + (spec.stop - spec.start) * i / (spec.points - 1);
    return grid;
}

bool wants(const RunConfig& config, AdaptiveScheme scheme) {
    for (auto s : config.schemes)
        if (s == scheme) return true;
    return false;
}

}  // namespace

Table run_dist(const RunConfig& config) {
    check_common(config);
    if (!config.sweep) throw config_error("dist requires --sweep (the gamma grid)");
    const RicianHop hx = resolve_hop(config.hop_x, "hop x");
    const RicianHop hy = resolve_hop(config.hop_y, "hop y");
    const SeriesControl control{config.series_tolerance, config.max_terms};
    const MinSnrDistribution dist(hx, hy, control);

    std::vector<double> grid = sweep_grid(*config.sweep);
    if (config.sweep->db)
        for (double& g : grid) g = snr_from_db(g);
    for (double g : grid)
        if (g < 0.0) throw config_error("dist grid must be nonnegative");

    Table table;
    table.name = "dist";
    table.columns = {"gamma", "cdf_analytic", "pdf_analytic"};
    for (int level : config.term_levels)
        table.columns.push_back("cdf_terms_" + std::to_string(level));
    const bool with_mc = config.mc_samples > 0;
    if (with_mc) {
        table.columns.push_back("cdf_mc");
        table.columns.push_back("mc_stderr");
    }

    std::vector<SimulationEstimate> mc;
    if (with_mc) mc = estimate_min_cdf(dist, grid, config.mc_seed, config.mc_samples);

    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<std::optional<double>> row;
        row.emplace_back(grid[i]);
        row.emplace_back(dist.cdf(grid[i]));
        row.emplace_back(dist.pdf(grid[i]));
        for (int level : config.term_levels) {
            MinSnrDistribution truncated(hx, hy,
                                         SeriesControl{config.series_tolerance, level});
            row.emplace_back(truncated.cdf(grid[i]));
        }
        if (with_mc) {
            row.emplace_back(mc[i].value);
            row.emplace_back(mc[i].standard_error);
        }
        table.rows.push_back(std::move(row));
        table.row_status.emplace_back("ok");
    }
    return table;
}

Table run_capacity(const RunConfig& config) {
    check_common(config);
    const bool has_snr =
        config.hop_x.mean_snr || config.hop_x.mean_snr_db || config.hop_y.mean_snr ||
        config.hop_y.mean_snr_db;
    if (config.sweep && has_snr)
        throw config_error("capacity: give either --sweep (mean SNR axis) or "
                           "fixed per-hop SNRs, not both");
    if (!config.sweep && !has_snr)
        throw config_error("capacity: a --sweep or per-hop SNRs are required");

    std::vector<std::pair<double, double>> snr_pairs;  // (snr_x, snr_y) linear
    std::vector<double> axis_db;
    if (config.sweep) {
        for (double value : sweep_grid(*config.sweep)) {
            const double snr_x = config.sweep->db ? snr_from_db(value) : value;
            axis_db.push_back(config.sweep->db ? value : snr_to_db(value));
            snr_pairs.emplace_back(snr_x, snr_x / config.asym_ratio);
        }
    } else {
        const RicianHop hx = resolve_hop(config.hop_x, "hop x");
        const RicianHop hy = resolve_hop(config.hop_y, "hop y");
        snr_pairs.emplace_back(hx.mean_snr, hy.mean_snr);
        axis_db.push_back(snr_to_db(hx.mean_snr));
    }

    Table table;
    table.name = "capacity";
    table.columns = {"snr_db", "snr_x", "snr_y"};
    if (wants(config, AdaptiveScheme::ora)) table.columns.push_back("c_ora");
    if (wants(config, AdaptiveScheme::opra)) {
        table.columns.push_back("c_opra");
        table.columns.push_back("gamma0");
    }
    if (wants(config, AdaptiveScheme::tifr)) {
        table.columns.push_back("c_tifr_opt");
        table.columns.push_back("beta0_opt");
        table.columns.push_back("p_out");
    }
    const bool with_mc = config.mc_samples > 0 && wants(config, AdaptiveScheme::ora);
    if (with_mc) {
        table.columns.push_back("c_ora_mc");
        table.columns.push_back("c_ora_mc_stderr");
    }

    const SeriesControl control{config.series_tolerance, config.max_terms};
    for (std::size_t i = 0; i < snr_pairs.size(); ++i) {
        std::vector<std::optional<double>> row(table.columns.size());
        row[0] = axis_db[i];
        row[1] = snr_pairs[i].first;
        row[2] = snr_pairs[i].second;
        std::string status = "ok";
        try {
            const MinSnrDistribution dist(
                RicianHop(config.hop_x.k_factor, snr_pairs[i].first),
                RicianHop(config.hop_y.k_factor, snr_pairs[i].second), control);
            std::size_t col = 3;
            if (wants(config, AdaptiveScheme::ora))
                row[col++] = capacity_ora(dist).capacity;
            if (wants(config, AdaptiveScheme::opra)) {
                const CapacityResult r = capacity_opra(dist);
                row[col++] = r.capacity;
                row[col++] = *r.cutoff;
            }
            if (wants(config, AdaptiveScheme::tifr)) {
                const CapacityResult r = optimize_tifr_cutoff(dist);
                row[col++] = r.capacity;
                row[col++] = *r.cutoff;
                row[col++] = *r.outage_probability;
            }
            if (with_mc) {
                const SimulationEstimate est = estimate_capacity(
                    dist, AdaptiveScheme::ora, std::nullopt,
                    detail::substream_seed(config.mc_seed, 100 + i),
                    config.mc_samples);
                row[col++] = est.value;
                row[col++] = est.standard_error;
            }
        } catch (const std::exception& ex) {
            status = std::string("error: ") + ex.what();
        }
        table.rows.push_back(std::move(row));
        table.row_status.push_back(std::move(status));
    }
    return table;
}

Table run_cutoff(const RunConfig& config) {
    check_common(config);
    const RicianHop hx = resolve_hop(config.hop_x, "hop x");
    const RicianHop hy = resolve_hop(config.hop_y, "hop y");
    const MinSnrDistribution dist(hx, hy,
                                  SeriesControl{config.series_tolerance,
                                                config.max_terms});
    const double g0 = opra_cutoff(dist);
    const CapacityResult tifr = optimize_tifr_cutoff(dist);

    Table table;
    table.name = "cutoff";
    table.columns = {"snr_x", "snr_y", "gamma0", "beta0_opt", "p_out_at_beta0"};
    table.rows.push_back({hx.mean_snr, hy.mean_snr, g0, *tifr.cutoff,
                          *tifr.outage_probability});
    table.row_status.emplace_back("ok");
    return table;
}

namespace {

struct ValidateCase {
    double kx, ky, snr_x, snr_y;
};

void validate_one(const MinSnrDistribution& dist, const std::string& tag,
                  std::int64_t samples, std::uint64_t seed,
                  const CapacityOptions& options, ValidationReport& report) {
    const std::vector<double> grid = {0.5, 1.0, 2.0, 5.0, 10.0};
    const auto mc = estimate_min_cdf(dist, grid, seed, samples);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        ValidationCheck check;
        check.name = tag + " cdf(gamma=" + format_number(grid[i]) + ")";
        check.analytic = dist.cdf(grid[i]);
        check.estimate = mc[i].value;
        check.standard_error = mc[i].standard_error;
        check.z = check.standard_error > 0.0
                      ? (check.estimate - check.analytic) / check.standard_error
                      : 0.0;
        check.pass = std::fabs(check.z) <= 3.0;
        report.checks.push_back(check);
    }

    const CapacityResult ora = capacity_ora(dist, options);
    const CapacityResult opra = capacity_opra(dist, options);
    const CapacityResult tifr = optimize_tifr_cutoff(dist, options);
    const struct {
        const char* name;
        const CapacityResult* result;
    } rows[] = {{"ora", &ora}, {"opra", &opra}, {"tifr", &tifr}};

    std::uint64_t salt = 11;
    for (const auto& entry : rows) {
        const SimulationEstimate est = estimate_capacity(
            dist, entry.result->scheme, entry.result->cutoff,
            detail::substream_seed(seed, salt++), samples);
        ValidationCheck check;
        check.name = tag + " capacity " + entry.name;
        check.analytic = entry.result->capacity;
        check.estimate = est.value;
        check.standard_error = est.standard_error;
        check.z = check.standard_error > 0.0
                      ? (check.estimate - check.analytic) / check.standard_error
                      : 0.0;
        check.pass = std::fabs(check.z) <= 3.0;
        report.checks.push_back(check);

        BackendCheck backend;
        backend.name = tag + " backend " + entry.name;
        backend.value = entry.result->capacity;
        backend.relative_disagreement = entry.result->error_estimate;
        backend.tolerance = options.backend_agreement_tolerance;
        backend.pass = backend.relative_disagreement <= backend.tolerance;
        report.backend_checks.push_back(backend);
    }
}

}  // namespace

ValidationReport run_validate(const RunConfig& config) {
    check_common(config);
    const std::int64_t samples = config.mc_samples > 0 ? config.mc_samples : 1000000;
    if (samples < 100000)
        throw config_error("validate needs mc samples >= 100000");

    const bool has_snr =
        config.hop_x.mean_snr || config.hop_x.mean_snr_db || config.hop_y.mean_snr ||
        config.hop_y.mean_snr_db;

    std::vector<ValidateCase> cases;
    if (has_snr) {
        const RicianHop hx = resolve_hop(config.hop_x, "hop x");
        const RicianHop hy = resolve_hop(config.hop_y, "hop y");
        cases.push_back({hx.k_factor, hy.k_factor, hx.mean_snr, hy.mean_snr});
    } else {
        cases.push_back({0.0, 0.0, 5.0, 5.0});
        cases.push_back({3.0, 5.0, 5.0, 5.0});
        cases.push_back({2.0, 2.0, 10.0, 5.0});
    }

    ValidationReport report;
    report.mc_samples = samples;
    report.seed = config.mc_seed;
    const SeriesControl control{config.series_tolerance, config.max_terms};
    CapacityOptions options;

    std::uint64_t case_index = 0;
    for (const auto& one : cases) {
        const MinSnrDistribution dist(RicianHop(one.kx, one.snr_x),
                                      RicianHop(one.ky, one.snr_y), control);
        std::ostringstream tag;
        tag << "K=(" << format_number(one.kx) << "," << format_number(one.ky)
            << ") snr=(" << format_number(one.snr_x) << ","
            << format_number(one.snr_y) << ")";
        validate_one(dist, tag.str(), samples,
                     detail::substream_seed(config.mc_seed, 1000 + case_index++),
                     options, report);
    }

    report.all_pass = true;
    for (const auto& check : report.checks) report.all_pass &= check.pass;
    for (const auto& check : report.backend_checks) report.all_pass &= check.pass;
    return report;
}

std::string render_csv(const Table& table) {
    std::ostringstream out;
    out << "# dfcap-table v1: " << table.name << "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        out << table.columns[c] << (c + 1 < table.columns.size() ? "," : "");
    out << ",status\n";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (row[c]) out << format_number(*row[c]);
            out << ",";
        }
        out << table.row_status[r] << "\n";
    }
    return out.str();
}

std::string render_json(const Table& table) {
    nlohmann::json doc;
    doc["schema"] = "dfcap-table/1";
    doc["name"] = table.name;
    doc["columns"] = table.columns;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : table.rows) {
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& cell : row) {
            if (cell)
                cells.push_back(*cell);
            else
                cells.push_back(nullptr);
        }
        rows.push_back(cells);
    }
    doc["rows"] = rows;
    doc["row_status"] = table.row_status;
    return doc.dump(2) + "\n";
}

std::string render_csv(const ValidationReport& report) {
    std::ostringstream out;
    out << "# dfcap-report v1: validate\n";
    out << "kind,name,analytic,estimate,standard_error,z,rel_disagreement,tolerance,pass\n";
    for (const auto& check : report.checks) {
        out << "mc,\"" << check.name << "\"," << format_number(check.analytic) << ","
            << format_number(check.estimate) << ","
            << format_number(check.standard_error) << "," << format_number(check.z)
            << ",,," << (check.pass ? "pass" : "FAIL") << "\n";
    }
    for (const auto& check : report.backend_checks) {
        out << "backend,\"" << check.name << "\"," << format_number(check.value)
            << ",,,," << format_number(check.relative_disagreement) << ","
            << format_number(check.tolerance) << ","
            << (check.pass ? "pass" : "FAIL") << "\n";
    }
    out << "# all_pass=" << (report.all_pass ? "true" : "false")
        << " samples=" << report.mc_samples << " seed=" << report.seed << "\n";
    return out.str();
}

std::string render_json(const ValidationReport& report) {
    nlohmann::json doc;
    doc["schema"] = "dfcap-report/1";
    doc["mc_samples"] = report.mc_samples;
    doc["seed"] = report.seed;
    doc["all_pass"] = report.all_pass;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& check : report.checks) {
        checks.push_back({{"name", check.name},
                          {"analytic", check.analytic},
                          {"estimate", check.estimate},
                          {"standard_error", check.standard_error},
                          {"z", check.z},
                          {"pass", check.pass}});
    }
    doc["checks"] = checks;
    nlohmann::json backend = nlohmann::json::array();
    for (const auto& check : report.backend_checks) {
        backend.push_back({{"name", check.name},
                           {"value", check.value},
                           {"relative_disagreement", check.relative_disagreement},
                           {"tolerance", check.tolerance},
                           {"pass", check.pass}});
    }
    doc["backend_checks"] = backend;
    return doc.dump(2) + "\n";
}

}  // namespace dfcap::cli
