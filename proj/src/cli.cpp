#include "awfisher/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "awfisher/analysis.hpp"
#include "awfisher/asymlab.hpp"
#include "awfisher/error.hpp"
#include "awfisher/fit.hpp"
#include "awfisher/matrix_io.hpp"
#include "awfisher/nulltable.hpp"

namespace awfisher {

namespace {

// Raised for flag values that parse but make no sense; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<double> parse_real_list(const std::string& text, const char* what) {
    std::vector<double> out;
    for (const auto& field : split_csv_line(text)) {
        try {
            out.push_back(parse_double(field));
        } catch (const ValidationError&) {
            throw UsageError(std::string(what) + ": '" + field + "' is not a number");
        }
    }
    return out;
}

std::vector<StudyConfig> make_configs(const std::string& effects, const std::string& lambdas) {
    const auto mu = parse_real_list(effects, "--effects");
    std::vector<StudyConfig> configs(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) configs[i].effect = mu[i];
    if (!lambdas.empty()) {
        const auto lam = parse_real_list(lambdas, "--lambdas");
        if (lam.size() != mu.size()) throw UsageError("--lambdas must have one entry per effect");
        for (std::size_t i = 0; i < lam.size(); ++i) {
            if (!(lam[i] > 0.0)) throw UsageError("--lambdas entries must be positive");
            configs[i].lambda = lam[i];
        }
    }
    return configs;
}

// Writes to `path`, or to `fallback` when the path is empty or "-".
template <typename Writer>
void emit(const std::string& path, std::ostream& fallback, Writer&& writer) {
    if (path.empty() || path == "-") {
        writer(fallback);
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw ValidationError("cannot open '" + path + "' for writing");
    writer(file);
    if (!file) throw ValidationError("write to '" + path + "' failed");
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    return in;
}

double theoretical_slope(std::span<const StudyConfig> configs) {
    double sum = 0.0;
    for (const auto& c : configs) sum += c.lambda * c.effect * c.effect / 4.0;
    return sum;
}

// --- combine -----------------------------------------------------------------

struct CombineArgs {
    std::string input;
    std::string out;
    std::string null_table;
    std::string categories;
    std::string method = "aw_fisher";
    std::string on_invalid = "error";
    double fdr = 0.01;
    std::uint64_t draws = 1000000;
    std::uint64_t seed = 1;
    int threads = 0;
};

int run_combine(const CombineArgs& a, std::ostream& out, std::ostream& err) {
    LoadOptions load;
    load.on_invalid = a.on_invalid == "drop" ? InvalidPolicy::drop : InvalidPolicy::error;
    LoadReport report;
    const FeatureMatrix matrix = load_matrix(a.input, load, &report);
    if (report.dropped_rows > 0) err << "dropped " << report.dropped_rows << " row(s) with invalid p-values\n";

    AnalyzeOptions options;
    options.method = method_from_string(a.method);
    options.fdr = a.fdr;
    options.threads = resolve_threads(a.threads);

    NullTable table;
    const NullTable* table_ptr = nullptr;
    if (options.method == Method::aw_fisher) {
        if (!a.null_table.empty()) {
            table = load_null_table(a.null_table);
        } else {
            table = build_null_table(static_cast<std::uint32_t>(matrix.studies()), a.draws, a.seed, options.threads);
        }
        table_ptr = &table;
    }

    const auto results = analyze(matrix, options, table_ptr);
    std::size_t flagged = 0;
    for (const auto& r : results) flagged += r.bounds_ok ? 0 : 1;
    if (flagged > 0) err << flagged << " feature(s) have p_mc outside the Bonferroni bounds\n";

    emit(a.out, out, [&](std::ostream& os) { write_results(os, results); });
    if (!a.categories.empty()) {
        const auto cats = categorize(results);
        emit(a.categories, out, [&](std::ostream& os) { write_categories(os, cats); });
    }
    return kExitOk;
}

// --- null --------------------------------------------------------------------

struct NullBuildArgs {
    std::uint32_t k = 0;
    std::uint64_t draws = 1000000;
    std::uint64_t seed = 1;
    std::string out;
    int threads = 0;
};

int run_null_inspect(const std::string& path, std::ostream& out) {
    const NullTable t = load_null_table(path);
    auto quantile = [&](double q) {
        const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(t.samples.size() - 1)));
        return format_double(t.samples[idx]);
    };
    out << "magic: AWNULL01\n"
        << "k: " << t.k << '\n'
        << "draws: " << t.draws << '\n'
        << "seed: " << t.seed << '\n'
        << "min: " << format_double(t.samples.front()) << '\n'
        << "median: " << quantile(0.5) << '\n'
        << "q90: " << quantile(0.9) << '\n'
        << "q99: " << quantile(0.99) << '\n'
        << "q999: " << quantile(0.999) << '\n'
        << "max: " << format_double(t.samples.back()) << '\n'
        << "min_p: " << format_double(1.0 / (static_cast<double>(t.draws) + 1.0)) << '\n';
    return kExitOk;
}

// --- sim ---------------------------------------------------------------------

struct SimRatesArgs {
    std::string effects = "0.2,0.3,0.4,0.5";
    std::string lambdas;
    std::string grid = "200:1000:100";
    std::uint64_t reps = 100000;
    bool full = false;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out;
    std::string fits;
};

void write_rate_points(std::ostream& os, std::span<const RatePoint> points) {
    os << "n,study,kind,estimate,reps,stderr\n";
    for (const auto& p : points) {
        os << p.n << ',' << p.study + 1 << ',' << to_string(p.kind) << ',' << format_double(p.estimate) << ','
           << p.reps << ',' << format_double(p.standard_error()) << '\n';
    }
}

void write_fits(std::ostream& os, std::span<const RatePoint> points, std::size_t studies) {
    os << "study,kind,form,a,b,r_squared,used,dropped,status\n";
    for (std::size_t s = 0; s < studies; ++s) {
        std::vector<RateObservation> obs;
        ErrorKind kind = ErrorKind::miss;
        for (const auto& p : points) {
            if (p.study != s) continue;
            kind = p.kind;
            obs.push_back({static_cast<double>(p.n), p.estimate});
        }
        const FitForm form = kind == ErrorKind::miss ? FitForm::n_exp_decay : FitForm::reciprocal_linear;
        os << s + 1 << ',' << to_string(kind) << ',' << to_string(form) << ',';
        try {
            const FitResult fit = form == FitForm::n_exp_decay ? fit_n_exp_decay(obs) : fit_reciprocal_linear(obs);
            os << format_double(fit.a) << ',' << format_double(fit.b) << ',' << format_double(fit.r_squared) << ','
               << fit.used << ',' << fit.dropped << ',' << (fit.decaying ? "ok" : "non_decaying") << '\n';
        } catch (const NumericError&) {
            std::size_t zeros = 0;
            for (const auto& o : obs) zeros += o.rate > 0.0 ? 0 : 1;
            os << ",,," << obs.size() - zeros << ',' << zeros << ",insufficient_points\n";
        }
    }
}

int run_sim_rates(const SimRatesArgs& a, std::ostream& out) {
    const auto configs = make_configs(a.effects, a.lambdas);
    const auto grid_raw = parse_grid(a.grid);
    const std::vector<std::uint64_t> grid(grid_raw.begin(), grid_raw.end());
    const std::uint64_t reps = a.full ? 1000000 : a.reps;
    const auto points = estimate_weight_error_rates(configs, grid, reps, a.seed, resolve_threads(a.threads));
    emit(a.out, out, [&](std::ostream& os) { write_rate_points(os, points); });
    if (!a.fits.empty()) emit(a.fits, out, [&](std::ostream& os) { write_fits(os, points, configs.size()); });
    return kExitOk;
}

struct SimSlopesArgs {
    std::string effects = "0.5,0.5,0.5";
    std::string lambdas;
    std::string grid = "10000";
    std::uint64_t reps = 10000;
    std::string methods = "single_study,fisher,aw_fisher";
    std::string null_table;
    std::uint64_t draws = 1000000;
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out;
};

int run_sim_slopes(const SimSlopesArgs& a, std::ostream& out) {
    const auto configs = make_configs(a.effects, a.lambdas);
    const auto grid = parse_grid(a.grid);
    std::vector<SlopeMethod> methods;
    for (const auto& name : split_csv_line(a.methods)) {
        try {
            methods.push_back(slope_method_from_string(name));
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
    }
    const unsigned threads = resolve_threads(a.threads);

    NullTable table;
    const NullTable* table_ptr = nullptr;
    if (std::find(methods.begin(), methods.end(), SlopeMethod::aw_fisher) != methods.end()) {
        table = a.null_table.empty()
                    ? build_null_table(static_cast<std::uint32_t>(configs.size()), a.draws, a.seed, threads)
                    : load_null_table(a.null_table);
        table_ptr = &table;
    }

    emit(a.out, out, [&](std::ostream& os) {
        os << "method,study,n,estimate,reps,stderr,bound_fallbacks,reference\n";
        for (const auto n : grid) {
            for (const SlopeMethod m : methods) {
                if (m == SlopeMethod::single_study) {
                    for (std::size_t s = 0; s < configs.size(); ++s) {
                        const std::span<const StudyConfig> one(&configs[s], 1);
                        const auto est = estimate_exact_slope(m, one, n, a.reps, a.seed + s, nullptr, threads);
                        os << to_string(m) << ',' << s + 1 << ',' << n << ',' << format_double(est.estimate) << ','
                           << est.reps << ',' << format_double(est.standard_error) << ",0,"
                           << format_double(theoretical_slope(one)) << '\n';
                    }
                } else {
                    const auto est = estimate_exact_slope(m, configs, n, a.reps, a.seed, table_ptr, threads);
                    os << to_string(m) << ",all," << n << ',' << format_double(est.estimate) << ',' << est.reps << ','
                       << format_double(est.standard_error) << ',' << est.bound_fallbacks << ','
                       << format_double(theoretical_slope(configs)) << '\n';
                }
            }
        }
    });
    return kExitOk;
}

// --- plotdata ----------------------------------------------------------------

struct PlotArgs {
    std::string rates;
    std::string fits;
    std::string results;
    std::string out;
};

int run_plotdata(const PlotArgs& a, std::ostream& out) {
    if (a.rates.empty() == a.results.empty()) throw UsageError("plotdata needs exactly one of --rates or --results");

    if (!a.results.empty()) {
        auto in = open_input(a.results);
        const auto results = read_results(in);
        const auto cats = categorize(results);
        emit(a.out, out, [&](std::ostream& os) { write_categories(os, cats); });
        return kExitOk;
    }

    struct Row {
        std::uint64_t n;
        std::size_t study;
        std::string kind;
        double estimate;
        double stderr_;
    };
    std::vector<Row> rows;
    {
        auto in = open_input(a.rates);
        std::string line;
        if (!std::getline(in, line) || line != "n,study,kind,estimate,reps,stderr")
            throw ValidationError("rates CSV: unexpected header");
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv_line(line);
            if (f.size() != 6) throw ValidationError("rates CSV: expected 6 fields");
            rows.push_back({static_cast<std::uint64_t>(parse_double(f[0])), static_cast<std::size_t>(parse_double(f[1])),
                            f[2], parse_double(f[3]), parse_double(f[5])});
        }
    }
    std::map<std::size_t, FitResult> fits;
    if (!a.fits.empty()) {
        auto in = open_input(a.fits);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto f = split_csv_line(line);
            if (f.size() != 9) throw ValidationError("fits CSV: expected 9 fields");
            if (f[3].empty()) continue;
            FitResult fit;
            fit.form = f[2] == "n_exp_decay" ? FitForm::n_exp_decay : FitForm::reciprocal_linear;
            fit.a = parse_double(f[3]);
            fit.b = parse_double(f[4]);
            fit.r_squared = parse_double(f[5]);
            fits[static_cast<std::size_t>(parse_double(f[0]))] = fit;
        }
    }

    emit(a.out, out, [&](std::ostream& os) {
        os << "n,study,kind,series,value\n";
        for (const auto& r : rows) {
            const std::string prefix = std::to_string(r.n) + ',' + std::to_string(r.study) + ',' + r.kind + ',';
            os << prefix << "observed," << format_double(r.estimate) << '\n';
            os << prefix << "ci_low," << format_double(std::max(0.0, r.estimate - 1.96 * r.stderr_)) << '\n';
            os << prefix << "ci_high," << format_double(std::min(1.0, r.estimate + 1.96 * r.stderr_)) << '\n';
            if (const auto it = fits.find(r.study); it != fits.end()) {
                os << prefix << "fitted," << format_double(it->second.predict(static_cast<double>(r.n))) << '\n';
            }
        }
    });
    return kExitOk;
}

}  // namespace

std::vector<unsigned long long> parse_grid(const std::string& spec) {
    auto to_int = [&](const std::string& s) {
        unsigned long long v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty() || v == 0) {
            throw UsageError("grid '" + spec + "': '" + s + "' is not a positive integer");
        }
        return v;
    };
    std::vector<unsigned long long> out;
    if (spec.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(spec);
        for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
        if (parts.size() != 3) throw UsageError("grid '" + spec + "' must be start:stop:step");
        const auto start = to_int(parts[0]), stop = to_int(parts[1]), step = to_int(parts[2]);
        if (stop < start) throw UsageError("grid '" + spec + "': stop < start");
        for (auto v = start; v <= stop; v += step) out.push_back(v);
    } else {
        for (const auto& f : split_csv_line(spec)) out.push_back(to_int(f));
    }
    return out;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Adaptively weighted Fisher meta-analysis and asymptotics lab", "awfisher"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    CombineArgs combine;
    auto* cmd_combine = app.add_subcommand("combine", "Combine a feature x study p-value matrix");
    cmd_combine->add_option("--input,-i", combine.input, "Input CSV (feature_id,<study>...)")->required();
    cmd_combine->add_option("--out,-o", combine.out, "Result CSV (default: stdout)");
    cmd_combine->add_option("--null-table", combine.null_table, "Prebuilt null table (built on the fly if absent)");
    cmd_combine->add_option("--method", combine.method, "fisher|aw_fisher|stouffer|logit|min_p|max_p")
        ->check(CLI::IsMember({"fisher", "aw_fisher", "stouffer", "logit", "min_p", "max_p"}));
    cmd_combine->add_option("--fdr", combine.fdr, "Benjamini-Hochberg level")->check(CLI::Range(0.0, 1.0));
    cmd_combine->add_option("--on-invalid", combine.on_invalid, "error|drop")->check(CLI::IsMember({"error", "drop"}));
    cmd_combine->add_option("--categories", combine.categories, "Also write weight-category counts here");
    cmd_combine->add_option("--draws", combine.draws, "Null draws when no table is given")->check(CLI::PositiveNumber);
    cmd_combine->add_option("--seed", combine.seed, "Seed for an on-the-fly null table");
    cmd_combine->add_option("--threads", combine.threads, "Worker threads (0 = machine parallelism)")
        ->check(CLI::NonNegativeNumber);

    auto* cmd_null = app.add_subcommand("null", "Null table lifecycle");
    cmd_null->require_subcommand(1);
    NullBuildArgs build;
    auto* cmd_build = cmd_null->add_subcommand("build", "Build and save a Monte Carlo null table");
    cmd_build->add_option("-k", build.k, "Number of studies")->required()->check(CLI::Range(1u, 64u));
    cmd_build->add_option("--draws", build.draws, "Monte Carlo draws")->check(CLI::PositiveNumber);
    cmd_build->add_option("--seed", build.seed, "RNG seed");
    cmd_build->add_option("--out,-o", build.out, "Output file")->required();
    cmd_build->add_option("--threads", build.threads, "Worker threads (0 = machine parallelism)")
        ->check(CLI::NonNegativeNumber);
    std::string inspect_path;
    auto* cmd_inspect = cmd_null->add_subcommand("inspect", "Print a null table's header and quantiles");
    cmd_inspect->add_option("path,--null-table", inspect_path, "Null table file")->required();

    auto* cmd_sim = app.add_subcommand("sim", "Asymptotics laboratory");
    cmd_sim->require_subcommand(1);
    SimRatesArgs rates;
    auto* cmd_rates = cmd_sim->add_subcommand("rates", "Weight miss / false-inclusion rates over a sample-size grid");
    cmd_rates->add_option("--effects", rates.effects, "Comma list of per-study effects");
    cmd_rates->add_option("--lambdas", rates.lambdas, "Comma list of per-study sample-size shares (default all 1)");
    cmd_rates->add_option("--n", rates.grid, "Grid start:stop:step or comma list");
    cmd_rates->add_option("--reps", rates.reps, "Replicates per grid point")->check(CLI::PositiveNumber);
    cmd_rates->add_flag("--full", rates.full, "Use 10^6 replicates per grid point");
    cmd_rates->add_option("--seed", rates.seed, "RNG seed");
    cmd_rates->add_option("--threads", rates.threads, "Worker threads (0 = machine parallelism)")
        ->check(CLI::NonNegativeNumber);
    cmd_rates->add_option("--out,-o", rates.out, "RatePoint CSV (default: stdout)");
    cmd_rates->add_option("--fits", rates.fits, "FitResult CSV");

    SimSlopesArgs slopes;
    auto* cmd_slopes = cmd_sim->add_subcommand("slopes", "Empirical exact slopes");
    cmd_slopes->add_option("--effects", slopes.effects, "Comma list of per-study effects");
    cmd_slopes->add_option("--lambdas", slopes.lambdas, "Comma list of per-study sample-size shares");
    cmd_slopes->add_option("--n", slopes.grid, "Sample sizes (even): start:stop:step or comma list");
    cmd_slopes->add_option("--reps", slopes.reps, "Replicates")->check(CLI::PositiveNumber);
    cmd_slopes->add_option("--methods", slopes.methods, "Comma list of single_study,fisher,aw_fisher");
    cmd_slopes->add_option("--null-table", slopes.null_table, "Null table for aw_fisher (built if absent)");
    cmd_slopes->add_option("--draws", slopes.draws, "Null draws when no table is given")->check(CLI::PositiveNumber);
    cmd_slopes->add_option("--seed", slopes.seed, "RNG seed");
    cmd_slopes->add_option("--threads", slopes.threads, "Worker threads (0 = machine parallelism)")
        ->check(CLI::NonNegativeNumber);
    cmd_slopes->add_option("--out,-o", slopes.out, "SlopeEstimate CSV (default: stdout)");

    PlotArgs plot;
    auto* cmd_plot = app.add_subcommand("plotdata", "Tidy CSVs for external plotting");
    cmd_plot->add_option("--rates", plot.rates, "RatePoint CSV from 'sim rates'");
    cmd_plot->add_option("--fits", plot.fits, "FitResult CSV from 'sim rates'");
    cmd_plot->add_option("--results", plot.results, "Result CSV from 'combine' (emits category counts)");
    cmd_plot->add_option("--out,-o", plot.out, "Output CSV (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (cmd_combine->parsed()) return run_combine(combine, out, err);
        if (cmd_build->parsed()) {
            const auto table = build_null_table(build.k, build.draws, build.seed, resolve_threads(build.threads));
            save_null_table(build.out, table);
            return kExitOk;
        }
        if (cmd_inspect->parsed()) return run_null_inspect(inspect_path, out);
        if (cmd_rates->parsed()) return run_sim_rates(rates, out);
        if (cmd_slopes->parsed()) return run_sim_slopes(slopes, out);
        if (cmd_plot->parsed()) return run_plotdata(plot, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return kExitUsage;
    } catch (const ValidationError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const DomainError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitUsage;
}

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace awfisher
