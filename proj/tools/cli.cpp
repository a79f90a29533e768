#include "cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "homeadv/analysis.h"
#include "homeadv/artifacts.h"
#include "homeadv/diagnostics.h"
#include "homeadv/filtering.h"
#include "homeadv/ingest.h"
#include "homeadv/loo.h"
#include "homeadv/model.h"
#include "homeadv/sampler.h"
#include "homeadv/simulate.h"

namespace homeadv::cli {

namespace {

namespace fs = std::filesystem;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ProvenanceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    return out;
}

// Writes `text` to `path`, or to `fallback` when the path is empty.
void emit(const std::string& path, const std::string& text, std::ostream& fallback) {
    if (path.empty()) {
        fallback << text;
        return;
    }
    auto out = open_output(path);
    out << text;
}

std::vector<GameRecord> read_games(const std::string& path, const ParseOptions& options, std::ostream& err) {
    auto in = open_input(path);
    auto result = parse_games(in, options);
    for (const auto& e : result.errors) err << "warning: row " << e.row << ": " << e.message << '\n';
    return std::move(result.records);
}

std::size_t default_threads() {
    const char* env = std::getenv("HOMEADV_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 0) throw UsageError("HOMEADV_THREADS must be a non-negative integer");
    return static_cast<std::size_t>(v);
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

// ---- ingest ---------------------------------------------------------------

struct IngestArgs {
    std::string input;
    std::string summary;
    std::string out;
    std::optional<int> first_season;
    std::optional<int> last_season;
    std::size_t max_errors = 100;
};

ParseOptions parse_options(const std::optional<int>& first, const std::optional<int>& last, std::size_t max_errors) {
    ParseOptions options;
    if (first) options.window.first = *first;
    if (last) options.window.last = *last;
    options.max_errors = max_errors;
    return options;
}

void run_ingest(const IngestArgs& a, std::ostream& out, std::ostream& err) {
    auto in = open_input(a.input);
    auto result = parse_games(in, parse_options(a.first_season, a.last_season, a.max_errors));
    for (const auto& e : result.errors) err << "warning: row " << e.row << ": " << e.message << '\n';

    nlohmann::json leagues = nlohmann::json::array();
    for (const auto& id : league_ids(result.records)) leagues.push_back(dataset_summary(build_dataset(result.records, id)));
    nlohmann::json summary = {{"games", result.records.size()},
                              {"rejected_rows", result.errors.size()},
                              {"leagues", leagues}};
    emit(a.summary, summary.dump(2) + "\n", out);
    if (!a.out.empty()) {
        auto file = open_output(a.out);
        write_games(file, result.records);
    }
}

// ---- filter ---------------------------------------------------------------

struct FilterArgs {
    std::string input;
    std::string out;
    std::string report;
    FilterConfig config;
    bool grid = false;
    std::vector<int> grid_games{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<int> grid_seasons{1, 2, 3, 4, 5};
};

void run_filter(const FilterArgs& a, std::ostream& out, std::ostream& err) {
    a.config.validate();
    auto records = read_games(a.input, {}, err);

    if (a.grid) {
        auto grid = retention_grid(records, a.grid_games, a.grid_seasons);
        std::ostringstream table;
        table << "min_games,min_seasons,retained_fraction_teams\n";
        for (std::size_t i = 0; i < a.grid_games.size(); ++i)
            for (std::size_t j = 0; j < a.grid_seasons.size(); ++j)
                table << a.grid_games[i] << ',' << a.grid_seasons[j] << ',' << format_fixed(grid[i][j], 4) << '\n';
        out << table.str();
        if (a.out.empty()) return;
    }
    if (a.out.empty()) throw UsageError("filter needs --out unless --grid is given");

    auto [kept, report] = iterative_filter(records, a.config);
    auto final_games = apply_final_threshold(kept, a.config.final_min_games);
    auto file = open_output(a.out);
    write_games(file, final_games);

    auto doc = filter_report_json(report);
    doc["config"] = {{"min_games_per_season", a.config.min_games_per_season},
                     {"min_seasons", a.config.min_seasons},
                     {"final_min_games", a.config.final_min_games}};
    doc["input_games"] = records.size();
    doc["filtered_games"] = kept.size();
    doc["final_games"] = final_games.size();
    if (!a.report.empty()) emit(a.report, doc.dump(2) + "\n", out);
    else err << "filter: kept " << final_games.size() << " of " << records.size() << " games in " << report.rounds
             << " rounds\n";
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
    std::string family = "constant";
    TruthConfig truth;
    int first_season = 2004;
    int num_seasons = 5;
    std::size_t leagues = 1;
    double beta1_star = 0.01;
    double lambda1 = 0.02;
    double lambda0 = 0.5;
    std::string out;
    std::string truth_out;
};

void run_simulate(SimulateArgs a, std::ostream& out) {
    if (a.num_seasons < 1) throw UsageError("--seasons must be >= 1");
    a.truth.seasons.clear();
    for (int t = 0; t < a.num_seasons; ++t) a.truth.seasons.push_back(a.first_season + t);

    std::vector<GameRecord> records;
    nlohmann::json truth;
    auto family = parse_family(a.family);
    if (family == ModelFamily::HierarchicalLinear) {
        HierarchyTruth h{a.truth, a.leagues, a.beta1_star, a.lambda1, a.lambda0};
        auto sim = generate_leagues(h);
        records = std::move(sim.records);
        truth = std::move(sim.truth);
    } else {
        if (a.leagues != 1) throw UsageError("--leagues needs --family hier");
        a.truth.family = family;
        auto sim = generate_league(a.truth);
        records = std::move(sim.records);
        truth = std::move(sim.truth);
    }

    std::ostringstream table;
    write_games(table, records);
    emit(a.out, table.str(), out);
    if (!a.truth_out.empty()) emit(a.truth_out, truth.dump(2) + "\n", out);
}

// ---- fit ------------------------------------------------------------------

struct FitArgs {
    std::string input;
    std::string out;
    std::string model = "constant";
    std::vector<std::string> leagues;
    SamplerConfig config;
    std::optional<std::size_t> threads;
    double hyper_scale = 5.0;
    bool centered = false;
    bool no_loglik = false;
};

void run_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
    SamplerConfig config = a.config;
    config.threads = a.threads ? *a.threads : default_threads();
    config.validate();
    ModelSpec spec;
    spec.family = parse_family(a.model);
    spec.hyper_scale = a.hyper_scale;
    spec.noncentered_trend = !a.centered;

    auto records = read_games(a.input, {}, err);
    spec.leagues = a.leagues.empty() ? league_ids(records) : a.leagues;
    spec.validate();
    std::vector<LeagueDataset> datasets;
    for (const auto& id : spec.leagues) datasets.push_back(build_dataset(records, id));
    ModelContext ctx(spec, std::move(datasets));

    std::mutex heartbeat;
    auto fit = sample(ctx, config, [&](std::size_t chain, double seconds) {
        std::lock_guard lock(heartbeat);
        err << "chain " << chain << " finished in " << format_fixed(seconds, 1) << " s\n";
    });
    write_fit(a.out, fit, ctx, {!a.no_loglik});
    out << "fit: model=" << family_name(spec.family) << " dimension=" << ctx.dimension()
        << " games=" << ctx.num_games() << " divergences=" << fit.diagnostics.divergences
        << " max_rhat=" << format_fixed(fit.diagnostics.max_rhat, 3) << " seconds=" << format_fixed(fit.wall_seconds, 1)
        << '\n';
}

// ---- diagnose / loo / compare ---------------------------------------------

void run_diagnose(const std::string& dir, const std::string& path, std::ostream& out) {
    auto loaded = read_fit(dir);
    const auto& d = loaded.fit.diagnostics;
    std::ostringstream doc;
    doc << "# divergences=" << d.divergences << " min_rhat=" << format_fixed(d.min_rhat, 3)
        << " max_rhat=" << format_fixed(d.max_rhat, 3) << '\n';
    doc << diagnostics_table(d, loaded.fit.layout);
    emit(path, doc.str(), out);
}

void run_loo(const std::string& dir, const std::string& pointwise, std::ostream& out) {
    auto loaded = read_fit(dir);
    auto loo = psis_loo(loaded.fit.loglik);
    out << "elpd_loo,se,n_high_k,unsmoothed\n"
        << format_fixed(loo.elpd_loo, 2) << ',' << format_fixed(loo.se, 2) << ',' << loo.num_high_k() << ','
        << (loo.unsmoothed ? "true" : "false") << '\n';
    if (!pointwise.empty()) {
        auto file = open_output(pointwise);
        file << "game,elpd_loo,pareto_k\n";
        for (std::size_t i = 0; i < loo.pointwise.size(); ++i)
            file << i << ',' << format_fixed(loo.pointwise[i], 6) << ',' << format_fixed(loo.pareto_k[i], 4) << '\n';
    }
}

std::vector<LoadedFit> load_fits(const std::vector<std::string>& dirs) {
    std::vector<LoadedFit> fits;
    for (const auto& d : dirs) fits.push_back(read_fit(d));
    return fits;
}

// Model name per fit, falling back to directory names when a model repeats.
std::vector<std::string> fit_tags(const std::vector<LoadedFit>& fits, const std::vector<std::string>& dirs) {
    std::vector<std::string> tags;
    for (const auto& f : fits) tags.emplace_back(family_name(f.fit.spec.family));
    auto sorted = tags;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        for (std::size_t i = 0; i < dirs.size(); ++i) tags[i] = fs::path(dirs[i]).lexically_normal().filename().string();
    return tags;
}

void run_compare(const std::vector<std::string>& dirs, std::ostream& out) {
    auto fits = load_fits(dirs);
    for (std::size_t i = 1; i < fits.size(); ++i)
        if (fits[i].data_hash != fits[0].data_hash)
            throw ProvenanceError(dirs[i] + " was fit on different data than " + dirs[0]);
    auto tags = fit_tags(fits, dirs);
    std::vector<std::pair<std::string, LooResult>> loos;
    for (std::size_t i = 0; i < fits.size(); ++i) loos.emplace_back(tags[i], psis_loo(fits[i].fit.loglik));
    out << comparison_table(compare(loos));
}

// ---- report ---------------------------------------------------------------

struct ReportArgs {
    std::vector<std::string> fits;
    std::string joint;
    double level = 0.95;
    std::optional<int> season;
    std::string out_dir;
};

std::size_t game_offset(const FitResult& fit, std::size_t league) {
    std::size_t offset = 0;
    for (std::size_t k = 0; k < league; ++k) offset += fit.leagues[k].num_games;
    return offset;
}

void check_provenance(const std::vector<LoadedFit>& fits, const std::vector<std::string>& dirs) {
    std::map<std::string, std::pair<std::string, std::string>> seen;   // league -> (hash, dir)
    for (std::size_t i = 0; i < fits.size(); ++i)
        for (std::size_t k = 0; k < fits[i].fit.leagues.size(); ++k) {
            const auto& id = fits[i].fit.leagues[k].league_id;
            auto [it, inserted] = seen.emplace(id, std::make_pair(fits[i].league_hashes[k], dirs[i]));
            if (!inserted && it->second.first != fits[i].league_hashes[k])
                throw ProvenanceError("league " + id + " was fit on different data in " + it->second.second +
                                      " and " + dirs[i]);
        }
}

void run_report(const ReportArgs& a, std::ostream& out) {
    if (!(a.level > 0.0 && a.level < 1.0)) throw UsageError("--level must be in (0, 1)");
    std::vector<std::string> dirs = a.fits;
    if (!a.joint.empty()) dirs.push_back(a.joint);
    if (dirs.empty()) throw UsageError("report needs at least one fit directory");
    auto fits = load_fits(dirs);
    check_provenance(fits, dirs);
    auto tags = fit_tags(fits, dirs);

    // Per-league ELPD of every fit, for picking the model that reports HA.
    std::vector<std::vector<double>> league_elpd(fits.size());
    for (std::size_t i = 0; i < fits.size(); ++i) {
        auto loo = psis_loo(fits[i].fit.loglik);
        for (std::size_t k = 0; k < fits[i].fit.leagues.size(); ++k) {
            auto begin = loo.pointwise.begin() + static_cast<long>(game_offset(fits[i].fit, k));
            league_elpd[i].push_back(std::accumulate(
                begin, begin + static_cast<long>(fits[i].fit.leagues[k].num_games), 0.0));
        }
    }

    std::vector<std::string> league_order;
    for (const auto& f : fits)
        for (const auto& l : f.fit.leagues)
            if (std::find(league_order.begin(), league_order.end(), l.league_id) == league_order.end())
                league_order.push_back(l.league_id);

    std::ostringstream results;
    std::ostringstream trajectories;
    results << "league,model,selected,elpd_loo,season,ha,trend,p_decline\n";
    trajectories << "league,model,season,mean,lower,upper,estimator\n";
    std::map<LeagueSeason, double> gamma_means;

    for (const auto& id : league_order) {
        std::size_t best = fits.size();
        double best_elpd = 0.0;
        for (std::size_t i = 0; i < fits.size(); ++i)
            for (std::size_t k = 0; k < fits[i].fit.leagues.size(); ++k)
                if (fits[i].fit.leagues[k].league_id == id && (best == fits.size() || league_elpd[i][k] > best_elpd)) {
                    best = i;
                    best_elpd = league_elpd[i][k];
                }

        bool empirical_written = false;
        for (std::size_t i = 0; i < fits.size(); ++i) {
            const auto& fit = fits[i].fit;
            auto it = std::find_if(fit.leagues.begin(), fit.leagues.end(),
                                   [&](const LeagueInfo& l) { return l.league_id == id; });
            if (it == fit.leagues.end()) continue;
            const auto k = static_cast<std::size_t>(it - fit.leagues.begin());
            const int season = a.season.value_or(it->seasons.back());

            auto traj = ha_trajectory(fit, k, a.level);
            std::string ha = "NA";
            for (const auto& p : traj.points) {
                trajectories << id << ',' << tags[i] << ',' << p.season << ',' << format_fixed(p.summary.mean, 4) << ','
                             << format_fixed(p.summary.lower, 4) << ',' << format_fixed(p.summary.upper, 4) << ','
                             << traj.estimator << '\n';
                if (p.season == season) ha = format_interval(p.summary);
                if (fit.spec.family == ModelFamily::TimeVarying) gamma_means[{id, p.season}] = p.summary.mean;
            }

            std::string trend;
            std::string p_decline = "NA";
            if (fit.spec.family == ModelFamily::Linear || fit.spec.family == ModelFamily::HierarchicalLinear) {
                auto t = prob_decline(fit, k, a.level);
                trend = format_trend(t);
                p_decline = format_fixed(t.p_negative, 3);
            }
            results << id << ',' << tags[i] << ',' << (i == best ? "true" : "false") << ','
                    << format_fixed(league_elpd[i][k], 2) << ',' << season << ",\"" << ha << "\",\"" << trend << "\","
                    << p_decline << '\n';

            if (!empirical_written) {
                const auto& ds = fits[i].datasets[k];
                for (int s : ds.seasons) {
                    std::string value = "NA";
                    try {
                        value = format_fixed(empirical_ha(ds, s), 4);
                    } catch (const std::domain_error&) {
                    }
                    trajectories << id << ",empirical," << s << ',' << value << ",NA,NA,empirical\n";
                }
                empirical_written = true;
            }
        }
    }

    std::ostringstream zscores;
    zscores << "league,season,gamma_mean,z\n";
    if (gamma_means.size() >= 2) {
        auto z = standardize_gamma(gamma_means);
        for (const auto& [key, v] : gamma_means)
            zscores << key.first << ',' << key.second << ',' << format_fixed(v, 4) << ',' << format_fixed(z[key], 4)
                    << '\n';
    }

    std::string shrinkage;
    if (!a.joint.empty()) {
        std::vector<const FitResult*> separate;
        for (std::size_t i = 0; i + 1 < fits.size(); ++i)
            if (fits[i].fit.spec.family == ModelFamily::Linear) separate.push_back(&fits[i].fit);
        shrinkage = shrinkage_table(shrinkage_report(separate, fits.back().fit));
    }

    std::vector<std::pair<std::string, std::string>> docs = {
        {"results.csv", results.str()}, {"trajectories.csv", trajectories.str()}, {"zscores.csv", zscores.str()}};
    if (!shrinkage.empty()) docs.emplace_back("shrinkage.csv", shrinkage);

    if (a.out_dir.empty()) {
        for (const auto& [name, text] : docs) out << "# " << name << '\n' << text;
        return;
    }
    std::error_code ec;
    fs::create_directories(a.out_dir, ec);
    if (ec) throw IoError("cannot create " + a.out_dir + ": " + ec.message());
    for (const auto& [name, text] : docs) emit((fs::path(a.out_dir) / name).string(), text, out);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bayesian home-advantage inference", "homeadv"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "Parse a game table and summarize it");
    ingest_cmd->add_option("input", ingest.input, "Game table")->required();
    ingest_cmd->add_option("--summary", ingest.summary, "Write the JSON summary here instead of stdout");
    ingest_cmd->add_option("--out", ingest.out, "Write the accepted rows as a game table");
    ingest_cmd->add_option("--first-season", ingest.first_season);
    ingest_cmd->add_option("--last-season", ingest.last_season);
    ingest_cmd->add_option("--max-errors", ingest.max_errors);

    FilterArgs filter;
    auto* filter_cmd = app.add_subcommand("filter", "Iteratively drop sparse team-seasons");
    filter_cmd->add_option("input", filter.input, "Game table")->required();
    filter_cmd->add_option("--out", filter.out, "Filtered game table");
    filter_cmd->add_option("--report", filter.report, "Filter report (JSON)");
    filter_cmd->add_option("--min-games", filter.config.min_games_per_season);
    filter_cmd->add_option("--min-seasons", filter.config.min_seasons);
    filter_cmd->add_option("--final-min-games", filter.config.final_min_games);
    filter_cmd->add_flag("--grid", filter.grid, "Print the retention grid");
    filter_cmd->add_option("--grid-games", filter.grid_games)->delimiter(',');
    filter_cmd->add_option("--grid-seasons", filter.grid_seasons)->delimiter(',');

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic league");
    sim_cmd->add_option("--family", sim.family, "constant, linear, timevarying or hier");
    sim_cmd->add_option("--seed", sim.truth.seed);
    sim_cmd->add_option("--league", sim.truth.league_id);
    sim_cmd->add_option("--teams", sim.truth.n_teams);
    sim_cmd->add_option("--first-season", sim.first_season);
    sim_cmd->add_option("--seasons", sim.num_seasons);
    sim_cmd->add_option("--games-per-team", sim.truth.games_per_team);
    sim_cmd->add_option("--sigma", sim.truth.sigma);
    sim_cmd->add_option("--zeta", sim.truth.zeta);
    sim_cmd->add_option("--alpha", sim.truth.alpha);
    sim_cmd->add_option("--beta0", sim.truth.beta0);
    sim_cmd->add_option("--beta1", sim.truth.beta1);
    sim_cmd->add_option("--gamma", sim.truth.gamma)->delimiter(',');
    sim_cmd->add_option("--neutral-fraction", sim.truth.neutral_fraction);
    sim_cmd->add_option("--host-bias", sim.truth.host_bias);
    sim_cmd->add_option("--leagues", sim.leagues);
    sim_cmd->add_option("--beta1-star", sim.beta1_star);
    sim_cmd->add_option("--lambda1", sim.lambda1);
    sim_cmd->add_option("--lambda0", sim.lambda0);
    sim_cmd->add_option("--out", sim.out, "Game table (default stdout)");
    sim_cmd->add_option("--truth", sim.truth_out, "Truth manifest (JSON)");

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "Sample a model's posterior");
    fit_cmd->add_option("input", fit.input, "Game table")->required();
    fit_cmd->add_option("--out", fit.out, "Fit directory")->required();
    fit_cmd->add_option("--model", fit.model, "constant, linear, timevarying or hier");
    fit_cmd->add_option("--league", fit.leagues, "League to include (repeatable; default all)");
    fit_cmd->add_option("--chains", fit.config.chains);
    fit_cmd->add_option("--iters", fit.config.iterations, "Iterations per chain, warmup included");
    fit_cmd->add_option("--warmup", fit.config.warmup);
    fit_cmd->add_option("--seed", fit.config.seed);
    fit_cmd->add_option("--target-accept", fit.config.target_accept);
    fit_cmd->add_option("--max-depth", fit.config.max_tree_depth);
    fit_cmd->add_option("--threads", fit.threads, "Worker threads (default $HOMEADV_THREADS or one per chain)");
    fit_cmd->add_option("--hyper-scale", fit.hyper_scale);
    fit_cmd->add_flag("--centered", fit.centered,
                      "Sample hierarchical trend slopes directly instead of as offsets from beta1_star");
    fit_cmd->add_flag("--no-loglik", fit.no_loglik, "Skip loglik.csv");

    std::string diagnose_dir;
    std::string diagnose_out;
    auto* diagnose_cmd = app.add_subcommand("diagnose", "Convergence diagnostics of a fit");
    diagnose_cmd->add_option("fit", diagnose_dir)->required();
    diagnose_cmd->add_option("--out", diagnose_out);

    std::string loo_dir;
    std::string loo_pointwise;
    auto* loo_cmd = app.add_subcommand("loo", "PSIS-LOO of a fit");
    loo_cmd->add_option("fit", loo_dir)->required();
    loo_cmd->add_option("--pointwise", loo_pointwise, "Per-game elpd and Pareto k");

    std::vector<std::string> compare_dirs;
    auto* compare_cmd = app.add_subcommand("compare", "Compare fits of the same data by PSIS-LOO");
    compare_cmd->add_option("fits", compare_dirs)->required();

    ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "Trajectories, trends, z-scores and shrinkage");
    report_cmd->add_option("fits", report.fits);
    report_cmd->add_option("--joint", report.joint, "Hierarchical fit to contrast with separate linear fits");
    report_cmd->add_option("--level", report.level);
    report_cmd->add_option("--season", report.season, "Season for the HA column (default: each league's last)");
    report_cmd->add_option("--out-dir", report.out_dir);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);

        if (*ingest_cmd) run_ingest(ingest, out, err);
        else if (*filter_cmd) run_filter(filter, out, err);
        else if (*sim_cmd) run_simulate(sim, out);
        else if (*fit_cmd) run_fit(fit, out, err);
        else if (*diagnose_cmd) run_diagnose(diagnose_dir, diagnose_out, out);
        else if (*loo_cmd) run_loo(loo_dir, loo_pointwise, out);
        else if (*compare_cmd) run_compare(compare_dirs, out);
        else if (*report_cmd) run_report(report, out);
        return 0;
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: usage: " << one_line(e.what()) << '\n';
        return 2;
    } catch (const UsageError& e) {
        err << "error: usage: " << one_line(e.what()) << '\n';
        return 2;
    } catch (const IoError& e) {
        err << "error: io: " << one_line(e.what()) << '\n';
        return 3;
    } catch (const ParseError& e) {
        err << "error: parse: row " << e.row() << ": " << one_line(e.what()) << '\n';
        return 3;
    } catch (const ArtifactError& e) {
        err << "error: artifact: " << one_line(e.what()) << '\n';
        return 3;
    } catch (const ProvenanceError& e) {
        err << "error: provenance: " << one_line(e.what()) << '\n';
        return 3;
    } catch (const SamplerError& e) {
        err << "error: sampler: " << one_line(e.what()) << '\n';
        return 4;
    } catch (const std::invalid_argument& e) {
        err << "error: invalid_argument: " << one_line(e.what()) << '\n';
        return 4;
    } catch (const std::domain_error& e) {
        err << "error: domain: " << one_line(e.what()) << '\n';
        return 4;
    } catch (const std::exception& e) {
        err << "error: internal: " << one_line(e.what()) << '\n';
        return 1;
    }
}

} // namespace homeadv::cli
