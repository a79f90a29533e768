#include "homeadv/artifacts.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "homeadv/diagnostics.h"

namespace homeadv {

namespace fs = std::filesystem;

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string g10(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

nlohmann::json spec_json(const ModelSpec& spec) {
    nlohmann::json j = {{"family", family_name(spec.family)},
                        {"hyper_scale", spec.hyper_scale},
                        {"leagues", spec.leagues},
                        {"noncentered_trend", spec.noncentered_trend},
                        {"fixed_scales", nullptr}};
    if (spec.fixed_scales)
        j["fixed_scales"] = {{"sigma", spec.fixed_scales->sigma},
                             {"zeta", spec.fixed_scales->zeta},
                             {"ha_scale", spec.fixed_scales->ha_scale}};
    return j;
}

ModelSpec spec_from_json(const nlohmann::json& j) {
    ModelSpec spec;
    spec.family = parse_family(j.at("family").get<std::string>());
    spec.hyper_scale = j.at("hyper_scale").get<double>();
    spec.leagues = j.at("leagues").get<std::vector<std::string>>();
    spec.noncentered_trend = j.at("noncentered_trend").get<bool>();
    if (!j.at("fixed_scales").is_null()) {
        const auto& f = j.at("fixed_scales");
        spec.fixed_scales = FixedScales{f.at("sigma").get<double>(), f.at("zeta").get<double>(),
                                        f.at("ha_scale").get<double>()};
    }
    return spec;
}

nlohmann::json sampler_json(const SamplerConfig& c) {
    return {{"chains", c.chains},
            {"iterations", c.iterations},
            {"warmup", c.warmup},
            {"seed", c.seed},
            {"target_accept", c.target_accept},
            {"max_tree_depth", c.max_tree_depth}};
}

SamplerConfig sampler_from_json(const nlohmann::json& j) {
    SamplerConfig c;
    c.chains = j.at("chains").get<std::size_t>();
    c.iterations = j.at("iterations").get<std::size_t>();
    c.warmup = j.at("warmup").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.target_accept = j.at("target_accept").get<double>();
    c.max_tree_depth = j.at("max_tree_depth").get<int>();
    return c;
}

std::vector<GameRecord> concatenated_games(const std::vector<LeagueDataset>& datasets) {
    std::vector<GameRecord> games;
    for (const auto& ds : datasets) games.insert(games.end(), ds.games.begin(), ds.games.end());
    return games;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw ArtifactError("cannot write " + path.string());
    out.exceptions(std::ios::failbit | std::ios::badbit);
    return out;
}

std::ifstream open_in(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ArtifactError("missing file " + path.string());
    return in;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_number(const std::string& token, const fs::path& path) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        // from_chars rejects "inf"/"nan" spellings printf may produce
        if (token == "inf") return std::numeric_limits<double>::infinity();
        if (token == "-inf") return -std::numeric_limits<double>::infinity();
        if (token == "nan" || token == "-nan") return std::numeric_limits<double>::quiet_NaN();
        throw ArtifactError("bad number '" + token + "' in " + path.string());
    }
    return v;
}

// Header fields and numeric rows of a delimited table with '#' comments.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

Table read_table(const fs::path& path) {
    auto in = open_in(path);
    Table t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto fields = split(line);
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size())
            throw ArtifactError("row width mismatch in " + path.string());
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_number(f, path));
        t.rows.push_back(std::move(row));
    }
    if (!have_header) throw ArtifactError("empty table " + path.string());
    return t;
}

} // namespace

std::string data_hash(const std::vector<GameRecord>& records) {
    std::ostringstream out;
    write_games(out, records);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : out.str()) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return hex64(h);
}

std::string provenance_line(const FitResult& fit, const std::string& hash) {
    std::ostringstream out;
    out << "# " << kFitFormat << " model=" << family_name(fit.spec.family) << " leagues=";
    for (std::size_t k = 0; k < fit.spec.leagues.size(); ++k) out << (k ? ";" : "") << fit.spec.leagues[k];
    out << " chains=" << fit.config.chains << " iterations=" << fit.config.iterations
        << " warmup=" << fit.config.warmup << " seed=" << fit.config.seed
        << " target_accept=" << fit.config.target_accept << " max_tree_depth=" << fit.config.max_tree_depth
        << " data_hash=" << hash;
    return out.str();
}

nlohmann::json fit_manifest(const FitResult& fit, const ModelContext& ctx) {
    nlohmann::json leagues = nlohmann::json::array();
    for (std::size_t k = 0; k < fit.leagues.size(); ++k) {
        const auto& info = fit.leagues[k];
        leagues.push_back({{"league_id", info.league_id},
                           {"t0", info.t0},
                           {"seasons", info.seasons},
                           {"num_games", info.num_games},
                           {"data_hash", data_hash(ctx.datasets().at(k).games)}});
    }
    return {{"format", kFitFormat},
            {"spec", spec_json(fit.spec)},
            {"sampler", sampler_json(fit.config)},
            {"seed", fit.config.seed},
            {"leagues", leagues},
            {"data_hash", data_hash(concatenated_games(ctx.datasets()))},
            {"layout", fit.layout.manifest()},
            {"columns", fit.layout.column_names()},
            {"step_sizes", fit.draws.step_sizes},
            {"inv_metric", fit.draws.inv_metric}};
}

void write_fit(const fs::path& dir, const FitResult& fit, const ModelContext& ctx, const WriteOptions& options) {
    if (!(fit.layout == ctx.layout())) throw ArtifactError("fit layout does not match the model context");
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ArtifactError("cannot create " + dir.string() + ": " + ec.message());

    auto manifest = fit_manifest(fit, ctx);
    const std::string hash = manifest.at("data_hash").get<std::string>();
    const std::string prov = provenance_line(fit, hash);
    {
        auto out = open_out(dir / "manifest.json");
        out << manifest.dump(2) << '\n';
    }
    {
        // Kept apart from the manifest so that every other file is reproducible byte for byte.
        auto out = open_out(dir / "timing.json");
        out << nlohmann::json{{"wall_seconds", fit.wall_seconds}}.dump() << '\n';
    }
    {
        auto out = open_out(dir / "games.csv");
        out << prov << '\n';
        write_games(out, concatenated_games(ctx.datasets()));
    }

    const auto names = fit.layout.column_names();
    for (std::size_t c = 0; c < fit.draws.num_chains(); ++c) {
        auto out = open_out(dir / ("draws_chain_" + std::to_string(c) + ".csv"));
        out << prov << " chain=" << c << '\n';
        for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
        out << '\n';
        const auto& chain = fit.draws.chains[c];
        for (std::size_t r = 0; r < chain.rows(); ++r) {
            auto values = constrain(chain.row(r), fit.layout);
            for (std::size_t j = 0; j < values.size(); ++j) out << (j ? "," : "") << g17(values[j]);
            out << '\n';
        }
    }
    {
        auto out = open_out(dir / "sampler_stats.csv");
        out << prov << '\n';
        out << "chain,draw,accept_stat,divergent,tree_depth,n_leapfrog,energy,energy_error,step_size\n";
        for (std::size_t c = 0; c < fit.draws.stats.size(); ++c)
            for (std::size_t i = 0; i < fit.draws.stats[c].size(); ++i) {
                const auto& s = fit.draws.stats[c][i];
                out << c << ',' << i << ',' << g17(s.accept_stat) << ',' << (s.divergent ? 1 : 0) << ','
                    << s.tree_depth << ',' << s.n_leapfrog << ',' << g17(s.energy) << ',' << g17(s.energy_error)
                    << ',' << g17(s.step_size) << '\n';
            }
    }
    fs::remove(dir / "loglik.csv", ec);
    if (options.loglik) {
        auto out = open_out(dir / "loglik.csv");
        out << prov << '\n';
        // One row per draw (chains concatenated), one column per game.
        for (std::size_t g = 0; g < fit.loglik.rows(); ++g) out << (g ? "," : "") << "game_" << g;
        out << '\n';
        for (std::size_t s = 0; s < fit.loglik.cols(); ++s) {
            for (std::size_t g = 0; g < fit.loglik.rows(); ++g) out << (g ? "," : "") << g10(fit.loglik(g, s));
            out << '\n';
        }
    }
}

LoadedFit read_fit(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw ArtifactError("fit directory not found: " + dir.string());
    LoadedFit loaded;
    try {
        auto in = open_in(dir / "manifest.json");
        loaded.manifest = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ArtifactError("bad manifest in " + dir.string() + ": " + e.what());
    }
    const auto& m = loaded.manifest;
    if (m.value("format", "") != kFitFormat) throw ArtifactError("unsupported fit format in " + dir.string());

    FitResult& fit = loaded.fit;
    try {
        fit.spec = spec_from_json(m.at("spec"));
        fit.config = sampler_from_json(m.at("sampler"));
        fit.layout = ParameterLayout::from_manifest(m.at("layout"));
        fit.draws.step_sizes = m.at("step_sizes").get<std::vector<double>>();
        fit.draws.inv_metric = m.at("inv_metric").get<std::vector<std::vector<double>>>();
        loaded.data_hash = m.at("data_hash").get<std::string>();
        for (const auto& l : m.at("leagues")) loaded.league_hashes.push_back(l.at("data_hash").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw ArtifactError("incomplete manifest in " + dir.string() + ": " + e.what());
    }

    if (fs::exists(dir / "timing.json")) {
        try {
            auto in = open_in(dir / "timing.json");
            fit.wall_seconds = nlohmann::json::parse(in).at("wall_seconds").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw ArtifactError("bad timing.json in " + dir.string() + ": " + e.what());
        }
    }

    auto games_in = open_in(dir / "games.csv");
    auto parsed = parse_games(games_in);
    if (!parsed.errors.empty())
        throw ArtifactError("games.csv row " + std::to_string(parsed.errors.front().row) + ": " +
                            parsed.errors.front().message);
    if (data_hash(parsed.records) != loaded.data_hash) throw ArtifactError("games.csv does not match manifest hash");
    for (const auto& id : fit.spec.leagues) loaded.datasets.push_back(build_dataset(parsed.records, id));
    fit.leagues = league_info(loaded.datasets);

    ModelContext ctx(fit.spec, loaded.datasets);
    if (!(ctx.layout() == fit.layout)) throw ArtifactError("layout mismatch between manifest and games.csv");

    const auto names = fit.layout.column_names();
    std::vector<Matrix> constrained;
    for (std::size_t c = 0; c < fit.config.chains; ++c) {
        auto path = dir / ("draws_chain_" + std::to_string(c) + ".csv");
        auto table = read_table(path);
        if (table.header != names) throw ArtifactError("column mismatch in " + path.string());
        if (table.rows.size() != fit.config.retained())
            throw ArtifactError("expected " + std::to_string(fit.config.retained()) + " draws in " + path.string());
        Matrix cm(table.rows.size(), names.size());
        Matrix um(table.rows.size(), names.size());
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            std::copy(table.rows[r].begin(), table.rows[r].end(), cm.row(r).begin());
            auto u = unconstrain(table.rows[r], fit.layout);
            std::copy(u.begin(), u.end(), um.row(r).begin());
        }
        constrained.push_back(std::move(cm));
        fit.draws.chains.push_back(std::move(um));
    }

    auto stats = read_table(dir / "sampler_stats.csv");
    fit.draws.stats.assign(fit.config.chains, {});
    for (const auto& row : stats.rows) {
        auto c = static_cast<std::size_t>(row.at(0));
        if (c >= fit.config.chains) throw ArtifactError("sampler_stats.csv names an unknown chain");
        DrawStats s;
        s.accept_stat = row[2];
        s.divergent = row[3] != 0.0;
        s.tree_depth = static_cast<int>(row[4]);
        s.n_leapfrog = static_cast<int>(row[5]);
        s.energy = row[6];
        s.energy_error = row[7];
        s.step_size = row[8];
        fit.draws.stats[c].push_back(s);
    }

    if (constrained.size() >= 2)
        fit.diagnostics = summarize_diagnostics(constrained, fit.layout, fit.draws.divergences());
    else
        fit.diagnostics.divergences = fit.draws.divergences();

    const std::size_t total_draws = fit.config.chains * fit.config.retained();
    if (fs::exists(dir / "loglik.csv")) {
        auto table = read_table(dir / "loglik.csv");
        if (table.header.size() != ctx.num_games() || table.rows.size() != total_draws)
            throw ArtifactError("loglik.csv dimensions do not match the fit");
        fit.loglik = Matrix(ctx.num_games(), total_draws);
        for (std::size_t s = 0; s < total_draws; ++s)
            for (std::size_t g = 0; g < ctx.num_games(); ++g) fit.loglik(g, s) = table.rows[s][g];
    } else {
        fit.loglik = pointwise_loglik(ctx, fit.draws.chains);
    }
    return loaded;
}

} // namespace homeadv
