#include <joinagg/cli.hpp>

#include <joinagg/datagen.hpp>
#include <joinagg/engine.hpp>
#include <joinagg/errors.hpp>
#include <joinagg/report.hpp>
#include <joinagg/sql_parser.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <new>
#include <iostream>
#include <sstream>


namespace joinagg {

namespace {

struct InputOptions
{
    std::string query;
    std::string query_file;
    std::string data_dir;
    std::vector<std::string> rels;      ///< key=path, key is an alias or a source name
    bool no_header = false;
};

struct EngineFlags
{
    std::string root;
    unsigned threads = 1;
    std::string strategy = "layered";
};

void add_input_options(CLI::App &cmd, InputOptions &in)
{
    cmd.add_option("-q,--query", in.query, "SQL text or JSON query document");
    cmd.add_option("--query-file", in.query_file, "file holding the query (SQL or JSON)");
    cmd.add_option("--data", in.data_dir, "directory holding <source>.csv for every relation");
    cmd.add_option("--rel", in.rels, "bind a relation: alias=path or source=path (repeatable)");
    cmd.add_flag("--no-header", in.no_header, "CSV files have no header row (columns c0..ck)");
}

void add_engine_options(CLI::App &cmd, EngineFlags &e)
{
    cmd.add_option("--root", e.root, "decomposition root alias (default: smallest group-relation alias)");
    cmd.add_option("--threads", e.threads, "per-source worker threads")->check(CLI::Range(1u, 256u));
    cmd.add_option("--strategy", e.strategy, "traversal strategy")->check(CLI::IsMember({"layered", "dfs"}));
}

std::string read_file(const std::string &path)
{
    std::ifstream in(path);
    if (not in)
        throw IoError("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> read_header(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (not in)
        throw IoError("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    if (not line.empty() and line.back() == '\r')
        line.pop_back();
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ','); )
        cols.push_back(c);
    return cols;
}

std::map<std::string, std::string> rel_bindings(const InputOptions &in)
{
    std::map<std::string, std::string> out;
    for (const auto &r : in.rels) {
        auto eq = r.find('=');
        if (eq == std::string::npos or eq == 0 or eq + 1 == r.size())
            throw QueryError("malformed --rel '" + r + "', expected alias=path");
        out[r.substr(0, eq)] = r.substr(eq + 1);
    }
    return out;
}

/// Column names per source, read from CSV headers, for resolving unqualified columns.
Catalog build_catalog(const InputOptions &in)
{
    Catalog cat;
    if (in.no_header)
        return cat;
    if (not in.data_dir.empty()) {
        std::error_code ec;
        for (const auto &entry : std::filesystem::directory_iterator(in.data_dir, ec)) {
            if (entry.path().extension() == ".csv")
                cat[entry.path().stem().string()] = read_header(entry.path());
        }
        if (ec)
            throw IoError("cannot read directory " + in.data_dir + ": " + ec.message());
    }
    for (const auto &[key, path] : rel_bindings(in))
        cat[key] = read_header(path);
    return cat;
}

QuerySpec load_query(const InputOptions &in)
{
    if (in.query.empty() == in.query_file.empty())
        throw QueryError("exactly one of --query and --query-file is required");
    const std::string text = in.query.empty() ? read_file(in.query_file) : in.query;
    const Catalog catalog = build_catalog(in);
    return parse_query(text, &catalog);
}

RelationMap load_relations(const QuerySpec &q, const InputOptions &in)
{
    const auto bound = rel_bindings(in);
    std::map<std::string, RelationPtr> by_path;
    RelationMap out;
    for (const auto &r : q.relations) {
        std::filesystem::path path;
        if (auto it = bound.find(r.alias); it != bound.end())
            path = it->second;
        else if (auto it = bound.find(r.source); it != bound.end())
            path = it->second;
        else if (not in.data_dir.empty())
            path = std::filesystem::path(in.data_dir) / (r.source + ".csv");
        else
            throw IoError("no data for relation " + r.source + " (alias " + r.alias + "); use --data or --rel");
        auto &slot = by_path[path.string()];
        if (not slot)
            slot = std::make_shared<const Relation>(load_csv(path, r.source, not in.no_header));
        out[r.alias] = slot;
    }
    return out;
}

EngineOptions engine_options(const EngineFlags &e)
{
    EngineOptions o;
    if (not e.root.empty())
        o.root = e.root;
    o.threads = e.threads;
    o.traversal.strategy = e.strategy == "dfs" ? TraversalStrategy::kDepthFirst : TraversalStrategy::kLayered;
    return o;
}

void write_stats(const nlohmann::json &stats, const std::string &path, std::ostream &err)
{
    if (path.empty()) {
        err << stats.dump() << '\n';
        return;
    }
    std::ofstream f(path);
    if (not f)
        throw IoError("cannot write " + path);
    f << stats.dump(2) << '\n';
}

uint64_t default_seed()
{
    if (const char *s = std::getenv("JOINAGG_SEED")) {
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
            throw QueryError(std::string("JOINAGG_SEED is not an unsigned integer: ") + s);
        }
    }
    return 42;
}

}

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    CLI::App app{"joinagg: group-by aggregates over acyclic equijoins without materializing the join"};
    app.require_subcommand(1);

    InputOptions run_in;
    EngineFlags run_engine_flags;
    std::string engine = "joinagg", stats_path, format = "csv", dump_path;
    bool trace = false;
    auto *run = app.add_subcommand("run", "execute a query");
    add_input_options(*run, run_in);
    add_engine_options(*run, run_engine_flags);
    run->add_option("--engine", engine, "engine")->check(CLI::IsMember({"joinagg", "naive", "preagg"}));
    run->add_option("--stats", stats_path, "write RunStats JSON here instead of stderr");
    run->add_option("--format", format, "result format")->check(CLI::IsMember({"csv", "json"}));
    run->add_flag("--trace", trace, "emit Stage 2 visit events on stderr");
    run->add_option("--dump-graph", dump_path, "write the data graph edge list here");

    InputOptions cmp_in;
    EngineFlags cmp_engine_flags;
    std::string cmp_stats;
    auto *compare = app.add_subcommand("compare", "run all engines and check that their outputs agree");
    add_input_options(*compare, cmp_in);
    add_engine_options(*compare, cmp_engine_flags);
    compare->add_option("--stats", cmp_stats, "write all RunStats as a JSON array here");

    std::string family = "selfjoin", out_dir;
    GenConfig gen_cfg;
    std::vector<double> s_join;
    std::optional<uint64_t> seed;
    std::size_t domain_base = 0;
    auto *gen = app.add_subcommand("gen", "generate a synthetic dataset");
    gen->add_option("--family", family, "dataset family")->check(CLI::IsMember({"selfjoin", "chain4", "branch"}));
    gen->add_option("-n,--rows", gen_cfg.n, "rows per relation")->check(CLI::PositiveNumber);
    gen->add_option("--s-join", s_join, "join selectivity (branch: two values)")->delimiter(',');
    gen->add_option("--s-group", gen_cfg.s_group, "group selectivity");
    gen->add_option("--seed", seed, "PRNG seed (default: $JOINAGG_SEED or 42)");
    gen->add_option("--domain-base", domain_base, "domain size base (default: rows)");
    gen->add_option("--out", out_dir, "output directory")->required();

    InputOptions exp_in;
    std::string exp_root, exp_format = "both";
    auto *explain = app.add_subcommand("explain", "print hypergraph, decomposition tree and attribute splits");
    add_input_options(*explain, exp_in);
    explain->add_option("--root", exp_root, "decomposition root alias");
    explain->add_option("--format", exp_format, "output format")->check(CLI::IsMember({"text", "json", "both"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp &e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n';
        return kExitQuery;
    }

    try {
        if (run->parsed()) {
            const QuerySpec q = load_query(run_in);
            const RelationMap rels = load_relations(q, run_in);
            EngineOptions opts = engine_options(run_engine_flags);
            if (trace)
                opts.traversal.trace = &err;
            std::ofstream dump;
            if (not dump_path.empty()) {
                dump.open(dump_path);
                if (not dump)
                    throw IoError("cannot write " + dump_path);
                opts.graph_dump = &dump;
            }
            const auto result = run_query(q, rels, opts, parse_engine(engine));
            if (format == "json")
                write_results_json(out, q, result.groups);
            else
                write_results_csv(out, q, result.groups);
            write_stats(result.stats.to_json(), stats_path, err);
            return kExitOk;
        }

        if (compare->parsed()) {
            const QuerySpec q = load_query(cmp_in);
            const RelationMap rels = load_relations(q, cmp_in);
            const EngineOptions opts = engine_options(cmp_engine_flags);
            std::vector<QueryResult> results;
            for (auto e : {EngineKind::kJoinAgg, EngineKind::kNaive, EngineKind::kPreagg})
                results.push_back(run_query(q, rels, opts, e));

            std::vector<RunStats> stats;
            nlohmann::json all = nlohmann::json::array();
            for (const auto &r : results) {
                stats.push_back(r.stats);
                all.push_back(r.stats.to_json());
            }
            out << format_comparison(stats);
            if (not cmp_stats.empty())
                write_stats(all, cmp_stats, err);

            for (std::size_t i = 1; i != results.size(); ++i) {
                const auto &a = results[0].groups;
                const auto &b = results[i].groups;
                if (auto d = first_difference(a, b)) {
                    err << "error: " << results[0].stats.engine << " and " << results[i].stats.engine
                        << " disagree at group " << *d << ": ";
                    auto show = [&](const std::vector<GroupResult> &g) {
                        if (*d >= g.size())
                            err << "(none)";
                        else
                            err << "(" << join_values(g[*d].group) << ") -> " << to_string(g[*d].value);
                    };
                    show(a);
                    err << " vs ";
                    show(b);
                    err << '\n';
                    return kExitMismatch;
                }
            }
            out << "all engines agree on " << results[0].groups.size() << " groups\n";
            return kExitOk;
        }

        if (gen->parsed()) {
            gen_cfg.family = parse_family(family);
            if (not s_join.empty())
                gen_cfg.s_join = s_join;
            else if (gen_cfg.family == Family::kBranch)
                gen_cfg.s_join = {0.01, 0.5};
            gen_cfg.seed = seed ? *seed : default_seed();
            if (domain_base)
                gen_cfg.domain_base = domain_base;
            const auto data = generate(gen_cfg);
            write_dataset(data, out_dir);
            out << data.manifest.at("query").get<std::string>() << '\n';
            return kExitOk;
        }

        if (explain->parsed()) {
            const QuerySpec q = load_query(exp_in);
            std::optional<std::string> root;
            if (not exp_root.empty())
                root = exp_root;
            const QueryPlan plan = plan_query(q, root);
            if (exp_format != "json")
                out << explain_text(plan);
            if (exp_format != "text")
                out << explain_json(plan).dump(2) << '\n';
            return kExitOk;
        }
    } catch (const QueryError &e) {
        err << "error: " << e.what() << '\n';
        return kExitQuery;
    } catch (const IoError &e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::bad_alloc&) {
        err << "error: out of memory (intermediate result too large)\n";
        return kExitIo;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    }
    return kExitOk;
}

}
