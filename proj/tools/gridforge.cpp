// gridforge command line: generate, solve, trace, render, query, grade, sft, catalog.

#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "gridforge/generator.hpp"
#include "gridforge/grader.hpp"
#include "gridforge/query.hpp"
#include "gridforge/render.hpp"
#include "gridforge/rng.hpp"
#include "gridforge/rules.hpp"
#include "gridforge/serialize.hpp"
#include "gridforge/sft.hpp"
#include "gridforge/solver.hpp"

namespace fs = std::filesystem;
using namespace gridforge;

namespace {

enum Exit { Ok = 0, Usage = 2, IoError = 3, SchemaError = 4, PuzzleError = 5, GradeError = 6, UnsatExit = 7, BudgetExit = 8 };

int exit_code(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return Usage;
    case ErrorCode::Io: return IoError;
    case ErrorCode::Schema: return SchemaError;
    case ErrorCode::IncompleteRun:
    case ErrorCode::GroupTooSmall: return GradeError;
    case ErrorCode::Unsatisfiable: return UnsatExit;
    case ErrorCode::TraceBudgetExceeded: return BudgetExit;
    default: return PuzzleError;
    }
}

int fail(std::string_view code, std::string_view message, int status) {
    ojson err = {{"error", {{"code", std::string(code)}, {"message", std::string(message)}, {"exit", status}}}};
    std::cerr << err.dump() << "\n";
    return status;
}

// Whole-file output, or stdout when the path is empty.
void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
    } else {
        write_file(path, text);
    }
}

std::vector<ojson> read_jsonl(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<ojson> out;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ojson j = ojson::parse(line, nullptr, false);
        if (j.is_discarded()) throw Error(ErrorCode::Schema, path + ":" + std::to_string(n) + " is not valid JSON");
        out.push_back(std::move(j));
    }
    return out;
}

// Runs f(i) for i in [0, n) on up to `jobs` threads. The first error wins.
template <class F>
void parallel_for(int n, int jobs, F f) {
    std::atomic<int> next{0};
    std::exception_ptr first;
    std::mutex m;
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                f(i);
            } catch (...) {
                std::lock_guard lock(m);
                if (!first) first = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < std::max(1, std::min(jobs, n)); ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (first) std::rethrow_exception(first);
}

Coord parse_cell_flag(const std::string& text) {
    int r = 0, c = 0;
    char comma = 0;
    std::istringstream in(text);
    if (!(in >> r >> comma >> c) || comma != ',' || !in.eof()) {
        throw Error(ErrorCode::InvalidArgument, "--cell expects r,c, got '" + text + "'");
    }
    return {r, c};
}

Ratio parse_ratio(const std::string& text) {
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) throw std::invalid_argument(text);
        Ratio r{std::stoi(text.substr(0, slash)), std::stoi(text.substr(slash + 1))};
        if (r.den <= 0 || r.num <= 0 || r.num >= r.den) throw std::invalid_argument(text);
        return r;
    } catch (const std::logic_error&) {
        throw Error(ErrorCode::InvalidArgument, "--train expects a ratio p/q strictly between 0 and 1, got '" + text + "'");
    }
}

AffineParams parse_affine(const std::string& text, std::uint64_t seed) {
    if (text == "random") return AffineParams::random(seed);
    std::vector<double> v;
    std::istringstream in(text);
    std::string part;
    while (std::getline(in, part, ',')) {
        try {
            v.push_back(std::stod(part));
        } catch (const std::logic_error&) {
            v.clear();
            break;
        }
    }
    if (v.size() != 6) {
        throw Error(ErrorCode::InvalidArgument,
                    "--affine expects 'random' or rotation,scale_x,scale_y,shear,translate_x,translate_y");
    }
    AffineParams p{v[0], v[1], v[2], v[3], v[4], v[5], seed};
    p.validate();
    return p;
}

std::string config_key(const CLI::Option* opt) {
    std::string name = opt->get_single_name();
    for (char& ch : name) {
        if (ch == '-') ch = '_';
    }
    return name;
}

std::string config_value(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::string out;
        for (const auto& e : v) out += (out.empty() ? "" : "\x1f") + config_value(e);
        return out;
    }
    return v.dump();
}

// Config values become option defaults, so anything given on the command
// line still wins. Keys may sit at top level or under the subcommand name.
void apply_config(CLI::App& app, const nlohmann::json& config) {
    if (!config.is_object()) throw Error(ErrorCode::Schema, "config file must hold a JSON object");
    for (CLI::App* sub : app.get_subcommands({})) {
        std::map<std::string, nlohmann::json> values;
        for (const auto& [k, v] : config.items()) {
            if (!v.is_object()) values[k] = v;
        }
        if (config.contains(sub->get_name()) && config[sub->get_name()].is_object()) {
            for (const auto& [k, v] : config[sub->get_name()].items()) values[k] = v;
        }
        for (CLI::Option* opt : sub->get_options()) {
            if (opt->get_name() == "--help") continue;
            std::string key = config_key(opt);
            auto it = values.find(key);
            if (it == values.end()) {
                std::replace(key.begin(), key.end(), '_', '-');
                it = values.find(key);
            }
            if (it == values.end()) continue;
            if (opt->get_expected_min() == 0) {
                if (it->second.is_boolean() && it->second.get<bool>()) opt->default_val("true");
                continue;
            }
            // Array elements are joined on a separator the option then splits on.
            if (it->second.is_array()) opt->delimiter('\x1f');
            opt->default_val(config_value(it->second));
            opt->required(false);  // the file already supplies it
        }
    }
}

std::optional<std::string> find_config_arg(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
        if (a.rfind("--config=", 0) == 0) return a.substr(9);
    }
    return std::nullopt;
}

std::uint64_t env_seed() {
    const char* s = std::getenv("GRIDFORGE_SEED");
    if (!s || !*s) return 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s, &end, 10);
    if (*end != '\0') throw Error(ErrorCode::InvalidArgument, "GRIDFORGE_SEED must be an unsigned integer");
    return v;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grid puzzle dataset toolkit",
                 "gridforge"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", "gridforge 1.0.0");
    std::string config_path;
    app.add_option("--config", config_path, "JSON file of option defaults (flags override it)");

    std::uint64_t default_seed = 0;
    try {
        default_seed = env_seed();
    } catch (const Error& e) {
        return fail("Usage", e.what(), Usage);
    }

    // generate
    auto* gen = app.add_subcommand("generate", "Build a deduplicated train/test dataset of puzzle instances");
    std::vector<std::string> gen_puzzles;
    std::string gen_level = "easy", gen_out, gen_train = "4/5";
    int gen_count = 100, gen_jobs = 1, gen_streak = 2000;
    std::uint64_t gen_seed = default_seed;
    bool gen_unique = false;
    gen->add_option("--puzzle", gen_puzzles, "Puzzle id, repeatable; 'all' for every registered puzzle")->required();
    gen->add_option("--difficulty", gen_level, "easy, medium or hard")->capture_default_str();
    gen->add_option("--count", gen_count, "Instances per puzzle")->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "Base seed (default: GRIDFORGE_SEED or 0)")->capture_default_str();
    gen->add_option("--out", gen_out, "Output directory")->required();
    gen->add_option("--train", gen_train, "Train share as p/q")->capture_default_str();
    gen->add_option("--jobs", gen_jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--exhaustion-streak", gen_streak, "Consecutive duplicate draws tolerated")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    gen->add_flag("--unique", gen_unique, "Only keep instances with exactly one solution");

    // solve
    auto* solve_cmd = app.add_subcommand("solve", "Solve an instance file and print the grid");
    std::string solve_in;
    std::int64_t solve_count = 0, solve_nodes = SolveLimits{}.max_nodes;
    solve_cmd->add_option("--in", solve_in, "Instance JSON file")->required();
    solve_cmd->add_option("--count-solutions", solve_count, "Count solutions up to this cap instead of solving")
        ->check(CLI::PositiveNumber);
    solve_cmd->add_option("--max-nodes", solve_nodes, "Search node budget")->capture_default_str()->check(CLI::PositiveNumber);

    // trace
    auto* trace_cmd = app.add_subcommand("trace", "Print the step-by-step solving trajectory of an instance");
    std::string trace_in;
    std::size_t trace_chars = SolveLimits{}.max_trace_chars;
    std::int64_t trace_nodes = SolveLimits{}.max_nodes;
    bool trace_backtracked = false, trace_json = false;
    trace_cmd->add_option("--in", trace_in, "Instance JSON file")->required();
    trace_cmd->add_option("--max-chars", trace_chars, "Trajectory text budget")->capture_default_str();
    trace_cmd->add_option("--max-nodes", trace_nodes, "Search node budget")->capture_default_str()->check(CLI::PositiveNumber);
    trace_cmd->add_flag("--backtracked", trace_backtracked, "Include undone branches");
    trace_cmd->add_flag("--json", trace_json, "Print the structured trajectory instead of text");

    // render
    auto* render_cmd = app.add_subcommand("render", "Render instance files to SVG");
    std::vector<std::string> render_in;
    std::string render_theme, render_affine, render_out;
    std::uint64_t render_seed = default_seed;
    int render_jobs = 1;
    render_cmd->add_option("--in", render_in, "Instance JSON file(s)")->required();
    render_cmd->add_option("--theme", render_theme, "Theme JSON file");
    render_cmd->add_option("--affine", render_affine,
                           "'random' or rotation,scale_x,scale_y,shear,translate_x,translate_y");
    render_cmd->add_option("--seed", render_seed, "Seed for --affine random (default: GRIDFORGE_SEED or 0)")
        ->capture_default_str();
    render_cmd->add_option("--out", render_out, "Output file (one input) or directory; stdout when omitted");
    render_cmd->add_option("--jobs", render_jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

    // query
    auto* query_cmd = app.add_subcommand("query", "Emit one evaluation query for an instance as JSON");
    std::string query_in, query_kind, query_cell, query_value, query_modality = "image", query_image;
    query_cmd->add_option("--in", query_in, "Instance JSON file")->required();
    query_cmd->add_option("--kind", query_kind, "cell_at, direct_solution, valid_action or cot_solution")->required();
    query_cmd->add_option("--cell", query_cell, "Target cell as r,c");
    query_cmd->add_option("--value", query_value, "Symbol for valid_action");
    query_cmd->add_option("--modality", query_modality, "image or text")->capture_default_str();
    query_cmd->add_option("--image", query_image, "Image path recorded in the query");

    // grade
    auto* grade_cmd = app.add_subcommand("grade", "Grade responses against queries and aggregate over runs");
    std::string grade_queries, grade_responses, grade_report, grade_verdicts, grade_csv, grade_plot;
    int grade_runs = 5, grade_per_run = 20;
    bool grade_lenient = false, grade_sample_std = false;
    grade_cmd->add_option("--queries", grade_queries, "Query JSONL file")->required();
    grade_cmd->add_option("--responses", grade_responses, "Response JSONL file of {query_id, response}")->required();
    grade_cmd->add_option("--out-report", grade_report, "Report JSON file; stdout when omitted");
    grade_cmd->add_option("--out-verdicts", grade_verdicts, "Per-response verdict JSONL file");
    grade_cmd->add_option("--out-csv", grade_csv, "Per-response verdict CSV file");
    grade_cmd->add_option("--out-plot", grade_plot, "Directory for bars.csv and radar.csv plot data");
    grade_cmd->add_option("--runs", grade_runs, "Independent runs per group")->capture_default_str()->check(CLI::PositiveNumber);
    grade_cmd->add_option("--per-run", grade_per_run, "Instances per run")->capture_default_str()->check(CLI::PositiveNumber);
    grade_cmd->add_flag("--lenient", grade_lenient, "Accept short groups and flag them partial");
    grade_cmd->add_flag("--sample-std", grade_sample_std, "Use sample rather than population std");

    // sft
    auto* sft_cmd = app.add_subcommand("sft", "Emit supervised training records as JSONL");
    std::vector<std::string> sft_in, sft_manifests;
    std::string sft_kind = "s", sft_out, sft_modality = "image", sft_image, sft_split;
    std::size_t sft_chars = SolveLimits{}.max_trace_chars;
    bool sft_backtracked = false, sft_skip = false;
    sft_cmd->add_option("--in", sft_in, "Instance JSON file(s)")->required();
    sft_cmd->add_option("--kind", sft_kind, "s (answer only) or r (trajectory)")->capture_default_str();
    sft_cmd->add_option("--max-chars", sft_chars, "Trajectory text budget")->capture_default_str();
    sft_cmd->add_option("--modality", sft_modality, "image or text")->capture_default_str();
    sft_cmd->add_option("--image", sft_image, "Image path recorded in single-input records");
    sft_cmd->add_option("--out", sft_out, "JSONL output file; stdout when omitted");
    sft_cmd->add_flag("--backtracked", sft_backtracked, "Include undone branches in trajectories");
    sft_cmd->add_flag("--skip-over-budget", sft_skip, "Drop instances whose trace exceeds the budget");
    sft_cmd->add_option("--manifest", sft_manifests, "Dataset manifest(s); records get meta.split from them");
    sft_cmd->add_option("--split", sft_split, "Only emit instances of this manifest split (needs --manifest)");

    // catalog
    auto* catalog_cmd = app.add_subcommand("catalog", "Print the puzzle registry as JSON");

    try {
        if (auto path = find_config_arg(argc, argv)) apply_config(app, nlohmann::json::parse(read_file(*path)));
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return Ok;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return Ok;
    } catch (const CLI::CallForVersion&) {
        std::cout << app.version() << "\n";
        return Ok;
    } catch (const CLI::ParseError& e) {
        return fail("Usage", e.what(), Usage);
    } catch (const nlohmann::json::exception& e) {
        return fail("Schema", std::string("config: ") + e.what(), SchemaError);
    } catch (const Error& e) {
        return fail(to_string(e.code()), e.what(), exit_code(e.code()));
    }

    try {
        if (*gen) {
            DatasetConfig cfg;
            if (gen_puzzles.size() == 1 && gen_puzzles[0] == "all") {
                for (const auto& def : registry()) cfg.puzzles.push_back(def.id);
            } else {
                for (const auto& p : gen_puzzles) cfg.puzzles.push_back(lookup(p).id);
            }
            cfg.difficulty = parse_difficulty(gen_level);
            cfg.count = gen_count;
            cfg.seed = gen_seed;
            cfg.train = parse_ratio(gen_train);
            cfg.out = gen_out;
            cfg.jobs = gen_jobs;
            cfg.exhaustion_streak = gen_streak;
            cfg.options.require_unique = gen_unique;
            ojson summary = ojson::object();
            for (const auto& r : build_dataset(cfg)) summary[r.manifest.puzzle] = r.manifest.counts;
            std::cout << summary.dump() << "\n";
        } else if (*solve_cmd) {
            const PuzzleInstance inst = load_instance(solve_in);
            SolveLimits limits;
            limits.max_nodes = solve_nodes;
            if (solve_count > 0) {
                const CountResult c = count_solutions(inst, solve_count, limits);
                if (c.budget_exceeded) throw Error(ErrorCode::TraceBudgetExceeded, "node budget exhausted while counting");
                ojson out = {{"solutions", c.count}, {"capped", c.count >= solve_count}, {"nodes", c.nodes}};
                std::cout << out.dump() << "\n";
            } else {
                const SolveResult r = solve(inst, limits);
                if (const auto* b = std::get_if<BudgetExceeded>(&r)) throw Error(ErrorCode::TraceBudgetExceeded, b->reason);
                if (std::holds_alternative<Unsat>(r)) throw Error(ErrorCode::Unsatisfiable, "instance has no solution");
                std::cout << format_grid(std::get<Solved>(r).grid, inst.alphabet(), inst.definition().blocked_token) << "\n";
            }
        } else if (*trace_cmd) {
            const PuzzleInstance inst = load_instance(trace_in);
            SolveLimits limits;
            limits.max_nodes = trace_nodes;
            limits.max_trace_chars = trace_chars;
            const TraceResult r = solve_with_trace(inst, limits);
            if (const auto* b = std::get_if<BudgetExceeded>(&r)) throw Error(ErrorCode::TraceBudgetExceeded, b->reason);
            if (std::holds_alternative<Unsat>(r)) throw Error(ErrorCode::Unsatisfiable, "instance has no solution");
            if (trace_json) {
                std::cout << trajectory_to_json(inst, std::get<Trajectory>(r)).dump() << "\n";
            } else {
                std::cout << render_trajectory(inst, std::get<Trajectory>(r), trace_backtracked) << "\n";
            }
        } else if (*render_cmd) {
            RenderTheme theme = default_theme();
            if (!render_theme.empty()) {
                const ojson j = ojson::parse(read_file(render_theme), nullptr, false);
                if (j.is_discarded()) throw Error(ErrorCode::Schema, render_theme + " is not valid JSON");
                theme = theme_from_json(j);
            }
            validate_theme(theme);
            const bool many = render_in.size() > 1;
            if (many && render_out.empty()) throw Error(ErrorCode::InvalidArgument, "several inputs need --out DIR");
            std::vector<std::string> svgs(render_in.size());
            parallel_for(static_cast<int>(render_in.size()), render_jobs, [&](int i) {
                const PuzzleInstance inst = load_instance(render_in[i]);
                std::string svg = render_svg(inst, theme);
                if (!render_affine.empty()) {
                    // Per-file seeds so a batch does not share one transform.
                    const std::uint64_t seed = many ? mix64(render_seed ^ fnv1a64(fs::path(render_in[i]).filename().string()))
                                                    : render_seed;
                    svg = augment(svg, parse_affine(render_affine, seed));
                }
                svgs[i] = std::move(svg);
            });
            if (!many) {
                emit(render_out, svgs[0]);
            } else {
                for (std::size_t i = 0; i < svgs.size(); ++i) {
                    write_file(fs::path(render_out) / (fs::path(render_in[i]).stem().string() + ".svg"), svgs[i]);
                }
            }
        } else if (*query_cmd) {
            const PuzzleInstance inst = load_instance(query_in);
            std::optional<QueryTarget> target;
            if (!query_cell.empty()) target = QueryTarget{parse_cell_flag(query_cell), query_value};
            const QueryRecord q =
                emit_query(inst, parse_query_kind(query_kind), target, parse_modality(query_modality), query_image);
            std::cout << query_to_json(q).dump() << "\n";
        } else if (*grade_cmd) {
            std::map<std::string, QueryRecord> queries;
            for (const ojson& j : read_jsonl(grade_queries)) {
                QueryRecord q = query_from_json(nlohmann::json::parse(j.dump()));
                queries[q.id] = std::move(q);
            }
            std::vector<Verdict> verdicts;
            std::string verdict_lines;
            for (const ojson& j : read_jsonl(grade_responses)) {
                if (!j.contains("query_id") || !j["query_id"].is_string()) {
                    throw Error(ErrorCode::Schema, "response record without a string query_id");
                }
                const std::string id = j["query_id"].get<std::string>();
                const auto it = queries.find(id);
                if (it == queries.end()) throw Error(ErrorCode::Schema, "response for unknown query '" + id + "'");
                const std::string text = j.contains("response") && j["response"].is_string() ? j["response"].get<std::string>() : "";
                verdicts.push_back(grade_record(it->second, text));
                verdict_lines += verdict_to_json(verdicts.back()).dump() + "\n";
            }
            Protocol protocol;
            protocol.runs = grade_runs;
            protocol.per_run = grade_per_run;
            protocol.strict = !grade_lenient;
            protocol.sample_std = grade_sample_std;
            const MetricsReport report = aggregate(verdicts, protocol);
            if (!grade_verdicts.empty()) write_file(grade_verdicts, verdict_lines);
            if (!grade_csv.empty()) write_file(grade_csv, verdicts_to_csv(verdicts));
            if (!grade_plot.empty()) {
                const PlotData plot = plot_data(report);
                write_file(std::filesystem::path(grade_plot) / "bars.csv", plot.bars);
                write_file(std::filesystem::path(grade_plot) / "radar.csv", plot.radar);
            }
            emit(grade_report, report_to_json(report).dump(2) + "\n");
        } else if (*sft_cmd) {
            const SftKind kind = parse_sft_kind(sft_kind);
            SftOptions options;
            options.modality = parse_modality(sft_modality);
            options.include_backtracked = sft_backtracked;
            SolveLimits limits;
            limits.max_trace_chars = sft_chars;
            if (!sft_split.empty() && sft_manifests.empty()) {
                throw Error(ErrorCode::InvalidArgument, "--split needs --manifest");
            }
            std::map<std::string, std::string> split_of;
            for (const auto& m : sft_manifests) {
                const auto j = nlohmann::json::parse(read_file(m));
                for (const auto& e : j.at("entries")) split_of[e.at("instance_hash").get<std::string>()] = e.at("split").get<std::string>();
            }
            std::string out;
            for (const auto& path : sft_in) {
                const PuzzleInstance inst = load_instance(path);
                const auto split = split_of.find(instance_hash(inst));
                if (!sft_split.empty() && (split == split_of.end() || split->second != sft_split)) continue;
                options.image_path = sft_in.size() == 1 ? sft_image : fs::path(path).replace_extension(".svg").string();
                try {
                    const SftRecord rec = kind == SftKind::S ? emit_ssft(inst, options) : emit_rsft(inst, limits, options);
                    ojson j = sft_to_json(rec);
                    if (split != split_of.end()) j["meta"]["split"] = split->second;
                    out += j.dump() + "\n";
                } catch (const Error& e) {
                    if (!(sft_skip && e.code() == ErrorCode::TraceBudgetExceeded)) throw;
                    std::cerr << ojson{{"skipped", path}, {"reason", e.what()}}.dump() << "\n";
                }
            }
            emit(sft_out, out);
        } else if (*catalog_cmd) {
            std::cout << catalog().dump(2) << "\n";
        }
    } catch (const Error& e) {
        return fail(to_string(e.code()), e.what(), exit_code(e.code()));
    } catch (const nlohmann::json::exception& e) {
        return fail("Schema", e.what(), SchemaError);
    } catch (const std::exception& e) {
        return fail("Internal", e.what(), 1);
    }
    return Ok;
}
