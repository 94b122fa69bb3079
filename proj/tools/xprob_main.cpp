// Batch front-end: validates inputs, runs the library pipelines from JSON
// configs, and writes deterministic CSV/JSON artifacts.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "xprob/io.hpp"
#include "xprob/xprob.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace xprob;

namespace {

enum class LogLevel { quiet = 0, info = 1, debug = 2 };

LogLevel log_level() {
    const char* env = std::getenv("XPROB_LOG");
    if (!env)
        return LogLevel::info;
    const std::string v = env;
    if (v == "quiet")
        return LogLevel::quiet;
    if (v == "debug")
        return LogLevel::debug;
    return LogLevel::info;
}

void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::info)
        std::cerr << "[info] " << msg << '\n';
}

void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::debug)
        std::cerr << "[debug] " << msg << '\n';
}

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string format = "csv";
    bool relaxed = false;
};

std::string out_path(const Options& opt, const std::string& name) {
    fs::create_directories(opt.out_dir);
    return (fs::path(opt.out_dir) / name).string();
}

std::uint64_t effective_seed(const Options& opt, const json& cfg) {
    if (opt.seed_given)
        return opt.seed;
    return cfg.value("seed", std::uint64_t{0});
}

void write_json(const Options& opt, const std::string& name, const json& j) {
    io::write_file(out_path(opt, name), j.dump(2) + "\n");
    log_debug("wrote " + name);
}

int cmd_validate(const Options& opt) {
    const json cfg = io::read_json_file(opt.config_path);
    const auto measure = io::measure_from_json(cfg, io::ValidationMode::relaxed);
    const auto report = measure.validate();
    write_json(opt, "validate_report.json", io::report_to_json(report));
    std::cout << "validate: " << (report.pass ? "pass" : "fail")
              << " (iii* residual " << io::format_double(report.abs_sum_residual) << ")\n";
    if (!report.pass && !opt.relaxed) {
        for (const auto& c : report.checks)
            if (!c.pass)
                std::cerr << "failed " << c.name << " (residual "
                          << io::format_double(c.residual) << ")\n";
        return 2;
    }
    return 0;
}

int cmd_discover(const Options& opt) {
    const json cfg = io::read_json_file(opt.config_path);
    const StateSpace space = io::space_from_json(cfg);
    auto oracle = ExtendedMeasure::create(space, cfg.at("oracle").get<std::vector<double>>());
    const Split split0 = Split::initial(io::event_from_json(cfg.at("actual0"), space), space);

    DiscoveryProcess process;
    process.true_space = io::event_from_json(cfg.at("true_space"), space);
    process.replacement = cfg.value("replacement", false);
    process.rng_seed = effective_seed(opt, cfg);
    if (cfg.contains("schedule"))
        process.schedule = io::labels_from_json(cfg.at("schedule"));
    const std::size_t max_steps = cfg.value("max_steps", std::size_t{4096});

    log_info("running discovery, seed " + std::to_string(process.rng_seed));
    const auto traj = run_discovery(oracle, split0, process, max_steps);

    if (opt.format == "json")
        write_json(opt, "trajectory.json", io::trajectory_to_json(traj));
    else
        io::write_file(out_path(opt, "trajectory.csv"), io::trajectory_to_csv(traj));
    std::cout << "discover: steps=" << traj.steps() << " scenario=" << to_string(traj.scenario)
              << " final_d_etv=" << io::format_double(traj.d_etv_to_limit.back()) << '\n';
    return 0;
}

std::vector<Event> listed_or_all_events(const json& cfg, const StateSpace& space) {
    std::vector<Event> events;
    if (cfg.contains("events")) {
        for (const auto& arr : cfg.at("events"))
            events.push_back(io::event_from_json(arr, space));
        return events;
    }
    if (space.size() > 12)
        throw validation_error("list \"events\" explicitly for spaces above 12 states");
    const std::uint64_t full = space.full_mask();
    for (std::uint64_t m = 0;; ++m) {
        events.push_back(Event{m});
        if (m == full)
            break;
    }
    return events;
}

int cmd_envelopes(const Options& opt) {
    const json cfg = io::read_json_file(opt.config_path);
    const Envelope env = io::envelope_from_json(cfg);
    const auto events = listed_or_all_events(cfg, env.space());

    if (opt.format == "json") {
        json rows = json::array();
        for (Event e : events) {
            json r;
            r["event"] = io::event_to_json(e, env.space());
            r["lower"] = env.lower(e);
            r["upper"] = env.upper(e);
            rows.push_back(r);
        }
        write_json(opt, "envelopes.json", rows);
    } else {
        io::write_file(out_path(opt, "envelopes.csv"), io::envelope_values_to_csv(env, events));
    }

    const auto report = validate_capacity(env, 12);
    write_json(opt, "capacity_report.json", io::report_to_json(report));
    std::cout << "envelopes: " << events.size() << " events, capacity "
              << (report.pass ? "pass" : "fail") << '\n';
    return report.pass || opt.relaxed ? 0 : 2;
}

int cmd_core(const Options& opt) {
    const json cfg = io::read_json_file(opt.config_path);
    const Envelope env = io::envelope_from_json(cfg);
    const auto report = core(env, cfg.value("n_cap", std::size_t{12}));
    write_json(opt, "core_report.json", io::core_report_to_json(report, env.space()));
    std::cout << "core: nonempty=" << (report.nonempty ? "true" : "false")
              << " coherent=" << (report.coherent ? "true" : "false")
              << " certificate=" << report.certificate << '\n';
    return 0;
}

int cmd_coherence(const Options& opt) {
    const json cfg = io::read_json_file(opt.config_path);
    json result;
    std::optional<DutchBookCandidate> book;
    if (cfg.contains("atoms")) {
        const auto measure = io::measure_from_json(
            cfg, opt.relaxed ? io::ValidationMode::relaxed : io::ValidationMode::strict);
        // full union menus only at enumeration scale; larger spaces default
        // to singletons and pairs (additivity makes longer unions redundant)
        const std::size_t default_unions = measure.size() <= 12 ? measure.size() : 2;
        const std::size_t max_events = cfg.value("max_events", default_unions);
        book = find_dutch_book(measure, max_events);
        result["subject"] = "measure";
        result["bettable_atoms"] = io::event_to_json(bettable_atoms(measure), measure.space());
        if (book)
            result["dutch_book"] = io::dutch_book_to_json(*book, measure.space());
    } else {
        const Envelope env = io::envelope_from_json(cfg);
        book = find_dutch_book(lower_betting_table(env));
        result["subject"] = "lower_envelope";
        if (book)
            result["dutch_book"] = io::dutch_book_to_json(*book, env.space());
    }
    result["coherent"] = !book.has_value();
    write_json(opt, "coherence.json", result);
    if (book)
        std::cout << "coherence: dutch book found (worst payoff "
                  << io::format_double(book->worst_payoff) << ")\n";
    else
        std::cout << "coherence: no dutch book (stake LP optimum >= -1e-9)\n";
    return 0;
}

int cmd_species(const Options& opt) {
    json cfg = io::read_json_file(opt.config_path);
    auto species_cfg = io::species_config_from_json(cfg);
    if (opt.seed_given)
        species_cfg.seed = opt.seed;
    log_info("running species pipeline with " + std::to_string(species_cfg.prior_family.size()) +
             " priors");
    const auto result = run_species(species_cfg);

    if (opt.format == "json") {
        json rows = json::array();
        for (const auto& row : result.intervals.rows) {
            json r;
            r["atom"] = result.space.label(row.atom);
            r["given"] = io::event_to_json(row.conditioning, result.space);
            r["lower"] = row.lower;
            r["upper"] = row.upper;
            r["n_members_used"] = row.members_used;
            rows.push_back(r);
        }
        write_json(opt, "intervals.json", rows);
    } else {
        io::write_file(out_path(opt, "intervals.csv"),
                       io::interval_table_to_csv(result.intervals, result.space));
    }
    for (std::size_t k = 0; k < result.trajectories.size(); ++k) {
        const std::string stem = "species_trajectory_" + std::to_string(k);
        if (opt.format == "json")
            write_json(opt, stem + ".json", io::trajectory_to_json(result.trajectories[k]));
        else
            io::write_file(out_path(opt, stem + ".csv"),
                           io::trajectory_to_csv(result.trajectories[k]));
    }
    json meta;
    meta["tail_mass"] = result.tail_mass;
    meta["warnings"] = result.warnings;
    meta["scenario"] = to_string(result.trajectories.front().scenario);
    if (result.trajectories.front().discovery_time)
        meta["discovery_time"] = *result.trajectories.front().discovery_time;
    write_json(opt, "species_meta.json", meta);

    for (const auto& w : result.warnings)
        log_info("warning: " + w);
    std::cout << "species: scenario=" << to_string(result.trajectories.front().scenario)
              << " intervals=" << result.intervals.rows.size() << '\n';
    return 0;
}

int cmd_boomerang(const Options& opt) {
    json cfg = io::read_json_file(opt.config_path);
    auto opinion_cfg = io::opinion_config_from_json(cfg);
    if (opt.seed_given)
        opinion_cfg.seed = opt.seed;
    const auto traj = run_boomerang(opinion_cfg);

    if (opt.format == "json") {
        json steps = json::array();
        for (const auto& s : traj.steps) {
            json sj;
            sj["t"] = s.t;
            sj["belief"] = s.belief.atoms();
            sj["influenced"] = s.influenced.atoms();
            sj["epsilon"] = s.eps;
            sj["displacement"] = s.displacement;
            sj["influenced_abs_sum"] = s.influenced_abs_sum;
            steps.push_back(sj);
        }
        write_json(opt, "boomerang.json", steps);
    } else {
        io::write_file(out_path(opt, "boomerang.csv"),
                       io::boomerang_to_csv(traj, opinion_cfg.persuader));
    }
    std::cout << "boomerang: steps=" << traj.steps.size() << " final_total="
              << io::format_double(traj.steps.back().influenced.total()) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"extended-probability toolkit: batch analysis of signed measures, "
                 "discovery dynamics, credal envelopes, and coherence"};
    app.require_subcommand(1);

    Options opt;
    int exit_code = 0;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "input config JSON")->required();
        sub->add_option("--out", opt.out_dir, "output directory (default .)");
        sub->add_option("--seed", opt.seed, "RNG seed override")
            ->each([&](const std::string&) { opt.seed_given = true; });
        sub->add_option("--format", opt.format, "artifact format")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_flag("--relaxed,!--strict", opt.relaxed,
                      "annotate validation failures instead of rejecting");
        return sub;
    };

    add_common(app.add_subcommand("validate", "axiom report for a measure file"))
        ->callback([&] { exit_code = cmd_validate(opt); });
    add_common(app.add_subcommand("discover", "run the discovery dynamics"))
        ->callback([&] { exit_code = cmd_discover(opt); });
    add_common(app.add_subcommand("envelopes", "lower/upper event bounds of a credal set"))
        ->callback([&] { exit_code = cmd_envelopes(opt); });
    add_common(app.add_subcommand("core", "core membership and coherence of a lower envelope"))
        ->callback([&] { exit_code = cmd_core(opt); });
    add_common(app.add_subcommand("species", "species-sampling pipeline"))
        ->callback([&] { exit_code = cmd_species(opt); });
    add_common(app.add_subcommand("boomerang", "opinion-dynamics boomerang run"))
        ->callback([&] { exit_code = cmd_boomerang(opt); });
    add_common(app.add_subcommand("coherence", "Dutch-book search on a measure or elicited table"))
        ->callback([&] { exit_code = cmd_coherence(opt); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const restart_required& e) {
        std::cerr << "restart required: " << e.what() << '\n';
        return 3;
    } catch (const io_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 4;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
    return exit_code;
}
