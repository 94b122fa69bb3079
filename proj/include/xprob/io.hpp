#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "xprob/coherence.hpp"
#include "xprob/core.hpp"
#include "xprob/credal.hpp"
#include "xprob/dynamics.hpp"
#include "xprob/measure.hpp"
#include "xprob/opinion.hpp"
#include "xprob/species.hpp"

namespace xprob::io {

using nlohmann::json;

enum class ValidationMode { strict, relaxed };

/// Shortest round-tripping decimal rendering; keeps outputs byte-stable.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{})
        throw io_error("failed to format a double");
    return std::string(buf, ptr);
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// ---------------------------------------------------------------------------
// state spaces and events

inline json labels_to_json(const StateSpace& space) {
    json arr = json::array();
    const bool numeric = space.numeric_labels();
    for (const auto& l : space.labels()) {
        if (numeric)
            arr.push_back(std::stoll(l));
        else
            arr.push_back(l);
    }
    return arr;
}

inline std::vector<std::string> labels_from_json(const json& arr) {
    if (!arr.is_array() || arr.empty())
        throw io_error("\"labels\" must be a nonempty array");
    std::vector<std::string> labels;
    labels.reserve(arr.size());
    for (const auto& v : arr) {
        if (v.is_string())
            labels.push_back(v.get<std::string>());
        else if (v.is_number_integer())
            labels.push_back(std::to_string(v.get<std::int64_t>()));
        else
            throw io_error("labels must be strings or integers");
    }
    return labels;
}

inline json origin_to_json(const origin_tag& tag) {
    json j;
    switch (tag.kind) {
    case origin_kind::explicit_set: j["kind"] = "explicit"; break;
    case origin_kind::truncated_naturals: j["kind"] = "truncated_naturals"; break;
    case origin_kind::truncated_integers: j["kind"] = "truncated_integers"; break;
    case origin_kind::truncated_rationals: j["kind"] = "truncated_rationals"; break;
    }
    if (tag.kind == origin_kind::truncated_naturals || tag.kind == origin_kind::truncated_integers)
        j["n_max"] = tag.n_max;
    if (tag.kind == origin_kind::truncated_rationals)
        j["detail"] = tag.detail;
    return j;
}

inline origin_tag origin_from_json(const json& j) {
    origin_tag tag;
    const std::string kind = j.value("kind", "explicit");
    if (kind == "explicit")
        tag.kind = origin_kind::explicit_set;
    else if (kind == "truncated_naturals")
        tag.kind = origin_kind::truncated_naturals;
    else if (kind == "truncated_integers")
        tag.kind = origin_kind::truncated_integers;
    else if (kind == "truncated_rationals")
        tag.kind = origin_kind::truncated_rationals;
    else
        throw io_error("unknown origin kind \"" + kind + "\"");
    tag.n_max = j.value("n_max", std::int64_t{0});
    tag.detail = j.value("detail", "");
    return tag;
}

inline StateSpace space_from_json(const json& j) {
    auto labels = labels_from_json(j.at("labels"));
    origin_tag tag;
    if (j.contains("origin"))
        tag = origin_from_json(j.at("origin"));
    return StateSpace(std::move(labels), tag);
}

inline Event event_from_json(const json& arr, const StateSpace& space) {
    if (!arr.is_array())
        throw io_error("an event must be an array of labels");
    Event e;
    for (const auto& v : arr) {
        std::string label;
        if (v.is_string())
            label = v.get<std::string>();
        else if (v.is_number_integer())
            label = std::to_string(v.get<std::int64_t>());
        else
            throw io_error("event labels must be strings or integers");
        const auto idx = space.index_of(label);
        if (!idx)
            throw io_error("event label '" + label + "' is not in the state space");
        e = e.with(*idx);
    }
    return e;
}

inline json event_to_json(Event e, const StateSpace& space) {
    json arr = json::array();
    const bool numeric = space.numeric_labels();
    e.for_each([&](std::size_t i) {
        if (numeric)
            arr.push_back(std::stoll(space.label(i)));
        else
            arr.push_back(space.label(i));
    });
    return arr;
}

/// Compact one-field rendering for CSV cells: labels joined by ';'.
inline std::string event_to_string(Event e, const StateSpace& space) {
    std::string out;
    e.for_each([&](std::size_t i) {
        if (!out.empty())
            out += ';';
        out += space.label(i);
    });
    return out.empty() ? "{}" : out;
}

// ---------------------------------------------------------------------------
// measures

inline json measure_to_json(const ExtendedMeasure& m) {
    json j;
    j["labels"] = labels_to_json(m.space());
    json atoms = json::array();
    for (double a : m.atoms())
        atoms.push_back(a);
    j["atoms"] = atoms;
    if (m.space().origin().kind != origin_kind::explicit_set)
        j["origin"] = origin_to_json(m.space().origin());
    if (m.relaxed())
        j["relaxed"] = true;
    return j;
}

/// Strict mode rejects any axiom failure; relaxed mode loads whatever has
/// valid shape and atom range, leaving the report to the caller.
inline ExtendedMeasure measure_from_json(const json& j, ValidationMode mode) {
    StateSpace space = space_from_json(j);
    const auto& arr = j.at("atoms");
    if (!arr.is_array())
        throw io_error("\"atoms\" must be an array");
    std::vector<double> atoms;
    atoms.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_number())
            throw io_error("atoms must be numbers");
        atoms.push_back(v.get<double>());
    }
    if (mode == ValidationMode::strict)
        return ExtendedMeasure::create(std::move(space), std::move(atoms));
    return ExtendedMeasure::create_relaxed(std::move(space), std::move(atoms));
}

inline json report_to_json(const ValidationReport& rep) {
    json j;
    j["pass"] = rep.pass;
    j["abs_sum_residual"] = rep.abs_sum_residual;
    json checks = json::array();
    for (const auto& c : rep.checks) {
        json cj;
        cj["name"] = c.name;
        cj["pass"] = c.pass;
        cj["residual"] = c.residual;
        if (!c.note.empty())
            cj["note"] = c.note;
        checks.push_back(cj);
    }
    j["checks"] = checks;
    return j;
}

// ---------------------------------------------------------------------------
// credal sets and envelopes

inline CredalSet credal_from_json(const json& j) {
    StateSpace space = space_from_json(j);
    Event actual = event_from_json(j.at("actual"), space);
    const std::size_t time = j.value("time", std::size_t{0});
    Split split = time == 0 ? Split::initial(actual, space) : Split(time, actual, space);
    const auto& members = j.at("members");
    if (!members.is_array() || members.empty())
        throw io_error("\"members\" must be a nonempty array of atom vectors");
    std::vector<ExtendedMeasure> list;
    for (const auto& arr : members) {
        std::vector<double> atoms;
        for (const auto& v : arr)
            atoms.push_back(v.get<double>());
        list.push_back(ExtendedMeasure::create(space, std::move(atoms)));
    }
    return CredalSet(std::move(list), split);
}

inline Envelope envelope_from_json(const json& j) {
    if (j.contains("members"))
        return Envelope::derive(credal_from_json(j));
    StateSpace space = space_from_json(j);
    const auto& arr = j.at("bounds");
    if (!arr.is_array())
        throw io_error("\"bounds\" must be an array of {event, lower, upper}");
    std::vector<ElicitedBound> bounds;
    for (const auto& b : arr) {
        ElicitedBound eb;
        eb.event = event_from_json(b.at("event"), space);
        eb.lower = b.at("lower").get<double>();
        eb.upper = b.at("upper").get<double>();
        bounds.push_back(eb);
    }
    return Envelope::elicit(std::move(space), bounds);
}

inline json dutch_book_to_json(const DutchBookCandidate& book, const StateSpace& space) {
    json j;
    json events = json::array();
    for (Event e : book.events)
        events.push_back(event_to_json(e, space));
    j["events"] = events;
    j["stakes"] = book.stakes;
    j["worst_payoff"] = book.worst_payoff;
    return j;
}

inline json core_report_to_json(const CoreReport& rep, const StateSpace& space) {
    json j;
    j["nonempty"] = rep.nonempty;
    j["coherent"] = rep.coherent;
    j["certificate"] = rep.certificate;
    j["patterns_tried"] = rep.patterns_tried;
    if (rep.witness) {
        j["witness"] = measure_to_json(*rep.witness);
        json slack = json::array();
        for (double s : rep.witness_slack)
            slack.push_back(s);
        j["witness_slack"] = slack;
    }
    if (rep.dutch_book)
        j["dutch_book"] = dutch_book_to_json(*rep.dutch_book, space);
    return j;
}

// ---------------------------------------------------------------------------
// trajectories

inline std::string trajectory_to_csv(const Trajectory& traj) {
    std::ostringstream out;
    out << "step,observed_label,flipped,p_omega_total,d_etv_to_limit\n";
    for (std::size_t t = 0; t < traj.splits.size(); ++t) {
        out << t << ',';
        if (t > 0)
            out << csv_escape(traj.observed[t - 1]);
        out << ',' << (t > 0 && traj.flipped[t - 1] ? "true" : "false") << ','
            << format_double(traj.measures[t].total()) << ','
            << format_double(traj.d_etv_to_limit[t]) << '\n';
    }
    return out.str();
}

struct TrajectoryCsvRow {
    std::size_t step = 0;
    std::string observed;
    bool flipped = false;
    double p_omega_total = 0.0;
    double d_etv_to_limit = 0.0;
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end)
        throw io_error("malformed number '" + s + "'");
    return v;
}

inline std::vector<TrajectoryCsvRow> trajectory_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "step,observed_label,flipped,p_omega_total,d_etv_to_limit")
        throw io_error("unexpected trajectory CSV header");
    std::vector<TrajectoryCsvRow> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto f = split_csv_line(line);
        if (f.size() != 5)
            throw io_error("trajectory CSV row has " + std::to_string(f.size()) + " fields");
        TrajectoryCsvRow row;
        row.step = static_cast<std::size_t>(std::stoull(f[0]));
        row.observed = f[1];
        row.flipped = f[2] == "true";
        row.p_omega_total = parse_double(f[3]);
        row.d_etv_to_limit = parse_double(f[4]);
        rows.push_back(std::move(row));
    }
    return rows;
}

struct TrajectoryJsonStep {
    std::size_t step = 0;
    std::string observed;
    bool flipped = false;
    std::vector<std::string> actual;
    std::vector<double> atoms;
    double p_omega_total = 0.0;
    double d_etv_to_limit = 0.0;
};

struct TrajectoryJson {
    std::vector<std::string> labels;
    std::string scenario;
    std::optional<std::size_t> discovery_time;
    bool ground_truth_detection = false;
    std::vector<TrajectoryJsonStep> steps;
};

inline json trajectory_to_json(const Trajectory& traj) {
    json j;
    j["labels"] = labels_to_json(traj.measures.front().space());
    j["scenario"] = to_string(traj.scenario);
    if (traj.discovery_time)
        j["discovery_time"] = *traj.discovery_time;
    j["ground_truth_detection"] = traj.ground_truth_detection;
    json steps = json::array();
    for (std::size_t t = 0; t < traj.splits.size(); ++t) {
        json s;
        s["step"] = t;
        if (t > 0) {
            s["observed"] = traj.observed[t - 1];
            s["flipped"] = static_cast<bool>(traj.flipped[t - 1]);
        }
        s["actual"] = event_to_json(traj.splits[t].actual(), traj.measures[t].space());
        json atoms = json::array();
        for (double a : traj.measures[t].atoms())
            atoms.push_back(a);
        s["atoms"] = atoms;
        s["p_omega_total"] = traj.measures[t].total();
        s["d_etv_to_limit"] = traj.d_etv_to_limit[t];
        steps.push_back(s);
    }
    j["steps"] = steps;
    return j;
}

inline TrajectoryJson trajectory_from_json(const json& j) {
    TrajectoryJson out;
    out.labels = labels_from_json(j.at("labels"));
    out.scenario = j.at("scenario").get<std::string>();
    if (j.contains("discovery_time"))
        out.discovery_time = j.at("discovery_time").get<std::size_t>();
    out.ground_truth_detection = j.value("ground_truth_detection", false);
    for (const auto& s : j.at("steps")) {
        TrajectoryJsonStep step;
        step.step = s.at("step").get<std::size_t>();
        step.observed = s.value("observed", "");
        step.flipped = s.value("flipped", false);
        for (const auto& v : s.at("actual"))
            step.actual.push_back(v.is_string() ? v.get<std::string>()
                                                : std::to_string(v.get<std::int64_t>()));
        step.atoms = s.at("atoms").get<std::vector<double>>();
        step.p_omega_total = s.at("p_omega_total").get<double>();
        step.d_etv_to_limit = s.at("d_etv_to_limit").get<double>();
        out.steps.push_back(std::move(step));
    }
    return out;
}

// ---------------------------------------------------------------------------
// envelopes / intervals / boomerang CSV

inline std::string envelope_values_to_csv(const Envelope& env, const std::vector<Event>& events) {
    std::ostringstream out;
    out << "event,lower,upper\n";
    for (Event e : events)
        out << csv_escape(event_to_string(e, env.space())) << ','
            << format_double(env.lower(e)) << ',' << format_double(env.upper(e)) << '\n';
    return out.str();
}

inline std::string interval_table_to_csv(const IntervalTable& table, const StateSpace& space) {
    std::ostringstream out;
    out << "event,lower,upper,n_members_used\n";
    for (const auto& row : table.rows) {
        out << csv_escape(space.label(row.atom) + "|" + event_to_string(row.conditioning, space))
            << ',' << format_double(row.lower) << ',' << format_double(row.upper) << ','
            << row.members_used << '\n';
    }
    return out.str();
}

struct IntervalCsvRow {
    std::string event;
    double lower = 0.0, upper = 0.0;
    std::size_t members_used = 0;
};

inline std::vector<IntervalCsvRow> interval_table_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "event,lower,upper,n_members_used")
        throw io_error("unexpected interval CSV header");
    std::vector<IntervalCsvRow> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto f = split_csv_line(line);
        if (f.size() != 4)
            throw io_error("interval CSV row has " + std::to_string(f.size()) + " fields");
        rows.push_back(IntervalCsvRow{f[0], parse_double(f[1]), parse_double(f[2]),
                                      static_cast<std::size_t>(std::stoull(f[3]))});
    }
    return rows;
}

inline std::string boomerang_to_csv(const BoomerangTrajectory& traj, const ExtendedMeasure& q) {
    std::ostringstream out;
    out << "t,atom,p,q,epsilon,influenced,displacement\n";
    for (const auto& step : traj.steps) {
        for (std::size_t k = 0; k < step.eps.size(); ++k) {
            out << step.t << ',' << csv_escape(q.space().label(k)) << ','
                << format_double(step.belief.atom(k)) << ',' << format_double(q.atom(k)) << ','
                << format_double(step.eps[k]) << ',' << format_double(step.influenced.atom(k))
                << ',' << format_double(step.displacement[k]) << '\n';
        }
    }
    return out.str();
}

struct BoomerangCsvRow {
    std::size_t t = 0;
    std::string atom;
    double p = 0.0, q = 0.0, epsilon = 0.0, influenced = 0.0, displacement = 0.0;
};

inline std::vector<BoomerangCsvRow> boomerang_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "t,atom,p,q,epsilon,influenced,displacement")
        throw io_error("unexpected boomerang CSV header");
    std::vector<BoomerangCsvRow> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto f = split_csv_line(line);
        if (f.size() != 7)
            throw io_error("boomerang CSV row has " + std::to_string(f.size()) + " fields");
        rows.push_back(BoomerangCsvRow{static_cast<std::size_t>(std::stoull(f[0])), f[1],
                                       parse_double(f[2]), parse_double(f[3]), parse_double(f[4]),
                                       parse_double(f[5]), parse_double(f[6])});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// app configs

inline SpeciesConfig species_config_from_json(const json& j) {
    SpeciesConfig cfg;
    cfg.n_prior = j.at("n_prior").get<std::int64_t>();
    cfg.n_max = j.at("n_max").get<std::int64_t>();
    cfg.true_m = j.at("true_m").get<std::int64_t>();
    cfg.prior_family = j.at("priors").get<std::vector<double>>();
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.replacement = j.value("replacement", false);
    cfg.max_steps = j.value("max_steps", std::size_t{0});
    if (j.contains("schedule"))
        cfg.schedule = labels_from_json(j.at("schedule"));
    if (j.contains("conditioning_events")) {
        const StateSpace space = StateSpace::naturals(cfg.n_max);
        for (const auto& arr : j.at("conditioning_events"))
            cfg.conditioning_events.push_back(event_from_json(arr, space));
    }
    return cfg;
}

inline OpinionConfig opinion_config_from_json(const json& j) {
    StateSpace space = space_from_json(j);
    std::vector<double> q = j.at("persuader").get<std::vector<double>>();
    std::vector<double> p = j.at("persuaded_oracle").get<std::vector<double>>();
    Event actual0 = event_from_json(j.at("actual0"), space);
    OpinionConfig cfg{ExtendedMeasure::create(space, std::move(q)),
                      ExtendedMeasure::create(space, std::move(p)),
                      Split::initial(actual0, space),
                      {},
                      j.value("horizon", std::size_t{1}),
                      j.value("seed", std::uint64_t{0}),
                      std::nullopt};
    if (j.contains("epsilon")) {
        const auto& e = j.at("epsilon");
        cfg.schedule.latent = e.value("latent", 1.5);
        cfg.schedule.discovered = e.value("discovered", 0.8);
        if (e.contains("overrides"))
            for (const auto& o : e.at("overrides")) {
                const auto& a = o.at("atom");
                const std::string label = a.is_string() ? a.get<std::string>()
                                                        : std::to_string(a.get<std::int64_t>());
                const auto idx = space.index_of(label);
                if (!idx)
                    throw io_error("epsilon override names an unknown atom");
                cfg.schedule.overrides[{*idx, o.at("t").get<std::size_t>()}] =
                    o.at("epsilon").get<double>();
            }
    }
    if (j.contains("discovery_order"))
        cfg.discovery_order = labels_from_json(j.at("discovery_order"));
    return cfg;
}

// ---------------------------------------------------------------------------
// files

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw io_error("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw io_error("malformed JSON in '" + path + "': " + e.what());
    }
    return j;
}

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io_error("cannot write '" + path + "'");
    out << contents;
    if (!out)
        throw io_error("failed while writing '" + path + "'");
}

} // namespace xprob::io
