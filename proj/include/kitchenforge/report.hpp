#pragma once

// Textual outputs: the schedule report, an ASCII Gantt chart, the Pareto CSV
// and its gnuplot script, and the archive payload published by the service.
//
// Report layout:
//
//   Optimisation took: 19.942 seconds          (optional)
//   Schedule: Status: Succeeded.
//
//   Hob(2) Pot(1) -> [
//   Rice A 1_1 [35,37),
//   DependentSetUp from Beef A to Boiled water A [812,822),
//   Pasta A 0 [1299,1319)
//   ]
//
//   makespan: 00:21:59
//
// Intervals are half-open minutes from time 0. The makespan line renders the
// minute count as HH:MM:SS with minutes in the MM field.

#include "archive.hpp"
#include "decoder.hpp"
#include "error.hpp"
#include "instance.hpp"
#include "scenario_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace kitchenforge {

inline std::string format_makespan(Minutes minutes) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%02lld:%02lld:00", static_cast<long long>(minutes / 60),
                  static_cast<long long>(minutes % 60));
    return buf;
}

inline std::string task_name(Task const& t, Instance const& inst) {
    switch (t.kind) {
    case TaskKind::Main: return inst.slots()[t.slot].name;
    case TaskKind::Subtask: return inst.slots()[t.slot].name + "_1";
    case TaskKind::Setup:
        return "DependentSetUp from " + inst.recipe(t.setup_from).label() + " to " + inst.recipe(t.setup_to).label();
    }
    return {};
}

inline Minutes schedule_makespan(Schedule const& schedule) {
    Minutes m = 0;
    for (auto const& lane : schedule.lanes) {
        for (auto const& t : lane) m = std::max(m, t.end);
    }
    return m;
}

/// `wall_seconds` is omitted from the text when not given.
inline std::string render_report(Schedule const& schedule, Instance const& inst,
                                 std::optional<double> wall_seconds) {
    std::ostringstream out;
    if (wall_seconds) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3f", *wall_seconds);
        out << "Optimisation took: " << buf << " seconds\n";
    }
    if (schedule.status == ScheduleStatus::Succeeded) {
        out << "Schedule: Status: Succeeded.\n";
    } else {
        out << "Schedule: Status: Infeasible (" << schedule.reason << ").\n";
    }
    std::vector<std::size_t> order(schedule.lanes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return inst.resource(a).display_name() < inst.resource(b).display_name();
    });
    for (auto r : order) {
        auto const& lane = schedule.lanes[r];
        if (lane.empty()) continue;
        out << "\n" << inst.resource(r).display_name() << " -> [\n";
        for (std::size_t i = 0; i < lane.size(); ++i) {
            out << task_name(lane[i], inst) << " [" << lane[i].start << "," << lane[i].end << ")"
                << (i + 1 < lane.size() ? "," : "") << "\n";
        }
        out << "]\n";
    }
    out << "\nmakespan: " << format_makespan(schedule_makespan(schedule)) << "\n";
    return out.str();
}

struct ParsedReport {
    std::optional<double> wall_seconds;
    Schedule schedule;
    Minutes makespan = 0;
};

/// Inverse of render_report for the given instance; throws ParseError.
inline ParsedReport parse_report(std::string_view text, Instance const& inst) {
    ParsedReport rep;
    rep.schedule.lanes.assign(inst.resource_count(), {});
    std::optional<std::size_t> lane;
    bool saw_status = false;
    bool saw_makespan = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;

    auto parse_min = [&](std::string_view s) {
        return detail::parse_number<Minutes>(detail::trim(s), line_no, "interval");
    };

    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        auto line = detail::trim(text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos));
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        if (line.empty()) continue;

        if (lane) {
            if (line == "]") {
                auto& tasks = rep.schedule.lanes[*lane];
                for (std::size_t i = 0; i < tasks.size(); ++i) {
                    if (tasks[i].kind != TaskKind::Setup) continue;
                    for (std::size_t j = i + 1; j < tasks.size(); ++j) {
                        if (tasks[j].kind != TaskKind::Setup) {
                            tasks[i].slot = tasks[j].slot;
                            break;
                        }
                    }
                }
                lane.reset();
                continue;
            }
            if (line.back() == ',') line.remove_suffix(1);
            auto open = line.rfind('[');
            if (open == std::string_view::npos || line.back() != ')')
                throw ParseError::at_line(line_no, "expected '<task> [start,end)'");
            auto interval = line.substr(open + 1, line.size() - open - 2);
            auto comma = interval.find(',');
            if (comma == std::string_view::npos) throw ParseError::at_line(line_no, "malformed interval");
            Task t;
            t.resource = *lane;
            t.start = parse_min(interval.substr(0, comma));
            t.end = parse_min(interval.substr(comma + 1));
            std::string name(detail::trim(line.substr(0, open)));
            constexpr std::string_view kSetup = "DependentSetUp from ";
            if (name.rfind(kSetup, 0) == 0) {
                auto rest = name.substr(kSetup.size());
                auto to = rest.find(" to ");
                if (to == std::string::npos) throw ParseError::at_line(line_no, "setup without ' to '");
                auto from = inst.scenario().find_recipe(rest.substr(0, to));
                auto target = inst.scenario().find_recipe(rest.substr(to + 4));
                if (!from || !target) throw ParseError::at_line(line_no, "setup names an unknown recipe");
                t.kind = TaskKind::Setup;
                t.setup_from = *from;
                t.setup_to = *target;
            } else if (auto slot = inst.find_slot(name)) {
                t.kind = TaskKind::Main;
                t.slot = *slot;
            } else if (name.size() > 2 && name.ends_with("_1") && inst.find_slot(name.substr(0, name.size() - 2))) {
                t.kind = TaskKind::Subtask;
                t.slot = *inst.find_slot(name.substr(0, name.size() - 2));
            } else {
                throw ParseError::at_line(line_no, "unknown task '" + name + "'");
            }
            rep.schedule.lanes[*lane].push_back(t);
            continue;
        }

        constexpr std::string_view kTook = "Optimisation took: ";
        constexpr std::string_view kStatus = "Schedule: Status: ";
        constexpr std::string_view kMakespan = "makespan: ";
        if (line.starts_with(kTook)) {
            auto rest = line.substr(kTook.size());
            auto sp = rest.find(' ');
            rep.wall_seconds = detail::parse_number<double>(rest.substr(0, sp), line_no, "seconds");
        } else if (line.starts_with(kStatus)) {
            auto rest = line.substr(kStatus.size());
            saw_status = true;
            if (rest == "Succeeded.") {
                rep.schedule.status = ScheduleStatus::Succeeded;
            } else if (rest.starts_with("Infeasible (") && rest.ends_with(").")) {
                rep.schedule.status = ScheduleStatus::Infeasible;
                rep.schedule.reason = std::string(rest.substr(12, rest.size() - 14));
            } else {
                throw ParseError::at_line(line_no, "unknown status '" + std::string(rest) + "'");
            }
        } else if (line.starts_with(kMakespan)) {
            auto hms = line.substr(kMakespan.size());
            auto c1 = hms.find(':');
            auto c2 = hms.find(':', c1 == std::string_view::npos ? 0 : c1 + 1);
            if (c1 == std::string_view::npos || c2 == std::string_view::npos)
                throw ParseError::at_line(line_no, "makespan must be HH:MM:SS");
            rep.makespan = parse_min(hms.substr(0, c1)) * 60 + parse_min(hms.substr(c1 + 1, c2 - c1 - 1));
            saw_makespan = true;
        } else if (line.ends_with("-> [")) {
            auto name = std::string(detail::trim(line.substr(0, line.size() - 4)));
            auto r = inst.find_resource_by_display(name);
            if (!r) throw ParseError::at_line(line_no, "unknown resource '" + name + "'");
            lane = *r;
        } else {
            throw ParseError::at_line(line_no, "unexpected line '" + std::string(line) + "'");
        }
    }
    if (lane) throw ParseError::at_line(line_no, "unterminated resource block");
    if (!saw_status) throw ParseError::at_line(line_no, "missing status line");
    if (!saw_makespan) throw ParseError::at_line(line_no, "missing makespan line");
    return rep;
}

/// One row per used resource; each column covers `makespan / width` minutes
/// and shows the task at the column's midpoint: '#' main, '-' subtask,
/// 's' setup, '.' idle.
inline std::string render_gantt(Schedule const& schedule, Instance const& inst, std::size_t width = 100) {
    Minutes const makespan = schedule_makespan(schedule);
    std::ostringstream out;
    out << "makespan " << makespan << " min, one column = ";
    double const per_col = makespan > 0 ? static_cast<double>(makespan) / static_cast<double>(width) : 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", per_col);
    out << buf << " min  (# main, - subtask, s setup, . idle)\n";
    if (makespan == 0) return out.str();

    std::size_t name_width = 0;
    for (std::size_t r = 0; r < schedule.lanes.size(); ++r) {
        if (!schedule.lanes[r].empty()) name_width = std::max(name_width, inst.resource(r).display_name().size());
    }
    for (std::size_t r = 0; r < schedule.lanes.size(); ++r) {
        auto const& lane = schedule.lanes[r];
        if (lane.empty()) continue;
        auto name = inst.resource(r).display_name();
        std::string row(width, '.');
        for (std::size_t col = 0; col < width; ++col) {
            double mid = (static_cast<double>(col) + 0.5) * per_col;
            for (auto const& t : lane) {
                if (mid >= static_cast<double>(t.start) && mid < static_cast<double>(t.end)) {
                    row[col] = t.kind == TaskKind::Main ? '#' : t.kind == TaskKind::Subtask ? '-' : 's';
                    break;
                }
            }
        }
        out << name << std::string(name_width - name.size(), ' ') << " |" << row << "|\n";
    }
    return out.str();
}

inline std::string pareto_csv(ParetoArchive const& archive) {
    std::string out = "makespan_min,energy_kj,deficiency,cost_eur\n";
    for (auto const& e : archive.sorted()) {
        auto const& o = e.objectives;
        out += detail::format_double(o.makespan) + "," + detail::format_double(o.energy) + "," +
               detail::format_double(o.deficiency) + "," + detail::format_double(o.cost) + "\n";
    }
    return out;
}

inline std::string pareto_gnuplot(std::string const& csv_name) {
    return "# 3-D scatter of the Pareto front approximation\n"
           "set datafile separator ','\n"
           "set key off\n"
           "set xlabel 'makespan [min]'\n"
           "set ylabel 'energy [kJ]'\n"
           "set zlabel 'deficiency'\n"
           "set ticslevel 0\n"
           "splot '" +
           csv_name + "' using 1:2:3 every ::1 with points pointtype 7\n";
}

/// `objective: m=<..> e=<..> d=<..> c=<..>`
inline std::string format_objective_line(ObjectiveVector const& o) {
    return "objective: m=" + detail::format_double(o.makespan) + " e=" + detail::format_double(o.energy) +
           " d=" + detail::format_double(o.deficiency) + " c=" + detail::format_double(o.cost);
}

/// `chromosome: <slot>=<allocation>@<priority>; ...`
inline std::string format_chromosome_line(Chromosome const& c, Instance const& inst) {
    std::string out = "chromosome:";
    for (std::size_t s = 0; s < c.genes.size(); ++s) {
        out += s ? "; " : " ";
        out += inst.slots()[s].name + "=";
        out += is_allocated(inst, c, s) ? inst.resource(allocated_resource(inst, c, s)).display_name()
                                        : std::string("No allocation");
        out += "@" + std::to_string(c.genes[s].priority);
    }
    return out;
}

/// Parses a chromosome line produced by format_chromosome_line.
inline Chromosome parse_chromosome_line(std::string_view line, Instance const& inst) {
    constexpr std::string_view kHead = "chromosome:";
    if (!line.starts_with(kHead)) throw ParseError::at_offset(0, "expected 'chromosome:'");
    Chromosome c = all_unallocated(inst);
    std::vector<bool> seen(inst.slot_count(), false);
    std::size_t pos = kHead.size();
    while (pos < line.size()) {
        auto semi = line.find(';', pos);
        auto item = detail::trim(line.substr(pos, semi == std::string_view::npos ? line.npos : semi - pos));
        std::size_t item_offset = pos;
        pos = semi == std::string_view::npos ? line.size() : semi + 1;
        if (item.empty()) continue;
        auto eq = item.find('=');
        auto at = item.rfind('@');
        if (eq == std::string_view::npos || at == std::string_view::npos || at < eq)
            throw ParseError::at_offset(item_offset, "expected '<slot>=<allocation>@<priority>'");
        auto slot = inst.find_slot(std::string(item.substr(0, eq)));
        if (!slot) throw ParseError::at_offset(item_offset, "unknown slot '" + std::string(item.substr(0, eq)) + "'");
        auto alloc = std::string(item.substr(eq + 1, at - eq - 1));
        auto const& domain = inst.domain(*slot);
        std::size_t index = domain.size();
        if (alloc != "No allocation") {
            auto r = inst.find_resource_by_display(alloc);
            auto it = r ? std::find(domain.begin(), domain.end(), *r) : domain.end();
            if (it == domain.end()) throw ParseError::at_offset(item_offset, "allocation '" + alloc + "' not in domain");
            index = static_cast<std::size_t>(it - domain.begin());
        }
        c.genes[*slot].allocation = static_cast<std::uint32_t>(index);
        c.genes[*slot].priority = static_cast<std::uint32_t>(
            detail::parse_number<unsigned long>(item.substr(at + 1), 0, "priority"));
        seen[*slot] = true;
    }
    if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
        throw ParseError::at_offset(line.size(), "chromosome line does not cover every slot");
    return c;
}

} // namespace kitchenforge
