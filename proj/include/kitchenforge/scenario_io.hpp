#pragma once

// Scenario documents: UTF-8 text made of `[section]` headers followed by
// `key = value` lines. `#` starts a comment line; blank lines are ignored.
//
//   [recipe]      food, variant, predecessor (optional, "<food> <variant>"),
//                 amount_g, zones (comma list), pot, energy_kj, duration_min,
//                 cost_eur, deficiency
//   [resource]    zone, pot
//   [exclusion]   zones (comma list, at least two)
//   [order]       one `<food type> = <grams>` line per ordered food
//   [config]      setup_min, seed
//   [effect]      kind = unavailable   target
//                 kind = duration      recipe, zone, pot, start, end
//                 kind = quality       recipe, deficiency
//
// `[order]` and `[config]` may appear at most once; the other sections repeat.

#include "error.hpp"
#include "scenario.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace kitchenforge {

namespace detail {

inline std::string_view trim(std::string_view s) {
    auto const ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto comma = s.find(',', start);
        auto piece = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
        if (!piece.empty()) out.emplace_back(piece);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

template <typename T>
T parse_number(std::string_view text, std::size_t line, std::string const& field) {
    T value{};
    auto const* first = text.data();
    auto const* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty())
        throw ParseError::at_line(line, "field '" + field + "': invalid number '" + std::string(text) + "'");
    return value;
}

struct RawSection {
    std::string name;
    std::size_t line = 0;
    std::vector<std::pair<std::string, std::string>> entries;
    std::vector<std::size_t> entry_lines;
};

class SectionReader {
public:
    explicit SectionReader(RawSection const& s) : section_(s) {}

    [[nodiscard]] std::optional<std::string> optional(std::string const& key) {
        for (std::size_t i = 0; i < section_.entries.size(); ++i) {
            if (section_.entries[i].first == key) {
                used_.push_back(i);
                return section_.entries[i].second;
            }
        }
        return std::nullopt;
    }

    [[nodiscard]] std::string required(std::string const& key) {
        auto v = optional(key);
        if (!v)
            throw ParseError::at_line(section_.line,
                                      "[" + section_.name + "] missing field '" + key + "'");
        return *v;
    }

    template <typename T>
    T number(std::string const& key) {
        auto text = required(key);
        return parse_number<T>(text, line_of(key), key);
    }

    void reject_unknown() const {
        for (std::size_t i = 0; i < section_.entries.size(); ++i) {
            if (std::find(used_.begin(), used_.end(), i) == used_.end())
                throw ParseError::at_line(section_.entry_lines[i], "[" + section_.name +
                                                                       "] unknown field '" +
                                                                       section_.entries[i].first + "'");
        }
    }

private:
    [[nodiscard]] std::size_t line_of(std::string const& key) const {
        for (std::size_t i = 0; i < section_.entries.size(); ++i) {
            if (section_.entries[i].first == key) return section_.entry_lines[i];
        }
        return section_.line;
    }

    RawSection const& section_;
    std::vector<std::size_t> used_;
};

inline std::vector<RawSection> split_sections(std::string_view text) {
    std::vector<RawSection> sections;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        auto raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        ++line_no;
        auto line = trim(raw);
        if (!line.empty() && line.front() != '#') {
            if (line.front() == '[') {
                if (line.back() != ']') throw ParseError::at_line(line_no, "unterminated section header");
                sections.push_back({std::string(trim(line.substr(1, line.size() - 2))), line_no, {}, {}});
            } else {
                auto eq = line.find('=');
                if (eq == std::string_view::npos)
                    throw ParseError::at_line(line_no, "expected 'key = value'");
                if (sections.empty()) throw ParseError::at_line(line_no, "field outside of any section");
                auto key = trim(line.substr(0, eq));
                if (key.empty()) throw ParseError::at_line(line_no, "empty key");
                sections.back().entries.emplace_back(std::string(key), std::string(trim(line.substr(eq + 1))));
                sections.back().entry_lines.push_back(line_no);
            }
        }
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    return sections;
}

} // namespace detail

/// Parses and validates a scenario document. Throws ParseError for syntax
/// problems and ValidationError for broken references.
inline Scenario load_scenario(std::string_view text) {
    Scenario s;
    bool seen_order = false;
    bool seen_config = false;
    for (auto const& section : detail::split_sections(text)) {
        detail::SectionReader in(section);
        if (section.name == "recipe") {
            Recipe r;
            r.food = in.required("food");
            r.variant = in.required("variant");
            if (auto p = in.optional("predecessor"); p && !p->empty() && *p != "-") r.predecessor = *p;
            r.amount_g = in.number<double>("amount_g");
            r.zones = detail::split_list(in.required("zones"));
            r.pot = in.required("pot");
            r.energy_kj = in.number<double>("energy_kj");
            r.duration_min = in.number<Minutes>("duration_min");
            r.cost_eur = in.number<double>("cost_eur");
            r.deficiency = in.number<double>("deficiency");
            s.recipes.push_back(std::move(r));
        } else if (section.name == "resource") {
            s.resources.push_back({in.required("zone"), in.required("pot")});
        } else if (section.name == "exclusion") {
            s.exclusion_groups.push_back({detail::split_list(in.required("zones"))});
        } else if (section.name == "order") {
            if (seen_order) throw ParseError::at_line(section.line, "duplicate [order] section");
            seen_order = true;
            for (std::size_t i = 0; i < section.entries.size(); ++i) {
                auto const& [food, grams] = section.entries[i];
                s.order[food] = detail::parse_number<double>(grams, section.entry_lines[i], food);
            }
            continue;
        } else if (section.name == "config") {
            if (seen_config) throw ParseError::at_line(section.line, "duplicate [config] section");
            seen_config = true;
            if (in.optional("setup_min")) s.setup_duration = in.number<Minutes>("setup_min");
            if (in.optional("seed")) s.rng_seed = in.number<std::uint64_t>("seed");
        } else if (section.name == "effect") {
            auto kind = in.required("kind");
            if (kind == "unavailable") {
                s.overrides.emplace_back(ResourceUnavailable{in.required("target")});
            } else if (kind == "duration") {
                DurationOverride d;
                d.recipe = in.required("recipe");
                d.zone = in.required("zone");
                d.pot = in.required("pot");
                d.start = in.number<Minutes>("start");
                d.end = in.number<Minutes>("end");
                if (d.end < d.start) throw ParseError::at_line(section.line, "duration effect ends before it starts");
                s.overrides.emplace_back(std::move(d));
            } else if (kind == "quality") {
                QualityUpdate q;
                q.recipe = in.required("recipe");
                q.deficiency = in.number<double>("deficiency");
                s.overrides.emplace_back(std::move(q));
            } else {
                throw ParseError::at_line(section.line, "unknown effect kind '" + kind + "'");
            }
        } else {
            throw ParseError::at_line(section.line, "unknown section [" + section.name + "]");
        }
        in.reject_unknown();
    }
    validate(s);
    return s;
}

inline Scenario load_scenario_file(std::string const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

inline std::string serialize_scenario(Scenario const& s) {
    std::ostringstream out;
    auto join = [](std::vector<std::string> const& items) {
        std::string text;
        for (std::size_t i = 0; i < items.size(); ++i) text += (i ? ", " : "") + items[i];
        return text;
    };
    out << "[config]\n"
        << "setup_min = " << s.setup_duration << "\n"
        << "seed = " << s.rng_seed << "\n";
    for (auto const& r : s.resources) {
        out << "\n[resource]\nzone = " << r.zone << "\npot = " << r.pot << "\n";
    }
    for (auto const& g : s.exclusion_groups) {
        out << "\n[exclusion]\nzones = " << join(g.members) << "\n";
    }
    for (auto const& r : s.recipes) {
        out << "\n[recipe]\n"
            << "food = " << r.food << "\n"
            << "variant = " << r.variant << "\n";
        if (r.predecessor) out << "predecessor = " << *r.predecessor << "\n";
        out << "amount_g = " << detail::format_double(r.amount_g) << "\n"
            << "zones = " << join(r.zones) << "\n"
            << "pot = " << r.pot << "\n"
            << "energy_kj = " << detail::format_double(r.energy_kj) << "\n"
            << "duration_min = " << r.duration_min << "\n"
            << "cost_eur = " << detail::format_double(r.cost_eur) << "\n"
            << "deficiency = " << detail::format_double(r.deficiency) << "\n";
    }
    out << "\n[order]\n";
    for (auto const& [food, grams] : s.order) out << food << " = " << detail::format_double(grams) << "\n";
    for (auto const& effect : s.overrides) {
        out << "\n[effect]\n";
        std::visit(
            [&](auto const& e) {
                using T = std::decay_t<decltype(e)>;
                if constexpr (std::is_same_v<T, ResourceUnavailable>) {
                    out << "kind = unavailable\ntarget = " << e.target << "\n";
                } else if constexpr (std::is_same_v<T, DurationOverride>) {
                    out << "kind = duration\nrecipe = " << e.recipe << "\nzone = " << e.zone
                        << "\npot = " << e.pot << "\nstart = " << e.start << "\nend = " << e.end << "\n";
                } else {
                    out << "kind = quality\nrecipe = " << e.recipe
                        << "\ndeficiency = " << detail::format_double(e.deficiency) << "\n";
                }
            },
            effect);
    }
    return out.str();
}

} // namespace kitchenforge
