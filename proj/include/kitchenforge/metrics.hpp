#pragma once

// Metrics API records, e.g.
//
//   ControlledMetricType[name=Boiled water A 0 allocation,
//     valueType=ValueType.Nominal[name=..., values={Hob(1) Pot(1), No allocation}, typ=NOMINAL],
//     units=n/a]
//   ObservableMetricType[name=Hob(6) availability,
//     valueType=ValueType.Integer[min=0,max=0,typ=INT], units=n/a,
//     sampleRate=SampleRate.EventDriven[]]
//
// Whitespace runs (including newlines) inside values collapse to one space.
// A comma-separated piece without a `key=` prefix continues the previous
// value, so `name=Boiled water A 0,\nallocation` reads as one name. A record
// cut off before its closing `]` is accepted when every required field is
// present. KeyObjectiveType records use the same grammar.

#include "error.hpp"
#include "instance.hpp"
#include "scenario.hpp"

#include <cctype>
#include <charconv>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

namespace kitchenforge {

inline constexpr std::string_view kNoAllocation = "No allocation";

enum class MetricKind { Controlled, Observable, KeyObjective };

struct NominalType {
    std::string name;
    std::vector<std::string> values;
    bool operator==(NominalType const&) const = default;
};

struct IntegerType {
    std::int64_t min = 0;
    std::int64_t max = 0;
    bool operator==(IntegerType const&) const = default;
};

using ValueType = std::variant<NominalType, IntegerType>;

enum class SampleRate { EventDriven };

struct MetricRecord {
    MetricKind kind = MetricKind::Controlled;
    std::string name;
    ValueType value_type;
    std::string units = "n/a";
    std::optional<SampleRate> sample_rate;

    [[nodiscard]] std::string const& effective_units() const {
        static std::string const na = "n/a";
        return units.empty() ? na : units;
    }

    friend bool operator==(MetricRecord const& a, MetricRecord const& b) {
        return a.kind == b.kind && a.name == b.name && a.value_type == b.value_type &&
               a.effective_units() == b.effective_units() && a.sample_rate == b.sample_rate;
    }
};

namespace detail {

inline std::string collapse_ws(std::string_view s) {
    std::string out;
    bool pending_space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(c);
        }
    }
    return out;
}

inline bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) != std::tolower(static_cast<unsigned char>(b[i])))
            return false;
    }
    return true;
}

inline bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

struct BracketNode;

struct FieldValue {
    enum class Kind { Scalar, List, Node } kind = Kind::Scalar;
    std::string scalar;
    std::vector<std::string> list;
    std::shared_ptr<BracketNode> node;
};

struct BracketField {
    std::string key;
    FieldValue value;
    std::size_t offset = 0;
};

struct BracketNode {
    std::string head;
    std::size_t offset = 0;
    std::size_t open_offset = 0;
    std::vector<BracketField> fields;
    bool truncated = false;

    [[nodiscard]] BracketField const* find(std::string_view key) const {
        for (auto const& f : fields) {
            if (f.key == key) return &f;
        }
        return nullptr;
    }
};

inline bool is_record_head(std::string_view head) {
    return head == "ControlledMetricType" || head == "ObservableMetricType" || head == "KeyObjectiveType";
}

class RecordParser {
public:
    explicit RecordParser(std::string_view text) : text_(text) {}

    [[nodiscard]] bool at_end() {
        skip_separators();
        return pos_ >= text_.size();
    }

    [[nodiscard]] std::size_t position() const noexcept { return pos_; }

    BracketNode parse_node(bool outer) {
        skip_ws();
        BracketNode node;
        node.offset = pos_;
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
        node.head = std::string(text_.substr(start, pos_ - start));
        if (node.head.empty()) throw ParseError::at_offset(pos_, "expected a record head");
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != '[')
            throw ParseError::at_offset(pos_, "expected '[' after '" + node.head + "'");
        node.open_offset = pos_;
        ++pos_;
        parse_fields(node, outer);
        return node;
    }

    void skip_separators() {
        while (pos_ < text_.size() && (std::isspace(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == ','))
            ++pos_;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    // True when the text at pos_ is `<record head> [`, i.e. a following record.
    [[nodiscard]] bool next_record_starts() const {
        std::size_t p = pos_;
        while (p < text_.size() && is_ident_char(text_[p])) ++p;
        if (!is_record_head(text_.substr(pos_, p - pos_))) return false;
        while (p < text_.size() && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
        return p < text_.size() && text_[p] == '[';
    }

    // Looks for `key=` at pos_; returns the key and advances past '=' if found.
    std::optional<std::string> try_key() {
        std::size_t p = pos_;
        while (p < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[p])) || text_[p] == '_')) ++p;
        if (p == pos_) return std::nullopt;
        std::size_t key_end = p;
        while (p < text_.size() && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
        if (p >= text_.size() || text_[p] != '=') return std::nullopt;
        std::string key(text_.substr(pos_, key_end - pos_));
        pos_ = p + 1;
        return key;
    }

    // Reads up to a ',' or ']' at bracket depth 0. Returns false at end of input.
    bool read_scalar(std::string& out) {
        std::size_t start = pos_;
        int depth = 0;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '[' || c == '{') ++depth;
            if ((c == ']' || c == '}') && depth > 0) {
                --depth;
            } else if (depth == 0 && (c == ',' || c == ']')) {
                break;
            }
            ++pos_;
        }
        out = collapse_ws(text_.substr(start, pos_ - start));
        return pos_ < text_.size();
    }

    std::vector<std::string> read_list() {
        std::size_t open = pos_;
        ++pos_; // '{'
        std::vector<std::string> values;
        std::size_t start = pos_;
        int depth = 0;
        while (true) {
            if (pos_ >= text_.size()) throw ParseError::at_offset(open, "unbalanced '{'");
            char c = text_[pos_];
            if (c == '[' || c == '{') {
                ++depth;
            } else if ((c == ']' || c == '}') && depth > 0) {
                --depth;
            } else if (depth == 0 && (c == ',' || c == '}')) {
                auto v = collapse_ws(text_.substr(start, pos_ - start));
                if (!v.empty()) values.push_back(std::move(v));
                ++pos_;
                if (c == '}') break;
                start = pos_;
                continue;
            } else if (depth == 0 && c == ']') {
                throw ParseError::at_offset(pos_, "unexpected ']' inside value list");
            }
            ++pos_;
        }
        return values;
    }

    void parse_fields(BracketNode& node, bool outer) {
        while (true) {
            skip_ws();
            if (pos_ >= text_.size()) {
                if (!outer) throw ParseError::at_offset(node.open_offset, "unbalanced '[' in '" + node.head + "'");
                node.truncated = true;
                return;
            }
            if (text_[pos_] == ']') {
                ++pos_;
                return;
            }
            if (text_[pos_] == ',') {
                ++pos_;
                continue;
            }
            if (outer && !node.fields.empty() && next_record_starts()) {
                node.truncated = true;
                return;
            }
            std::size_t field_offset = pos_;
            auto key = try_key();
            if (!key) {
                std::string more;
                bool closed = read_scalar(more);
                if (node.fields.empty() || node.fields.back().value.kind != FieldValue::Kind::Scalar)
                    throw ParseError::at_offset(field_offset, "expected 'key=value'");
                auto& prev = node.fields.back().value.scalar;
                if (!more.empty()) prev += (prev.empty() ? "" : " ") + more;
                if (!closed && !outer)
                    throw ParseError::at_offset(node.open_offset, "unbalanced '[' in '" + node.head + "'");
                continue;
            }
            BracketField field;
            field.key = *key;
            field.offset = field_offset;
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '{') {
                field.value.kind = FieldValue::Kind::List;
                field.value.list = read_list();
            } else if (looks_like_node()) {
                field.value.kind = FieldValue::Kind::Node;
                field.value.node = std::make_shared<BracketNode>(parse_node(false));
            } else {
                bool closed = read_scalar(field.value.scalar);
                if (!closed && !outer)
                    throw ParseError::at_offset(node.open_offset, "unbalanced '[' in '" + node.head + "'");
            }
            node.fields.push_back(std::move(field));
        }
    }

    [[nodiscard]] bool looks_like_node() const {
        std::size_t p = pos_;
        while (p < text_.size() && is_ident_char(text_[p])) ++p;
        if (p == pos_) return false;
        while (p < text_.size() && std::isspace(static_cast<unsigned char>(text_[p]))) ++p;
        return p < text_.size() && text_[p] == '[';
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

inline std::int64_t parse_int(BracketField const& f) {
    if (f.value.kind != FieldValue::Kind::Scalar) throw ParseError::at_offset(f.offset, "'" + f.key + "' must be an integer");
    std::int64_t v{};
    auto const& s = f.value.scalar;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        throw ParseError::at_offset(f.offset, "'" + f.key + "' must be an integer, got '" + s + "'");
    return v;
}

inline void reject_unknown(BracketNode const& node, std::initializer_list<std::string_view> known) {
    for (auto const& f : node.fields) {
        if (std::find(known.begin(), known.end(), f.key) == known.end())
            throw ParseError::at_offset(f.offset, "unknown field '" + f.key + "' in '" + node.head + "'");
    }
}

inline BracketField const& require(BracketNode const& node, std::string_view key) {
    if (auto const* f = node.find(key)) return *f;
    throw ParseError::at_offset(node.offset, "'" + node.head + "' is missing field '" + std::string(key) + "'");
}

inline ValueType to_value_type(BracketField const& f) {
    if (f.value.kind != FieldValue::Kind::Node)
        throw ParseError::at_offset(f.offset, "valueType must be ValueType.Nominal[...] or ValueType.Integer[...]");
    auto const& node = *f.value.node;
    if (node.head == "ValueType.Nominal") {
        reject_unknown(node, {"name", "values", "typ"});
        NominalType t;
        if (auto const* n = node.find("name")) t.name = n->value.scalar;
        auto const& values = require(node, "values");
        if (values.value.kind != FieldValue::Kind::List)
            throw ParseError::at_offset(values.offset, "values must be a '{...}' list");
        t.values = values.value.list;
        if (t.values.empty()) throw ParseError::at_offset(values.offset, "nominal value list is empty");
        for (auto& v : t.values) {
            if (iequals(v, kNoAllocation)) v = std::string(kNoAllocation);
        }
        if (auto const* typ = node.find("typ"); typ && typ->value.scalar != "NOMINAL")
            throw ParseError::at_offset(typ->offset, "nominal type must have typ=NOMINAL");
        return t;
    }
    if (node.head == "ValueType.Integer") {
        reject_unknown(node, {"min", "max", "typ"});
        IntegerType t{parse_int(require(node, "min")), parse_int(require(node, "max"))};
        if (t.min > t.max) throw ParseError::at_offset(node.offset, "integer type has min > max");
        if (auto const* typ = node.find("typ"); typ && typ->value.scalar != "INT")
            throw ParseError::at_offset(typ->offset, "integer type must have typ=INT");
        return t;
    }
    throw ParseError::at_offset(node.offset, "unknown value type '" + node.head + "'");
}

inline MetricRecord to_record(BracketNode const& node) {
    MetricRecord r;
    if (node.head == "ControlledMetricType") {
        r.kind = MetricKind::Controlled;
    } else if (node.head == "ObservableMetricType") {
        r.kind = MetricKind::Observable;
    } else if (node.head == "KeyObjectiveType") {
        r.kind = MetricKind::KeyObjective;
    } else {
        throw ParseError::at_offset(node.offset, "unknown record head '" + node.head + "'");
    }
    if (node.truncated && (!node.find("name") || !node.find("valueType")))
        throw ParseError::at_offset(node.open_offset, "unbalanced '[' in '" + node.head + "'");
    reject_unknown(node, {"name", "valueType", "units", "sampleRate"});
    auto const& name = require(node, "name");
    if (name.value.kind != FieldValue::Kind::Scalar || name.value.scalar.empty())
        throw ParseError::at_offset(name.offset, "record name must be a non-empty string");
    r.name = name.value.scalar;
    r.value_type = to_value_type(require(node, "valueType"));
    if (auto const* u = node.find("units"); u && !u->value.scalar.empty()) r.units = u->value.scalar;
    if (auto const* sr = node.find("sampleRate")) {
        if (sr->value.kind != FieldValue::Kind::Node || sr->value.node->head != "SampleRate.EventDriven")
            throw ParseError::at_offset(sr->offset, "sampleRate must be SampleRate.EventDriven[]");
        r.sample_rate = SampleRate::EventDriven;
    }
    return r;
}

} // namespace detail

/// Parses exactly one record; trailing whitespace or a trailing comma is
/// allowed. Throws ParseError with the byte offset of the problem.
inline MetricRecord parse_record(std::string_view text) {
    detail::RecordParser p(text);
    auto node = p.parse_node(true);
    auto record = detail::to_record(node);
    if (!p.at_end()) throw ParseError::at_offset(p.position(), "trailing text after record");
    return record;
}

/// Parses a comma/whitespace separated sequence of records.
inline std::vector<MetricRecord> parse_records(std::string_view text) {
    detail::RecordParser p(text);
    std::vector<MetricRecord> out;
    while (!p.at_end()) out.push_back(detail::to_record(p.parse_node(true)));
    return out;
}

inline std::string serialize_record(MetricRecord const& r) {
    std::string out;
    switch (r.kind) {
    case MetricKind::Controlled: out = "ControlledMetricType"; break;
    case MetricKind::Observable: out = "ObservableMetricType"; break;
    case MetricKind::KeyObjective: out = "KeyObjectiveType"; break;
    }
    out += "[name=" + r.name + ",valueType=";
    if (auto const* n = std::get_if<NominalType>(&r.value_type)) {
        out += "ValueType.Nominal[name=" + n->name + ",values={";
        for (std::size_t i = 0; i < n->values.size(); ++i) {
            if (i) out += ", ";
            out += detail::iequals(n->values[i], kNoAllocation) ? std::string(kNoAllocation) : n->values[i];
        }
        out += "},typ=NOMINAL]";
    } else {
        auto const& t = std::get<IntegerType>(r.value_type);
        out += "ValueType.Integer[min=" + std::to_string(t.min) + ",max=" + std::to_string(t.max) + ",typ=INT]";
    }
    out += ",units=" + r.effective_units();
    if (r.sample_rate) out += ",sampleRate=SampleRate.EventDriven[]";
    out += "]";
    return out;
}

/// One bound of a measured cooking time, keyed by "<recipe> <zone> <pot>".
struct DurationBound {
    std::string recipe;
    std::string zone;
    std::string pot;
    bool is_end = false;
    Minutes value = 0;
};

using Observation = std::variant<ResourceUnavailable, DurationBound>;

/// Maps an observable record onto its meaning:
///   "<zone or pot> availability", Integer 0..0   -> ResourceUnavailable
///   "<recipe> <zone> <pot> start|end", Integer v..v -> DurationBound
/// Anything else throws UnmappedObservable.
inline Observation interpret_observable(MetricRecord const& record) {
    if (record.kind != MetricKind::Observable)
        throw UnmappedObservable("'" + record.name + "' is not an observable metric");
    auto const* integer = std::get_if<IntegerType>(&record.value_type);
    auto ends_with = [&](std::string_view suffix) {
        return record.name.size() > suffix.size() &&
               std::string_view(record.name).substr(record.name.size() - suffix.size()) == suffix;
    };
    if (ends_with(" availability")) {
        if (!integer || integer->min != 0 || integer->max != 0)
            throw UnmappedObservable("'" + record.name + "': only availability 0 is mapped");
        return ResourceUnavailable{record.name.substr(0, record.name.size() - 13)};
    }
    bool is_start = ends_with(" start");
    bool is_end = ends_with(" end");
    if (is_start || is_end) {
        if (!integer || integer->min != integer->max)
            throw UnmappedObservable("'" + record.name + "': expected a single integer value");
        auto key = record.name.substr(0, record.name.size() - (is_start ? 6 : 4));
        auto pot_sep = key.rfind(' ');
        auto zone_sep = pot_sep == std::string::npos ? std::string::npos : key.rfind(' ', pot_sep - 1);
        if (zone_sep == std::string::npos || zone_sep == 0)
            throw UnmappedObservable("'" + record.name + "': expected '<recipe> <zone> <pot>'");
        return DurationBound{key.substr(0, zone_sep), key.substr(zone_sep + 1, pot_sep - zone_sep - 1),
                             key.substr(pot_sep + 1), is_end, integer->min};
    }
    throw UnmappedObservable("no mapping for observable '" + record.name + "'");
}

/// Joins start/end halves into DurationOverride effects. Unmatched halves
/// stay pending until their partner arrives.
class ObservableAssembler {
public:
    std::optional<ObservableEffect> feed(MetricRecord const& record) {
        auto obs = interpret_observable(record);
        if (auto const* u = std::get_if<ResourceUnavailable>(&obs)) return ObservableEffect{*u};
        auto const& bound = std::get<DurationBound>(obs);
        auto key = std::make_tuple(bound.recipe, bound.zone, bound.pot);
        auto& half = pending_[key];
        (bound.is_end ? half.end : half.start) = bound.value;
        if (half.start && half.end) {
            DurationOverride d{bound.recipe, bound.zone, bound.pot, *half.start, *half.end};
            pending_.erase(key);
            return ObservableEffect{d};
        }
        return std::nullopt;
    }

    [[nodiscard]] std::size_t pending() const noexcept { return pending_.size(); }

private:
    struct Halves {
        std::optional<Minutes> start;
        std::optional<Minutes> end;
    };
    std::map<std::tuple<std::string, std::string, std::string>, Halves> pending_;
};

/// One Controlled allocation record per instance slot; the domain lists the
/// slot's available resources followed by "No allocation".
inline std::vector<MetricRecord> controlled_metrics_for(Instance const& instance) {
    std::vector<MetricRecord> out;
    out.reserve(instance.slot_count());
    for (std::size_t s = 0; s < instance.slot_count(); ++s) {
        NominalType t;
        auto const& slot = instance.slots()[s];
        t.name = slot.name + " allocation type";
        for (auto r : instance.domain(s)) t.values.push_back(instance.resource(r).display_name());
        t.values.emplace_back(kNoAllocation);
        MetricRecord rec;
        rec.kind = MetricKind::Controlled;
        rec.name = slot.name + " allocation";
        rec.value_type = std::move(t);
        out.push_back(std::move(rec));
    }
    return out;
}

inline std::vector<MetricRecord> controlled_metrics_for(Scenario const& scenario) {
    return controlled_metrics_for(Instance(scenario));
}

} // namespace kitchenforge
