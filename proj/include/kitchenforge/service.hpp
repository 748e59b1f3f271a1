#pragma once

// Optimization as a service on top of a Broker.
//
// A request message on the requests topic looks like
//
//   request-id: 7
//   param: generations=50
//   --- scenario
//   <scenario document>
//   --- metrics
//   <Metrics API records>
//
// Both sections are optional. Without a scenario the last successfully
// optimized scenario is reused, so a metrics-only message re-plans the
// kitchen under new observations. Every request id gets exactly one reply:
// an archive message (plus a report message) or an error message.

#include "broker.hpp"
#include "error.hpp"
#include "instance.hpp"
#include "metrics.hpp"
#include "moead.hpp"
#include "report.hpp"
#include "scenario_io.hpp"

#include <atomic>
#include <chrono>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kitchenforge {

struct Topics {
    std::string requests = "kitchen.requests";
    std::string archive = "kitchen.archive";
    std::string reports = "kitchen.reports";
    std::string errors = "kitchen.errors";
};

struct OptimizationRequest {
    std::string id;
    std::optional<std::string> scenario_document;
    std::string metrics;
    std::map<std::string, std::string> params;
};

inline std::string format_request(OptimizationRequest const& r) {
    std::string out = "request-id: " + r.id + "\n";
    for (auto const& [k, v] : r.params) out += "param: " + k + "=" + v + "\n";
    if (r.scenario_document) {
        out += "--- scenario\n" + *r.scenario_document;
        if (!out.empty() && out.back() != '\n') out += '\n';
    }
    if (!r.metrics.empty()) out += "--- metrics\n" + r.metrics + "\n";
    return out;
}

inline OptimizationRequest parse_request(std::string_view text) {
    OptimizationRequest r;
    enum class Part { Header, Scenario, Metrics } part = Part::Header;
    std::string scenario;
    bool has_scenario = false;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        auto raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() : nl + 1;
        ++line_no;
        auto line = detail::trim(raw);
        if (line == "--- scenario") {
            part = Part::Scenario;
            has_scenario = true;
            continue;
        }
        if (line == "--- metrics") {
            part = Part::Metrics;
            continue;
        }
        switch (part) {
        case Part::Scenario: scenario.append(raw).push_back('\n'); break;
        case Part::Metrics: r.metrics.append(raw).push_back('\n'); break;
        case Part::Header:
            if (line.empty()) break;
            if (line.starts_with("request-id:")) {
                r.id = std::string(detail::trim(line.substr(11)));
            } else if (line.starts_with("param:")) {
                auto kv = detail::trim(line.substr(6));
                auto eq = kv.find('=');
                if (eq == std::string_view::npos) throw ParseError::at_line(line_no, "param needs key=value");
                r.params[std::string(detail::trim(kv.substr(0, eq)))] = std::string(detail::trim(kv.substr(eq + 1)));
            } else {
                throw ParseError::at_line(line_no, "unexpected request header '" + std::string(line) + "'");
            }
            break;
        }
    }
    if (r.id.empty()) throw ParseError::at_line(1, "request has no request-id");
    if (has_scenario) r.scenario_document = std::move(scenario);
    return r;
}

/// Applies request parameter overrides (`pop-granularity`, `neighbors`,
/// `generations`, `mutation-rate`, `seed`, `workers`) to `base`.
inline MoeadParams apply_params(MoeadParams base, std::map<std::string, std::string> const& params) {
    for (auto const& [key, value] : params) {
        try {
            if (key == "pop-granularity") base.granularity = std::stoi(value);
            else if (key == "neighbors") base.neighbors = std::stoul(value);
            else if (key == "generations") base.generations = std::stoi(value);
            else if (key == "mutation-rate") base.mutation_rate = std::stod(value);
            else if (key == "seed") base.seed = std::stoull(value);
            else if (key == "workers") base.workers = static_cast<unsigned>(std::stoul(value));
            else throw std::invalid_argument("unknown parameter '" + key + "'");
        } catch (std::invalid_argument const&) {
            throw;
        } catch (std::exception const&) {
            throw std::invalid_argument("bad value for parameter '" + key + "'");
        }
    }
    validate(base);
    return base;
}

struct ServiceReply {
    std::string id;
    RunResult run;
    std::vector<ArchiveEntry> front; // archive in canonical order
    std::optional<std::size_t> knee;
    Schedule knee_schedule;
    std::string report;
    std::string archive_payload;
};

class KitchenService {
public:
    KitchenService(Broker& broker, Topics topics = {}, MoeadParams defaults = {})
        : broker_(broker), topics_(std::move(topics)), defaults_(defaults) {}

    /// Runs one request; throws on malformed input without touching state.
    ServiceReply handle_request(OptimizationRequest const& request) {
        auto const t0 = std::chrono::steady_clock::now();
        Scenario scenario;
        if (request.scenario_document) {
            scenario = load_scenario(*request.scenario_document);
        } else if (last_scenario_) {
            scenario = *last_scenario_;
        } else {
            throw std::invalid_argument("request has no scenario and none was loaded before");
        }
        auto assembler = assembler_;
        for (auto const& record : parse_records(request.metrics)) {
            if (record.kind != MetricKind::Observable) continue;
            if (auto effect = assembler.feed(record)) scenario = apply_effect(std::move(scenario), *effect);
        }
        auto params = apply_params(defaults_, request.params);

        Instance inst(scenario);
        if (auto missing = inst.uncoverable_foods(); !missing.empty())
            throw std::invalid_argument("infeasible order: nothing can cook '" + missing.front() + "'");

        ServiceReply reply;
        reply.id = request.id;
        reply.run = run_moead(inst, params);
        reply.front = reply.run.archive.sorted();
        reply.knee = knee_point(reply.front, reply.run.bounds);
        if (reply.knee) reply.knee_schedule = decode(reply.front[*reply.knee].chromosome, inst);
        else reply.knee_schedule.lanes.assign(inst.resource_count(), {});
        double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        reply.report = render_report(reply.knee_schedule, inst, wall);

        std::string payload = "request-id: " + request.id + "\npoints: " + std::to_string(reply.front.size()) + "\n";
        for (auto const& e : reply.front) {
            payload += format_objective_line(e.objectives) + "\n";
            payload += format_chromosome_line(e.chromosome, inst) + "\n";
        }
        reply.archive_payload = std::move(payload);

        last_scenario_ = std::move(scenario);
        assembler_ = std::move(assembler);
        return reply;
    }

    /// Handles one raw request message and publishes exactly one reply.
    void process(std::string const& message) {
        std::string id = "unknown";
        try {
            auto request = parse_request(message);
            id = request.id;
            auto reply = handle_request(request);
            broker_.publish(topics_.archive, reply.archive_payload);
            broker_.publish(topics_.reports, "request-id: " + id + "\n" + reply.report);
        } catch (BrokerError const&) {
            throw;
        } catch (std::exception const& e) {
            broker_.publish(topics_.errors, "request-id: " + id + "\nerror: " + e.what() + "\n");
        }
    }

    /// Consumes the requests topic until `stop` is set or the broker ends.
    void run(std::atomic<bool> const& stop) {
        auto sub = broker_.subscribe(topics_.requests);
        while (!stop) {
            auto message = sub->next(std::chrono::milliseconds(100));
            if (message) {
                process(*message);
            } else if (sub->closed()) {
                return;
            }
        }
    }

    [[nodiscard]] Topics const& topics() const noexcept { return topics_; }

private:
    Broker& broker_;
    Topics topics_;
    MoeadParams defaults_;
    std::optional<Scenario> last_scenario_;
    ObservableAssembler assembler_;
};

/// Value of the `request-id:` header of a reply payload.
inline std::string reply_id(std::string_view payload) {
    constexpr std::string_view kHead = "request-id: ";
    if (!payload.starts_with(kHead)) return {};
    auto nl = payload.find('\n');
    return std::string(payload.substr(kHead.size(), nl == std::string_view::npos ? payload.npos : nl - kHead.size()));
}

} // namespace kitchenforge
