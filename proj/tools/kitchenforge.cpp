// kitchenforge: batch optimizer, scenario checker, exact oracle, and the
// broker-backed optimization service with a matching request client.

#include <kitchenforge/kitchenforge.hpp>

#include "CLI11.hpp"

#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace kitchenforge;

namespace {

constexpr int kExitParse = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitBudget = 3;
constexpr int kExitErrorReply = 4;
constexpr int kExitTimeout = 5;

volatile std::sig_atomic_t g_signalled = 0;

extern "C" void on_signal(int) { g_signalled = 1; }

struct EngineFlags {
    int granularity = 12;
    std::size_t neighbors = 10;
    int generations = 200;
    double mutation_rate = -1.0;
    std::uint64_t seed = 42;
    unsigned workers = 1;

    [[nodiscard]] MoeadParams params() const {
        MoeadParams p;
        p.granularity = granularity;
        p.neighbors = neighbors;
        p.generations = generations;
        if (mutation_rate >= 0.0) p.mutation_rate = mutation_rate;
        p.seed = seed;
        p.workers = workers;
        return p;
    }
};

void add_engine_flags(CLI::App* cmd, EngineFlags& f) {
    cmd->add_option("--seed", f.seed, "RNG seed")->capture_default_str();
    cmd->add_option("--generations", f.generations, "Generations")->capture_default_str();
    cmd->add_option("--pop-granularity", f.granularity, "Weight lattice granularity H")->capture_default_str();
    cmd->add_option("--neighbors", f.neighbors, "Neighborhood size T")->capture_default_str();
    cmd->add_option("--mutation-rate", f.mutation_rate, "Per-gene mutation rate (default 1/slots)");
    cmd->add_option("--workers", f.workers, "Evaluation threads")->capture_default_str();
}

void write_file(fs::path const& path, std::string const& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::string read_file(std::string const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Loads and compiles a scenario; parse and validation problems exit 1.
std::optional<Instance> load_instance(std::string const& path) {
    try {
        return Instance(load_scenario_file(path));
    } catch (ParseError const& e) {
        std::cerr << path << ": " << e.what() << "\n";
    } catch (ValidationError const& e) {
        std::cerr << path << ": invalid scenario: " << e.what() << "\n";
    } catch (std::exception const& e) {
        std::cerr << e.what() << "\n";
    }
    return std::nullopt;
}

bool report_uncoverable(Instance const& inst) {
    auto missing = inst.uncoverable_foods();
    for (auto const& food : missing) std::cerr << "infeasible order: no usable recipe can cook '" << food << "'\n";
    return !missing.empty();
}

int cmd_optimize(std::string const& scenario_path, EngineFlags const& flags, std::string const& out_dir,
                 bool timed_report) {
    auto inst = load_instance(scenario_path);
    if (!inst) return kExitParse;
    if (report_uncoverable(*inst)) return kExitInfeasible;

    auto result = run_moead(*inst, flags.params());
    auto front = result.archive.sorted();
    Schedule schedule;
    schedule.lanes.assign(inst->resource_count(), {});
    if (auto knee = knee_point(front, result.bounds)) schedule = decode(front[*knee].chromosome, *inst);

    fs::path dir(out_dir);
    fs::create_directories(dir);
    write_file(dir / "pareto.csv", pareto_csv(result.archive));
    write_file(dir / "pareto.gnuplot", pareto_gnuplot("pareto.csv"));
    write_file(dir / "report.txt", timed_report ? render_report(schedule, *inst, result.stats.wall_seconds)
                                                : render_report(schedule, *inst, std::nullopt));
    write_file(dir / "gantt.txt", render_gantt(schedule, *inst));

    std::ostringstream stats;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", result.stats.wall_seconds);
    stats << "Optimisation took: " << buf << " seconds\n"
          << "slots: " << inst->slot_count() << "\n"
          << "population: " << result.stats.population << "\n"
          << "generations: " << result.stats.generations << "\n"
          << "evaluations: " << result.stats.evaluations << "\n"
          << "archive: " << front.size() << " points\n";
    write_file(dir / "run_stats.txt", stats.str());
    std::cout << stats.str() << "outputs written to " << dir.string() << "\n";
    return 0;
}

int cmd_validate(std::string const& scenario_path) {
    auto inst = load_instance(scenario_path);
    if (!inst) return kExitParse;
    auto const& s = inst->scenario();

    std::cout << "slot expansion:\n";
    auto counts = slot_counts(s);
    for (std::size_t r = 0; r < s.recipes.size(); ++r) {
        if (counts[r] > 0) std::cout << "  " << s.recipes[r].label() << ": " << counts[r] << "\n";
    }
    std::cout << "\ncontrolled metrics:\n";
    for (auto const& record : controlled_metrics_for(*inst)) std::cout << serialize_record(record) << "\n";
    std::cout << "\nexclusion groups:\n";
    for (auto const& g : s.exclusion_groups) {
        std::cout << " ";
        for (auto const& m : g.members) std::cout << " " << m;
        std::cout << "\n";
    }
    for (auto const& food : inst->uncoverable_foods())
        std::cout << "\nwarning: order for '" << food << "' cannot be covered\n";
    std::cout << "\n"
              << s.recipes.size() << " recipes, " << s.food_types().size() << " food types, " << s.resources.size()
              << " resources, " << inst->slot_count() << " slots\n";
    return 0;
}

int cmd_oracle(std::string const& scenario_path, unsigned long long budget) {
    auto inst = load_instance(scenario_path);
    if (!inst) return kExitParse;
    try {
        auto front = enumerate_pareto(*inst, EnumerationBudget{budget});
        ParetoArchive archive;
        for (auto const& v : front) archive.insert({}, v);
        std::cout << pareto_csv(archive);
    } catch (BudgetExceeded const& e) {
        std::cerr << e.what() << " (budget " << budget << ")\n";
        return kExitBudget;
    }
    return 0;
}

int cmd_serve(std::string const& addr_text, EngineFlags const& flags) {
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    auto addr = parse_broker_address(addr_text);
    TcpBrokerServer server(addr);
    std::cout << "broker listening on " << server.address().host << ":" << server.address().port << std::endl;

    KitchenService service(server.broker(), Topics{}, flags.params());
    std::atomic<bool> stop{false};
    std::thread loop([&] { service.run(stop); });
    while (!g_signalled) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    stop = true;
    loop.join();
    server.stop();
    std::cout << "broker stopped" << std::endl;
    return 0;
}

int cmd_request(std::string const& addr_text, std::string const& id, std::string const& scenario_path,
                std::string const& metrics_path, std::vector<std::string> const& params, double timeout_s,
                std::string const& archive_out) {
    OptimizationRequest request;
    request.id = id;
    if (!scenario_path.empty()) request.scenario_document = read_file(scenario_path);
    if (!metrics_path.empty()) request.metrics = read_file(metrics_path);
    for (auto const& p : params) {
        auto eq = p.find('=');
        if (eq == std::string::npos) {
            std::cerr << "--param expects key=value, got '" << p << "'\n";
            return kExitParse;
        }
        request.params[p.substr(0, eq)] = p.substr(eq + 1);
    }

    TcpBroker broker(parse_broker_address(addr_text));
    Topics topics;
    auto reports = broker.subscribe(topics.reports);
    auto archives = broker.subscribe(topics.archive);
    auto errors = broker.subscribe(topics.errors);
    broker.publish(topics.requests, format_request(request));

    auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
    std::optional<std::string> report;
    std::optional<std::string> archive;
    while (std::chrono::steady_clock::now() < deadline && !(report && archive)) {
        if (auto e = errors->next(std::chrono::milliseconds(20)); e && reply_id(*e) == id) {
            std::cerr << *e;
            return kExitErrorReply;
        }
        if (!archive) {
            if (auto a = archives->next(std::chrono::milliseconds(20)); a && reply_id(*a) == id) archive = *a;
        }
        if (!report) {
            if (auto r = reports->next(std::chrono::milliseconds(20)); r && reply_id(*r) == id) report = *r;
        }
    }
    if (!(report && archive)) {
        std::cerr << "no reply for request '" << id << "' within " << timeout_s << " s\n";
        return kExitTimeout;
    }
    if (!archive_out.empty()) write_file(archive_out, *archive);
    std::cout << *report;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-objective cooking plan optimizer"};
    app.require_subcommand(1);

    std::string scenario_path;
    EngineFlags flags;
    std::string out_dir = ".";
    bool timed_report = false;
    auto* optimize = app.add_subcommand("optimize", "Optimize a scenario and write the front, report and Gantt");
    optimize->add_option("--scenario", scenario_path, "Scenario file")->required();
    add_engine_flags(optimize, flags);
    optimize->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
    optimize->add_flag("--timed-report", timed_report, "Include the wall-time line in report.txt");

    auto* validate = app.add_subcommand("validate", "Check a scenario and print its controlled metrics");
    validate->add_option("--scenario", scenario_path, "Scenario file")->required();

    unsigned long long budget = EnumerationBudget{}.max_combinations;
    auto* oracle = app.add_subcommand("oracle", "Exact Pareto front of a tiny scenario by enumeration");
    oracle->add_option("--scenario", scenario_path, "Scenario file")->required();
    oracle->add_option("--budget", budget, "Maximum number of enumerated combinations")->capture_default_str();

    std::string broker_addr;
    auto* serve = app.add_subcommand("serve", "Run the broker and the optimization service");
    serve->add_option("--broker-addr", broker_addr, "host:port (default $KITCHENFORGE_BROKER_ADDR or 127.0.0.1:9092)");
    add_engine_flags(serve, flags);

    std::string request_id = "1";
    std::string metrics_path;
    std::vector<std::string> params;
    double timeout_s = 120.0;
    std::string archive_out;
    auto* request = app.add_subcommand("request", "Send one optimization request and print the report");
    request->add_option("--broker-addr", broker_addr, "host:port");
    request->add_option("--id", request_id, "Request id")->capture_default_str();
    request->add_option("--scenario", scenario_path, "Scenario file (omit to reuse the service's last one)");
    request->add_option("--metrics", metrics_path, "File with observable metric records");
    request->add_option("--param", params, "Engine parameter override key=value");
    request->add_option("--timeout", timeout_s, "Seconds to wait for the reply")->capture_default_str();
    request->add_option("--archive-out", archive_out, "Write the archive reply to this file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*optimize) return cmd_optimize(scenario_path, flags, out_dir, timed_report);
        if (*validate) return cmd_validate(scenario_path);
        if (*oracle) return cmd_oracle(scenario_path, budget);
        if (*serve) return cmd_serve(broker_addr, flags);
        if (*request)
            return cmd_request(broker_addr, request_id, scenario_path, metrics_path, params, timeout_s, archive_out);
    } catch (std::invalid_argument const& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
