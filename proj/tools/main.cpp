#include <CLI11.hpp>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "lmeas/report.hpp"

namespace fs = std::filesystem;
using namespace lmeas;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

std::uint64_t default_depth() {
    if (const char* env = std::getenv("LMEAS_DEPTH")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v >= 4) return v;
    }
    return 0; // 0 = use each scenario's own depth
}

int cmd_run(const std::vector<std::string>& files, const std::string& format,
            const std::string& out_dir, std::uint64_t depth, unsigned jobs,
            std::optional<std::uint64_t> seed) {
    std::vector<Scenario> scenarios;
    if (files.empty()) {
        scenarios = builtin_scenarios();
    } else {
        for (const auto& f : files) {
            try {
                scenarios.push_back(Scenario::parse(read_file(f)));
            } catch (const ParseError& e) {
                std::cerr << f << ": parse error: " << e.what() << "\n";
                return 1;
            } catch (const Error& e) {
                std::cerr << f << ": " << e.what() << "\n";
                return 1;
            }
        }
    }
    for (auto& s : scenarios) {
        if (depth) s.depth = depth;
        if (seed) s.seed = *seed;
    }

    std::vector<TheoremReport> reports(scenarios.size());
    std::vector<std::string> errors(scenarios.size());
    std::atomic<std::size_t> next{0};
    unsigned nthreads = jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : jobs;
    nthreads = std::min<unsigned>(nthreads, scenarios.size() == 0 ? 1 : scenarios.size());
    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= scenarios.size()) break;
            try {
                reports[i] = run_scenario(scenarios[i]);
            } catch (const Error& e) {
                errors[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        if (!errors[i].empty()) {
            std::cerr << scenarios[i].name << ": " << errors[i] << "\n";
            return 1;
        }
    }

    fs::create_directories(out_dir);
    for (const auto& rep : reports)
        write_file(fs::path(out_dir) / (rep.scenario + ".report.json"), report_json(rep));
    std::string index = format == "csv"  ? index_csv(reports)
                        : format == "md" ? index_md(reports)
                                         : index_json(reports);
    std::string ext = format == "csv" ? "csv" : format == "md" ? "md" : "json";
    write_file(fs::path(out_dir) / ("index." + ext), index);

    bool violation = false;
    for (const auto& rep : reports) {
        std::cout << rep.scenario << ": " << outcome_str(rep.conclusion.outcome)
                  << (rep.violation_flag ? " [THEOREM-VIOLATION]" : "") << "\n";
        violation = violation || rep.violation_flag;
    }
    return violation ? 2 : 0;
}

int cmd_list() {
    std::cout << "name | theorem | depth\n";
    for (const auto& s : builtin_scenarios())
        std::cout << s.name << " | " << s.theorem_id << " | " << s.depth << "\n";
    return 0;
}

int cmd_check(const std::string& file, const std::string& property, std::uint64_t depth) {
    SExpr e = parse_sexpr(read_file(file));
    auto args = e.expect_tagged("check");
    std::optional<Charge> m, nu;
    for (const auto& sec : args) {
        if (sec.head() == "m") m = Charge::from_sexpr(sec[1]);
        if (sec.head() == "nu") nu = Charge::from_sexpr(sec[1]);
    }
    if (!m) throw Error("check file needs an (m <charge>) section");
    Verdict v = Verdict::unknown(depth);
    if (property == "purely-finitely-additive") {
        v = check_purely_finitely_additive(*m, depth);
    } else if (property == "continuous") {
        v = check_continuous(*m, depth);
    } else if (property == "absolutely-continuous") {
        if (!nu) throw Error("property needs a (nu <charge>) section");
        v = check_absolutely_continuous(*m, *nu, depth);
    } else if (property == "singular") {
        if (!nu) throw Error("property needs a (nu <charge>) section");
        v = check_singular(*m, *nu, depth);
    } else {
        std::cerr << "unknown property id '" << property << "'\n";
        return 1;
    }
    std::cout << v.str() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vector-lattice-valued measures: decompositions and filter-convergence checks"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run scenario files (or the builtin suite)");
    std::vector<std::string> files;
    std::string format = "json";
    std::string out_dir = "reports";
    std::uint64_t depth = default_depth();
    unsigned jobs = 0;
    std::optional<std::uint64_t> seed;
    std::uint64_t seed_raw = 0;
    run->add_option("files", files, "scenario files (empty = builtin suite)");
    run->add_option("--format", format, "json|csv|md")
        ->check(CLI::IsMember({"json", "csv", "md"}));
    run->add_option("--out", out_dir, "output directory");
    auto* depth_opt = run->add_option("--depth", depth, "depth override (>= 4)");
    run->add_option("--jobs", jobs, "parallel scenario workers (0 = auto)");
    auto* seed_opt = run->add_option("--seed", seed_raw, "seed override");

    auto* list = app.add_subcommand("list", "list builtin scenarios");

    auto* check = app.add_subcommand("check", "evaluate a single property of a measure");
    std::string check_file, property;
    std::uint64_t check_depth = 16;
    check->add_option("file", check_file, "measure file")->required();
    check->add_option("--property", property, "property id")->required();
    check->add_option("--depth", check_depth, "truncation depth");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (*depth_opt && depth < 4) {
                std::cerr << "--depth must be >= 4\n";
                return 1;
            }
            if (*seed_opt) seed = seed_raw;
            return cmd_run(files, format, out_dir, *depth_opt ? depth : default_depth(), jobs,
                           seed);
        }
        if (list->parsed()) return cmd_list();
        if (check->parsed()) return cmd_check(check_file, property, check_depth);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
