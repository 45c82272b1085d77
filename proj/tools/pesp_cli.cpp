// Command-line front end: solve (cutting-plane engine), oracle (exact
// ground truth at desk scale), check (replay cuts against a point), and
// restrict (write a mu-restricted instance).

#include <CLI11.hpp>
#include <json.hpp>

#include "pesp/engine.hpp"
#include "pesp/io.hpp"
#include "pesp/oracle.hpp"

#include <fstream>
#include <iostream>
#include <string>

namespace {

pesp::PespInstance load(const std::string& path, int64_t period) {
    return pesp::preprocess(pesp::parse_activities(path, period));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Split-closure dual bounds for periodic event scheduling"};
    app.require_subcommand(1);

    std::string file, log_path, json_path, cuts_path, point_path, out_path, mode = "split";
    std::string alpha_order = "desc";
    int64_t period = 60;
    int mu = -1, threads = 1;
    double time_limit = 3600.0;
    bool heuristic_only = false;

    auto* solve = app.add_subcommand("solve", "run the cutting-plane engine");
    solve->add_option("file", file)->required();
    solve->add_option("--period", period)->required();
    solve->add_option("--time-limit", time_limit);
    solve->add_option("--mu", mu);
    solve->add_option("--alpha-order", alpha_order)->check(CLI::IsMember({"desc", "asc"}));
    solve->add_flag("--heuristic-only", heuristic_only);
    solve->add_option("--log", log_path);
    solve->add_option("--json", json_path);
    solve->add_option("--threads", threads);

    auto* oracle = app.add_subcommand("oracle", "exact brute-force values");
    oracle->add_option("file", file)->required();
    oracle->add_option("--period", period)->required();
    oracle->add_option("--mode", mode)->check(CLI::IsMember({"ip", "split"}));

    auto* check = app.add_subcommand("check", "replay cuts against a point");
    check->add_option("file", file)->required();
    check->add_option("--period", period)->required();
    check->add_option("--cuts", cuts_path)->required();
    check->add_option("--point", point_path)->required();

    auto* restrict_cmd = app.add_subcommand("restrict", "write a mu-restricted instance");
    restrict_cmd->add_option("file", file)->required();
    restrict_cmd->add_option("--period", period)->required();
    restrict_cmd->add_option("--mu", mu)->required();
    restrict_cmd->add_option("--out", out_path)->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*solve) {
            pesp::PespInstance inst = load(file, period);
            if (mu >= 0) inst = pesp::restrict_to_mu(inst, mu);
            pesp::EngineConfig config;
            config.time_limit = time_limit;
            config.alpha_order =
                alpha_order == "asc" ? pesp::AlphaOrder::Ascending : pesp::AlphaOrder::Descending;
            config.heuristic_only = heuristic_only;
            config.threads = threads;
            pesp::Report report = pesp::run(inst, config);
            std::cout << "status        " << pesp::to_string(report.status) << "\n"
                      << "bound (w.x)   " << report.bound_wx << "\n"
                      << "bound (slack) " << report.bound_slack << "\n"
                      << "cuts          " << report.cuts_total << " (" << report.cuts_exact
                      << " exact)\n"
                      << "runtime       " << report.runtime_s << " s\n";
            if (!log_path.empty()) pesp::write_csv_log(log_path, report);
            if (!json_path.empty()) {
                std::ofstream out(json_path);
                out << pesp::report_to_json(inst, file, report).dump(2) << "\n";
            }
        } else if (*oracle) {
            pesp::PespInstance inst = load(file, period);
            pesp::OracleBudget budget;
            auto [value, witness] = mode == "ip" ? pesp::ip_optimum(inst, budget)
                                                 : pesp::split_closure_optimum(inst, budget);
            std::cout << (mode == "ip" ? "ip optimum    " : "split optimum ")
                      << pesp::rat_to_string(value) << " (" << pesp::to_double(value) << ")\n";
            (void)witness;
        } else if (*check) {
            pesp::PespInstance inst = load(file, period);
            std::ifstream cf(cuts_path), pf(point_path);
            if (!cf) throw pesp::IoError("cannot open " + cuts_path);
            if (!pf) throw pesp::IoError("cannot open " + point_path);
            nlohmann::json cuts_json = nlohmann::json::parse(cf);
            pesp::Tension x = pesp::point_from_json(nlohmann::json::parse(pf));
            if (cuts_json.is_object() && cuts_json.contains("cuts"))
                cuts_json = cuts_json["cuts"];  // accept a full report too
            int violated = 0;
            for (const auto& cj : cuts_json) {
                pesp::FlipCut cut = pesp::cut_from_json(inst, cj);
                pesp::Rat v = pesp::violation(cut, x);
                bool is_violated = v > pesp::Rat(1, 1000000);
                violated += is_violated;
                std::cout << pesp::cut_key(inst, cut.gamma, cut.F) << " violation "
                          << pesp::rat_to_string(v) << (is_violated ? "  VIOLATED" : "") << "\n";
            }
            std::cout << violated << "/" << cuts_json.size() << " cuts violated\n";
        } else if (*restrict_cmd) {
            pesp::PespInstance inst = load(file, period);
            pesp::write_activities(out_path, pesp::restrict_to_mu(inst, mu));
            std::cout << "wrote " << out_path << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
