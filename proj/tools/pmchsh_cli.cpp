// Copyright 2026 The pmchsh Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Exit codes: 0 success, 2 usage error, 3 when a
// verification command (stress/mixture) finds a bound violation, 4 when a
// command that requires the qubit source assumption encounters a scenario
// violating it. Analysis commands report assumption failures in-band.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pmchsh/attacks.hpp"
#include "pmchsh/json_io.hpp"
#include "pmchsh/report.hpp"
#include "pmchsh/verify.hpp"

namespace {

using namespace pmchsh;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitViolation = 3;
constexpr int kExitAssumption = 4;

struct GlobalOpts {
    std::string format = "json";
    std::string out;
    double tol = kDefaultTol;
};

void emit(const GlobalOpts& g, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream f(g.out);
    if (!f) throw std::runtime_error("cannot open output file: " + g.out);
    f << text << "\n";
}

Scenario load_scenario(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open scenario file: " + path);
    Json j;
    f >> j;
    return scenario_from_json(j);
}

std::string csv_join(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
    std::ostringstream out;
    for (size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    for (const auto& row : rows)
        for (size_t i = 0; i < row.size(); ++i)
            // Shortest round-trip formatting, identical to the JSON output.
            out << Json(row[i]).dump() << (i + 1 < row.size() ? "," : "\n");
    std::string s = out.str();
    if (!s.empty() && s.back() == '\n') s.pop_back();
    return s;
}

int cmd_analyze(const GlobalOpts& g, const std::string& path,
                std::optional<double> epsilon) {
    const Scenario s = load_scenario(path);
    const AnalysisReport r = analyze(s, epsilon, g.tol);
    if (g.format == "csv") {
        emit(g, csv_join({"s", "d", "bound", "h_min", "slack"},
                         {{r.secrecy.s_value, r.secrecy.trace_distance,
                           r.secrecy.bound_rhs, r.secrecy.min_entropy,
                           r.secrecy.bound_slack}}));
    } else {
        emit(g, analysis_to_json(r).dump(2));
    }
    return kExitOk;
}

int cmd_bound(const GlobalOpts& g, std::optional<double> s_value, bool curve,
              int points, double s_min, double s_max) {
    if (curve) {
        if (points < 2) throw CLI::ValidationError("--points must be >= 2");
        std::vector<std::vector<double>> rows;
        for (int i = 0; i < points; ++i) {
            const double s = s_min + (s_max - s_min) * i / (points - 1);
            rows.push_back(
                {s, trace_distance_bound(s), chsh_min_entropy_bound(s)});
        }
        if (g.format == "csv") {
            emit(g, csv_join({"s", "d_bound", "h_min_bound"}, rows));
        } else {
            Json j = Json::array();
            for (const auto& row : rows)
                j.push_back({{"s", row[0]},
                             {"d_bound", row[1]},
                             {"h_min_bound", row[2]}});
            emit(g, j.dump(2));
        }
        return kExitOk;
    }
    if (!s_value) throw CLI::ValidationError("bound: need --s or --curve");
    const double h = chsh_min_entropy_bound(*s_value);
    if (g.format == "csv")
        emit(g, csv_join({"s", "h_min_bound"}, {{*s_value, h}}));
    else
        emit(g, Json{{"h_min_bound", h}}.dump());
    return kExitOk;
}

int cmd_attack(const GlobalOpts& g, std::optional<double> f_z,
               std::optional<double> s_target, Eigen::Index dim_e) {
    if (f_z.has_value() == s_target.has_value())
        throw CLI::ValidationError(
            "attack: need exactly one of --fz or --s-target");
    double f;
    if (f_z) {
        f = *f_z;
    } else {
        if (*s_target < 2.0 || *s_target > kTsirelson + 1e-12)
            throw CLI::ValidationError(
                "attack: --s-target must lie in [2, 2*sqrt(2)]");
        f = std::sqrt(std::max(0.0, *s_target * *s_target / 4.0 - 1.0));
    }
    const Scenario s = optimal_attack({f, dim_e});
    const SecrecyReport r = secrecy_report(s, g.tol);
    if (g.format == "csv") {
        emit(g, csv_join({"f_z", "s", "d", "h_min"},
                         {{f, r.s_value, r.trace_distance, r.min_entropy}}));
    } else {
        Json j = {{"f_z", f},
                  {"s", r.s_value},
                  {"d", r.trace_distance},
                  {"h_min", r.min_entropy},
                  {"scenario", scenario_to_json(s)}};
        emit(g, j.dump(2));
    }
    return kExitOk;
}

int cmd_counterexample(const GlobalOpts& g) {
    const Scenario s = bb84_counterexample();
    const AnalysisReport r = analyze(s, std::nullopt, g.tol);
    if (g.format == "csv") {
        emit(g, csv_join({"s", "d", "support_dim"},
                         {{r.secrecy.s_value, r.secrecy.trace_distance,
                           static_cast<double>(r.support_dim)}}));
    } else {
        Json j = analysis_to_json(r);
        j["scenario"] = scenario_to_json(s);
        emit(g, j.dump(2));
    }
    return kExitOk;
}

int cmd_stress(const GlobalOpts& g, int trials, std::uint64_t seed,
               Eigen::Index dim_b, Eigen::Index dim_e) {
    CampaignConfig cfg;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.dim_b = dim_b;
    cfg.dim_e = dim_e;
    cfg.tolerance = g.tol;
    std::vector<TrialRow> rows;
    const CampaignResult res =
        run_campaign(cfg, g.format == "csv" ? &rows : nullptr);
    if (g.format == "csv") {
        std::vector<std::vector<double>> data;
        for (const TrialRow& row : rows)
            data.push_back({static_cast<double>(row.seed), row.s, row.d,
                            row.bound, row.slack});
        emit(g, csv_join({"seed", "s", "d", "bound", "slack"}, data));
    } else {
        emit(g, campaign_to_json(res).dump(2));
    }
    return res.violations.empty() ? kExitOk : kExitViolation;
}

int cmd_mixture(const GlobalOpts& g, const std::vector<std::uint64_t>& seeds,
                const std::vector<double>& weights, Eigen::Index dim_b,
                Eigen::Index dim_e) {
    const MixtureCheck m = mixture_check(seeds, weights, dim_b, dim_e, g.tol);
    if (g.format == "csv") {
        emit(g, csv_join({"avg_s", "avg_d", "bound", "slack", "ok"},
                         {{m.avg_s, m.avg_d, m.bound, m.slack,
                           m.ok ? 1.0 : 0.0}}));
    } else {
        emit(g, mixture_to_json(m).dump(2));
    }
    return m.ok ? kExitOk : kExitViolation;
}

int cmd_optimize(const GlobalOpts& g, double s_target, int restarts,
                 int iterations, std::uint64_t seed, Eigen::Index dim_e) {
    const OptimizedAttack best =
        optimize_attack(s_target, dim_e, restarts, iterations, seed);
    if (g.format == "csv") {
        emit(g, csv_join({"s_target", "s_achieved", "best_d", "analytic_bound"},
                         {{s_target, best.s_achieved, best.best_d,
                           trace_distance_bound(s_target)}}));
    } else {
        Json j = {{"s_target", s_target},
                  {"s_achieved", best.s_achieved},
                  {"best_d", best.best_d},
                  {"analytic_bound", trace_distance_bound(s_target)},
                  {"scenario", scenario_to_json(best.scenario)}};
        emit(g, j.dump(2));
    }
    return kExitOk;
}

int cmd_jordan(const GlobalOpts& g, const std::string& path) {
    const Scenario s = load_scenario(path);
    require_valid(s, g.tol);
    const SourceGeometry geo = source_geometry(s);  // may throw (exit 4)
    BlockDecomposition d = block_weights_and_scores(
        s, geo, joint_block_diagonalize(s.obs_u, s.obs_v));
    if (g.format == "csv") {
        std::vector<std::vector<double>> rows;
        for (size_t k = 0; k < d.blocks.size(); ++k)
            rows.push_back({static_cast<double>(k),
                            static_cast<double>(d.blocks[k].dim()),
                            d.blocks[k].gamma, d.per_block[k].p,
                            d.per_block[k].s});
        emit(g, csv_join({"index", "dimension", "gamma", "p", "s"}, rows));
    } else {
        Json blocks = Json::array();
        for (size_t k = 0; k < d.blocks.size(); ++k)
            blocks.push_back({{"index", k},
                              {"dimension", d.blocks[k].dim()},
                              {"gamma", d.blocks[k].gamma},
                              {"p", d.per_block[k].p},
                              {"s", d.per_block[k].s},
                              {"basis", matrix_to_json(d.blocks[k].basis)}});
        emit(g, Json{{"schema", 1}, {"blocks", blocks}}.dump(2));
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"prepare-and-measure CHSH secrecy analysis"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOpts g;
    app.add_option("--format", g.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    app.add_option("--out", g.out, "write output to a file instead of stdout");
    app.add_option("--tol", g.tol, "numerical tolerance")
        ->capture_default_str();

    // analyze
    std::string analyze_path;
    double analyze_eps = -1.0;
    bool analyze_has_eps = false;
    auto* analyze_cmd =
        app.add_subcommand("analyze", "full analysis of a scenario file");
    analyze_cmd->add_option("path", analyze_path, "scenario JSON file")
        ->required();
    analyze_cmd
        ->add_option("--epsilon", analyze_eps,
                     "qubit-deviation for the robust bound")
        ->check(CLI::NonNegativeNumber)
        ->each([&](const std::string&) { analyze_has_eps = true; });

    // bound
    double bound_s = 0.0;
    bool bound_has_s = false;
    bool bound_curve = false;
    int bound_points = 100;
    double bound_s_min = 2.0;
    double bound_s_max = kTsirelson;
    auto* bound_cmd =
        app.add_subcommand("bound", "min-entropy bound for a CHSH value");
    bound_cmd->add_option("--s", bound_s, "CHSH value")->each(
        [&](const std::string&) { bound_has_s = true; });
    bound_cmd->add_flag("--curve", bound_curve, "emit the tradeoff curve");
    bound_cmd->add_option("--points", bound_points, "grid size")
        ->capture_default_str();
    bound_cmd->add_option("--s-min", bound_s_min, "grid start")
        ->capture_default_str();
    bound_cmd->add_option("--s-max", bound_s_max, "grid end")
        ->capture_default_str();

    // attack
    double attack_fz = 0.0, attack_starget = 0.0;
    bool has_fz = false, has_starget = false;
    Eigen::Index attack_dim_e = 2;
    auto* attack_cmd =
        app.add_subcommand("attack", "construct the tight attack");
    attack_cmd->add_option("--fz", attack_fz, "Eve-state overlap in [0,1]")
        ->each([&](const std::string&) { has_fz = true; });
    attack_cmd
        ->add_option("--s-target", attack_starget,
                     "CHSH value to attack (inverts the overlap)")
        ->each([&](const std::string&) { has_starget = true; });
    attack_cmd->add_option("--dim-e", attack_dim_e, "Eve dimension")
        ->capture_default_str();

    // counterexample
    auto* ce_cmd = app.add_subcommand(
        "counterexample", "duplicate-state source beating the bound");

    // stress
    int stress_trials = 1000;
    std::uint64_t stress_seed = 0;
    Eigen::Index stress_dim_b = 2, stress_dim_e = 2;
    auto* stress_cmd =
        app.add_subcommand("stress", "seeded property campaign");
    stress_cmd->add_option("--trials", stress_trials, "number of instances")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    stress_cmd->add_option("--seed", stress_seed, "campaign seed")
        ->capture_default_str();
    stress_cmd->add_option("--dim-b", stress_dim_b, "Bob dimension")
        ->capture_default_str();
    stress_cmd->add_option("--dim-e", stress_dim_e, "Eve dimension")
        ->capture_default_str();

    // mixture
    std::vector<std::uint64_t> mix_seeds;
    std::vector<double> mix_weights;
    Eigen::Index mix_dim_b = 2, mix_dim_e = 2;
    auto* mix_cmd =
        app.add_subcommand("mixture", "shared-randomness convexity check");
    mix_cmd->add_option("--seeds", mix_seeds, "component seeds")->required();
    mix_cmd->add_option("--weights", mix_weights, "mixture weights")
        ->required();
    mix_cmd->add_option("--dim-b", mix_dim_b, "Bob dimension")
        ->capture_default_str();
    mix_cmd->add_option("--dim-e", mix_dim_e, "Eve dimension")
        ->capture_default_str();

    // optimize
    double opt_starget = kTsirelson;
    int opt_restarts = 32, opt_iterations = 400;
    std::uint64_t opt_seed = 0;
    Eigen::Index opt_dim_e = 2;
    auto* opt_cmd =
        app.add_subcommand("optimize", "derivative-free attack search");
    opt_cmd->add_option("--s-target", opt_starget, "CHSH constraint")
        ->required();
    opt_cmd->add_option("--restarts", opt_restarts, "random restarts")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    opt_cmd->add_option("--iterations", opt_iterations, "sweeps per restart")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    opt_cmd->add_option("--seed", opt_seed, "search seed")
        ->capture_default_str();
    opt_cmd->add_option("--dim-e", opt_dim_e, "Eve dimension")
        ->capture_default_str();

    // jordan
    std::string jordan_path;
    auto* jordan_cmd = app.add_subcommand(
        "jordan", "block decomposition of a scenario's observables");
    jordan_cmd->add_option("path", jordan_path, "scenario JSON file")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*analyze_cmd)
            return cmd_analyze(g, analyze_path,
                               analyze_has_eps
                                   ? std::optional<double>(analyze_eps)
                                   : std::nullopt);
        if (*bound_cmd)
            return cmd_bound(g,
                             bound_has_s ? std::optional<double>(bound_s)
                                         : std::nullopt,
                             bound_curve, bound_points, bound_s_min,
                             bound_s_max);
        if (*attack_cmd)
            return cmd_attack(
                g, has_fz ? std::optional<double>(attack_fz) : std::nullopt,
                has_starget ? std::optional<double>(attack_starget)
                            : std::nullopt,
                attack_dim_e);
        if (*ce_cmd) return cmd_counterexample(g);
        if (*stress_cmd)
            return cmd_stress(g, stress_trials, stress_seed, stress_dim_b,
                              stress_dim_e);
        if (*mix_cmd)
            return cmd_mixture(g, mix_seeds, mix_weights, mix_dim_b,
                               mix_dim_e);
        if (*opt_cmd)
            return cmd_optimize(g, opt_starget, opt_restarts, opt_iterations,
                                opt_seed, opt_dim_e);
        if (*jordan_cmd) return cmd_jordan(g, jordan_path);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const QubitAssumptionViolated& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAssumption;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
