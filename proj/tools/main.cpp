#include "commands.hpp"

#include "agenda/common.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <memory>

namespace {

using namespace agenda::cli;

constexpr int kExitInput = 2;
constexpr int kExitModel = 3;
constexpr int kExitUsage = 64;

struct Command {
    CLI::App* app = nullptr;
    CommonOptions common;
    Inputs inputs;
    std::map<std::string, std::string> settings; ///< raw option values, keyed by setting name
    std::map<std::string, bool> switches;
    std::vector<std::string> assignments;        ///< --set key=value
    std::string kind;                            ///< simulate only
    std::function<int(Command&)> run;
};

std::string option_name(const std::string& key)
{
    std::string s = key;
    for (char& c : s)
        if (c == '_')
            c = '-';
    return "--" + s;
}

Command& add_command(CLI::App& root, std::vector<std::unique_ptr<Command>>& all, const std::string& name,
                     const std::string& help, std::function<int(Command&)> run)
{
    auto& cmd = *all.emplace_back(std::make_unique<Command>());
    cmd.app = root.add_subcommand(name, help);
    cmd.run = std::move(run);
    cmd.app->add_option("--out", cmd.common.out, "output directory")->required();
    cmd.app->add_option("--config", cmd.common.config, "key = value settings file");
    cmd.app->add_flag("--force", cmd.common.force, "rerun even when outputs are current or inputs are stale");
    cmd.app->add_option("--set", cmd.assignments, "override any setting, KEY=VALUE (repeatable)");
    for (const char* key : {"seed", "threads"})
        cmd.app->add_option(option_name(key), cmd.settings[key]);
    return cmd;
}

void input(Command& cmd, const std::string& name, const std::string& help)
{
    cmd.app->add_option("--" + name, cmd.inputs[name], help)->required();
}

void settings(Command& cmd, std::initializer_list<const char*> keys)
{
    for (const char* key : keys)
        cmd.app->add_option(option_name(key), cmd.settings[key]);
}

void collect_flags(Command& cmd)
{
    for (const auto& [k, v] : cmd.settings)
        if (!v.empty())
            cmd.common.flags[k] = v;
    for (const auto& [k, on] : cmd.switches)
        if (on)
            cmd.common.flags[k] = "true";
    for (const auto& a : cmd.assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos || eq == 0)
            throw CLI::ValidationError("--set", "expected KEY=VALUE, got '" + a + "'");
        cmd.common.flags[agenda::trim(a.substr(0, eq))] = agenda::trim(a.substr(eq + 1));
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Agenda-setting analysis of parliamentary transcripts"};
    app.require_subcommand(1);
    app.set_version_flag("--version", AGENDA_VERSION);
    std::vector<std::unique_ptr<Command>> commands;

    auto& parse = add_command(app, commands, "parse", "split tagged transcript pages into speaker turns",
                              [](Command& c) { return cmd_parse(c.common, c.inputs); });
    input(parse, "in", "directory of <chamber>_<date>.txt pages");
    parse.app->add_flag("--lenient", parse.switches["lenient"], "skip unparseable pages with a warning");
    settings(parse, {"patterns_path"});

    auto& pre = add_command(app, commands, "preprocess", "tokenize turns into a day-level document-term matrix",
                            [](Command& c) { return cmd_preprocess(c.common, c.inputs); });
    input(pre, "tidy", "tidy.csv from parse");
    settings(pre, {"stopwords_path", "mwe_path", "substitutions_path", "min_term_count"});

    auto& fit = add_command(app, commands, "fit-topics", "fit an LDA or correlated topic model",
                            [](Command& c) { return cmd_fit_topics(c.common, c.inputs); });
    input(fit, "corpus", "preprocess output directory");
    settings(fit, {"model", "topics", "alpha", "eta", "iters", "burn_in", "chains"});

    auto& diag = add_command(app, commands, "diagnostics", "held-out likelihood, exclusivity, coherence and dispersion over K",
                             [](Command& c) { return cmd_diagnostics(c.common, c.inputs); });
    input(diag, "corpus", "preprocess output directory");
    settings(diag, {"topics_grid", "eta", "iters", "burn_in", "heldout_fraction", "top_words", "fold_in_iters",
                    "fold_in_burn_in"});

    auto& cap = add_command(app, commands, "map-cap", "aggregate topic shares into CAP groups",
                            [](Command& c) { return cmd_map_cap(c.common, c.inputs); });
    input(cap, "corpus", "preprocess output directory");
    input(cap, "topics", "fit-topics output directory");
    settings(cap, {"scheme_path", "share_floor", "governments_path", "elections_path"});

    auto& ev = add_command(app, commands, "fit-events", "fit the government and election effects model",
                           [](Command& c) { return cmd_fit_events(c.common, c.inputs); });
    input(ev, "panel", "map-cap output directory");
    settings(ev, {"event_chains", "event_iters", "event_burn_in", "event_thin", "prior_sd_alpha", "prior_sd_beta",
                  "prior_sd_mu", "sigma_upper", "governments_path", "elections_path"});

    const auto posterior_inputs = [](Command& c) {
        input(c, "panel", "map-cap output directory");
        input(c, "events", "fit-events output directory");
        settings(c, {"governments_path", "elections_path"});
    };
    auto& cmp = add_command(app, commands, "compare", "flag neighbouring governments and elections that differ",
                            [](Command& c) { return cmd_compare(c.common, c.inputs); });
    posterior_inputs(cmp);
    settings(cmp, {"credible_mass"});

    auto& out = add_command(app, commands, "outliers", "score sitting days against their fitted concentration",
                            [](Command& c) { return cmd_outliers(c.common, c.inputs); });
    posterior_inputs(out);
    settings(out, {"outlier_threshold"});

    auto& fig = add_command(app, commands, "figures", "prevalence and effect-interval figures (CSV and SVG)",
                            [](Command& c) { return cmd_figures(c.common, c.inputs); });
    posterior_inputs(fig);

    auto& sim = add_command(app, commands, "simulate", "synthetic data: hansard pages, event panels or topic corpora",
                            [](Command& c) { return cmd_simulate(c.common, c.kind); });
    sim.app->add_option("kind", sim.kind, "hansard, panel or corpus")
        ->required()
        ->check(CLI::IsMember({"hansard", "panel", "corpus"}));
    settings(sim, {"governments_path", "elections_path", "sitting_periods", "days_per_period", "turns_per_day",
                   "sentences_per_turn", "first_day", "last_period_start", "topics", "governments", "elections",
                   "periods", "both_chambers", "beta_sd", "model", "vocab", "docs", "doc_length", "alpha", "eta",
                   "correlation"});

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return kExitUsage;
    }

    for (auto& cmd : commands) {
        if (!cmd->app->parsed())
            continue;
        try {
            collect_flags(*cmd);
            return cmd->run(*cmd);
        } catch (const CLI::ParseError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitUsage;
        } catch (const agenda::InputError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitInput;
        } catch (const std::filesystem::filesystem_error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitInput;
        } catch (const agenda::ModelError& e) {
            std::cerr << "model error: " << e.what() << "\n";
            return kExitModel;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitModel;
        }
    }
    return kExitUsage;
}
