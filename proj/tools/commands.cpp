#include "commands.hpp"

#include "svg.hpp"

#include "agenda/cap_mapping.hpp"
#include "agenda/corpus.hpp"
#include "agenda/csv.hpp"
#include "agenda/diagnostics.hpp"
#include "agenda/event_model.hpp"
#include "agenda/log.hpp"
#include "agenda/record_parser.hpp"
#include "agenda/synthetic.hpp"
#include "agenda/timeline.hpp"
#include "agenda/topic_models.hpp"

#include <algorithm>
#include <exception>
#include <fstream>
#include <iostream>
#include <numeric>
#include <thread>

namespace agenda::cli {

namespace fs = std::filesystem;

namespace {

const fs::path kDataDir = AGENDA_DATA_DIR;

/// Bookkeeping for one command: settings, input hashes, outputs, manifest.
class Run {
public:
    Run(std::string command, const CommonOptions& common) : common_(common), settings_(common.config)
    {
        manifest_.command = std::move(command);
        manifest_.started_at = utc_now();
        for (const auto& [k, v] : common.flags)
            settings_.set_flag(k, v);
        if (common.config)
            manifest_.config_file_hash = sha256_file(*common.config);
        drain_warnings();
    }

    Settings& settings() { return settings_; }
    std::uint64_t seed()
    {
        const auto s = settings_.seed();
        manifest_.seeds = {s};
        return s;
    }

    void input(const fs::path& p)
    {
        if (fs::is_directory(p)) {
            std::vector<fs::path> files;
            for (const auto& e : fs::recursive_directory_iterator(p))
                if (e.is_regular_file())
                    files.push_back(e.path());
            std::sort(files.begin(), files.end());
            for (const auto& f : files)
                manifest_.inputs[f.string()] = sha256_file(f);
        } else {
            if (!fs::is_regular_file(p))
                throw InputError("missing input " + p.string());
            manifest_.inputs[p.string()] = sha256_file(p);
            files_.push_back(p);
        }
    }

    /// False when the output directory is already up to date.
    bool begin()
    {
        manifest_.settings = settings_.used();
        if (!common_.force) {
            check_fresh(files_, manifest_.config_file_hash);
            Manifest probe = manifest_;
            if (up_to_date(common_.out, probe)) {
                std::cerr << manifest_.command << ": " << common_.out.string() << " is up to date (use --force to rerun)\n";
                return false;
            }
        }
        fs::create_directories(common_.out);
        fs::remove(common_.out / kManifestName);
        return true;
    }

    fs::path output(const std::string& name)
    {
        outputs_.push_back(name);
        const fs::path p = common_.out / name;
        fs::create_directories(p.parent_path());
        return p;
    }

    std::ofstream open(const std::string& name)
    {
        const fs::path p = output(name);
        std::ofstream out(p, std::ios::binary);
        if (!out)
            throw InputError("cannot write " + p.string());
        return out;
    }

    nlohmann::ordered_json& extra() { return manifest_.extra; }

    int finish()
    {
        for (const auto& name : outputs_)
            manifest_.outputs[name] = sha256_file(common_.out / name);
        manifest_.warnings = drain_warnings();
        manifest_.finished_at = utc_now();
        std::ofstream out(common_.out / kManifestName, std::ios::binary);
        out << manifest_.to_json().dump(2) << "\n";
        if (!out)
            throw InputError("cannot write manifest in " + common_.out.string());
        return 0;
    }

private:
    const CommonOptions& common_;
    Settings settings_;
    Manifest manifest_;
    std::vector<fs::path> files_;
    std::vector<std::string> outputs_;
};

const fs::path& need(const Inputs& in, const std::string& name)
{
    const auto it = in.find(name);
    if (it == in.end() || it->second.empty())
        throw InputError("missing --" + name);
    return it->second;
}

int thread_count(Settings& s)
{
    const int t = s.integer("threads", 1);
    if (t < 1)
        throw InputError("threads must be >= 1");
    return t;
}

Timeline load_timeline(Run& run)
{
    const fs::path g = run.settings().path("governments_path", kDataDir / "governments.csv");
    const fs::path e = run.settings().path("elections_path", kDataDir / "elections.csv");
    run.input(g);
    run.input(e);
    return Timeline::load(g, e);
}

struct CorpusFiles {
    Vocabulary vocab;
    DocTermMatrix dtm;
};

void corpus_inputs(Run& run, const fs::path& dir)
{
    for (const char* f : {"vocab.txt", "docs.csv", "dtm.csv"})
        run.input(dir / f);
}

CorpusFiles load_corpus(const fs::path& dir)
{
    CorpusFiles c;
    c.vocab = read_vocabulary(dir / "vocab.txt");
    auto docs = read_docs(dir / "docs.csv");
    c.dtm = read_triplets(dir / "dtm.csv", static_cast<int>(docs.size()), c.vocab.size());
    c.dtm.docs = std::move(docs);
    return c;
}

void panel_inputs(Run& run, const fs::path& dir)
{
    run.input(dir / "panel.csv");
    run.input(dir / "groups.csv");
}

ThetaPanel load_panel(const fs::path& dir)
{
    ThetaPanel panel = read_panel_csv(dir / "panel.csv");
    const auto t = csv::Table::read(dir / "groups.csv");
    const auto c = t.column("cap_name");
    if (static_cast<int>(t.size()) != panel.groups())
        throw InputError((dir / "groups.csv").string() + " does not match the panel's share columns");
    for (std::size_t p = 0; p < t.size(); ++p)
        panel.group_names[p] = t.rows()[p][c];
    return panel;
}

std::vector<std::string> numbered(const std::string& prefix, int n)
{
    std::vector<std::string> v;
    for (int i = 1; i <= n; ++i)
        v.push_back(prefix + std::to_string(i));
    return v;
}

EventModelSpec event_spec(Run& run, int topics)
{
    auto& s = run.settings();
    EventModelSpec spec;
    spec.topics = topics;
    spec.chains = s.integer("event_chains", 4);
    spec.iters = s.integer("event_iters", 4000);
    spec.burn_in = s.integer("event_burn_in", 2000);
    spec.thin = s.integer("event_thin", 10);
    spec.prior_sd_alpha = s.number("prior_sd_alpha", 10.0);
    spec.prior_sd_beta = s.number("prior_sd_beta", 10.0);
    spec.prior_sd_mu = s.number("prior_sd_mu", 10.0);
    spec.sigma_upper = s.number("sigma_upper", 3.0);
    spec.threads = thread_count(s);
    spec.seed = run.seed();
    return spec;
}

} // namespace

int cmd_parse(const CommonOptions& common, const Inputs& in)
{
    Run run("parse", common);
    const fs::path dir = need(in, "in");
    const bool lenient = run.settings().boolean("lenient", false);
    const fs::path patterns_path = run.settings().path("patterns_path", {});
    const int threads = thread_count(run.settings());
    if (!fs::is_directory(dir))
        throw InputError("page directory " + dir.string() + " does not exist");

    std::vector<fs::path> pages;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".txt")
            pages.push_back(e.path());
    std::sort(pages.begin(), pages.end());
    if (pages.empty())
        throw InputError("no page files (*.txt) in " + dir.string());
    for (const auto& p : pages)
        run.input(p);
    if (!patterns_path.empty())
        run.input(patterns_path);
    if (!run.begin())
        return 0;

    const SpeakerPatterns patterns = patterns_path.empty() ? SpeakerPatterns::defaults() : SpeakerPatterns::load(patterns_path);
    struct Parsed {
        DocKey key;
        std::vector<TidyRow> rows;
        std::string error;
    };
    std::vector<Parsed> parsed(pages.size());
    auto work = [&](std::size_t first) {
        for (std::size_t i = first; i < pages.size(); i += static_cast<std::size_t>(threads)) {
            try {
                const RawPage page = load_page(pages[i]);
                parsed[i].key = {page.chamber, page.date};
                parsed[i].rows = export_tidy(split_speakers(reflow_columns(page), page.chamber, page.date, patterns));
            } catch (const InputError& e) {
                parsed[i].error = pages[i].filename().string() + ": " + e.what();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(work, static_cast<std::size_t>(t));
    }

    std::vector<Parsed*> ok;
    int skipped = 0;
    for (auto& p : parsed) {
        if (p.error.empty()) {
            ok.push_back(&p);
            continue;
        }
        if (!lenient)
            throw InputError(p.error + " (use --lenient to skip bad pages)");
        warn("skipped " + p.error);
        ++skipped;
    }
    if (ok.empty())
        throw InputError("no page in " + dir.string() + " could be parsed");
    std::stable_sort(ok.begin(), ok.end(), [](const Parsed* a, const Parsed* b) { return a->key < b->key; });
    std::vector<TidyRow> rows;
    for (const auto* p : ok)
        rows.insert(rows.end(), p->rows.begin(), p->rows.end());

    auto out = run.open("tidy.csv");
    write_tidy_csv(out, rows);
    out.close();
    run.extra()["pages"] = ok.size();
    run.extra()["skipped_pages"] = skipped;
    run.extra()["turns"] = rows.size();
    return run.finish();
}

int cmd_preprocess(const CommonOptions& common, const Inputs& in)
{
    Run run("preprocess", common);
    const fs::path tidy = need(in, "tidy");
    auto& s = run.settings();
    std::unordered_map<std::string, std::string> values;
    for (const char* key : {"stopwords_path", "mwe_path", "substitutions_path"}) {
        const fs::path p = s.path(key, {});
        if (!p.empty()) {
            values[key] = p.string();
            run.input(p);
        }
    }
    values["min_term_count"] = std::to_string(s.integer("min_term_count", 5));
    run.input(tidy);
    if (!run.begin())
        return 0;

    const PreprocessConfig config = PreprocessConfig::from_values(values);
    const auto rows = read_tidy_csv(tidy);
    const CorpusMatrix cm = build_matrix(rows, config);

    write_vocabulary(run.output("vocab.txt"), cm.vocabulary);
    {
        auto out = run.open("dtm.csv");
        write_triplets(out, cm.dtm);
    }
    {
        auto out = run.open("docs.csv");
        write_docs(out, cm.dtm.docs);
    }
    std::vector<Date> days;
    for (const auto& d : cm.dtm.docs)
        days.push_back(d.date);
    const SittingCalendar calendar = derive_sitting_periods(days);
    {
        auto out = run.open("calendar.csv");
        write_calendar(out, calendar, cm.dtm.docs);
    }
    {
        auto out = run.open("stopword_share.csv");
        csv::write_record(out, {"date", "chamber", "probe_count", "total_count", "share"});
        for (const auto& d : stopword_share(rows))
            csv::write_record(out, {format_date(d.doc.date), std::string(to_string(d.doc.chamber)),
                                    std::to_string(d.probe_count), std::to_string(d.total_count),
                                    csv::format_number(d.share)});
    }
    run.extra()["documents"] = cm.dtm.rows();
    run.extra()["vocabulary"] = cm.vocabulary.size();
    run.extra()["tokens"] = cm.dtm.total_tokens();
    run.extra()["sitting_periods"] = calendar.period_count;
    return run.finish();
}

int cmd_fit_topics(const CommonOptions& common, const Inputs& in)
{
    Run run("fit-topics", common);
    const fs::path dir = need(in, "corpus");
    auto& s = run.settings();
    const std::string model = to_lower_ascii(s.text("model", "ctm"));
    if (model != "lda" && model != "ctm")
        throw InputError("model must be lda or ctm");
    const int K = s.integer("topics", 80);
    LdaHyper hyper = LdaHyper::with_defaults(K);
    hyper.alpha = s.number("alpha", hyper.alpha);
    hyper.eta = s.number("eta", hyper.eta);
    hyper.iters = s.integer("iters", hyper.iters);
    hyper.burn_in = s.integer("burn_in", hyper.burn_in);
    hyper.seed = run.seed();
    const int chains = s.integer("chains", 1);
    const int threads = thread_count(s);
    corpus_inputs(run, dir);
    if (!run.begin())
        return 0;

    const CorpusFiles corpus = load_corpus(dir);
    TopicModelFit fit;
    if (model == "ctm") {
        if (chains > 1)
            warn("chains > 1 is ignored for the CTM");
        CtmFit ctm = fit_ctm(corpus.dtm, hyper);
        write_ctm_params(run.output("ctm_params.csv"), ctm.params);
        run.extra()["eta_acceptance_rate"] = ctm.acceptance_rate;
        fit = std::move(ctm.fit);
    } else {
        fit = chains > 1 ? fit_lda_chains(corpus.dtm, hyper, chains, threads) : fit_lda(corpus.dtm, hyper);
    }

    write_dense_csv(run.output("beta.csv"), fit.beta, "topic", corpus.vocab.terms());
    write_dense_csv(run.output("theta.csv"), fit.theta, "doc_id", numbered("topic_", K));
    {
        auto out = run.open("top_words.csv");
        csv::write_record(out, {"topic", "rank", "term", "beta"});
        for (int k = 0; k < K; ++k) {
            const auto top = top_words(fit.beta.row(k), std::min(kDefaultTopWords, corpus.vocab.size()));
            for (std::size_t r = 0; r < top.size(); ++r)
                csv::write_record(out, {std::to_string(k + 1), std::to_string(r + 1), corpus.vocab.term(top[r]),
                                        csv::format_number(fit.beta(k, top[r]))});
        }
    }
    {
        auto out = run.open("loglik.csv");
        csv::write_record(out, {"sweep", "loglik"});
        for (std::size_t i = 0; i < fit.loglik.size(); ++i)
            csv::write_record(out, {std::to_string(i + 1), csv::format_number(fit.loglik[i])});
    }
    run.extra()["model"] = model;
    return run.finish();
}

int cmd_diagnostics(const CommonOptions& common, const Inputs& in)
{
    Run run("diagnostics", common);
    const fs::path dir = need(in, "corpus");
    auto& s = run.settings();
    const std::vector<int> grid = s.integer_list("topics_grid", "5,10,20,40,80");
    LdaHyper hyper = LdaHyper::with_defaults(grid.front());
    hyper.eta = s.number("eta", hyper.eta);
    hyper.iters = s.integer("iters", hyper.iters);
    hyper.burn_in = s.integer("burn_in", hyper.burn_in);
    hyper.seed = run.seed();
    SweepOptions options;
    options.heldout_fraction = s.number("heldout_fraction", options.heldout_fraction);
    options.top_words = s.integer("top_words", options.top_words);
    options.heldout.fold_in_iters = s.integer("fold_in_iters", options.heldout.fold_in_iters);
    options.heldout.fold_in_burn_in = s.integer("fold_in_burn_in", options.heldout.fold_in_burn_in);
    options.heldout.seed = hyper.seed;
    options.threads = thread_count(s);
    corpus_inputs(run, dir);
    if (!run.begin())
        return 0;

    const CorpusFiles corpus = load_corpus(dir);
    const auto reports = sweep_topics(corpus.dtm, grid, hyper, options);
    {
        auto out = run.open("diagnostics.csv");
        write_report_csv(out, reports);
    }
    {
        auto out = run.open("topic_scores.csv");
        write_topic_scores_csv(out, reports);
    }
    int failed = 0;
    Series held{"held-out", {}, {}}, excl{"exclusivity", {}, {}}, coh{"coherence", {}, {}}, disp{"dispersion", {}, {}};
    for (const auto& r : reports) {
        if (!r.error.empty()) {
            warn("K=" + std::to_string(r.topics) + " failed: " + r.error);
            ++failed;
            continue;
        }
        for (Series* sr : {&held, &excl, &coh, &disp})
            sr->x.push_back(r.topics);
        held.y.push_back(r.heldout_loglik);
        excl.y.push_back(r.exclusivity_mean);
        coh.y.push_back(r.coherence_mean);
        disp.y.push_back(r.dispersion);
    }
    write_line_chart(run.output("heldout.svg"), "Held-out log likelihood per token", "topics", "log likelihood", {held});
    write_line_chart(run.output("exclusivity.svg"), "Mean exclusivity", "topics", "exclusivity", {excl});
    write_line_chart(run.output("coherence.svg"), "Mean semantic coherence", "topics", "coherence", {coh});
    write_line_chart(run.output("dispersion.svg"), "Residual dispersion", "topics", "dispersion", {disp});
    run.extra()["failed_topic_counts"] = failed;
    return run.finish();
}

int cmd_map_cap(const CommonOptions& common, const Inputs& in)
{
    Run run("map-cap", common);
    const fs::path corpus_dir = need(in, "corpus"), topics_dir = need(in, "topics");
    auto& s = run.settings();
    const fs::path scheme_path = s.path("scheme_path", kDataDir / "cap_scheme_table1.csv");
    const double floor = s.number("share_floor", kShareFloor);
    const Timeline timeline = load_timeline(run);
    run.input(scheme_path);
    run.input(corpus_dir / "docs.csv");
    run.input(topics_dir / "theta.csv");
    if (!run.begin())
        return 0;

    const CapScheme scheme = load_scheme(scheme_path);
    const auto docs = read_docs(corpus_dir / "docs.csv");
    const Eigen::MatrixXd theta = read_dense_csv(topics_dir / "theta.csv");
    const Eigen::MatrixXd shares = aggregate(theta, scheme, floor);
    std::vector<std::string> names;
    for (const auto& g : scheme.groups())
        names.push_back(g.cap_name);
    const ThetaPanel panel = build_panel(docs, shares, names, timeline);
    {
        auto out = run.open("panel.csv");
        write_panel_csv(out, panel);
    }
    {
        auto out = run.open("groups.csv");
        csv::write_record(out, {"share", "cap_code", "cap_name"});
        for (std::size_t p = 0; p < scheme.groups().size(); ++p)
            csv::write_record(out, {"share_" + std::to_string(p + 1), std::to_string(scheme.groups()[p].cap_code),
                                    scheme.groups()[p].cap_name});
    }
    run.extra()["groups"] = scheme.group_count();
    run.extra()["days"] = panel.days();
    return run.finish();
}

int cmd_fit_events(const CommonOptions& common, const Inputs& in)
{
    Run run("fit-events", common);
    const fs::path panel_dir = need(in, "panel");
    const Timeline timeline = load_timeline(run);
    panel_inputs(run, panel_dir);
    const ThetaPanel panel = load_panel(panel_dir);
    const EventModelSpec spec = event_spec(run, panel.groups());
    if (!run.begin())
        return 0;

    const EventPosterior post = fit_event_model(panel, timeline, spec);
    {
        auto out = run.open("draws.csv");
        write_draws_csv(out, post, timeline);
    }
    {
        auto out = run.open("summary.csv");
        write_summary_csv(out, post, timeline);
    }
    {
        auto out = run.open("acceptance.csv");
        csv::write_record(out, {"chain", "alpha", "beta", "delta", "sigma"});
        for (std::size_t c = 0; c < post.acceptance.size(); ++c) {
            const auto& a = post.acceptance[c];
            csv::write_record(out, {std::to_string(c + 1), csv::format_number(a.alpha), csv::format_number(a.beta),
                                    csv::format_number(a.delta), csv::format_number(a.sigma)});
        }
    }
    {
        auto out = run.open("trace.csv");
        csv::write_record(out, {"chain", "iteration", "log_posterior"});
        for (std::size_t c = 0; c < post.log_posterior_trace.size(); ++c)
            for (std::size_t i = 0; i < post.log_posterior_trace[c].size(); ++i)
                csv::write_record(out, {std::to_string(c + 1), std::to_string(i + 1),
                                        csv::format_number(post.log_posterior_trace[c][i])});
    }
    run.extra()["rhat_warning"] = post.rhat_warning;
    run.extra()["rhat_exceed_fraction"] = post.rhat_exceed_fraction;
    run.extra()["draws_per_chain"] = post.draws_per_chain;
    return run.finish();
}

namespace {

struct Fitted {
    Timeline timeline;
    ThetaPanel panel;
    EventPosterior post;
};

Fitted load_fitted(Run& run, const Inputs& in)
{
    const fs::path panel_dir = need(in, "panel"), events_dir = need(in, "events");
    Fitted f;
    f.timeline = load_timeline(run);
    panel_inputs(run, panel_dir);
    run.input(events_dir / "draws.csv");
    return f;
}

void restore(Fitted& f, const Inputs& in)
{
    f.panel = load_panel(in.at("panel"));
    f.post = read_posterior(f.panel, f.timeline, in.at("events") / "draws.csv");
}

} // namespace

int cmd_compare(const CommonOptions& common, const Inputs& in)
{
    Run run("compare", common);
    Fitted f = load_fitted(run, in);
    const double mass = run.settings().number("credible_mass", 0.95);
    if (!run.begin())
        return 0;
    restore(f, in);

    const auto govs = compare_neighbors(f.post, f.timeline, ComparisonLevel::Government, mass);
    const auto els = compare_neighbors(f.post, f.timeline, ComparisonLevel::Election, mass);
    {
        auto out = run.open("comparisons_government.csv");
        write_comparison_csv(out, govs, f.timeline, ComparisonLevel::Government, f.panel.group_names);
    }
    {
        auto out = run.open("comparisons_election.csv");
        write_comparison_csv(out, els, f.timeline, ComparisonLevel::Election, f.panel.group_names);
    }
    {
        auto out = run.open("table_governments.csv");
        write_government_table(out, govs, f.timeline, f.panel.group_names);
    }
    {
        auto out = run.open("table_elections.csv");
        write_election_table(out, els, f.timeline, f.panel.group_names);
    }
    auto count = [](const std::vector<Comparison>& v) {
        return std::count_if(v.begin(), v.end(), [](const Comparison& c) { return c.different(); });
    };
    run.extra()["government_pairs"] = govs.size();
    run.extra()["governments_different"] = count(govs);
    run.extra()["election_pairs"] = els.size();
    run.extra()["elections_different"] = count(els);
    return run.finish();
}

int cmd_outliers(const CommonOptions& common, const Inputs& in)
{
    Run run("outliers", common);
    Fitted f = load_fitted(run, in);
    const double threshold = run.settings().number("outlier_threshold", 3.0);
    if (!run.begin())
        return 0;
    restore(f, in);

    Eigen::MatrixXd conc(f.panel.days(), f.panel.groups());
    for (int d = 0; d < f.panel.days(); ++d)
        conc.row(d) = f.post.mean_concentration.row(f.post.design.cell_of_day[static_cast<std::size_t>(d)]);
    const auto all = outlier_scores(f.panel, conc, threshold);
    std::vector<OutlierDay> flagged;
    std::copy_if(all.begin(), all.end(), std::back_inserter(flagged), [](const OutlierDay& d) { return d.flagged(); });
    {
        auto out = run.open("outliers.csv");
        write_outliers_csv(out, flagged, f.panel.group_names);
    }
    {
        auto out = run.open("day_scores.csv");
        write_outliers_csv(out, all, f.panel.group_names);
    }
    run.extra()["days"] = all.size();
    run.extra()["flagged_days"] = flagged.size();
    return run.finish();
}

int cmd_figures(const CommonOptions& common, const Inputs& in)
{
    Run run("figures", common);
    Fitted f = load_fitted(run, in);
    if (!run.begin())
        return 0;
    restore(f, in);
    const int P = f.panel.groups();

    // topic prevalence by sitting period, per chamber
    {
        auto out = run.open("prevalence.csv");
        csv::write_record(out, {"chamber", "period_id", "topic", "mean_share", "days"});
        for (Chamber c : {Chamber::HouseOfRepresentatives, Chamber::Senate}) {
            std::map<int, std::pair<Eigen::VectorXd, int>> by_period;
            for (int d = 0; d < f.panel.days(); ++d) {
                const auto& r = f.panel.rows[static_cast<std::size_t>(d)];
                if (r.chamber != c)
                    continue;
                auto& [sum, n] = by_period.try_emplace(r.period, Eigen::VectorXd::Zero(P), 0).first->second;
                sum += f.panel.shares.row(d).transpose();
                ++n;
            }
            if (by_period.empty())
                continue;
            std::vector<Series> series(static_cast<std::size_t>(P));
            for (int p = 0; p < P; ++p)
                series[static_cast<std::size_t>(p)].name = f.panel.group_names[static_cast<std::size_t>(p)];
            for (const auto& [s, v] : by_period)
                for (int p = 0; p < P; ++p) {
                    const double m = v.first[p] / v.second;
                    csv::write_record(out, {std::string(to_string(c)), std::to_string(s),
                                            f.panel.group_names[static_cast<std::size_t>(p)], csv::format_number(m),
                                            std::to_string(v.second)});
                    series[static_cast<std::size_t>(p)].x.push_back(s);
                    series[static_cast<std::size_t>(p)].y.push_back(m);
                }
            write_line_chart(run.output("prevalence_" + std::string(to_string(c)) + ".svg"),
                             "Topic prevalence by sitting period (" + std::string(to_string(c)) + ")", "sitting period",
                             "mean share", series);
        }
    }

    auto intervals = [&](ParamKind kind, const std::string& stem, const std::string& title) {
        auto out = run.open(stem + ".csv");
        csv::write_record(out, {"unit_id", "unit", "topic", "mean", "q2.5", "q97.5"});
        std::vector<IntervalPanel> panels(static_cast<std::size_t>(P));
        const auto& units = kind == ParamKind::Alpha ? f.post.design.governments : f.post.design.elections;
        for (int p = 0; p < P; ++p) {
            panels[static_cast<std::size_t>(p)].title = f.panel.group_names[static_cast<std::size_t>(p)];
            for (std::size_t u = 0; u < units.size(); ++u) {
                const Eigen::VectorXd x = f.post.column(kind, static_cast<int>(u), p);
                std::string id, label;
                if (kind == ParamKind::Alpha) {
                    const auto& g = f.timeline.governments()[static_cast<std::size_t>(units[u])];
                    id = std::to_string(g.id);
                    label = g.name;
                } else {
                    const auto& e = f.timeline.elections()[static_cast<std::size_t>(units[u])];
                    id = std::to_string(e.id);
                    label = std::to_string(static_cast<int>(e.date.year()));
                }
                const Interval iv{label, quantile(x, 0.025), x.mean(), quantile(x, 0.975)};
                csv::write_record(out, {id, label, f.panel.group_names[static_cast<std::size_t>(p)],
                                        csv::format_number(iv.mid), csv::format_number(iv.low), csv::format_number(iv.high)});
                panels[static_cast<std::size_t>(p)].intervals.push_back(iv);
            }
        }
        out.close();
        write_interval_chart(run.output(stem + ".svg"), title, panels);
    };
    intervals(ParamKind::Alpha, "alpha_intervals", "Prime-minister effects (95% intervals)");
    intervals(ParamKind::Beta, "beta_intervals", "Election effects (95% intervals)");
    return run.finish();
}

int cmd_simulate(const CommonOptions& common, const std::string& kind)
{
    Run run("simulate " + kind, common);
    auto& s = run.settings();
    if (kind == "hansard") {
        HansardSimulationSpec spec;
        spec.sitting_periods = s.integer("sitting_periods", spec.sitting_periods);
        spec.days_per_period = s.integer("days_per_period", spec.days_per_period);
        spec.turns_per_day = s.integer("turns_per_day", spec.turns_per_day);
        spec.sentences_per_turn = s.integer("sentences_per_turn", spec.sentences_per_turn);
        spec.first = parse_date(s.text("first_day", format_date(spec.first)));
        spec.last = parse_date(s.text("last_period_start", format_date(spec.last)));
        spec.seed = run.seed();
        const Timeline timeline = load_timeline(run);
        if (!run.begin())
            return 0;
        const SyntheticHansard sim = simulate_hansard(spec, timeline);
        for (const auto& page : sim.pages) {
            auto out = run.open("pages/" + page.filename);
            out << page.content;
        }
        {
            auto out = run.open("theta_true.csv");
            std::vector<std::string> header = {"chamber", "date"};
            for (Eigen::Index k = 1; k <= sim.theta.cols(); ++k)
                header.push_back("topic_" + std::to_string(k));
            csv::write_record(out, header);
            for (std::size_t i = 0; i < sim.docs.size(); ++i) {
                std::vector<std::string> f = {std::string(to_string(sim.docs[i].chamber)), format_date(sim.docs[i].date)};
                for (Eigen::Index k = 0; k < sim.theta.cols(); ++k)
                    f.push_back(csv::format_number(sim.theta(static_cast<Eigen::Index>(i), k)));
                csv::write_record(out, f);
            }
        }
        save_scheme(run.output("generator_scheme.csv"), synthetic_scheme());
        run.extra()["pages"] = sim.pages.size();
        return run.finish();
    }
    if (kind == "panel") {
        PanelSimulationSpec spec;
        spec.topics = s.integer("topics", spec.topics);
        spec.governments = s.integer("governments", spec.governments);
        spec.elections = s.integer("elections", spec.elections);
        spec.periods = s.integer("periods", spec.periods);
        spec.days_per_period = s.integer("days_per_period", spec.days_per_period);
        spec.both_chambers = s.boolean("both_chambers", spec.both_chambers);
        spec.beta_sd = s.number("beta_sd", spec.beta_sd);
        spec.seed = run.seed();
        if (!run.begin())
            return 0;
        const SimulatedPanel sim = simulate_panel(spec);
        {
            auto out = run.open("panel.csv");
            write_panel_csv(out, sim.panel);
        }
        {
            auto out = run.open("groups.csv");
            csv::write_record(out, {"share", "cap_code", "cap_name"});
            for (int p = 0; p < sim.panel.groups(); ++p)
                csv::write_record(out, {"share_" + std::to_string(p + 1), "", sim.panel.group_names[static_cast<std::size_t>(p)]});
        }
        {
            auto out = run.open("governments.csv");
            csv::write_record(out, {"id", "name", "party", "start", "end", "excluded", "compare_to"});
            for (const auto& g : sim.timeline.governments())
                csv::write_record(out, {std::to_string(g.id), g.name, g.party, format_date(g.start),
                                        g.end ? format_date(*g.end) : "", g.excluded ? "true" : "false",
                                        g.compare_to ? std::to_string(*g.compare_to) : ""});
        }
        {
            auto out = run.open("elections.csv");
            csv::write_record(out, {"id", "date", "winner", "seats"});
            for (const auto& e : sim.timeline.elections())
                csv::write_record(out, {std::to_string(e.id), format_date(e.date), e.winner, std::to_string(e.seats)});
        }
        {
            auto out = run.open("truth.csv");
            csv::write_record(out, {"param", "unit", "topic", "value"});
            const ParamLayout layout(sim.design);
            const Eigen::VectorXd v = flatten(sim.truth, layout);
            for (ParamKind k : {ParamKind::Alpha, ParamKind::Beta, ParamKind::Delta, ParamKind::Mu, ParamKind::Sigma})
                for (int u = 0; u < layout.units(k); ++u)
                    for (int p = 0; p < layout.topics; ++p)
                        csv::write_record(out, {std::string(to_string(k)), std::to_string(u + 1), std::to_string(p + 1),
                                                csv::format_number(v[layout.index(k, u, p)])});
        }
        return run.finish();
    }
    if (kind == "corpus") {
        const std::string model = to_lower_ascii(s.text("model", "lda"));
        const int K = s.integer("topics", 5);
        const int V = s.integer("vocab", 200);
        const int D = s.integer("docs", 500);
        const int N = s.integer("doc_length", 100);
        const double eta = s.number("eta", 0.1);
        const double alpha = s.number("alpha", 50.0 / K);
        const double correlation = s.number("correlation", 0.0);
        const std::uint64_t seed = run.seed();
        if (model != "lda" && model != "ctm")
            throw InputError("model must be lda or ctm");
        if (K < 2 || V < 2 || D < 1 || N < 1)
            throw InputError("need topics >= 2, vocab >= 2, docs >= 1 and doc_length >= 1");
        if (!run.begin())
            return 0;
        Rng rng(seed, 0xc0de);
        GenerativeModel gm;
        gm.beta = draw_topics(K, V, eta, rng);
        if (model == "lda") {
            gm.family = TopicFamily::Lda;
            gm.alpha = Eigen::VectorXd::Constant(K, alpha);
        } else {
            gm.family = TopicFamily::Ctm;
            gm.mu = Eigen::VectorXd::Zero(K - 1);
            gm.sigma = Eigen::MatrixXd::Identity(K - 1, K - 1);
            if (K > 2)
                gm.sigma(0, 1) = gm.sigma(1, 0) = correlation;
        }
        const std::vector<int> lengths(static_cast<std::size_t>(D), N);
        SimulatedCorpus sc = generate_corpus(gm, lengths, seed);
        std::vector<DocKey> docs;
        const Date origin{std::chrono::year{2000}, std::chrono::month{1}, std::chrono::day{1}};
        for (int d = 0; d < D; ++d)
            docs.push_back({Chamber::HouseOfRepresentatives, add_days(origin, d)});
        sc.dtm.docs = docs;
        std::vector<std::string> terms;
        for (int v = 0; v < V; ++v)
            terms.push_back("w" + std::to_string(v));
        write_vocabulary(run.output("vocab.txt"), Vocabulary(terms));
        {
            auto out = run.open("dtm.csv");
            write_triplets(out, sc.dtm);
        }
        {
            auto out = run.open("docs.csv");
            write_docs(out, docs);
        }
        write_dense_csv(run.output("beta_true.csv"), gm.beta, "topic", terms);
        write_dense_csv(run.output("theta_true.csv"), sc.theta, "doc_id", numbered("topic_", K));
        return run.finish();
    }
    throw InputError("unknown simulation kind '" + kind + "' (hansard, panel or corpus)");
}

} // namespace agenda::cli
