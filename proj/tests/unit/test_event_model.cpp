#include "support.hpp"

#include "agenda/event_model.hpp"
#include "agenda/random.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

using namespace agenda;

namespace {

EventModelSpec quick_spec(int topics, int iters = 1500, std::uint64_t seed = 1)
{
    EventModelSpec s;
    s.topics = topics;
    s.chains = 2;
    s.iters = iters;
    s.burn_in = iters / 2;
    s.seed = seed;
    return s;
}

PanelSimulationSpec small_panel(std::uint64_t seed)
{
    PanelSimulationSpec p;
    p.topics = 3;
    p.governments = 3;
    p.elections = 3;
    p.periods = 12;
    p.days_per_period = 3;
    p.seed = seed;
    return p;
}

// Straight-line posterior: every day's Dirichlet density and every prior term,
// with the within-election counter recomputed from the panel rows.
double oracle_log_posterior(const SimulatedPanel& sim, const EventParams& q, const EventModelSpec& spec)
{
    const auto& panel = sim.panel;
    const auto& tl = sim.timeline;
    std::map<int, std::set<int>> periods_of_election;
    for (const auto& r : panel.rows)
        periods_of_election[r.election_id].insert(r.period);
    std::set<int> gov_ids, el_ids;
    for (const auto& r : panel.rows) {
        gov_ids.insert(r.government_id);
        el_ids.insert(r.election_id);
    }
    const std::vector<int> govs(gov_ids.begin(), gov_ids.end()), els(el_ids.begin(), el_ids.end());
    auto rank = [](const std::vector<int>& v, int x) { return static_cast<int>(std::find(v.begin(), v.end(), x) - v.begin()); };
    auto norm = [](double x, double m, double s) {
        return -0.5 * std::log(2 * M_PI) - std::log(s) - 0.5 * (x - m) * (x - m) / (s * s);
    };
    (void)tl;

    // cells in (period, chamber) order, the order used by the design
    std::map<std::pair<int, int>, int> cell_index;
    for (const auto& r : panel.rows)
        cell_index.emplace(std::make_pair(r.period, chamber_index(r.chamber)), 0);
    int next = 0;
    for (auto& [k, v] : cell_index)
        v = next++;

    const int P = panel.groups();
    double lp = 0.0;
    std::map<int, std::pair<int, int>> cell_gov_chamber;
    for (int d = 0; d < panel.days(); ++d) {
        const auto& r = panel.rows[static_cast<std::size_t>(d)];
        const int g = rank(govs, r.government_id), e = rank(els, r.election_id);
        const auto& ps = periods_of_election[r.election_id];
        const int N = static_cast<int>(ps.size());
        const int s = static_cast<int>(std::distance(ps.begin(), ps.find(r.period))) + 1;
        const int j = cell_index[{r.period, chamber_index(r.chamber)}];
        cell_gov_chamber[j] = {g, chamber_index(r.chamber)};
        double a0 = 0.0, body = 0.0;
        for (int p = 0; p < P; ++p) {
            const double a = std::exp(q.alpha(g, p) + q.beta(e, p) * (N - s) + q.delta(j, p));
            a0 += a;
            body += (a - 1.0) * std::log(panel.shares(d, p)) - std::lgamma(a);
        }
        lp += std::lgamma(a0) + body;
    }
    for (Eigen::Index i = 0; i < q.alpha.size(); ++i)
        lp += norm(q.alpha.data()[i], 0.0, spec.prior_sd_alpha);
    for (Eigen::Index i = 0; i < q.beta.size(); ++i)
        lp += norm(q.beta.data()[i], 0.0, spec.prior_sd_beta);
    for (int p = 0; p < P; ++p)
        lp += norm(q.mu(0, p), 0.0, spec.prior_sd_mu);
    for (const auto& [j, gc] : cell_gov_chamber)
        for (int p = 0; p < P; ++p)
            lp += norm(q.delta(j, p), q.mu(gc.second, p), q.sigma(gc.first, p));
    lp += static_cast<double>(q.sigma.size()) * std::log(1.0 / spec.sigma_upper);
    return lp;
}

} // namespace

TEST_CASE("zero effects give unit concentration")
{
    CHECK(std::exp(log_concentration(0.0, 0.0, 5, 2, 0.0)) == 1.0);
    const auto sim = simulate_panel(small_panel(1));
    const auto c = cell_concentration(EventParams::zeros(sim.design), sim.design);
    CHECK(c.isOnes());
}

TEST_CASE("positive decay shrinks concentration across the election period")
{
    for (int s = 1; s < 6; ++s)
        CHECK(std::exp(log_concentration(0.3, 0.2, 6, s + 1, -0.1)) < std::exp(log_concentration(0.3, 0.2, 6, s, -0.1)));
}

TEST_CASE("log concentration by hand")
{
    CHECK(log_concentration(1.0, 0.5, 4, 1, -0.2) == doctest::Approx(2.3).epsilon(1e-15));
}

TEST_CASE("Dirichlet density closed forms")
{
    Eigen::Vector3d flat(1, 1, 1), theta(0.2, 0.5, 0.3);
    CHECK(dirichlet_loglik(theta, flat) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    Eigen::Vector2d a(2, 1), half(0.5, 0.5);
    CHECK(std::abs(dirichlet_loglik(half, a)) < 1e-14);
    Eigen::Vector3d sym(0.7, 0.7, 0.7), perm(0.3, 0.2, 0.5);
    CHECK(dirichlet_loglik(theta, sym) == doctest::Approx(dirichlet_loglik(perm, sym)).epsilon(1e-14));
    Eigen::Vector2d edge(1.0, 0.0);
    CHECK_THROWS_AS(dirichlet_loglik(edge, a), InputError);
    Eigen::Vector2d neg(-1.0, 1.0);
    CHECK_THROWS_AS(dirichlet_loglik(half, neg), InputError);
}

TEST_CASE("log posterior matches a straight-line re-implementation at random points")
{
    PanelSimulationSpec ps = small_panel(3);
    ps.both_chambers = true;
    const auto sim = simulate_panel(ps);
    const EventModelSpec spec = quick_spec(3);
    Rng rng(99);
    const ParamLayout layout(sim.design);
    for (int i = 0; i < 100; ++i) {
        EventParams q = EventParams::zeros(sim.design);
        for (Eigen::Index k = 0; k < q.alpha.size(); ++k)
            q.alpha.data()[k] = 1.0 + rng.normal();
        for (Eigen::Index k = 0; k < q.beta.size(); ++k)
            q.beta.data()[k] = 0.3 * rng.normal();
        for (Eigen::Index k = 0; k < q.delta.size(); ++k)
            q.delta.data()[k] = 0.5 * rng.normal();
        for (int p = 0; p < 3; ++p) {
            q.mu(0, p) = rng.normal();
            q.mu(1, p) = -q.mu(0, p);
        }
        for (Eigen::Index k = 0; k < q.sigma.size(); ++k)
            q.sigma.data()[k] = 0.05 + 2.9 * rng.uniform();
        const double got = log_posterior(q, sim.design, spec), want = oracle_log_posterior(sim, q, spec);
        CHECK(std::abs(got - want) < 1e-8 * std::max(1.0, std::abs(want)));
        CHECK(unflatten(flatten(q, layout), layout).alpha == q.alpha);
    }
}

TEST_CASE("log posterior is -inf outside the support")
{
    const auto sim = simulate_panel(small_panel(2));
    const auto spec = quick_spec(3);
    EventParams q = sim.truth;
    q.sigma(0, 0) = spec.sigma_upper;
    CHECK(std::isinf(log_posterior(q, sim.design, spec)));
    q = sim.truth;
    q.mu(1, 0) += 0.1;
    CHECK(std::isinf(log_posterior(q, sim.design, spec)));
    CHECK(std::isfinite(log_posterior(sim.truth, sim.design, spec)));
}

TEST_CASE("the within-election counter restarts at each election")
{
    const auto sim = simulate_panel(small_panel(4));
    std::map<int, std::vector<int>> counters;
    for (const auto& c : sim.design.cells)
        if (c.chamber == Chamber::HouseOfRepresentatives)
            counters[c.election].push_back(c.counter);
    for (const auto& [e, v] : counters) {
        std::vector<int> expected(v.size());
        std::iota(expected.begin(), expected.end(), 1);
        CHECK(v == expected);
    }
}

TEST_CASE("same seed gives identical draws, whatever the thread count")
{
    const auto sim = simulate_panel(small_panel(5));
    auto spec = quick_spec(3, 400);
    const auto a = fit_event_model(sim.panel, sim.timeline, spec);
    spec.threads = 2;
    const auto b = fit_event_model(sim.panel, sim.timeline, spec);
    CHECK(a.draws == b.draws);
    CHECK(a.draws.rows() == 2 * 200);
    spec.seed = 2;
    const auto c = fit_event_model(sim.panel, sim.timeline, spec);
    CHECK(a.draws != c.draws);
}

TEST_CASE("a single government and election with no decay centres beta near zero")
{
    PanelSimulationSpec ps = small_panel(6);
    ps.governments = 1;
    ps.elections = 1;
    ps.beta_sd = 0.0;
    const auto sim = simulate_panel(ps);
    const auto post = fit_event_model(sim.panel, sim.timeline, quick_spec(3, 3000));
    for (int p = 0; p < 3; ++p) {
        const Eigen::VectorXd x = post.column(ParamKind::Beta, 0, p);
        const double m = x.mean();
        const double sd = std::sqrt((x.array() - m).square().sum() / static_cast<double>(x.size() - 1));
        CHECK(std::abs(m) < 2 * sd);
    }
}

TEST_CASE("one sitting period per election still mixes")
{
    PanelSimulationSpec ps = small_panel(7);
    ps.periods = 8;
    ps.elections = 8;
    ps.governments = 4;
    ps.days_per_period = 5;
    const auto sim = simulate_panel(ps);
    auto spec = quick_spec(3, 4000);
    spec.chains = 4;
    const auto post = fit_event_model(sim.panel, sim.timeline, spec);
    CHECK_FALSE(post.rhat_warning);
}

TEST_CASE("split R-hat and quantiles")
{
    Rng rng(3);
    Eigen::VectorXd iid(4000);
    for (Eigen::Index i = 0; i < iid.size(); ++i)
        iid[i] = rng.normal();
    CHECK(split_rhat(iid, 4) < 1.01);
    Eigen::VectorXd shifted = iid;
    shifted.tail(1000).array() += 3.0;
    CHECK(split_rhat(shifted, 4) > 1.1);

    Eigen::VectorXd v(4);
    v << 4, 1, 3, 2;
    CHECK(quantile(v, 0.25) == doctest::Approx(1.75));
    CHECK(quantile(v, 0.0) == 1.0);
    CHECK(quantile(v, 1.0) == 4.0);
    CHECK(quantile(v, 0.5) == doctest::Approx(2.5));
}

TEST_CASE("interval comparison flags non-overlap only")
{
    const auto sim = simulate_panel(small_panel(8));
    EventPosterior post;
    post.design = sim.design;
    post.layout = ParamLayout(sim.design);
    post.chains = 1;
    post.draws_per_chain = 201;
    post.draws = Eigen::MatrixXd::Zero(201, post.layout.size());
    // government 1 topic 1 spans [0.1, 0.3], government 2 spans [0.4, 0.6]
    post.draws.col(post.layout.index(ParamKind::Alpha, 0, 0)) = Eigen::VectorXd::LinSpaced(201, 0.1, 0.3);
    post.draws.col(post.layout.index(ParamKind::Alpha, 1, 0)) = Eigen::VectorXd::LinSpaced(201, 0.4, 0.6);
    auto rows = compare_neighbors(post, sim.timeline, ComparisonLevel::Government);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].flagged == std::vector<int>{0});
    CHECK(rows[0].intervals(0, 0) == doctest::Approx(0.105));
    CHECK(rows[0].intervals(0, 3) == doctest::Approx(0.595));
    CHECK(rows[1].flagged == std::vector<int>{0});

    post.draws.col(post.layout.index(ParamKind::Alpha, 1, 0)) = post.draws.col(post.layout.index(ParamKind::Alpha, 0, 0));
    post.draws.col(post.layout.index(ParamKind::Alpha, 2, 0)) = post.draws.col(post.layout.index(ParamKind::Alpha, 0, 0));
    rows = compare_neighbors(post, sim.timeline, ComparisonLevel::Government);
    for (const auto& r : rows)
        CHECK_FALSE(r.different());
    CHECK(compare_neighbors(post, sim.timeline, ComparisonLevel::Election).size() == 2);
}

TEST_CASE("outlier z-scores")
{
    ThetaPanel panel;
    panel.rows = {PanelRow{}, PanelRow{}};
    panel.group_names = {"a", "b", "c"};
    const double sd = std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / 7.0);
    const double t1 = 1.0 / 3.0 + 4.0 * sd;
    panel.shares = Eigen::MatrixXd(2, 3);
    panel.shares << 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, t1, (1 - t1) / 2, (1 - t1) / 2;
    const Eigen::MatrixXd conc = Eigen::MatrixXd::Constant(2, 3, 2.0);
    const auto days = outlier_scores(panel, conc);
    CHECK(days[0].z.cwiseAbs().maxCoeff() < 1e-12);
    CHECK_FALSE(days[0].flagged());
    CHECK(days[1].z[0] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(days[1].topics == std::vector<int>{0});

    // permuting topics in panel and concentration permutes the z-scores
    ThetaPanel permuted = panel;
    permuted.shares.col(0) = panel.shares.col(2);
    permuted.shares.col(2) = panel.shares.col(0);
    Eigen::MatrixXd pconc(2, 3);
    pconc << 2.0, 3.0, 1.5, 2.0, 3.0, 1.5;
    Eigen::MatrixXd conc2(2, 3);
    conc2 << 1.5, 3.0, 2.0, 1.5, 3.0, 2.0;
    const auto a = outlier_scores(panel, conc2), b = outlier_scores(permuted, pconc);
    for (int d = 0; d < 2; ++d) {
        CHECK(a[static_cast<std::size_t>(d)].flagged() == b[static_cast<std::size_t>(d)].flagged());
        CHECK(a[static_cast<std::size_t>(d)].z[0] == doctest::Approx(b[static_cast<std::size_t>(d)].z[2]));
    }
}

TEST_CASE("draws file round-trips into an identical posterior")
{
    const auto sim = simulate_panel(small_panel(9));
    auto spec = quick_spec(3, 300);
    const auto post = fit_event_model(sim.panel, sim.timeline, spec);
    const auto dir = test::scratch("draws");
    {
        std::ofstream out(dir / "draws.csv");
        write_draws_csv(out, post, sim.timeline);
    }
    const auto back = read_posterior(sim.panel, sim.timeline, dir / "draws.csv");
    CHECK(back.chains == post.chains);
    CHECK(back.draws_per_chain == post.draws_per_chain);
    CHECK(back.draws == post.draws);
    CHECK(back.rhat.isApprox(post.rhat));
    CHECK(back.mean_concentration.isApprox(post.mean_concentration, 1e-12));
}

TEST_CASE("comparisons do not depend on the thinning factor")
{
    const auto sim = simulate_panel(small_panel(10));
    auto spec = quick_spec(3, 4000);
    const auto full = fit_event_model(sim.panel, sim.timeline, spec);
    spec.thin = 4;
    const auto thin = fit_event_model(sim.panel, sim.timeline, spec);
    const auto a = compare_neighbors(full, sim.timeline, ComparisonLevel::Government);
    const auto b = compare_neighbors(thin, sim.timeline, ComparisonLevel::Government);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (int p = 0; p < 3; ++p)
            for (int c = 0; c < 4; ++c) {
                // interval ends from 500 thinned draws: a fraction of the interval width
                const double width = a[i].intervals(p, c < 2 ? 1 : 3) - a[i].intervals(p, c < 2 ? 0 : 2);
                CHECK(std::abs(a[i].intervals(p, c) - b[i].intervals(p, c)) < 0.2 * width);
            }
}

TEST_CASE("a shifted government is flagged and its neighbours are not")
{
    int hit = 0, quiet = 0;
    for (int rep = 0; rep < 20; ++rep) {
        PanelSimulationSpec ps;
        ps.topics = 3;
        // ten days a period keeps the share noise below the cell-level noise
        ps.governments = 4;
        ps.elections = 4;
        ps.periods = 40;
        ps.days_per_period = 10;
        ps.seed = 300 + static_cast<std::uint64_t>(rep);
        auto sim = simulate_panel(ps);
        for (int g = 1; g < 4; ++g)
            sim.truth.alpha.row(g) = sim.truth.alpha.row(0);
        sim.truth.alpha(2, 1) += 5.0 * sim.truth.sigma(2, 1);
        resample_shares(sim, ps.seed);
        auto spec = quick_spec(3, 3000, static_cast<std::uint64_t>(rep) + 1);
        const auto rows = compare_neighbors(fit_event_model(sim.panel, sim.timeline, spec), sim.timeline,
                                            ComparisonLevel::Government);
        bool shifted = false, others = false;
        for (const auto& r : rows) {
            const bool touches = r.earlier == 2 || r.later == 2;
            if (touches && r.later == 2)
                shifted = std::find(r.flagged.begin(), r.flagged.end(), 1) != r.flagged.end();
            if (!touches)
                others = others || r.different();
        }
        hit += shifted;
        quiet += !others;
    }
    CHECK(hit >= 18);
    CHECK(quiet >= 18);
}

TEST_CASE("simulation layouts are validated")
{
    PanelSimulationSpec ps = small_panel(1);
    ps.periods = 2;
    CHECK_THROWS_AS(simulate_panel(ps), InputError);
    ps = small_panel(1);
    ps.period_spacing_days = 5;
    CHECK_THROWS_AS(simulate_panel(ps), InputError);
    EventModelSpec spec = quick_spec(3);
    spec.burn_in = spec.iters;
    CHECK_THROWS(spec.validate());
}
