#include "agenda/event_model.hpp"

#include "agenda/csv.hpp"
#include "agenda/log.hpp"
#include "agenda/random.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <thread>

namespace agenda {

void EventModelSpec::validate() const
{
    if (topics < 2)
        throw InputError("the event model needs at least 2 topics");
    if (!(prior_sd_alpha > 0.0) || !(prior_sd_beta > 0.0) || !(prior_sd_mu > 0.0) || !(sigma_upper > 0.0))
        throw InputError("prior scales must be positive");
    if (chains < 1 || iters < 1 || burn_in < 0 || thin < 1 || burn_in >= iters)
        throw InputError("need chains >= 1, thin >= 1 and 0 <= burn_in < iters");
    if (kept_per_chain() < 4)
        throw InputError("fewer than 4 retained draws per chain; raise iters or lower thin");
    if (!(target_accept > 0.0 && target_accept < 1.0) || adapt_batch < 1)
        throw InputError("invalid adaptation settings");
}

EventDesign EventDesign::build(const ThetaPanel& panel, const Timeline& timeline)
{
    validate_panel(panel);
    EventDesign d;
    d.topics = panel.groups();

    struct Raw {
        int g, e, days = 0;
    };
    std::map<std::pair<int, int>, Raw> raw; // (period, chamber) -> cell
    std::set<int> govs, els;
    std::vector<std::pair<int, int>> day_key;
    for (const auto& r : panel.rows) {
        const int g = timeline.government_index(r.government_id);
        const int e = timeline.election_index(r.election_id);
        govs.insert(g);
        els.insert(e);
        const std::pair<int, int> key{r.period, chamber_index(r.chamber)};
        auto [it, fresh] = raw.emplace(key, Raw{g, e});
        if (!fresh && (it->second.g != g || it->second.e != e))
            throw InputError("sitting period " + std::to_string(r.period) +
                             " maps to more than one government or election");
        ++it->second.days;
        day_key.push_back(key);
    }
    d.governments.assign(govs.begin(), govs.end());
    d.elections.assign(els.begin(), els.end());
    auto compact = [](const std::vector<int>& v, int x) {
        return static_cast<int>(std::lower_bound(v.begin(), v.end(), x) - v.begin());
    };

    // periods of each election in order, shared by both chambers
    std::map<int, std::set<int>> periods_of;
    for (const auto& [key, cell] : raw)
        periods_of[cell.e].insert(key.first);

    std::map<std::pair<int, int>, int> cell_id;
    for (const auto& [key, cell] : raw) {
        const auto& ps = periods_of[cell.e];
        Cell c;
        c.chamber = key.second == 0 ? Chamber::HouseOfRepresentatives : Chamber::Senate;
        c.period = key.first;
        c.government = compact(d.governments, cell.g);
        c.election = compact(d.elections, cell.e);
        c.counter = static_cast<int>(std::distance(ps.begin(), ps.find(key.first))) + 1;
        c.periods_in_election = static_cast<int>(ps.size());
        c.days = cell.days;
        cell_id[key] = static_cast<int>(d.cells.size());
        d.cells.push_back(c);
    }

    d.log_theta = panel.shares.array().log();
    d.log_theta_sum = Eigen::MatrixXd::Zero(d.cell_count(), d.topics);
    for (std::size_t i = 0; i < day_key.size(); ++i) {
        const int j = cell_id[day_key[i]];
        d.cell_of_day.push_back(j);
        d.log_theta_sum.row(j) += d.log_theta.row(static_cast<Eigen::Index>(i));
    }
    return d;
}

EventParams EventParams::zeros(const EventDesign& design)
{
    const int P = design.topics;
    EventParams p;
    p.alpha = Eigen::MatrixXd::Zero(design.government_count(), P);
    p.beta = Eigen::MatrixXd::Zero(design.election_count(), P);
    p.delta = Eigen::MatrixXd::Zero(design.cell_count(), P);
    p.mu = Eigen::MatrixXd::Zero(kChamberCount, P);
    p.sigma = Eigen::MatrixXd::Ones(design.government_count(), P);
    return p;
}

double log_concentration(const EventParams& params, const EventDesign& design, int cell, int p)
{
    const auto& c = design.cells[static_cast<std::size_t>(cell)];
    return log_concentration(params.alpha(c.government, p), params.beta(c.election, p), c.periods_in_election,
                             c.counter, params.delta(cell, p));
}

Eigen::MatrixXd cell_concentration(const EventParams& params, const EventDesign& design)
{
    Eigen::MatrixXd a(design.cell_count(), design.topics);
    for (int j = 0; j < design.cell_count(); ++j)
        for (int p = 0; p < design.topics; ++p)
            a(j, p) = std::exp(log_concentration(params, design, j, p));
    return a;
}

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;

double normal_logpdf(double x, double mean, double sd)
{
    const double z = (x - mean) / sd;
    return -0.5 * z * z - std::log(sd) - kHalfLog2Pi;
}

double cell_loglik(const Eigen::Ref<const Eigen::RowVectorXd>& conc, int days,
                   const Eigen::Ref<const Eigen::RowVectorXd>& log_theta_sum)
{
    double lg = 0.0;
    for (Eigen::Index p = 0; p < conc.size(); ++p)
        lg += std::lgamma(conc[p]);
    return days * (std::lgamma(conc.sum()) - lg) + (conc.array() - 1.0).matrix().dot(log_theta_sum);
}

} // namespace

double log_posterior(const EventParams& params, const EventDesign& design, const EventModelSpec& spec)
{
    const int P = design.topics;
    constexpr double ninf = -std::numeric_limits<double>::infinity();
    if ((params.sigma.array() <= 0.0).any() || (params.sigma.array() >= spec.sigma_upper).any())
        return ninf;
    if (((params.mu.row(0) + params.mu.row(1)).array().abs() > 1e-12).any())
        return ninf;

    double lp = 0.0;
    const Eigen::MatrixXd conc = cell_concentration(params, design);
    for (int j = 0; j < design.cell_count(); ++j)
        lp += cell_loglik(conc.row(j), design.cells[static_cast<std::size_t>(j)].days, design.log_theta_sum.row(j));

    for (Eigen::Index i = 0; i < params.alpha.size(); ++i)
        lp += normal_logpdf(params.alpha.data()[i], 0.0, spec.prior_sd_alpha);
    for (Eigen::Index i = 0; i < params.beta.size(); ++i)
        lp += normal_logpdf(params.beta.data()[i], 0.0, spec.prior_sd_beta);
    for (int p = 0; p < P; ++p)
        lp += normal_logpdf(params.mu(0, p), 0.0, spec.prior_sd_mu);
    for (int j = 0; j < design.cell_count(); ++j) {
        const auto& c = design.cells[static_cast<std::size_t>(j)];
        for (int p = 0; p < P; ++p)
            lp += normal_logpdf(params.delta(j, p), params.mu(chamber_index(c.chamber), p), params.sigma(c.government, p));
    }
    lp -= static_cast<double>(params.sigma.size()) * std::log(spec.sigma_upper);
    return lp;
}

std::string_view to_string(ParamKind kind)
{
    switch (kind) {
    case ParamKind::Alpha: return "alpha";
    case ParamKind::Beta: return "beta";
    case ParamKind::Delta: return "delta";
    case ParamKind::Mu: return "mu";
    case ParamKind::Sigma: return "sigma";
    }
    return "?";
}

ParamLayout::ParamLayout(const EventDesign& design)
    : topics(design.topics), governments(design.government_count()), elections(design.election_count()),
      cells(design.cell_count())
{
}

int ParamLayout::units(ParamKind kind) const
{
    switch (kind) {
    case ParamKind::Alpha: return governments;
    case ParamKind::Beta: return elections;
    case ParamKind::Delta: return cells;
    case ParamKind::Mu: return kChamberCount;
    case ParamKind::Sigma: return governments;
    }
    return 0;
}

int ParamLayout::offset(ParamKind kind) const
{
    int off = 0;
    for (ParamKind k : {ParamKind::Alpha, ParamKind::Beta, ParamKind::Delta, ParamKind::Mu, ParamKind::Sigma}) {
        if (k == kind)
            return off;
        off += units(k) * topics;
    }
    return off;
}

Eigen::VectorXd flatten(const EventParams& params, const ParamLayout& layout)
{
    Eigen::VectorXd v(layout.size());
    auto put = [&](ParamKind kind, const Eigen::MatrixXd& m) {
        for (int u = 0; u < layout.units(kind); ++u)
            for (int p = 0; p < layout.topics; ++p)
                v[layout.index(kind, u, p)] = m(u, p);
    };
    put(ParamKind::Alpha, params.alpha);
    put(ParamKind::Beta, params.beta);
    put(ParamKind::Delta, params.delta);
    put(ParamKind::Mu, params.mu);
    put(ParamKind::Sigma, params.sigma);
    return v;
}

EventParams unflatten(const Eigen::Ref<const Eigen::VectorXd>& v, const ParamLayout& layout)
{
    auto get = [&](ParamKind kind) {
        Eigen::MatrixXd m(layout.units(kind), layout.topics);
        for (int u = 0; u < layout.units(kind); ++u)
            for (int p = 0; p < layout.topics; ++p)
                m(u, p) = v[layout.index(kind, u, p)];
        return m;
    };
    return {get(ParamKind::Alpha), get(ParamKind::Beta), get(ParamKind::Delta), get(ParamKind::Mu),
            get(ParamKind::Sigma)};
}

EventParams EventPosterior::posterior_mean() const
{
    return unflatten(draws.colwise().mean().transpose(), layout);
}

namespace {

struct ChainResult {
    Eigen::MatrixXd draws;
    BlockAcceptance acceptance;
    std::vector<double> trace;
};

/// Single-chain sampler state with cached concentrations per cell.
class Chain {
public:
    Chain(const EventDesign& design, const EventModelSpec& spec, std::uint64_t stream)
        : d_(design), spec_(spec), layout_(design), rng_(spec.seed, stream), P_(design.topics)
    {
        const int G = d_.government_count(), E = d_.election_count(), J = d_.cell_count();
        cells_of_gov_.resize(static_cast<std::size_t>(G));
        cells_of_el_.resize(static_cast<std::size_t>(E));
        informative_el_.assign(static_cast<std::size_t>(E), false);
        bool seen_chamber[kChamberCount] = {false, false};
        for (int j = 0; j < J; ++j) {
            const auto& c = d_.cells[static_cast<std::size_t>(j)];
            cells_of_gov_[static_cast<std::size_t>(c.government)].push_back(j);
            cells_of_el_[static_cast<std::size_t>(c.election)].push_back(j);
            if (c.periods_in_election > c.counter)
                informative_el_[static_cast<std::size_t>(c.election)] = true;
            seen_chamber[chamber_index(c.chamber)] = true;
        }
        // with one chamber its mu is confounded with alpha; it stays at 0
        both_chambers_ = seen_chamber[0] && seen_chamber[1];
        log_step_ = Eigen::VectorXd::Constant(layout_.size(), std::log(0.1));
        for (int e = 0; e < E; ++e)
            for (int p = 0; p < P_; ++p)
                log_step_[layout_.index(ParamKind::Beta, e, p)] = std::log(0.02);
        batch_accept_ = Eigen::VectorXi::Zero(layout_.size());
        initialize();
    }

    ChainResult run()
    {
        ChainResult out;
        const int kept = spec_.kept_per_chain();
        out.draws.resize(kept, layout_.size());
        out.trace.reserve(static_cast<std::size_t>(spec_.iters));
        long long acc[4] = {0, 0, 0, 0}, tried[4] = {0, 0, 0, 0};
        int row = 0;
        int batches = 0;
        for (int it = 0; it < spec_.iters; ++it) {
            const bool adapting = it < spec_.burn_in;
            std::fill(std::begin(counts_), std::end(counts_), 0);
            std::fill(std::begin(tries_), std::end(tries_), 0);
            update_alpha();
            update_beta();
            update_delta();
            if (both_chambers_) {
                update_mu();
                update_chamber_split();
            }
            update_shifts();
            update_sigma();
            if (adapting && (it + 1) % spec_.adapt_batch == 0) {
                ++batches;
                const double gain = std::min(0.3, 1.0 / std::sqrt(static_cast<double>(batches)));
                for (Eigen::Index i = 0; i < log_step_.size(); ++i) {
                    const double rate = static_cast<double>(batch_accept_[i]) / spec_.adapt_batch;
                    log_step_[i] += rate > spec_.target_accept ? gain : -gain;
                }
                batch_accept_.setZero();
            } else if (!adapting) {
                for (int b = 0; b < 4; ++b) {
                    acc[b] += counts_[b];
                    tried[b] += tries_[b];
                }
            }
            out.trace.push_back(log_posterior(params_, d_, spec_));
            if (!adapting && (it - spec_.burn_in + 1) % spec_.thin == 0 && row < kept) {
                out.draws.row(row++) = flatten(params_, layout_).transpose();
            }
        }
        auto rate = [&](int b) { return tried[b] ? static_cast<double>(acc[b]) / static_cast<double>(tried[b]) : 0.0; };
        out.acceptance = {rate(0), rate(1), rate(2), rate(3)};
        return out;
    }

private:
    void initialize()
    {
        const Eigen::Index D = d_.log_theta.rows();
        const Eigen::MatrixXd theta = d_.log_theta.array().exp();
        const Eigen::RowVectorXd mean = theta.colwise().mean();
        std::vector<double> precision;
        for (int p = 0; p < P_; ++p) {
            const double var = (theta.col(p).array() - mean[p]).square().sum() / static_cast<double>(std::max<Eigen::Index>(D - 1, 1));
            if (var > 0.0)
                precision.push_back(mean[p] * (1.0 - mean[p]) / var - 1.0);
        }
        double a0 = 10.0;
        if (!precision.empty()) {
            std::nth_element(precision.begin(), precision.begin() + static_cast<std::ptrdiff_t>(precision.size() / 2),
                             precision.end());
            a0 = std::clamp(precision[precision.size() / 2], 1.0, 1e4);
        }

        params_ = EventParams::zeros(d_);
        Eigen::MatrixXd gov_mean = Eigen::MatrixXd::Zero(d_.government_count(), P_);
        Eigen::VectorXd gov_days = Eigen::VectorXd::Zero(d_.government_count());
        for (Eigen::Index i = 0; i < D; ++i) {
            const int g = d_.cells[static_cast<std::size_t>(d_.cell_of_day[static_cast<std::size_t>(i)])].government;
            gov_mean.row(g) += theta.row(i);
            gov_days[g] += 1.0;
        }
        for (int g = 0; g < d_.government_count(); ++g)
            for (int p = 0; p < P_; ++p)
                params_.alpha(g, p) = std::log(a0 * gov_mean(g, p) / gov_days[g]) + 0.5 * rng_.normal();
        for (Eigen::Index i = 0; i < params_.delta.size(); ++i)
            params_.delta.data()[i] = 0.1 * rng_.normal();
        for (Eigen::Index i = 0; i < params_.sigma.size(); ++i)
            params_.sigma.data()[i] = std::min(0.2 + 0.8 * rng_.uniform(), 0.5 * spec_.sigma_upper);
        refresh_all();
        if (!std::isfinite(log_posterior(params_, d_, spec_)))
            throw ModelError("event model log posterior is not finite at the starting values");
    }

    void refresh_all()
    {
        eta_.resize(d_.cell_count(), P_);
        for (int j = 0; j < d_.cell_count(); ++j)
            for (int p = 0; p < P_; ++p)
                eta_(j, p) = log_concentration(params_, d_, j, p);
        conc_ = eta_.array().exp();
        total_ = conc_.rowwise().sum();
    }

    /// Change in cell j's log likelihood when eta_jp moves to `eta_new`.
    double cell_change(int j, int p, double eta_new) const
    {
        const double a_old = conc_(j, p);
        const double a_new = std::exp(eta_new);
        const double A_old = total_[j];
        const double A_new = A_old - a_old + a_new;
        const int n = d_.cells[static_cast<std::size_t>(j)].days;
        return n * (std::lgamma(A_new) - std::lgamma(A_old) - std::lgamma(a_new) + std::lgamma(a_old)) +
               (a_new - a_old) * d_.log_theta_sum(j, p);
    }

    void set_eta(int j, int p, double value)
    {
        eta_(j, p) = value;
        conc_(j, p) = std::exp(value);
        total_[j] = conc_.row(j).sum();
    }

    bool accept(double log_ratio)
    {
        return std::isfinite(log_ratio) && std::log(rng_.uniform_open()) < log_ratio;
    }

    double step(ParamKind kind, int unit, int p) const { return std::exp(log_step_[layout_.index(kind, unit, p)]); }

    void record(int block, ParamKind kind, int unit, int p, bool ok)
    {
        ++tries_[block];
        if (ok) {
            ++counts_[block];
            ++batch_accept_[layout_.index(kind, unit, p)];
        }
    }

    void update_alpha()
    {
        for (int g = 0; g < d_.government_count(); ++g) {
            const auto& cells = cells_of_gov_[static_cast<std::size_t>(g)];
            for (int p = 0; p < P_; ++p) {
                const double cur = params_.alpha(g, p);
                const double prop = cur + step(ParamKind::Alpha, g, p) * rng_.normal();
                const double shift = prop - cur;
                double lr = normal_logpdf(prop, 0.0, spec_.prior_sd_alpha) - normal_logpdf(cur, 0.0, spec_.prior_sd_alpha);
                for (int j : cells)
                    lr += cell_change(j, p, eta_(j, p) + shift);
                const bool ok = accept(lr);
                if (ok) {
                    params_.alpha(g, p) = prop;
                    for (int j : cells)
                        set_eta(j, p, eta_(j, p) + shift);
                }
                record(0, ParamKind::Alpha, g, p, ok);
            }
        }
    }

    void update_beta()
    {
        for (int e = 0; e < d_.election_count(); ++e) {
            const auto& cells = cells_of_el_[static_cast<std::size_t>(e)];
            for (int p = 0; p < P_; ++p) {
                const double cur = params_.beta(e, p);
                if (!informative_el_[static_cast<std::size_t>(e)]) {
                    // every cell sits at N - s = 0: the data say nothing about beta
                    params_.beta(e, p) = spec_.prior_sd_beta * rng_.normal();
                    continue;
                }
                const double prop = cur + step(ParamKind::Beta, e, p) * rng_.normal();
                double lr = normal_logpdf(prop, 0.0, spec_.prior_sd_beta) - normal_logpdf(cur, 0.0, spec_.prior_sd_beta);
                for (int j : cells) {
                    const auto& c = d_.cells[static_cast<std::size_t>(j)];
                    const double lever = c.periods_in_election - c.counter;
                    if (lever != 0.0)
                        lr += cell_change(j, p, eta_(j, p) + (prop - cur) * lever);
                }
                const bool ok = accept(lr);
                if (ok) {
                    params_.beta(e, p) = prop;
                    for (int j : cells) {
                        const auto& c = d_.cells[static_cast<std::size_t>(j)];
                        const double lever = c.periods_in_election - c.counter;
                        if (lever != 0.0)
                            set_eta(j, p, eta_(j, p) + (prop - cur) * lever);
                    }
                }
                record(1, ParamKind::Beta, e, p, ok);
            }
        }
    }

    void update_delta()
    {
        for (int j = 0; j < d_.cell_count(); ++j) {
            const auto& c = d_.cells[static_cast<std::size_t>(j)];
            const int ch = chamber_index(c.chamber);
            for (int p = 0; p < P_; ++p) {
                const double cur = params_.delta(j, p);
                const double prop = cur + step(ParamKind::Delta, j, p) * rng_.normal();
                const double m = params_.mu(ch, p), s = params_.sigma(c.government, p);
                const double lr = normal_logpdf(prop, m, s) - normal_logpdf(cur, m, s) +
                                  cell_change(j, p, eta_(j, p) + prop - cur);
                const bool ok = accept(lr);
                if (ok) {
                    params_.delta(j, p) = prop;
                    set_eta(j, p, eta_(j, p) + prop - cur);
                }
                record(2, ParamKind::Delta, j, p, ok);
            }
        }
    }

    void update_mu()
    {
        // mu_hor = m, mu_senate = -m; exact normal full conditional for m
        for (int p = 0; p < P_; ++p) {
            double precision = 1.0 / (spec_.prior_sd_mu * spec_.prior_sd_mu);
            double weighted = 0.0;
            for (int j = 0; j < d_.cell_count(); ++j) {
                const auto& c = d_.cells[static_cast<std::size_t>(j)];
                const double s2 = params_.sigma(c.government, p) * params_.sigma(c.government, p);
                const double sign = c.chamber == Chamber::HouseOfRepresentatives ? 1.0 : -1.0;
                precision += 1.0 / s2;
                weighted += sign * params_.delta(j, p) / s2;
            }
            const double m = weighted / precision + rng_.normal() / std::sqrt(precision);
            params_.mu(0, p) = m;
            params_.mu(1, p) = -m;
        }
    }

    /// alpha (beta) and the deltas under it trade off without changing eta; the
    /// shift along that line has a normal full conditional.
    void update_shifts()
    {
        for (int g = 0; g < d_.government_count(); ++g)
            for (int p = 0; p < P_; ++p) {
                const double s2 = params_.sigma(g, p) * params_.sigma(g, p);
                double precision = 1.0 / (spec_.prior_sd_alpha * spec_.prior_sd_alpha);
                double weighted = -params_.alpha(g, p) / (spec_.prior_sd_alpha * spec_.prior_sd_alpha);
                for (int j : cells_of_gov_[static_cast<std::size_t>(g)]) {
                    precision += 1.0 / s2;
                    weighted += (params_.delta(j, p) - mu_of(j, p)) / s2;
                }
                const double eps = weighted / precision + rng_.normal() / std::sqrt(precision);
                params_.alpha(g, p) += eps;
                for (int j : cells_of_gov_[static_cast<std::size_t>(g)])
                    params_.delta(j, p) -= eps;
            }
        for (int e = 0; e < d_.election_count(); ++e) {
            if (!informative_el_[static_cast<std::size_t>(e)])
                continue;
            for (int p = 0; p < P_; ++p) {
                double precision = 1.0 / (spec_.prior_sd_beta * spec_.prior_sd_beta);
                double weighted = -params_.beta(e, p) / (spec_.prior_sd_beta * spec_.prior_sd_beta);
                for (int j : cells_of_el_[static_cast<std::size_t>(e)]) {
                    const auto& c = d_.cells[static_cast<std::size_t>(j)];
                    const double lever = c.periods_in_election - c.counter;
                    const double s2 = params_.sigma(c.government, p) * params_.sigma(c.government, p);
                    precision += lever * lever / s2;
                    weighted += lever * (params_.delta(j, p) - mu_of(j, p)) / s2;
                }
                const double eps = weighted / precision + rng_.normal() / std::sqrt(precision);
                params_.beta(e, p) += eps;
                for (int j : cells_of_el_[static_cast<std::size_t>(e)]) {
                    const auto& c = d_.cells[static_cast<std::size_t>(j)];
                    params_.delta(j, p) -= eps * (c.periods_in_election - c.counter);
                }
            }
        }
        refresh_all(); // eta is unchanged up to rounding
    }

    /// Moves mu and every delta by +eps (house) / -eps (senate): the
    /// hierarchical terms stay put, only the likelihood changes. The step
    /// lives in mu's slot of the step vector.
    void update_chamber_split()
    {
        const int J = d_.cell_count();
        for (int p = 0; p < P_; ++p) {
            const double eps = step(ParamKind::Mu, 0, p) * rng_.normal();
            double lr = normal_logpdf(params_.mu(0, p) + eps, 0.0, spec_.prior_sd_mu) -
                        normal_logpdf(params_.mu(0, p), 0.0, spec_.prior_sd_mu);
            Eigen::VectorXd proposed(J);
            for (int j = 0; j < J; ++j) {
                const double sign = d_.cells[static_cast<std::size_t>(j)].chamber == Chamber::HouseOfRepresentatives ? 1.0 : -1.0;
                proposed[j] = eta_(j, p) + sign * eps;
                lr += cell_change(j, p, proposed[j]);
            }
            const bool ok = accept(lr);
            if (ok) {
                params_.mu(0, p) += eps;
                params_.mu(1, p) = -params_.mu(0, p);
                for (int j = 0; j < J; ++j) {
                    const double sign = d_.cells[static_cast<std::size_t>(j)].chamber == Chamber::HouseOfRepresentatives ? 1.0 : -1.0;
                    params_.delta(j, p) += sign * eps;
                    set_eta(j, p, proposed[j]);
                }
            }
            if (ok)
                ++batch_accept_[layout_.index(ParamKind::Mu, 0, p)];
        }
    }

    double mu_of(int j, int p) const
    {
        return params_.mu(chamber_index(d_.cells[static_cast<std::size_t>(j)].chamber), p);
    }

    void update_sigma()
    {
        const double upper = spec_.sigma_upper;
        for (int g = 0; g < d_.government_count(); ++g) {
            const auto& cells = cells_of_gov_[static_cast<std::size_t>(g)];
            for (int p = 0; p < P_; ++p) {
                const double cur = params_.sigma(g, p);
                double prop = cur + step(ParamKind::Sigma, g, p) * rng_.normal();
                while (prop < 0.0 || prop > upper)
                    prop = prop < 0.0 ? -prop : 2.0 * upper - prop;
                if (prop <= 0.0 || prop >= upper) {
                    record(3, ParamKind::Sigma, g, p, false);
                    continue;
                }
                double lr = 0.0;
                for (int j : cells) {
                    const double m = params_.mu(chamber_index(d_.cells[static_cast<std::size_t>(j)].chamber), p);
                    lr += normal_logpdf(params_.delta(j, p), m, prop) - normal_logpdf(params_.delta(j, p), m, cur);
                }
                const bool ok = accept(lr);
                if (ok)
                    params_.sigma(g, p) = prop;
                record(3, ParamKind::Sigma, g, p, ok);
            }
        }
    }

    const EventDesign& d_;
    const EventModelSpec& spec_;
    ParamLayout layout_;
    Rng rng_;
    int P_;
    EventParams params_;
    Eigen::MatrixXd eta_, conc_;
    Eigen::VectorXd total_;
    std::vector<std::vector<int>> cells_of_gov_, cells_of_el_;
    std::vector<bool> informative_el_;
    bool both_chambers_ = true;
    Eigen::VectorXd log_step_;
    Eigen::VectorXi batch_accept_;
    long long counts_[4] = {0, 0, 0, 0};
    long long tries_[4] = {0, 0, 0, 0};
};

} // namespace

double split_rhat(const Eigen::Ref<const Eigen::VectorXd>& draws, int chains)
{
    if (chains < 1 || draws.size() % chains != 0)
        throw InputError("draw count is not a multiple of the chain count");
    const Eigen::Index per = draws.size() / chains;
    const Eigen::Index n = per / 2;
    if (n < 2)
        return std::numeric_limits<double>::quiet_NaN();
    const int m = 2 * chains;
    Eigen::VectorXd means(m), vars(m);
    for (int c = 0; c < chains; ++c)
        for (int h = 0; h < 2; ++h) {
            // second half starts at per - n so an odd middle draw is dropped
            const auto seq = draws.segment(c * per + (h == 0 ? 0 : per - n), n);
            const double mean = seq.mean();
            means[2 * c + h] = mean;
            vars[2 * c + h] = (seq.array() - mean).square().sum() / static_cast<double>(n - 1);
        }
    const double W = vars.mean();
    const double B_over_n = (means.array() - means.mean()).square().sum() / (m - 1);
    if (W <= 0.0)
        return B_over_n <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    const double var_plus = static_cast<double>(n - 1) / static_cast<double>(n) * W + B_over_n;
    return std::sqrt(var_plus / W);
}

double quantile(Eigen::VectorXd values, double q)
{
    if (values.size() == 0)
        throw InputError("quantile of an empty sample");
    std::sort(values.data(), values.data() + values.size());
    const double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
    const auto lo = static_cast<Eigen::Index>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {
void summarize_draws(EventPosterior& post);
}

EventPosterior fit_event_model(const ThetaPanel& panel, const Timeline& timeline, const EventModelSpec& spec)
{
    spec.validate();
    if (spec.topics != panel.groups())
        throw InputError("model has " + std::to_string(spec.topics) + " topics but the panel has " +
                         std::to_string(panel.groups()));

    EventPosterior post;
    post.design = EventDesign::build(panel, timeline);
    post.spec = spec;
    post.layout = ParamLayout(post.design);
    post.chains = spec.chains;
    post.draws_per_chain = spec.kept_per_chain();

    std::vector<ChainResult> results(static_cast<std::size_t>(spec.chains));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(spec.chains));
    const int workers = std::clamp(spec.threads, 1, spec.chains);
    for (int first = 0; first < spec.chains; first += workers) {
        std::vector<std::jthread> pool;
        for (int c = first; c < std::min(spec.chains, first + workers); ++c)
            pool.emplace_back([&, c] {
                try {
                    Chain chain(post.design, post.spec, static_cast<std::uint64_t>(c) + 1);
                    results[static_cast<std::size_t>(c)] = chain.run();
                } catch (...) {
                    errors[static_cast<std::size_t>(c)] = std::current_exception();
                }
            });
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    const int kept = post.draws_per_chain;
    post.draws.resize(static_cast<Eigen::Index>(spec.chains) * kept, post.layout.size());
    for (int c = 0; c < spec.chains; ++c) {
        auto& r = results[static_cast<std::size_t>(c)];
        post.draws.middleRows(static_cast<Eigen::Index>(c) * kept, kept) = r.draws;
        post.acceptance.push_back(r.acceptance);
        post.log_posterior_trace.push_back(std::move(r.trace));
    }
    if (!post.draws.allFinite())
        throw ModelError("event model produced non-finite draws");
    summarize_draws(post);
    return post;
}

namespace {

void summarize_draws(EventPosterior& post)
{
    post.rhat.resize(post.layout.size());
    int exceed = 0;
    for (int i = 0; i < post.layout.size(); ++i) {
        post.rhat[i] = split_rhat(post.draws.col(i), post.chains);
        if (!(post.rhat[i] <= 1.1))
            ++exceed;
    }
    post.rhat_exceed_fraction = static_cast<double>(exceed) / post.layout.size();
    post.rhat_warning = post.rhat_exceed_fraction > 0.05;
    if (post.rhat_warning)
        warn("split R-hat exceeds 1.1 for " + std::to_string(exceed) + " of " + std::to_string(post.layout.size()) +
             " event-model parameters");

    // recomputed from the stored draws so a reloaded posterior gives the same numbers
    post.mean_concentration = Eigen::MatrixXd::Zero(post.design.cell_count(), post.design.topics);
    for (Eigen::Index i = 0; i < post.draws.rows(); ++i)
        post.mean_concentration += cell_concentration(unflatten(post.draws.row(i).transpose(), post.layout), post.design);
    post.mean_concentration /= static_cast<double>(post.draws.rows());
}

} // namespace

std::vector<Comparison> compare_neighbors(const EventPosterior& post, const Timeline& timeline, ComparisonLevel level,
                                          double mass)
{
    if (!(mass > 0.0 && mass < 1.0))
        throw InputError("credible mass must be in (0, 1)");
    const bool gov = level == ComparisonLevel::Government;
    const auto& present = gov ? post.design.governments : post.design.elections;
    const ParamKind kind = gov ? ParamKind::Alpha : ParamKind::Beta;
    auto compact = [&](int timeline_index) {
        const auto it = std::lower_bound(present.begin(), present.end(), timeline_index);
        return it != present.end() && *it == timeline_index ? static_cast<int>(it - present.begin()) : -1;
    };
    const double lo_q = 0.5 * (1.0 - mass), hi_q = 1.0 - lo_q;
    const int P = post.design.topics;

    std::vector<Comparison> out;
    for (const auto& [earlier, later] : gov ? timeline.government_pairs() : timeline.election_pairs()) {
        const int a = compact(earlier), b = compact(later);
        if (a < 0 || b < 0)
            continue;
        Comparison cmp;
        cmp.earlier = earlier;
        cmp.later = later;
        cmp.intervals.resize(P, 4);
        for (int p = 0; p < P; ++p) {
            const Eigen::VectorXd da = post.column(kind, a, p), db = post.column(kind, b, p);
            cmp.intervals.row(p) << quantile(da, lo_q), quantile(da, hi_q), quantile(db, lo_q), quantile(db, hi_q);
            if (cmp.intervals(p, 2) > cmp.intervals(p, 1) || cmp.intervals(p, 3) < cmp.intervals(p, 0))
                cmp.flagged.push_back(p);
        }
        out.push_back(std::move(cmp));
    }
    return out;
}

std::vector<OutlierDay> outlier_scores(const ThetaPanel& panel, const Eigen::MatrixXd& day_concentration,
                                       double threshold)
{
    if (day_concentration.rows() != panel.shares.rows() || day_concentration.cols() != panel.shares.cols())
        throw InputError("concentration matrix does not match the panel");
    std::vector<OutlierDay> out;
    for (int d = 0; d < panel.days(); ++d) {
        const Eigen::RowVectorXd a = day_concentration.row(d);
        const double a0 = a.sum();
        OutlierDay day;
        day.chamber = panel.rows[static_cast<std::size_t>(d)].chamber;
        day.date = panel.rows[static_cast<std::size_t>(d)].date;
        day.z.resize(panel.groups());
        for (int p = 0; p < panel.groups(); ++p) {
            const double m = a[p] / a0;
            const double sd = std::sqrt(m * (1.0 - m) / (a0 + 1.0));
            day.z[p] = (panel.shares(d, p) - m) / sd;
            if (std::abs(day.z[p]) > threshold)
                day.topics.push_back(p);
        }
        out.push_back(std::move(day));
    }
    return out;
}

std::vector<OutlierDay> detect_outlier_days(const ThetaPanel& panel, const EventPosterior& post, double threshold)
{
    if (static_cast<int>(post.design.cell_of_day.size()) != panel.days())
        throw InputError("posterior was fitted to a different panel");
    Eigen::MatrixXd conc(panel.days(), panel.groups());
    for (int d = 0; d < panel.days(); ++d)
        conc.row(d) = post.mean_concentration.row(post.design.cell_of_day[static_cast<std::size_t>(d)]);
    auto all = outlier_scores(panel, conc, threshold);
    std::erase_if(all, [](const OutlierDay& d) { return !d.flagged(); });
    return all;
}

namespace {

std::string unit_label(const EventPosterior& post, const Timeline& timeline, ParamKind kind, int unit)
{
    switch (kind) {
    case ParamKind::Alpha:
    case ParamKind::Sigma:
        return std::to_string(timeline.governments()[static_cast<std::size_t>(post.design.governments[static_cast<std::size_t>(unit)])].id);
    case ParamKind::Beta:
        return std::to_string(timeline.elections()[static_cast<std::size_t>(post.design.elections[static_cast<std::size_t>(unit)])].id);
    case ParamKind::Delta: {
        const auto& c = post.design.cells[static_cast<std::size_t>(unit)];
        return std::string(to_string(c.chamber)) + ":" + std::to_string(c.period);
    }
    case ParamKind::Mu:
        return std::string(to_string(unit == 0 ? Chamber::HouseOfRepresentatives : Chamber::Senate));
    }
    return {};
}

constexpr ParamKind kAllKinds[] = {ParamKind::Alpha, ParamKind::Beta, ParamKind::Delta, ParamKind::Mu, ParamKind::Sigma};

std::string join_topics(const std::vector<int>& topics, const std::vector<std::string>& names)
{
    std::string s;
    for (int p : topics) {
        if (!s.empty())
            s += "; ";
        s += p < static_cast<int>(names.size()) ? names[static_cast<std::size_t>(p)] : std::to_string(p + 1);
    }
    return s;
}

} // namespace

void write_draws_csv(std::ostream& out, const EventPosterior& post, const Timeline& timeline)
{
    csv::write_record(out, {"param", "g_or_e_or_cs", "topic", "chain", "draw", "value"});
    for (ParamKind kind : kAllKinds)
        for (int u = 0; u < post.layout.units(kind); ++u) {
            const std::string label = unit_label(post, timeline, kind, u);
            for (int p = 0; p < post.layout.topics; ++p) {
                const int col = post.layout.index(kind, u, p);
                for (int c = 0; c < post.chains; ++c)
                    for (int i = 0; i < post.draws_per_chain; ++i)
                        csv::write_record(out, {std::string(to_string(kind)), label, std::to_string(p + 1),
                                                std::to_string(c + 1), std::to_string(i + 1),
                                                csv::format_number(post.draws(c * post.draws_per_chain + i, col))});
            }
        }
}

void write_summary_csv(std::ostream& out, const EventPosterior& post, const Timeline& timeline)
{
    csv::write_record(out, {"param", "unit", "topic", "mean", "sd", "q2.5", "q97.5", "rhat"});
    for (ParamKind kind : kAllKinds)
        for (int u = 0; u < post.layout.units(kind); ++u) {
            const std::string label = unit_label(post, timeline, kind, u);
            for (int p = 0; p < post.layout.topics; ++p) {
                const int col = post.layout.index(kind, u, p);
                const Eigen::VectorXd x = post.draws.col(col);
                const double mean = x.mean();
                const double sd = x.size() > 1 ? std::sqrt((x.array() - mean).square().sum() / static_cast<double>(x.size() - 1)) : 0.0;
                csv::write_record(out, {std::string(to_string(kind)), label, std::to_string(p + 1), csv::format_number(mean),
                                        csv::format_number(sd), csv::format_number(quantile(x, 0.025)),
                                        csv::format_number(quantile(x, 0.975)), csv::format_number(post.rhat[col])});
            }
        }
}

EventPosterior read_posterior(const ThetaPanel& panel, const Timeline& timeline, const std::filesystem::path& draws_csv)
{
    EventPosterior post;
    post.design = EventDesign::build(panel, timeline);
    post.layout = ParamLayout(post.design);
    const auto t = csv::Table::read(draws_csv);
    const auto c_param = t.column("param"), c_unit = t.column("g_or_e_or_cs"), c_topic = t.column("topic"),
               c_chain = t.column("chain"), c_draw = t.column("draw"), c_value = t.column("value");

    std::map<std::pair<std::string, std::string>, int> unit_of;
    for (ParamKind kind : kAllKinds)
        for (int u = 0; u < post.layout.units(kind); ++u)
            unit_of[{std::string(to_string(kind)), unit_label(post, timeline, kind, u)}] = u;
    long long chains = 0, per_chain = 0;
    for (const auto& r : t.rows()) {
        chains = std::max(chains, csv::parse_integer(r[c_chain]));
        per_chain = std::max(per_chain, csv::parse_integer(r[c_draw]));
    }
    if (chains < 1 || per_chain < 1 || static_cast<long long>(t.size()) != chains * per_chain * post.layout.size())
        throw InputError(draws_csv.string() + ": draws do not match the panel's parameter layout");
    post.chains = static_cast<int>(chains);
    post.draws_per_chain = static_cast<int>(per_chain);
    post.draws = Eigen::MatrixXd::Constant(chains * per_chain, post.layout.size(), std::numeric_limits<double>::quiet_NaN());
    for (const auto& r : t.rows()) {
        const auto it = unit_of.find({r[c_param], r[c_unit]});
        const long long p = csv::parse_integer(r[c_topic]) - 1;
        const long long c = csv::parse_integer(r[c_chain]) - 1, i = csv::parse_integer(r[c_draw]) - 1;
        if (it == unit_of.end() || p < 0 || p >= post.design.topics || c < 0 || i < 0)
            throw InputError(draws_csv.string() + ": unknown parameter " + r[c_param] + " " + r[c_unit] + " topic " + r[c_topic]);
        int col = -1;
        for (ParamKind k : kAllKinds)
            if (to_string(k) == r[c_param])
                col = post.layout.index(k, it->second, static_cast<int>(p));
        post.draws(c * per_chain + i, col) = csv::parse_number(r[c_value]);
    }
    if (!post.draws.allFinite())
        throw InputError(draws_csv.string() + ": missing or non-finite draws");
    post.spec.topics = post.design.topics;
    post.spec.chains = post.chains;
    summarize_draws(post);
    return post;
}

void write_comparison_csv(std::ostream& out, const std::vector<Comparison>& rows, const Timeline& timeline,
                          ComparisonLevel level, const std::vector<std::string>& topic_names)
{
    csv::write_record(out, {"earlier_id", "earlier", "later_id", "later", "different", "topics"});
    for (const auto& r : rows) {
        std::string e_id, e_name, l_id, l_name;
        if (level == ComparisonLevel::Government) {
            const auto& a = timeline.governments()[static_cast<std::size_t>(r.earlier)];
            const auto& b = timeline.governments()[static_cast<std::size_t>(r.later)];
            e_id = std::to_string(a.id), e_name = a.name, l_id = std::to_string(b.id), l_name = b.name;
        } else {
            const auto& a = timeline.elections()[static_cast<std::size_t>(r.earlier)];
            const auto& b = timeline.elections()[static_cast<std::size_t>(r.later)];
            e_id = std::to_string(a.id), e_name = format_date(a.date), l_id = std::to_string(b.id),
            l_name = format_date(b.date);
        }
        csv::write_record(out, {e_id, e_name, l_id, l_name, r.different() ? "Yes" : "No", join_topics(r.flagged, topic_names)});
    }
}

void write_government_table(std::ostream& out, const std::vector<Comparison>& rows, const Timeline& timeline,
                            const std::vector<std::string>& topic_names)
{
    csv::write_record(out, {"number", "premiership", "start", "end", "party_changed", "topics"});
    const auto& govs = timeline.governments();
    for (const auto& r : rows) {
        if (!r.different())
            continue;
        const auto& g = govs[static_cast<std::size_t>(r.later)];
        // party change is judged against the immediately preceding government
        const bool changed = r.later > 0 && govs[static_cast<std::size_t>(r.later - 1)].party != g.party;
        csv::write_record(out, {std::to_string(g.id), g.name, format_date(g.start), g.end ? format_date(*g.end) : "-",
                                changed ? "Yes" : "No", join_topics(r.flagged, topic_names)});
    }
}

void write_election_table(std::ostream& out, const std::vector<Comparison>& rows, const Timeline& timeline,
                          const std::vector<std::string>& topic_names)
{
    csv::write_record(out, {"number", "year", "date", "total_seats", "winner", "changed_party", "topics"});
    const auto& els = timeline.elections();
    for (const auto& r : rows) {
        if (!r.different())
            continue;
        const auto& e = els[static_cast<std::size_t>(r.later)];
        const bool changed = els[static_cast<std::size_t>(r.earlier)].winner != e.winner;
        csv::write_record(out, {std::to_string(e.id), std::to_string(static_cast<int>(e.date.year())), format_date(e.date),
                                std::to_string(e.seats), e.winner, changed ? "Yes" : "No",
                                join_topics(r.flagged, topic_names)});
    }
}

void write_outliers_csv(std::ostream& out, const std::vector<OutlierDay>& days,
                        const std::vector<std::string>& topic_names)
{
    std::vector<std::string> header = {"chamber", "date", "topics", "max_abs_z"};
    const int P = days.empty() ? static_cast<int>(topic_names.size()) : static_cast<int>(days.front().z.size());
    for (int p = 1; p <= P; ++p)
        header.push_back("z_" + std::to_string(p));
    csv::write_record(out, header);
    for (const auto& d : days) {
        std::vector<std::string> f = {std::string(to_string(d.chamber)), format_date(d.date), join_topics(d.topics, topic_names),
                                      csv::format_number(d.z.cwiseAbs().maxCoeff())};
        for (Eigen::Index p = 0; p < d.z.size(); ++p)
            f.push_back(csv::format_number(d.z[p]));
        csv::write_record(out, f);
    }
}

SimulatedPanel simulate_panel(const PanelSimulationSpec& spec)
{
    if (spec.topics < 2 || spec.governments < 1 || spec.elections < 1 || spec.periods < std::max(spec.governments, spec.elections) ||
        spec.days_per_period < 1)
        throw InputError("invalid panel simulation layout");
    if (spec.period_spacing_days - spec.days_per_period + 1 < kPeriodGapDays)
        throw InputError("period spacing too small to separate sitting periods");
    if (!(spec.sigma_low > 0.0 && spec.sigma_low <= spec.sigma_high))
        throw InputError("invalid sigma range for simulation");

    const Date origin{std::chrono::year{2000}, std::chrono::month{1}, std::chrono::day{3}};
    auto period_start = [&](int s) { return add_days(origin, s * spec.period_spacing_days); };
    auto block_of = [&](int s, int blocks) {
        // block b covers periods [floor(b S / B), floor((b+1) S / B))
        int b = 0;
        while (b + 1 < blocks && (b + 1) * spec.periods / blocks <= s)
            ++b;
        return b;
    };
    auto first_period = [&](int b, int blocks) { return b * spec.periods / blocks; };

    std::vector<Government> govs;
    for (int g = 0; g < spec.governments; ++g) {
        Government gv;
        gv.id = g + 1;
        gv.name = "G" + std::to_string(g + 1);
        gv.prime_minister = gv.name;
        gv.party = g % 2 == 0 ? "A" : "B";
        gv.start = add_days(period_start(first_period(g, spec.governments)), -1);
        if (g + 1 < spec.governments)
            gv.end = add_days(period_start(first_period(g + 1, spec.governments)), -1);
        if (g > 0)
            gv.compare_to = g;
        govs.push_back(gv);
    }
    std::vector<Election> els;
    for (int e = 0; e < spec.elections; ++e)
        els.push_back({e + 1, add_days(period_start(first_period(e, spec.elections)), -3), e % 2 == 0 ? "A" : "B", 100});

    SimulatedPanel sim;
    sim.timeline = Timeline(std::move(govs), std::move(els));
    for (int s = 0; s < spec.periods; ++s)
        for (int k = 0; k < spec.days_per_period; ++k)
            for (int c = 0; c < (spec.both_chambers ? 2 : 1); ++c)
                sim.panel.rows.push_back({c == 0 ? Chamber::HouseOfRepresentatives : Chamber::Senate,
                                          add_days(period_start(s), k), s, block_of(s, spec.governments) + 1,
                                          block_of(s, spec.elections) + 1});
    for (int p = 0; p < spec.topics; ++p)
        sim.panel.group_names.push_back("topic " + std::to_string(p + 1));
    sim.panel.shares = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(sim.panel.rows.size()), spec.topics,
                                                 1.0 / spec.topics);
    sim.design = EventDesign::build(sim.panel, sim.timeline);

    Rng rng(spec.seed, 0x7a11);
    EventParams& t = sim.truth;
    t = EventParams::zeros(sim.design);
    for (Eigen::Index i = 0; i < t.alpha.size(); ++i)
        t.alpha.data()[i] = spec.alpha_mean + spec.alpha_sd * rng.normal();
    for (Eigen::Index i = 0; i < t.beta.size(); ++i)
        t.beta.data()[i] = spec.beta_sd * rng.normal();
    for (int p = 0; p < spec.topics; ++p) {
        t.mu(0, p) = spec.mu_sd * rng.normal();
        t.mu(1, p) = -t.mu(0, p);
    }
    for (Eigen::Index i = 0; i < t.sigma.size(); ++i)
        t.sigma.data()[i] = spec.sigma_low + (spec.sigma_high - spec.sigma_low) * rng.uniform();
    for (int j = 0; j < sim.design.cell_count(); ++j) {
        const auto& c = sim.design.cells[static_cast<std::size_t>(j)];
        for (int p = 0; p < spec.topics; ++p)
            t.delta(j, p) = t.mu(chamber_index(c.chamber), p) + t.sigma(c.government, p) * rng.normal();
    }
    resample_shares(sim, spec.seed);
    return sim;
}

void resample_shares(SimulatedPanel& sim, std::uint64_t seed)
{
    Rng rng(seed, 0xda75);
    const Eigen::MatrixXd conc = cell_concentration(sim.truth, sim.design);
    for (int d = 0; d < sim.panel.days(); ++d) {
        const Eigen::VectorXd a = conc.row(sim.design.cell_of_day[static_cast<std::size_t>(d)]).transpose();
        Eigen::VectorXd theta;
        do {
            theta = rng.dirichlet(a);
        } while ((theta.array() <= 0.0).any());
        sim.panel.shares.row(d) = theta.transpose();
    }
    sim.design = EventDesign::build(sim.panel, sim.timeline);
}

} // namespace agenda
