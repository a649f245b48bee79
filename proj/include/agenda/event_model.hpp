#pragma once

#include "agenda/cap_mapping.hpp"
#include "agenda/common.hpp"
#include "agenda/timeline.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace agenda {

struct EventModelSpec {
    int topics = 19; ///< P, must match the panel
    double prior_sd_alpha = 10.0;
    double prior_sd_beta = 10.0;
    double prior_sd_mu = 10.0;
    double sigma_upper = 3.0;
    int chains = 4;
    int iters = 4000;
    int burn_in = 2000;
    int thin = 1;
    std::uint64_t seed = 1;
    int threads = 1;
    double target_accept = 0.44;
    int adapt_batch = 50;

    void validate() const;
    int kept_per_chain() const { return (iters - burn_in) / thin; }
};

/// Panel reduced to what the sampler needs: one cell per (chamber, sitting
/// period) with its government, election, within-election counter and the
/// sufficient statistics of its days.
struct EventDesign {
    struct Cell {
        Chamber chamber = Chamber::HouseOfRepresentatives;
        int period = 0;
        int government = 0;          ///< index into `governments`
        int election = 0;            ///< index into `elections`
        int counter = 1;             ///< 1-based period number within the election
        int periods_in_election = 1; ///< N_e
        int days = 0;
    };

    int topics = 0;
    std::vector<int> governments; ///< timeline indices present in the panel
    std::vector<int> elections;   ///< timeline indices present in the panel
    std::vector<Cell> cells;      ///< ordered by (period, chamber)
    std::vector<int> cell_of_day; ///< per panel row
    Eigen::MatrixXd log_theta;     ///< days x P
    Eigen::MatrixXd log_theta_sum; ///< cells x P, sum of log shares over the cell's days

    static EventDesign build(const ThetaPanel& panel, const Timeline& timeline);

    int government_count() const { return static_cast<int>(governments.size()); }
    int election_count() const { return static_cast<int>(elections.size()); }
    int cell_count() const { return static_cast<int>(cells.size()); }
};

/// One state of the model. mu has one row per chamber (hor, senate) and sums
/// to zero over chambers for every topic.
struct EventParams {
    Eigen::MatrixXd alpha; ///< G x P
    Eigen::MatrixXd beta;  ///< E x P
    Eigen::MatrixXd delta; ///< cells x P
    Eigen::MatrixXd mu;    ///< 2 x P
    Eigen::MatrixXd sigma; ///< G x P

    /// Zero everywhere except sigma = 1.
    static EventParams zeros(const EventDesign& design);
};

/// alpha + beta * (N - s) + delta, s counted from 1 within the election.
inline double log_concentration(double alpha, double beta, int periods_in_election, int counter, double delta)
{
    return alpha + beta * static_cast<double>(periods_in_election - counter) + delta;
}

double log_concentration(const EventParams& params, const EventDesign& design, int cell, int p);

/// Concentration matrix exp(log_concentration), cells x P.
Eigen::MatrixXd cell_concentration(const EventParams& params, const EventDesign& design);

/// Exact Dirichlet log density. Throws InputError when theta is not strictly
/// inside the simplex or a concentration is not positive.
template <typename ThetaT, typename ConcT>
double dirichlet_loglik(const Eigen::MatrixBase<ThetaT>& theta, const Eigen::MatrixBase<ConcT>& concentration)
{
    if (theta.size() != concentration.size() || theta.size() < 2)
        throw InputError("Dirichlet density needs matching vectors of length >= 2");
    double a0 = 0.0, s = 0.0, sum = 0.0;
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        const double t = theta[i];
        const double a = concentration[i];
        if (!(t > 0.0 && t < 1.0))
            throw InputError("Dirichlet density evaluated on the simplex boundary");
        if (!(a > 0.0) || !std::isfinite(a))
            throw InputError("Dirichlet concentration must be positive and finite");
        a0 += a;
        sum += t;
        s += (a - 1.0) * std::log(t) - std::lgamma(a);
    }
    if (std::abs(sum - 1.0) > 1e-8)
        throw InputError("Dirichlet density evaluated off the simplex");
    return std::lgamma(a0) + s;
}

/// Log posterior up to the evidence, with normalized priors (mu's prior is on
/// the house row only);
/// -inf when sigma leaves (0, sigma_upper) or mu breaks the sum-to-zero rule.
double log_posterior(const EventParams& params, const EventDesign& design, const EventModelSpec& spec);

enum class ParamKind { Alpha, Beta, Delta, Mu, Sigma };

std::string_view to_string(ParamKind kind);

/// Column layout of a flattened parameter vector.
struct ParamLayout {
    int topics = 0;
    int governments = 0, elections = 0, cells = 0;

    explicit ParamLayout(const EventDesign& design);
    ParamLayout() = default;
    int offset(ParamKind kind) const;
    int units(ParamKind kind) const;
    int index(ParamKind kind, int unit, int p) const { return offset(kind) + unit * topics + p; }
    int size() const { return offset(ParamKind::Sigma) + governments * topics; }
};

Eigen::VectorXd flatten(const EventParams& params, const ParamLayout& layout);
EventParams unflatten(const Eigen::Ref<const Eigen::VectorXd>& v, const ParamLayout& layout);

struct BlockAcceptance {
    double alpha = 0.0, beta = 0.0, delta = 0.0, sigma = 0.0;
};

struct EventPosterior {
    EventDesign design;
    EventModelSpec spec;
    ParamLayout layout;
    int chains = 0;
    int draws_per_chain = 0;
    Eigen::MatrixXd draws; ///< (chains * draws_per_chain) x layout.size(), chain-major
    std::vector<BlockAcceptance> acceptance;           ///< post-burn-in, per chain
    std::vector<std::vector<double>> log_posterior_trace; ///< per chain, every iteration
    Eigen::VectorXd rhat;                 ///< split-chain R-hat per parameter
    double rhat_exceed_fraction = 0.0;    ///< share of parameters with R-hat > 1.1
    bool rhat_warning = false;            ///< more than 5% exceed 1.1
    Eigen::MatrixXd mean_concentration;   ///< cells x P, posterior mean of exp(eta)

    Eigen::VectorXd column(ParamKind kind, int unit, int p) const
    {
        return draws.col(layout.index(kind, unit, p));
    }
    EventParams posterior_mean() const;
};

/// Metropolis-within-Gibbs over alpha, beta, delta (adaptive component-wise
/// random walks during burn-in), mu (exact normal draw) and sigma (random
/// walk reflected into (0, sigma_upper)). Chains use random streams 1..chains
/// of the seed and may run on separate threads. Throws ModelError when the
/// starting posterior is not finite.
EventPosterior fit_event_model(const ThetaPanel& panel, const Timeline& timeline, const EventModelSpec& spec);

/// Split-chain potential scale reduction; `chains` is chain-major.
double split_rhat(const Eigen::Ref<const Eigen::VectorXd>& draws, int chains);

/// Type-7 sample quantile.
double quantile(Eigen::VectorXd values, double q);

enum class ComparisonLevel { Government, Election };

struct Comparison {
    int earlier = 0; ///< timeline index
    int later = 0;
    Eigen::MatrixXd intervals; ///< P x 4: earlier lo, earlier hi, later lo, later hi
    std::vector<int> flagged;  ///< 0-based topics whose intervals do not overlap
    bool different() const { return !flagged.empty(); }
};

/// Central credible intervals of neighbouring units (governments by their
/// comparison links, elections consecutively); a topic is flagged when the
/// intervals do not overlap. Pairs with a unit absent from the panel are
/// skipped.
std::vector<Comparison> compare_neighbors(const EventPosterior& post, const Timeline& timeline, ComparisonLevel level,
                                          double mass = 0.95);

struct OutlierDay {
    Chamber chamber = Chamber::HouseOfRepresentatives;
    Date date{};
    Eigen::VectorXd z; ///< per topic
    std::vector<int> topics; ///< 0-based topics with |z| > threshold
    bool flagged() const { return !topics.empty(); }
};

/// z = (theta - a/a0) / sqrt(m (1 - m) / (a0 + 1)) per day and topic, with a
/// the day's concentration (rows aligned with the panel). Returns every day.
std::vector<OutlierDay> outlier_scores(const ThetaPanel& panel, const Eigen::MatrixXd& day_concentration,
                                       double threshold = 3.0);

/// Flagged days only, using the posterior-mean concentration of each day's cell.
std::vector<OutlierDay> detect_outlier_days(const ThetaPanel& panel, const EventPosterior& post,
                                            double threshold = 3.0);

// Output tables
/// Long format `param,g_or_e_or_cs,topic,chain,draw,value`.
void write_draws_csv(std::ostream& out, const EventPosterior& post, const Timeline& timeline);
/// Rebuilds a posterior from a draws file written for the same panel and
/// timeline; R-hat and mean concentrations are recomputed.
EventPosterior read_posterior(const ThetaPanel& panel, const Timeline& timeline, const std::filesystem::path& draws_csv);
/// `param,unit,topic,mean,sd,q2.5,q97.5,rhat`
void write_summary_csv(std::ostream& out, const EventPosterior& post, const Timeline& timeline);
/// Every compared pair: `earlier_id,earlier,later_id,later,different,topics`
void write_comparison_csv(std::ostream& out, const std::vector<Comparison>& rows, const Timeline& timeline,
                          ComparisonLevel level, const std::vector<std::string>& topic_names);
/// Flagged governments: `number,premiership,start,end,party_changed,topics`
void write_government_table(std::ostream& out, const std::vector<Comparison>& rows, const Timeline& timeline,
                            const std::vector<std::string>& topic_names);
/// Flagged elections: `number,year,date,total_seats,winner,changed_party,topics`
void write_election_table(std::ostream& out, const std::vector<Comparison>& rows, const Timeline& timeline,
                          const std::vector<std::string>& topic_names);
/// `chamber,date,topics,max_abs_z,z_1..z_P`
void write_outliers_csv(std::ostream& out, const std::vector<OutlierDay>& days,
                        const std::vector<std::string>& topic_names);

// Synthetic panels

struct PanelSimulationSpec {
    int topics = 4;
    int governments = 6;
    int elections = 8;
    int periods = 60;
    int days_per_period = 4; ///< sitting days per period; both chambers sit each day
    bool both_chambers = true;
    double alpha_mean = 2.0;
    double alpha_sd = 0.5;
    double beta_sd = 0.1; ///< 0 gives the null of no election effects
    double mu_sd = 0.2;
    double sigma_low = 0.1;
    double sigma_high = 0.4;
    int period_spacing_days = 21;
    std::uint64_t seed = 1;
};

struct SimulatedPanel {
    Timeline timeline;
    ThetaPanel panel;
    EventDesign design;
    EventParams truth;
};

/// Lays out governments and elections over the periods in equal blocks with
/// offset boundaries, draws parameters and then shares.
SimulatedPanel simulate_panel(const PanelSimulationSpec& spec);

/// Redraws the panel's shares from sim.truth.
void resample_shares(SimulatedPanel& sim, std::uint64_t seed);

} // namespace agenda
