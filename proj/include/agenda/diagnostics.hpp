#pragma once

#include "agenda/corpus.hpp"
#include "agenda/topic_models.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace agenda {

struct HeldoutOptions {
    int fold_in_iters = 100;
    int fold_in_burn_in = 50;
    std::uint64_t seed = 1;
};

/// Document completion. Each held-out document's tokens are shuffled (seeded);
/// theta is estimated from the first floor(n/2) tokens by Gibbs folding-in
/// with beta fixed, and the remaining tokens are scored under
/// sum_k theta_k beta_kw. Returns the pooled mean log probability per scored
/// token. Documents with fewer than 2 tokens are skipped with a warning.
/// Throws InputError when nothing can be scored.
double heldout_loglik(const Eigen::MatrixXd& beta, const DocTermMatrix& heldout, double alpha,
                      const HeldoutOptions& options = {});

inline constexpr int kDefaultTopWords = 10;

/// Indices of the M largest entries of a row, largest first; ties by index.
std::vector<int> top_words(const Eigen::Ref<const Eigen::RowVectorXd>& row, int m);

/// Per topic, mean over its top-M words of beta_kv / sum_j beta_jv.
Eigen::VectorXd exclusivity(const Eigen::MatrixXd& beta, int m = kDefaultTopWords);

/// Per topic, sum over top-word pairs i < j (by rank) of
/// log((codoc(v_i, v_j) + 1) / doc(v_j)). A word in no document counts as
/// one document, with a warning.
Eigen::VectorXd coherence(const Eigen::MatrixXd& beta, const DocTermMatrix& dtm, int m = kDefaultTopWords);

/// Mean squared Pearson residual over nonzero cells,
/// (x - N m)^2 / (N m (1 - m)) with m = theta_d . beta_v. Model probabilities
/// and their complements are floored at 1e-12 (warning when m hits the floor).
double dispersion(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& beta, const DocTermMatrix& dtm);

struct DiagnosticsReport {
    int topics = 0;
    double heldout_loglik = 0.0;
    Eigen::VectorXd exclusivity;
    double exclusivity_mean = 0.0;
    Eigen::VectorXd coherence;
    double coherence_mean = 0.0;
    double dispersion = 0.0;
    std::string error; ///< non-empty when the fit for this K failed
};

struct SweepOptions {
    double heldout_fraction = 0.2;
    bool scale_alpha = true; ///< alpha = 50/K for each K, else the template's alpha
    int top_words = kDefaultTopWords;
    HeldoutOptions heldout;
    int threads = 1;
};

/// Splits documents (seeded by the template) into training and held-out
/// sets, fits LDA per K on the training set and scores every diagnostic.
/// A failing K is reported with `error` set and the sweep continues.
std::vector<DiagnosticsReport> sweep_topics(const DocTermMatrix& dtm, const std::vector<int>& topic_counts,
                                            const LdaHyper& hyper_template, const SweepOptions& options = {});

/// Deterministic train/held-out split: `fraction` of rows (at least one, at
/// most all but one) are held out.
std::pair<std::vector<int>, std::vector<int>> split_documents(int docs, double fraction, std::uint64_t seed);

/// `K,heldout,exclusivity_mean,coherence_mean,dispersion`; failed K skipped.
void write_report_csv(std::ostream& out, const std::vector<DiagnosticsReport>& reports);
/// `K,topic,exclusivity,coherence`
void write_topic_scores_csv(std::ostream& out, const std::vector<DiagnosticsReport>& reports);

} // namespace agenda
