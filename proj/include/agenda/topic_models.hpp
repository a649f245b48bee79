#pragma once

#include "agenda/corpus.hpp"
#include "agenda/random.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace agenda {

struct LdaHyper {
    int topics = 80;
    double alpha = 50.0 / 80.0; ///< symmetric document-topic Dirichlet
    double eta = 0.1;           ///< symmetric topic-term Dirichlet
    int iters = 1000;
    int burn_in = 500;
    std::uint64_t seed = 1;

    /// alpha = 50/K, eta = 0.1.
    static LdaHyper with_defaults(int topics);
    void validate() const;
};

struct TopicModelFit {
    Eigen::MatrixXd beta;  ///< K x V, rows sum to 1
    Eigen::MatrixXd theta; ///< D x K, rows sum to 1
    std::vector<std::vector<int>> z;
    std::vector<double> loglik; ///< collapsed log p(w | z) after each sweep
};

/// Logistic-normal parameters; the last topic is the reference with eta = 0.
struct CtmParams {
    Eigen::VectorXd mu;      ///< K-1
    Eigen::MatrixXd sigma;   ///< (K-1) x (K-1)
    Eigen::MatrixXd eta_doc; ///< D x (K-1)
};

struct CtmOptions {
    int mh_steps = 2;            ///< Metropolis steps per document per sweep
    double initial_step = 0.3;   ///< random-walk scale for eta_d
    double target_low = 0.2;     ///< adaptation keeps acceptance in [low, high]
    double target_high = 0.4;
    bool diagonal_sigma = false; ///< restrict the covariance to its diagonal
    double ridge = 1e-6;
};

struct CtmFit {
    TopicModelFit fit;
    CtmParams params;
    double acceptance_rate = 0.0; ///< post-burn-in eta_d acceptance
};

/// Token view of a document-term matrix, tokens of a document in term order.
struct TokenCorpus {
    int vocab_size = 0;
    std::vector<std::vector<int>> docs;

    static TokenCorpus from_dtm(const DocTermMatrix& dtm);
    long long total_tokens() const;
};

/// Count tables of a collapsed sampler. Counts always equal those
/// reconstructed from `z`.
class GibbsState {
public:
    GibbsState(TokenCorpus corpus, int topics);

    /// Uniform random initial assignment.
    void initialize_random(Rng& rng);
    /// Explicit initial assignment, same shape as the corpus.
    void initialize(const std::vector<std::vector<int>>& z);

    void assign(int d, int n, int k);
    void unassign(int d, int n);

    /// One systematic collapsed-Gibbs sweep over every token.
    void sweep(Rng& rng, const LdaHyper& hyper);

    /// Collapsed log p(w | z) under the symmetric topic-term prior eta.
    double log_likelihood(double eta) const;

    int topics() const { return topics_; }
    int vocab_size() const { return corpus_.vocab_size; }
    int docs() const { return static_cast<int>(corpus_.docs.size()); }
    const TokenCorpus& corpus() const { return corpus_; }
    const std::vector<std::vector<int>>& z() const { return z_; }
    const Eigen::MatrixXi& topic_term() const { return topic_term_; } ///< K x V
    const Eigen::VectorXi& topic_total() const { return topic_total_; }
    const Eigen::MatrixXi& doc_topic() const { return doc_topic_; } ///< D x K
    const Eigen::VectorXi& doc_total() const { return doc_total_; }

    /// Smoothed point estimates from the current counts.
    Eigen::MatrixXd beta_estimate(double eta) const;
    Eigen::MatrixXd theta_estimate(double alpha) const;

private:
    TokenCorpus corpus_;
    int topics_;
    std::vector<std::vector<int>> z_;
    Eigen::MatrixXi topic_term_;
    Eigen::VectorXi topic_total_;
    Eigen::MatrixXi doc_topic_;
    Eigen::VectorXi doc_total_;
    Eigen::VectorXd scratch_;
};

/// Full conditional p(z_{d,n} = k | w, z_{-(d,n)}) with token (d, n) excluded
/// from every count:
///   (n_kw + eta) / (n_k + V eta) * (n_dk + alpha) / (n_d + K alpha).
/// An unassigned token (z = -1) is simply not subtracted.
Eigen::VectorXd gibbs_conditional(const GibbsState& state, int d, int n, const LdaHyper& hyper);

/// Collapsed Gibbs LDA from a uniform random start. Estimates average the
/// smoothed count ratios over post-burn-in sweeps. Throws InputError when K
/// exceeds the token count.
TopicModelFit fit_lda(const DocTermMatrix& dtm, const LdaHyper& hyper);
TopicModelFit fit_lda(const DocTermMatrix& dtm, const LdaHyper& hyper, const std::vector<std::vector<int>>& initial_z);

/// Runs `chains` independent LDA chains (random streams 0..chains-1 of the
/// seed; stream 0 is the single-chain fit) and keeps the one with the highest
/// mean post-burn-in log-likelihood.
TopicModelFit fit_lda_chains(const DocTermMatrix& dtm, const LdaHyper& hyper, int chains, int threads = 1);

/// Correlated topic model by Metropolis-within-Gibbs: token assignments given
/// theta_d (topic-term collapsed), random-walk Metropolis on each eta_d, and
/// empirical-Bayes updates of mu and Sigma from the current eta_d.
/// The first min(burn_in / 2, 50) sweeps are plain collapsed LDA sweeps that
/// seed eta_d from the smoothed document-topic counts. Returned eta_doc, mu
/// and Sigma are post-burn-in means; theta = softmax((eta_doc, 0)).
CtmFit fit_ctm(const DocTermMatrix& dtm, const LdaHyper& hyper, const CtmOptions& options = {});

/// softmax((eta, 0)).
Eigen::VectorXd logistic_normal_theta(const Eigen::Ref<const Eigen::VectorXd>& eta);
/// Inverse of logistic_normal_theta: log(theta_k / theta_K), k < K.
Eigen::VectorXd logistic_normal_eta(const Eigen::Ref<const Eigen::VectorXd>& theta);

/// Re-expresses logistic-normal parameters after reordering topics:
/// new topic k is old topic order[k]. The map is linear in eta, so
/// Sigma' = A Sigma A^T exactly.
CtmParams reorder_topics(const CtmParams& params, const std::vector<int>& order);

enum class TopicFamily { Lda, Ctm };

/// Parameters of a generative topic model for synthetic corpora.
struct GenerativeModel {
    TopicFamily family = TopicFamily::Lda;
    Eigen::MatrixXd beta;  ///< K x V
    Eigen::VectorXd alpha; ///< K, LDA family
    Eigen::VectorXd mu;    ///< K-1, CTM family
    Eigen::MatrixXd sigma; ///< (K-1) x (K-1), CTM family
};

struct SimulatedCorpus {
    DocTermMatrix dtm;
    Eigen::MatrixXd theta; ///< D x K, the drawn topic proportions
};

/// Draws theta_d per family, then z and w per token.
SimulatedCorpus generate_corpus(const GenerativeModel& model, std::span<const int> doc_lengths, std::uint64_t seed);

/// K topic-term rows drawn from a symmetric Dirichlet(eta).
Eigen::MatrixXd draw_topics(int topics, int vocab, double eta, Rng& rng);

/// Total-variation distance between two distributions.
template <typename A, typename B>
double total_variation(const Eigen::MatrixBase<A>& p, const Eigen::MatrixBase<B>& q)
{
    return 0.5 * (p - q).cwiseAbs().sum();
}

/// Greedy one-to-one matching of estimated topics to reference topics by
/// smallest total variation; result[k] is the estimated row matched to
/// reference row k.
std::vector<int> greedy_alignment(const Eigen::MatrixXd& estimated, const Eigen::MatrixXd& reference);

/// Mean total variation after greedy alignment.
double aligned_total_variation(const Eigen::MatrixXd& estimated, const Eigen::MatrixXd& reference);

// Serialization: dense CSV with a header row of column ids.
void write_dense_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m, const std::string& row_label,
                     const std::vector<std::string>& column_ids);
Eigen::MatrixXd read_dense_csv(const std::filesystem::path& path);

/// `block,row,col,value` with blocks mu, sigma and eta.
void write_ctm_params(const std::filesystem::path& path, const CtmParams& params);
CtmParams read_ctm_params(const std::filesystem::path& path);

} // namespace agenda
