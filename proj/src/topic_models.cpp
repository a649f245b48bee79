#include "agenda/topic_models.hpp"

#include "agenda/csv.hpp"
#include "agenda/log.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <thread>

namespace agenda {

LdaHyper LdaHyper::with_defaults(int topics)
{
    LdaHyper h;
    h.topics = topics;
    h.alpha = 50.0 / topics;
    h.eta = 0.1;
    return h;
}

void LdaHyper::validate() const
{
    if (topics < 1)
        throw InputError("topic count must be at least 1");
    if (!(alpha > 0.0) || !(eta > 0.0))
        throw InputError("alpha and eta must be positive");
    if (iters < 1 || burn_in < 0 || burn_in >= iters)
        throw InputError("need iters >= 1 and 0 <= burn_in < iters");
}

TokenCorpus TokenCorpus::from_dtm(const DocTermMatrix& dtm)
{
    TokenCorpus tc;
    tc.vocab_size = dtm.cols();
    tc.docs.resize(static_cast<std::size_t>(dtm.rows()));
    for (int d = 0; d < dtm.rows(); ++d) {
        auto& doc = tc.docs[static_cast<std::size_t>(d)];
        for (CountMatrix::InnerIterator it(dtm.counts, d); it; ++it)
            doc.insert(doc.end(), static_cast<std::size_t>(it.value()), static_cast<int>(it.col()));
    }
    return tc;
}

long long TokenCorpus::total_tokens() const
{
    long long n = 0;
    for (const auto& d : docs)
        n += static_cast<long long>(d.size());
    return n;
}

GibbsState::GibbsState(TokenCorpus corpus, int topics)
    : corpus_(std::move(corpus)), topics_(topics),
      topic_term_(Eigen::MatrixXi::Zero(topics, corpus_.vocab_size)), topic_total_(Eigen::VectorXi::Zero(topics)),
      doc_topic_(Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(corpus_.docs.size()), topics)),
      doc_total_(Eigen::VectorXi::Zero(static_cast<Eigen::Index>(corpus_.docs.size()))), scratch_(topics)
{
    z_.resize(corpus_.docs.size());
    for (std::size_t d = 0; d < corpus_.docs.size(); ++d)
        z_[d].assign(corpus_.docs[d].size(), -1);
}

void GibbsState::assign(int d, int n, int k)
{
    auto& slot = z_[static_cast<std::size_t>(d)][static_cast<std::size_t>(n)];
    if (slot >= 0)
        unassign(d, n);
    const int w = corpus_.docs[static_cast<std::size_t>(d)][static_cast<std::size_t>(n)];
    slot = k;
    ++topic_term_(k, w);
    ++topic_total_[k];
    ++doc_topic_(d, k);
    ++doc_total_[d];
}

void GibbsState::unassign(int d, int n)
{
    auto& slot = z_[static_cast<std::size_t>(d)][static_cast<std::size_t>(n)];
    if (slot < 0)
        return;
    const int w = corpus_.docs[static_cast<std::size_t>(d)][static_cast<std::size_t>(n)];
    const int k = slot;
    --topic_term_(k, w);
    --topic_total_[k];
    --doc_topic_(d, k);
    --doc_total_[d];
    slot = -1;
}

void GibbsState::initialize_random(Rng& rng)
{
    for (int d = 0; d < docs(); ++d)
        for (int n = 0; n < static_cast<int>(z_[static_cast<std::size_t>(d)].size()); ++n)
            assign(d, n, rng.uniform_int(topics_));
}

void GibbsState::initialize(const std::vector<std::vector<int>>& z)
{
    if (z.size() != z_.size())
        throw InputError("initial assignment has wrong document count");
    for (int d = 0; d < docs(); ++d) {
        const auto& zd = z[static_cast<std::size_t>(d)];
        if (zd.size() != z_[static_cast<std::size_t>(d)].size())
            throw InputError("initial assignment has wrong length for document " + std::to_string(d));
        for (int n = 0; n < static_cast<int>(zd.size()); ++n) {
            const int k = zd[static_cast<std::size_t>(n)];
            if (k < 0 || k >= topics_)
                throw InputError("initial topic out of range");
            assign(d, n, k);
        }
    }
}

void GibbsState::sweep(Rng& rng, const LdaHyper& hyper)
{
    const double v_eta = corpus_.vocab_size * hyper.eta;
    double* p = scratch_.data();
    for (int d = 0; d < docs(); ++d) {
        const auto& doc = corpus_.docs[static_cast<std::size_t>(d)];
        for (int n = 0; n < static_cast<int>(doc.size()); ++n) {
            unassign(d, n);
            const int w = doc[static_cast<std::size_t>(n)];
            double total = 0.0;
            // the document denominator is constant in k and drops out
            for (int k = 0; k < topics_; ++k) {
                p[k] = (topic_term_(k, w) + hyper.eta) / (topic_total_[k] + v_eta) * (doc_topic_(d, k) + hyper.alpha);
                total += p[k];
            }
            assign(d, n, rng.categorical(p, topics_, total));
        }
    }
}

double GibbsState::log_likelihood(double eta) const
{
    const int V = corpus_.vocab_size;
    const double lg_eta = std::lgamma(eta);
    double ll = 0.0;
    for (int k = 0; k < topics_; ++k) {
        ll += std::lgamma(V * eta) - std::lgamma(topic_total_[k] + V * eta);
        for (int v = 0; v < V; ++v)
            if (const int c = topic_term_(k, v); c > 0)
                ll += std::lgamma(c + eta) - lg_eta;
    }
    return ll;
}

Eigen::MatrixXd GibbsState::beta_estimate(double eta) const
{
    Eigen::MatrixXd beta = topic_term_.cast<double>().array() + eta;
    for (int k = 0; k < topics_; ++k)
        beta.row(k) /= topic_total_[k] + corpus_.vocab_size * eta;
    return beta;
}

Eigen::MatrixXd GibbsState::theta_estimate(double alpha) const
{
    Eigen::MatrixXd theta = doc_topic_.cast<double>().array() + alpha;
    for (int d = 0; d < docs(); ++d)
        theta.row(d) /= doc_total_[d] + topics_ * alpha;
    return theta;
}

Eigen::VectorXd gibbs_conditional(const GibbsState& state, int d, int n, const LdaHyper& hyper)
{
    const int K = state.topics();
    const int w = state.corpus().docs.at(static_cast<std::size_t>(d)).at(static_cast<std::size_t>(n));
    const int current = state.z()[static_cast<std::size_t>(d)][static_cast<std::size_t>(n)];
    const double v_eta = state.vocab_size() * hyper.eta;
    const int nd = state.doc_total()[d] - (current >= 0 ? 1 : 0);

    Eigen::VectorXd p(K);
    for (int k = 0; k < K; ++k) {
        const int own = k == current ? 1 : 0;
        p[k] = (state.topic_term()(k, w) - own + hyper.eta) / (state.topic_total()[k] - own + v_eta) *
               (state.doc_topic()(d, k) - own + hyper.alpha) / (nd + K * hyper.alpha);
    }
    return p / p.sum();
}

namespace {

void check_fit_inputs(const DocTermMatrix& dtm, const LdaHyper& hyper)
{
    hyper.validate();
    if (dtm.rows() == 0 || dtm.cols() == 0)
        throw InputError("document-term matrix is empty");
    const long long tokens = dtm.total_tokens();
    if (hyper.topics > tokens)
        throw InputError("topic count " + std::to_string(hyper.topics) + " exceeds the " + std::to_string(tokens) +
                         " tokens in the corpus");
}

TopicModelFit run_lda(const DocTermMatrix& dtm, const LdaHyper& hyper, std::uint64_t stream,
                      const std::vector<std::vector<int>>* initial_z)
{
    check_fit_inputs(dtm, hyper);
    Rng rng(hyper.seed, stream);
    GibbsState state(TokenCorpus::from_dtm(dtm), hyper.topics);
    if (initial_z)
        state.initialize(*initial_z);
    else
        state.initialize_random(rng);

    TopicModelFit fit;
    fit.beta = Eigen::MatrixXd::Zero(hyper.topics, dtm.cols());
    fit.theta = Eigen::MatrixXd::Zero(dtm.rows(), hyper.topics);
    fit.loglik.reserve(static_cast<std::size_t>(hyper.iters));
    for (int it = 0; it < hyper.iters; ++it) {
        state.sweep(rng, hyper);
        fit.loglik.push_back(state.log_likelihood(hyper.eta));
        if (it >= hyper.burn_in) {
            fit.beta += state.beta_estimate(hyper.eta);
            fit.theta += state.theta_estimate(hyper.alpha);
        }
    }
    const double kept = hyper.iters - hyper.burn_in;
    fit.beta /= kept;
    fit.theta /= kept;
    fit.z = state.z();
    return fit;
}

double mean_tail(const std::vector<double>& trace, int from)
{
    double s = 0.0;
    for (std::size_t i = static_cast<std::size_t>(from); i < trace.size(); ++i)
        s += trace[i];
    return s / static_cast<double>(trace.size() - static_cast<std::size_t>(from));
}

} // namespace

TopicModelFit fit_lda(const DocTermMatrix& dtm, const LdaHyper& hyper) { return run_lda(dtm, hyper, 0, nullptr); }

TopicModelFit fit_lda(const DocTermMatrix& dtm, const LdaHyper& hyper, const std::vector<std::vector<int>>& initial_z)
{
    return run_lda(dtm, hyper, 0, &initial_z);
}

TopicModelFit fit_lda_chains(const DocTermMatrix& dtm, const LdaHyper& hyper, int chains, int threads)
{
    if (chains < 1)
        throw InputError("chains must be at least 1");
    check_fit_inputs(dtm, hyper);
    std::vector<TopicModelFit> fits(static_cast<std::size_t>(chains));
    const int workers = std::clamp(threads, 1, chains);
    for (int first = 0; first < chains; first += workers) {
        std::vector<std::jthread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        for (int c = first; c < std::min(chains, first + workers); ++c)
            pool.emplace_back([&, c] {
                try {
                    fits[static_cast<std::size_t>(c)] = run_lda(dtm, hyper, static_cast<std::uint64_t>(c), nullptr);
                } catch (...) {
                    errors[static_cast<std::size_t>(c - first)] = std::current_exception();
                }
            });
        pool.clear();
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < fits.size(); ++c)
        if (mean_tail(fits[c].loglik, hyper.burn_in) > mean_tail(fits[best].loglik, hyper.burn_in))
            best = c;
    return std::move(fits[best]);
}

Eigen::VectorXd logistic_normal_theta(const Eigen::Ref<const Eigen::VectorXd>& eta)
{
    const Eigen::Index K = eta.size() + 1;
    Eigen::VectorXd full(K);
    full.head(K - 1) = eta;
    full[K - 1] = 0.0;
    const double m = full.maxCoeff();
    full = (full.array() - m).exp();
    return full / full.sum();
}

Eigen::VectorXd logistic_normal_eta(const Eigen::Ref<const Eigen::VectorXd>& theta)
{
    const Eigen::Index K = theta.size();
    return (theta.head(K - 1).array() / theta[K - 1]).log();
}

CtmParams reorder_topics(const CtmParams& params, const std::vector<int>& order)
{
    const int K = static_cast<int>(params.mu.size()) + 1;
    if (static_cast<int>(order.size()) != K)
        throw InputError("topic order has wrong length");
    // eta'_k = eta_{order[k]} - eta_{order[K-1]} with eta_{K-1} = 0
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(K - 1, K - 1);
    const int ref = order[static_cast<std::size_t>(K - 1)];
    for (int k = 0; k < K - 1; ++k) {
        const int src = order[static_cast<std::size_t>(k)];
        if (src < K - 1)
            A(k, src) += 1.0;
        if (ref < K - 1)
            A(k, ref) -= 1.0;
    }
    CtmParams out;
    out.mu = A * params.mu;
    out.sigma = A * params.sigma * A.transpose();
    if (params.eta_doc.size() > 0)
        out.eta_doc = params.eta_doc * A.transpose();
    return out;
}

namespace {

/// sum_k n_k log softmax(eta, 0)_k - 0.5 (eta - mu)' Sigma^-1 (eta - mu)
double ctm_log_target(const Eigen::VectorXd& eta, const Eigen::VectorXd& counts, double n_total,
                      const Eigen::VectorXd& mu, const Eigen::LLT<Eigen::MatrixXd>& chol)
{
    const Eigen::Index K1 = eta.size();
    const double m = std::max(0.0, eta.maxCoeff());
    const double lse = m + std::log(std::exp(-m) + (eta.array() - m).exp().sum());
    const double lik = counts.head(K1).dot(eta) - n_total * lse;
    const Eigen::VectorXd y = chol.matrixL().solve(eta - mu);
    return lik - 0.5 * y.squaredNorm();
}

} // namespace

CtmFit fit_ctm(const DocTermMatrix& dtm, const LdaHyper& hyper, const CtmOptions& options)
{
    check_fit_inputs(dtm, hyper);
    if (hyper.topics < 2)
        throw InputError("the correlated topic model needs at least 2 topics");
    if (options.mh_steps < 1 || !(options.initial_step > 0.0))
        throw InputError("CTM proposal settings must be positive");

    const int K = hyper.topics;
    const int K1 = K - 1;
    const int D = dtm.rows();
    const int V = dtm.cols();
    const double v_eta = V * hyper.eta;
    const int warm = std::min(hyper.burn_in / 2, 50);

    Rng rng(hyper.seed, 0);
    GibbsState state(TokenCorpus::from_dtm(dtm), K);
    state.initialize_random(rng);

    Eigen::MatrixXd eta(D, K1);
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(K1);
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Identity(K1, K1);
    Eigen::LLT<Eigen::MatrixXd> chol(sigma);
    Eigen::VectorXd log_step = Eigen::VectorXd::Constant(D, std::log(options.initial_step));
    int ridge_events = 0;

    auto update_hyper = [&] {
        mu = eta.colwise().mean().transpose();
        const Eigen::MatrixXd centered = eta.rowwise() - mu.transpose();
        sigma = centered.transpose() * centered / static_cast<double>(D);
        if (options.diagonal_sigma)
            sigma = Eigen::MatrixXd(sigma.diagonal().asDiagonal());
        chol.compute(sigma);
        const bool pd = chol.info() == Eigen::Success && chol.matrixLLT().diagonal().minCoeff() > 1e-12;
        if (!pd) {
            sigma.diagonal().array() += options.ridge;
            chol.compute(sigma);
            ++ridge_events;
            if (chol.info() != Eigen::Success)
                throw ModelError("CTM covariance is not positive definite even after the ridge");
        }
    };

    CtmFit out;
    TopicModelFit& fit = out.fit;
    fit.beta = Eigen::MatrixXd::Zero(K, V);
    Eigen::MatrixXd eta_sum = Eigen::MatrixXd::Zero(D, K1);
    Eigen::VectorXd mu_sum = Eigen::VectorXd::Zero(K1);
    Eigen::MatrixXd sigma_sum = Eigen::MatrixXd::Zero(K1, K1);
    long long accepted = 0, proposed = 0;

    Eigen::VectorXd theta_d(K), weights(K), counts(K), prop(K1), cur(K1);
    for (int it = 0; it < hyper.iters; ++it) {
        if (it < warm) {
            state.sweep(rng, hyper);
        } else {
            if (it == warm) {
                const Eigen::MatrixXd th = state.theta_estimate(hyper.alpha);
                for (int d = 0; d < D; ++d)
                    eta.row(d) = logistic_normal_eta(th.row(d).transpose()).transpose();
                update_hyper();
            }
            // (i) assignments given theta_d, topic-term collapsed
            for (int d = 0; d < D; ++d) {
                theta_d = logistic_normal_theta(eta.row(d).transpose());
                const auto& doc = state.corpus().docs[static_cast<std::size_t>(d)];
                for (int n = 0; n < static_cast<int>(doc.size()); ++n) {
                    state.unassign(d, n);
                    const int w = doc[static_cast<std::size_t>(n)];
                    double total = 0.0;
                    for (int k = 0; k < K; ++k) {
                        weights[k] = (state.topic_term()(k, w) + hyper.eta) / (state.topic_total()[k] + v_eta) * theta_d[k];
                        total += weights[k];
                    }
                    state.assign(d, n, rng.categorical(weights.data(), K, total));
                }
            }
            // (ii) random-walk Metropolis on each eta_d
            const bool adapting = it < hyper.burn_in;
            const double gain = 1.0 / std::pow(static_cast<double>(it - warm + 1), 0.6);
            for (int d = 0; d < D; ++d) {
                counts = state.doc_topic().row(d).cast<double>().transpose();
                const double nd = state.doc_total()[d];
                cur = eta.row(d).transpose();
                double lp = ctm_log_target(cur, counts, nd, mu, chol);
                int acc = 0;
                const double step = std::exp(log_step[d]);
                for (int s = 0; s < options.mh_steps; ++s) {
                    for (int j = 0; j < K1; ++j)
                        prop[j] = cur[j] + step * rng.normal();
                    const double lq = ctm_log_target(prop, counts, nd, mu, chol);
                    if (std::log(rng.uniform_open()) < lq - lp) {
                        cur = prop;
                        lp = lq;
                        ++acc;
                    }
                }
                eta.row(d) = cur.transpose();
                const double rate = static_cast<double>(acc) / options.mh_steps;
                if (adapting) {
                    const double target = 0.5 * (options.target_low + options.target_high);
                    log_step[d] += gain * (rate - target);
                } else {
                    accepted += acc;
                    proposed += options.mh_steps;
                }
            }
            // (iii) empirical-Bayes mu, Sigma
            update_hyper();
        }
        fit.loglik.push_back(state.log_likelihood(hyper.eta));
        if (it >= hyper.burn_in) {
            fit.beta += state.beta_estimate(hyper.eta);
            eta_sum += eta;
            mu_sum += mu;
            sigma_sum += sigma;
        }
    }

    const double kept = hyper.iters - hyper.burn_in;
    fit.beta /= kept;
    out.params.eta_doc = eta_sum / kept;
    out.params.mu = mu_sum / kept;
    out.params.sigma = sigma_sum / kept;
    fit.theta.resize(D, K);
    for (int d = 0; d < D; ++d)
        fit.theta.row(d) = logistic_normal_theta(out.params.eta_doc.row(d).transpose()).transpose();
    fit.z = state.z();
    out.acceptance_rate = proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
    if (ridge_events > 0)
        warn("CTM covariance update was not positive definite in " + std::to_string(ridge_events) +
             " sweeps; added a ridge of " + csv::format_number(options.ridge));
    return out;
}

Eigen::MatrixXd draw_topics(int topics, int vocab, double eta, Rng& rng)
{
    Eigen::MatrixXd beta(topics, vocab);
    const Eigen::VectorXd a = Eigen::VectorXd::Constant(vocab, eta);
    for (int k = 0; k < topics; ++k)
        beta.row(k) = rng.dirichlet(a).transpose();
    return beta;
}

SimulatedCorpus generate_corpus(const GenerativeModel& model, std::span<const int> doc_lengths, std::uint64_t seed)
{
    const int K = static_cast<int>(model.beta.rows());
    const int V = static_cast<int>(model.beta.cols());
    if (K < 1 || V < 1)
        throw InputError("generative model has an empty topic-term matrix");
    if ((model.beta.array() < 0.0).any() || ((model.beta.rowwise().sum().array() - 1.0).abs() > 1e-8).any())
        throw InputError("topic-term rows must be probability vectors");
    Eigen::LLT<Eigen::MatrixXd> chol;
    if (model.family == TopicFamily::Lda) {
        if (model.alpha.size() != K || (model.alpha.array() <= 0.0).any())
            throw InputError("LDA generator needs K positive alpha values");
    } else {
        if (K < 2 || model.mu.size() != K - 1 || model.sigma.rows() != K - 1 || model.sigma.cols() != K - 1)
            throw InputError("CTM generator needs mu of length K-1 and a (K-1)x(K-1) Sigma");
        chol.compute(model.sigma);
        if (chol.info() != Eigen::Success)
            throw InputError("CTM generator Sigma is not positive definite");
    }

    // cumulative topic-term rows for inverse-CDF word draws
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> cdf(K, V);
    for (int k = 0; k < K; ++k) {
        double acc = 0.0;
        for (int v = 0; v < V; ++v)
            cdf(k, v) = acc += model.beta(k, v);
    }

    Rng rng(seed);
    const int D = static_cast<int>(doc_lengths.size());
    SimulatedCorpus out;
    out.theta.resize(D, K);
    std::vector<Eigen::Triplet<int>> triplets;
    std::vector<int> row_counts(static_cast<std::size_t>(V));
    for (int d = 0; d < D; ++d) {
        const int len = doc_lengths[static_cast<std::size_t>(d)];
        if (len < 1)
            throw InputError("document lengths must be positive");
        Eigen::VectorXd theta = model.family == TopicFamily::Lda
                                    ? rng.dirichlet(model.alpha)
                                    : logistic_normal_theta(rng.multivariate_normal(model.mu, chol.matrixL()));
        out.theta.row(d) = theta.transpose();
        std::fill(row_counts.begin(), row_counts.end(), 0);
        for (int n = 0; n < len; ++n) {
            const int k = rng.categorical(theta);
            const double* row = cdf.data() + static_cast<std::ptrdiff_t>(k) * V;
            const double u = rng.uniform() * row[V - 1];
            const int v = std::min(V - 1, static_cast<int>(std::upper_bound(row, row + V, u) - row));
            ++row_counts[static_cast<std::size_t>(v)];
        }
        for (int v = 0; v < V; ++v)
            if (row_counts[static_cast<std::size_t>(v)] > 0)
                triplets.emplace_back(d, v, row_counts[static_cast<std::size_t>(v)]);
    }
    out.dtm.counts.resize(D, V);
    out.dtm.counts.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

std::vector<int> greedy_alignment(const Eigen::MatrixXd& estimated, const Eigen::MatrixXd& reference)
{
    const int Ke = static_cast<int>(estimated.rows());
    const int Kr = static_cast<int>(reference.rows());
    if (estimated.cols() != reference.cols())
        throw InputError("cannot align topics over different vocabularies");
    if (Ke < Kr)
        throw InputError("fewer estimated topics than reference topics");

    struct Pair {
        double tv;
        int ref, est;
    };
    std::vector<Pair> pairs;
    pairs.reserve(static_cast<std::size_t>(Ke) * static_cast<std::size_t>(Kr));
    for (int r = 0; r < Kr; ++r)
        for (int e = 0; e < Ke; ++e)
            pairs.push_back({total_variation(estimated.row(e), reference.row(r)), r, e});
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.tv < b.tv; });

    std::vector<int> match(static_cast<std::size_t>(Kr), -1);
    std::vector<bool> used(static_cast<std::size_t>(Ke), false);
    int remaining = Kr;
    for (const auto& p : pairs) {
        if (remaining == 0)
            break;
        if (match[static_cast<std::size_t>(p.ref)] >= 0 || used[static_cast<std::size_t>(p.est)])
            continue;
        match[static_cast<std::size_t>(p.ref)] = p.est;
        used[static_cast<std::size_t>(p.est)] = true;
        --remaining;
    }
    return match;
}

double aligned_total_variation(const Eigen::MatrixXd& estimated, const Eigen::MatrixXd& reference)
{
    const auto match = greedy_alignment(estimated, reference);
    double s = 0.0;
    for (int r = 0; r < static_cast<int>(reference.rows()); ++r)
        s += total_variation(estimated.row(match[static_cast<std::size_t>(r)]), reference.row(r));
    return s / static_cast<double>(reference.rows());
}

void write_dense_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m, const std::string& row_label,
                     const std::vector<std::string>& column_ids)
{
    if (static_cast<Eigen::Index>(column_ids.size()) != m.cols())
        throw InputError("column id count does not match the matrix");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write " + path.string());
    std::vector<std::string> fields;
    fields.push_back(row_label);
    fields.insert(fields.end(), column_ids.begin(), column_ids.end());
    csv::write_record(out, fields);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        fields.assign(1, std::to_string(r));
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            fields.push_back(csv::format_number(m(r, c)));
        csv::write_record(out, fields);
    }
}

Eigen::MatrixXd read_dense_csv(const std::filesystem::path& path)
{
    const auto table = csv::Table::read(path);
    const auto cols = static_cast<Eigen::Index>(table.header().size()) - 1;
    if (cols < 1)
        throw InputError(path.string() + ": no value columns");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(table.size()), cols);
    for (std::size_t r = 0; r < table.size(); ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(static_cast<Eigen::Index>(r), c) = csv::parse_number(table.rows()[r][static_cast<std::size_t>(c + 1)]);
    return m;
}

void write_ctm_params(const std::filesystem::path& path, const CtmParams& params)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InputError("cannot write " + path.string());
    csv::write_record(out, {"block", "row", "col", "value"});
    auto emit = [&](const char* block, Eigen::Index r, Eigen::Index c, double v) {
        csv::write_record(out, {block, std::to_string(r), std::to_string(c), csv::format_number(v)});
    };
    for (Eigen::Index i = 0; i < params.mu.size(); ++i)
        emit("mu", i, 0, params.mu[i]);
    for (Eigen::Index i = 0; i < params.sigma.rows(); ++i)
        for (Eigen::Index j = 0; j < params.sigma.cols(); ++j)
            emit("sigma", i, j, params.sigma(i, j));
    for (Eigen::Index i = 0; i < params.eta_doc.rows(); ++i)
        for (Eigen::Index j = 0; j < params.eta_doc.cols(); ++j)
            emit("eta", i, j, params.eta_doc(i, j));
}

CtmParams read_ctm_params(const std::filesystem::path& path)
{
    const auto table = csv::Table::read(path);
    const auto cb = table.column("block"), cr = table.column("row"), cc = table.column("col"), cv = table.column("value");
    std::map<std::string, std::vector<std::tuple<long long, long long, double>>> blocks;
    std::map<std::string, std::pair<long long, long long>> extent;
    for (const auto& r : table.rows()) {
        const long long i = csv::parse_integer(r[cr]), j = csv::parse_integer(r[cc]);
        if (i < 0 || j < 0)
            throw InputError(path.string() + ": negative index");
        blocks[r[cb]].emplace_back(i, j, csv::parse_number(r[cv]));
        auto& e = extent[r[cb]];
        e.first = std::max(e.first, i + 1);
        e.second = std::max(e.second, j + 1);
    }
    for (const auto& [name, _] : blocks)
        if (name != "mu" && name != "sigma" && name != "eta")
            throw InputError(path.string() + ": unknown block '" + name + "'");
    const long long k1 = extent["mu"].first;
    if (k1 < 1 || extent["sigma"].first != k1 || extent["sigma"].second != k1)
        throw InputError(path.string() + ": mu and sigma blocks disagree in size");
    CtmParams p;
    p.mu = Eigen::VectorXd::Zero(k1);
    p.sigma = Eigen::MatrixXd::Zero(k1, k1);
    p.eta_doc = Eigen::MatrixXd::Zero(extent["eta"].first, blocks.contains("eta") ? k1 : 0);
    for (const auto& [i, j, v] : blocks["mu"])
        p.mu[i] = v;
    for (const auto& [i, j, v] : blocks["sigma"])
        p.sigma(i, j) = v;
    for (const auto& [i, j, v] : blocks["eta"]) {
        if (j >= k1)
            throw InputError(path.string() + ": eta column out of range");
        p.eta_doc(i, j) = v;
    }
    return p;
}

} // namespace agenda
