#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <random>

namespace agenda {

/// Seedable random source used by every sampler in the library.
///
/// The engine is mt19937_64. Variates are produced from raw engine output by
/// the algorithms below (not by std:: distributions, whose algorithms are
/// implementation defined), so a (seed, stream) pair yields the same sequence
/// with any standard library. Independent streams for parallel chains are
/// derived by seeding with seed_seq{seed lo, seed hi, stream lo, stream hi}.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        engine_.seed(seq);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1).
    double uniform_open()
    {
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return u;
    }

    /// Uniform integer in [0, n).
    int uniform_int(int n) { return static_cast<int>(uniform() * n); }

    /// Standard normal, Marsaglia polar method.
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    /// Gamma(shape, 1), Marsaglia-Tsang; shape < 1 via the U^(1/shape) boost.
    double gamma(double shape)
    {
        if (shape < 1.0)
            return gamma(shape + 1.0) * std::pow(uniform_open(), 1.0 / shape);
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_open();
            if (u < 1.0 - 0.0331 * x * x * x * x)
                return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
                return d * v;
        }
    }

    template <typename Derived>
    Eigen::VectorXd dirichlet(const Eigen::MatrixBase<Derived>& alpha)
    {
        Eigen::VectorXd draw(alpha.size());
        for (Eigen::Index i = 0; i < alpha.size(); ++i)
            draw[i] = gamma(alpha[i]);
        const double total = draw.sum();
        if (total > 0.0)
            return draw / total;
        // every component underflowed: fall back to a point mass on the largest alpha
        Eigen::Index best;
        alpha.maxCoeff(&best);
        draw.setZero();
        draw[best] = 1.0;
        return draw;
    }

    /// Index drawn with probability weights[i] / total (weights unnormalized).
    int categorical(const double* weights, int n, double total)
    {
        double u = uniform() * total;
        for (int i = 0; i < n - 1; ++i) {
            u -= weights[i];
            if (u < 0.0)
                return i;
        }
        return n - 1;
    }

    template <typename Derived>
    int categorical(const Eigen::MatrixBase<Derived>& weights)
    {
        const Eigen::VectorXd w = weights;
        return categorical(w.data(), static_cast<int>(w.size()), w.sum());
    }

    /// Multivariate normal given a lower Cholesky factor of the covariance.
    template <typename MeanT, typename CholT>
    Eigen::VectorXd multivariate_normal(const Eigen::MatrixBase<MeanT>& mean, const CholT& lower)
    {
        Eigen::VectorXd z(mean.size());
        for (Eigen::Index i = 0; i < z.size(); ++i)
            z[i] = normal();
        return mean + lower * z;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace agenda
