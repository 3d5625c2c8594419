#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace worci {

/// A finite population x_1..x_N of values in [0, 1].
class Population {
public:
    /// Throws IngestionError (naming the 1-based row) for a value outside
    /// [0, 1] and InvalidArgument when fewer than two values are given.
    explicit Population(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    std::vector<double> values_;
};

/// Probability weights over a strictly increasing alphabet in [0, 1].
class DiscreteDistribution {
public:
    DiscreteDistribution() = default;
    DiscreteDistribution(std::vector<double> alphabet, std::vector<double> weights);

    std::span<const double> alphabet() const noexcept { return alphabet_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::size_t size() const noexcept { return alphabet_.size(); }

    double mean() const;
    double second_moment() const;
    double variance() const;

    /// Image under x -> 1 - x (alphabet reversed so it stays increasing).
    DiscreteDistribution reflect() const;

    /// True when both distributions live on the same alphabet (exact match).
    bool same_alphabet(const DiscreteDistribution& other) const;

private:
    std::vector<double> alphabet_;
    std::vector<double> weights_;
};

/// Population size N, sample size n, and the sampling fraction n/N.
class SamplingDesign {
public:
    /// Requires 1 <= n < N.
    SamplingDesign(long N, long n);

    long N() const noexcept { return N_; }
    long n() const noexcept { return n_; }
    double beta() const noexcept { return double(n_) / double(N_); }
    double beta_bar() const noexcept { return double(N_ - n_) / double(N_); }

private:
    long N_;
    long n_;
};

inline constexpr double kSnapTolerance = 1e-12;

/// Indices of a uniformly random WoR sample (partial Fisher-Yates).
std::vector<std::size_t> sample_indices_wor(std::size_t N, std::size_t n, std::uint64_t seed);

/// First n entries of a uniformly random permutation of the population.
std::vector<double> sample_wor(const Population& pop, std::size_t n, std::uint64_t seed);

/// Type of a sample. With an alphabet, every sample value must match an
/// alphabet point within kSnapTolerance; unobserved points get weight 0.
/// Without one, the alphabet is the sorted set of distinct sample values.
DiscreteDistribution empirical_distribution(std::span<const double> sample,
                                            std::optional<std::span<const double>> alphabet = {});

struct PopulationSummary {
    double mu = 0.0;
    double sigma2 = 0.0;  ///< denominator N
};

PopulationSummary summary(std::span<const double> values);
inline PopulationSummary summary(const Population& pop) { return summary(pop.values()); }

enum class DataFormat { csv, json };

/// Parses "csv" / "json"; anything else is an InvalidArgument.
DataFormat parse_format(std::string_view name);

/// Numeric values from CSV text: one value per line, optional "value" header.
std::vector<double> parse_values_csv(std::string_view text);
/// Numeric values from a flat JSON array.
std::vector<double> parse_values_json(std::string_view text);

Population load_population(const std::filesystem::path& path, DataFormat format);

/// Plain value list (alphabets, samples) with the same CSV/JSON rules but no
/// range check beyond finiteness.
std::vector<double> load_values(const std::filesystem::path& path, DataFormat format);

/// Feature vectors, one comma-separated row per line (optional non-numeric header).
std::vector<std::vector<double>> load_vectors_csv(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

/// {"alphabet":[...],"weights":[...]} with 17 significant digits.
std::string to_json(const DiscreteDistribution& d);
DiscreteDistribution distribution_from_json(std::string_view text);

}  // namespace worci
