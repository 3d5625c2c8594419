#include "worci/population.hpp"

#include "worci/common.hpp"
#include "worci/numeric.hpp"
#include "worci/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace worci {

namespace {

constexpr double kWeightSumTolerance = 1e-12;

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::optional<double> to_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    // from_chars rejects a leading '+'.
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

void check_unit_interval(std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw IngestionError("value " + format_number(v) + " at row " +
                                     std::to_string(i + 1) + " is outside [0,1]",
                                 long(i + 1));
    }
}

}  // namespace

Population::Population(std::vector<double> values) : values_(std::move(values)) {
    check_unit_interval(values_);
    if (values_.size() < 2) throw InvalidArgument("population needs at least two values");
}

DiscreteDistribution::DiscreteDistribution(std::vector<double> alphabet, std::vector<double> weights)
    : alphabet_(std::move(alphabet)), weights_(std::move(weights)) {
    if (alphabet_.size() != weights_.size())
        throw InvalidArgument("alphabet and weights differ in length");
    if (alphabet_.empty()) throw InvalidArgument("empty alphabet");
    for (std::size_t i = 0; i < alphabet_.size(); ++i) {
        if (!(alphabet_[i] >= 0.0 && alphabet_[i] <= 1.0))
            throw InvalidArgument("alphabet point outside [0,1]");
        if (i > 0 && !(alphabet_[i] > alphabet_[i - 1]))
            throw InvalidArgument("alphabet must be strictly increasing");
        if (!(weights_[i] >= 0.0)) throw InvalidArgument("negative weight");
    }
    const double total = numeric::compensated_sum(weights_);
    if (std::abs(total - 1.0) > kWeightSumTolerance)
        throw InvalidArgument("weights sum to " + format_number(total) + ", not 1");
}

double DiscreteDistribution::mean() const {
    std::vector<double> terms(size());
    for (std::size_t i = 0; i < size(); ++i) terms[i] = alphabet_[i] * weights_[i];
    return numeric::compensated_sum(terms);
}

double DiscreteDistribution::second_moment() const {
    std::vector<double> terms(size());
    for (std::size_t i = 0; i < size(); ++i) terms[i] = alphabet_[i] * alphabet_[i] * weights_[i];
    return numeric::compensated_sum(terms);
}

double DiscreteDistribution::variance() const {
    const double mu = mean();
    std::vector<double> terms(size());
    for (std::size_t i = 0; i < size(); ++i) {
        const double d = alphabet_[i] - mu;
        terms[i] = d * d * weights_[i];
    }
    return numeric::compensated_sum(terms);
}

DiscreteDistribution DiscreteDistribution::reflect() const {
    std::vector<double> a(size());
    std::vector<double> w(size());
    for (std::size_t i = 0; i < size(); ++i) {
        a[size() - 1 - i] = 1.0 - alphabet_[i];
        w[size() - 1 - i] = weights_[i];
    }
    return DiscreteDistribution(std::move(a), std::move(w));
}

bool DiscreteDistribution::same_alphabet(const DiscreteDistribution& other) const {
    return alphabet_ == other.alphabet_;
}

SamplingDesign::SamplingDesign(long N, long n) : N_(N), n_(n) {
    if (!(n >= 1 && n < N))
        throw InvalidArgument("sampling design needs 1 <= n < N (got n=" + std::to_string(n) +
                              ", N=" + std::to_string(N) + ")");
}

std::vector<std::size_t> sample_indices_wor(std::size_t N, std::size_t n, std::uint64_t seed) {
    if (n > N)
        throw InvalidArgument("sample size " + std::to_string(n) + " exceeds population size " +
                              std::to_string(N));
    std::vector<std::size_t> idx(N);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = 0; i < n && i + 1 < N; ++i) {
        const std::size_t j = i + std::size_t(rng.below(N - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    return idx;
}

std::vector<double> sample_wor(const Population& pop, std::size_t n, std::uint64_t seed) {
    const auto idx = sample_indices_wor(pop.size(), n, seed);
    std::vector<double> out;
    out.reserve(n);
    for (auto i : idx) out.push_back(pop.values()[i]);
    return out;
}

DiscreteDistribution empirical_distribution(std::span<const double> sample,
                                            std::optional<std::span<const double>> alphabet) {
    if (sample.empty()) throw InvalidArgument("empty sample");
    std::vector<double> points;
    if (alphabet) {
        points.assign(alphabet->begin(), alphabet->end());
    } else {
        points.assign(sample.begin(), sample.end());
        std::sort(points.begin(), points.end());
        points.erase(std::unique(points.begin(), points.end()), points.end());
    }
    std::vector<long> counts(points.size(), 0);
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double x = sample[i];
        auto it = std::lower_bound(points.begin(), points.end(), x - kSnapTolerance);
        if (it == points.end() || std::abs(*it - x) > kSnapTolerance)
            throw InvalidArgument("sample value " + format_number(x) + " at position " +
                                  std::to_string(i + 1) + " is not in the alphabet");
        ++counts[std::size_t(it - points.begin())];
    }
    std::vector<double> w(points.size());
    const double n = double(sample.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = double(counts[i]) / n;
    return DiscreteDistribution(std::move(points), std::move(w));
}

PopulationSummary summary(std::span<const double> values) {
    const double N = double(values.size());
    const double mu = numeric::compensated_sum(values) / N;
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double d = values[i] - mu;
        sq[i] = d * d;
    }
    return {mu, numeric::compensated_sum(sq) / N};
}

DataFormat parse_format(std::string_view name) {
    if (name == "csv") return DataFormat::csv;
    if (name == "json") return DataFormat::json;
    throw InvalidArgument("unknown data format '" + std::string(name) + "'");
}

std::vector<double> parse_values_csv(std::string_view text) {
    std::vector<double> out;
    std::size_t pos = 0;
    long row = 0;
    bool first_line = true;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        if (first_line && (line == "value" || line == "\"value\"")) {
            first_line = false;
            continue;
        }
        first_line = false;
        ++row;
        auto v = to_double(line);
        if (!v) throw IngestionError("cannot parse row " + std::to_string(row) + ": '" +
                                         std::string(line) + "'",
                                     row);
        out.push_back(*v);
        if (end == text.size()) break;
    }
    return out;
}

std::vector<double> parse_values_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw IngestionError(std::string("JSON parse failure: ") + e.what());
    }
    if (!j.is_array()) throw IngestionError("expected a flat JSON array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            throw IngestionError("element at row " + std::to_string(i + 1) + " is not a number",
                                 long(i + 1));
        out.push_back(j[i].get<double>());
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<double> load_values(const std::filesystem::path& path, DataFormat format) {
    const std::string text = read_file(path);
    auto values = format == DataFormat::csv ? parse_values_csv(text) : parse_values_json(text);
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!std::isfinite(values[i]))
            throw IngestionError("non-finite value at row " + std::to_string(i + 1), long(i + 1));
    return values;
}

Population load_population(const std::filesystem::path& path, DataFormat format) {
    return Population(load_values(path, format));
}

std::vector<std::vector<double>> load_vectors_csv(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    long row = 0;
    bool first = true;
    while (std::getline(in, line)) {
        const auto t = trim(line);
        if (t.empty()) continue;
        std::vector<double> vec;
        bool numeric_row = true;
        std::size_t p = 0;
        while (p <= t.size()) {
            std::size_t q = t.find(',', p);
            if (q == std::string_view::npos) q = t.size();
            auto v = to_double(t.substr(p, q - p));
            if (!v) {
                numeric_row = false;
                break;
            }
            vec.push_back(*v);
            p = q + 1;
        }
        if (!numeric_row) {
            if (first) {
                first = false;
                continue;  // header
            }
            throw IngestionError("cannot parse vector row " + std::to_string(row + 1), row + 1);
        }
        first = false;
        ++row;
        if (!rows.empty() && vec.size() != rows.front().size())
            throw IngestionError("row " + std::to_string(row) + " has dimension " +
                                     std::to_string(vec.size()) + ", expected " +
                                     std::to_string(rows.front().size()),
                                 row);
        rows.push_back(std::move(vec));
    }
    if (rows.empty()) throw IngestionError("no vectors in " + path.string());
    return rows;
}

std::string to_json(const DiscreteDistribution& d) {
    std::string out = "{\"alphabet\":[";
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i) out += ',';
        out += format_number(d.alphabet()[i]);
    }
    out += "],\"weights\":[";
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i) out += ',';
        out += format_number(d.weights()[i]);
    }
    out += "]}";
    return out;
}

DiscreteDistribution distribution_from_json(std::string_view text) {
    const auto j = nlohmann::json::parse(text);
    return DiscreteDistribution(j.at("alphabet").get<std::vector<double>>(),
                                j.at("weights").get<std::vector<double>>());
}

}  // namespace worci
