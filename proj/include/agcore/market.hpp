#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace agcore {

enum class DistKind { uniform01, exponential, weibull };

// Law of the productivity entries. Only uniform01 is bounded; bounded laws
// live on [0,1] and carry the density value at the supremum, which the
// pointer-graph thresholds need.
struct DistributionSpec {
    DistKind kind = DistKind::uniform01;
    double rate = 1.0;  // exponential
    double shape = 1.0; // weibull
    double scale = 1.0; // weibull

    static DistributionSpec Uniform01();
    static DistributionSpec Exponential(double rate);
    static DistributionSpec Weibull(double shape, double scale = 1.0);

    bool bounded() const { return kind == DistKind::uniform01; }
    std::optional<double> density_at_sup() const;

    double quantile(double u) const; // inverse cdf, u in [0,1)
    double cdf(double x) const;

    std::string tag() const;       // uniform | exp:RATE | weibull:SHAPE:SCALE
    std::string exact_tag() const; // same, parameters as hexfloats (lossless)
};

// Parses the tag syntax used by the CLI and the market file header.
// Parameters may be decimal or hexfloat. Rejects non-positive parameters.
DistributionSpec parse_dist(const std::string& spec);

// n firms, n+k workers, row-major productivity matrix. Immutable by
// convention after construction; safe to share across threads.
struct Market {
    int n = 0;
    int k = 0;
    DistributionSpec dist;
    std::uint64_t seed = 0;
    std::vector<double> alpha; // n rows, n+k columns

    int workers() const { return n + k; }
    double at(int f, int w) const {
        return alpha[static_cast<std::size_t>(f) * workers() + w];
    }
    double& at(int f, int w) {
        return alpha[static_cast<std::size_t>(f) * workers() + w];
    }
};

// Entry (f,w) is draw number f*(n+k)+w of the counter-based stream keyed by
// `seed`, so the matrix is independent of generation order and thread count.
Market generate_market(int n, int k, const DistributionSpec& dist, std::uint64_t seed);

// Single draw / single row of the same stream, without materializing the
// market. Used where n is too large to hold the full matrix.
double market_entry(const DistributionSpec& dist, std::uint64_t seed, std::uint64_t flat_index);
void fill_market_row(const DistributionSpec& dist, std::uint64_t seed, int n_cols, int row,
                     std::span<double> out);

// Market file: small text header, then one line per firm with entries encoded
// as raw 64-bit-float hex words (lossless). `enc dec` files hold plain
// decimal values and are accepted only when allow_decimal is set.
void write_market(const Market& m, std::ostream& os);
Market read_market(std::istream& is, bool allow_decimal = false);

} // namespace agcore
