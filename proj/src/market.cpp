#include "agcore/market.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "agcore/errors.hpp"
#include "agcore/rng.hpp"

namespace agcore {

namespace {

void require_positive(double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DataError(std::string("distribution parameter '") + name + "' must be positive and finite");
    }
}

std::string format_param(double x, bool exact) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), exact ? "%a" : "%.12g", x);
    return buf;
}

} // namespace

DistributionSpec DistributionSpec::Uniform01() {
    return DistributionSpec{};
}

DistributionSpec DistributionSpec::Exponential(double rate) {
    require_positive(rate, "rate");
    DistributionSpec d;
    d.kind = DistKind::exponential;
    d.rate = rate;
    return d;
}

DistributionSpec DistributionSpec::Weibull(double shape, double scale) {
    require_positive(shape, "shape");
    require_positive(scale, "scale");
    DistributionSpec d;
    d.kind = DistKind::weibull;
    d.shape = shape;
    d.scale = scale;
    return d;
}

std::optional<double> DistributionSpec::density_at_sup() const {
    if (kind == DistKind::uniform01) return 1.0;
    return std::nullopt;
}

double DistributionSpec::quantile(double u) const {
    switch (kind) {
        case DistKind::uniform01:
            return u;
        case DistKind::exponential:
            return -std::log1p(-u) / rate;
        case DistKind::weibull:
            return scale * std::pow(-std::log1p(-u), 1.0 / shape);
    }
    return 0.0;
}

double DistributionSpec::cdf(double x) const {
    switch (kind) {
        case DistKind::uniform01:
            return x <= 0.0 ? 0.0 : (x >= 1.0 ? 1.0 : x);
        case DistKind::exponential:
            return x <= 0.0 ? 0.0 : -std::expm1(-rate * x);
        case DistKind::weibull:
            return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x / scale, shape));
    }
    return 0.0;
}

std::string DistributionSpec::tag() const {
    switch (kind) {
        case DistKind::uniform01:
            return "uniform";
        case DistKind::exponential:
            return "exp:" + format_param(rate, false);
        case DistKind::weibull:
            return "weibull:" + format_param(shape, false) + ":" + format_param(scale, false);
    }
    return "uniform";
}

std::string DistributionSpec::exact_tag() const {
    switch (kind) {
        case DistKind::uniform01:
            return "uniform";
        case DistKind::exponential:
            return "exp:" + format_param(rate, true);
        case DistKind::weibull:
            return "weibull:" + format_param(shape, true) + ":" + format_param(scale, true);
    }
    return "uniform";
}

DistributionSpec parse_dist(const std::string& spec) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= spec.size()) {
        std::size_t colon = spec.find(':', start);
        if (colon == std::string::npos) {
            parts.push_back(spec.substr(start));
            break;
        }
        parts.push_back(spec.substr(start, colon - start));
        start = colon + 1;
    }
    auto parse_value = [&](const std::string& s, const char* name) {
        const char* c = s.c_str();
        char* end = nullptr;
        double x = std::strtod(c, &end);
        if (end == c || *end != '\0') {
            throw DataError("bad numeric value '" + s + "' for distribution parameter " + name);
        }
        return x;
    };
    const std::string& name = parts[0];
    if (name == "uniform") {
        if (parts.size() != 1) throw DataError("uniform takes no parameters");
        return DistributionSpec::Uniform01();
    }
    if (name == "exp") {
        if (parts.size() != 2) throw DataError("expected exp:RATE");
        return DistributionSpec::Exponential(parse_value(parts[1], "rate"));
    }
    if (name == "weibull") {
        if (parts.size() != 2 && parts.size() != 3) throw DataError("expected weibull:SHAPE[:SCALE]");
        double shape = parse_value(parts[1], "shape");
        double scale = parts.size() == 3 ? parse_value(parts[2], "scale") : 1.0;
        return DistributionSpec::Weibull(shape, scale);
    }
    throw DataError("unknown distribution '" + name + "'");
}

double market_entry(const DistributionSpec& dist, std::uint64_t seed, std::uint64_t flat_index) {
    return dist.quantile(to_unit_double(stream_word(seed, flat_index)));
}

void fill_market_row(const DistributionSpec& dist, std::uint64_t seed, int n_cols, int row,
                     std::span<double> out) {
    std::uint64_t base = static_cast<std::uint64_t>(row) * static_cast<std::uint64_t>(n_cols);
    for (int j = 0; j < n_cols; ++j) {
        out[j] = dist.quantile(to_unit_double(stream_word(seed, base + j)));
    }
}

Market generate_market(int n, int k, const DistributionSpec& dist, std::uint64_t seed) {
    if (n < 1) throw DataError("market needs at least one firm");
    if (k < 0) throw DataError("worker surplus k must be non-negative");
    Market m;
    m.n = n;
    m.k = k;
    m.dist = dist;
    m.seed = seed;
    m.alpha.resize(static_cast<std::size_t>(n) * (n + k));
    for (int f = 0; f < n; ++f) {
        fill_market_row(dist, seed, n + k, f,
                        std::span<double>(m.alpha.data() + static_cast<std::size_t>(f) * (n + k),
                                          static_cast<std::size_t>(n + k)));
    }
    return m;
}

void write_market(const Market& m, std::ostream& os) {
    for (double x : m.alpha) {
        if (!std::isfinite(x)) throw DataError("market has non-finite entries");
    }
    os << "agmkt 1\n";
    os << "n " << m.n << "\n";
    os << "k " << m.k << "\n";
    os << "seed " << m.seed << "\n";
    os << "dist " << m.dist.exact_tag() << "\n";
    os << "enc hex\n";
    char buf[24];
    for (int f = 0; f < m.n; ++f) {
        for (int w = 0; w < m.workers(); ++w) {
            std::snprintf(buf, sizeof(buf), "%016llx",
                          static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(m.at(f, w))));
            os << (w == 0 ? "" : " ") << buf;
        }
        os << "\n";
    }
}

namespace {

std::string next_line(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw DataError("market file truncated");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

// "key value" header line; returns value part.
std::string header_field(std::istream& is, const std::string& key) {
    std::string line = next_line(is);
    if (line.size() < key.size() + 2 || line.compare(0, key.size(), key) != 0 ||
        line[key.size()] != ' ') {
        throw DataError("malformed market header: expected '" + key + " ...'");
    }
    return line.substr(key.size() + 1);
}

} // namespace

Market read_market(std::istream& is, bool allow_decimal) {
    if (next_line(is) != "agmkt 1") throw DataError("not a market file (bad magic)");
    Market m;
    try {
        m.n = std::stoi(header_field(is, "n"));
        m.k = std::stoi(header_field(is, "k"));
        m.seed = std::stoull(header_field(is, "seed"));
    } catch (const std::logic_error&) {
        throw DataError("malformed market header: bad integer field");
    }
    if (m.n < 1 || m.k < 0) throw DataError("malformed market header: bad dimensions");
    m.dist = parse_dist(header_field(is, "dist"));
    std::string enc = header_field(is, "enc");
    bool hex;
    if (enc == "hex") {
        hex = true;
    } else if (enc == "dec") {
        if (!allow_decimal) {
            throw DataError("decimal market files are lossy; pass the explicit decimal flag to accept them");
        }
        hex = false;
    } else {
        throw DataError("malformed market header: unknown encoding '" + enc + "'");
    }

    m.alpha.reserve(static_cast<std::size_t>(m.n) * m.workers());
    for (int f = 0; f < m.n; ++f) {
        std::string line = next_line(is);
        if (!hex) {
            // decimal rows may be comma separated
            for (char& c : line) {
                if (c == ',') c = ' ';
            }
        }
        std::istringstream row(line);
        std::string token;
        int count = 0;
        while (row >> token) {
            double x;
            if (hex) {
                if (token.size() != 16 || token.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos) {
                    throw DataError("bad hex float word '" + token + "'");
                }
                x = std::bit_cast<double>(static_cast<std::uint64_t>(std::stoull(token, nullptr, 16)));
            } else {
                const char* c = token.c_str();
                char* end = nullptr;
                x = std::strtod(c, &end);
                if (end == c || *end != '\0') throw DataError("bad decimal value '" + token + "'");
            }
            if (!std::isfinite(x)) throw DataError("market has non-finite entries");
            m.alpha.push_back(x);
            ++count;
        }
        if (count != m.workers()) {
            throw DataError("dimension mismatch: row has " + std::to_string(count) + " entries, expected " +
                            std::to_string(m.workers()));
        }
    }
    std::string rest;
    while (std::getline(is, rest)) {
        if (rest.find_first_not_of(" \t\r") != std::string::npos) {
            throw DataError("trailing content after the last market row");
        }
    }
    if (m.dist.bounded()) {
        for (double x : m.alpha) {
            if (x < 0.0 || x > 1.0) throw DataError("entry outside [0,1] for a bounded distribution");
        }
    }
    return m;
}

} // namespace agcore
