#include "dicnn/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dicnn/numkit/rng.hpp"

namespace dicnn::data {

std::vector<std::string> synthetic_identifier_columns() { return {"sha256", "Package", "Malware"}; }

namespace {

struct ClassProfile {
    std::string name;
    std::size_t count = 0;
    std::vector<double> flag_rate;
    std::vector<double> count_log_mean;
};

std::string hex_id(numkit::Rng& rng) {
    static constexpr char hex[] = "0123456789abcdef";
    std::string s(64, '0');
    for (auto& c : s) c = hex[rng.uniform_index(16)];
    return s;
}

}  // namespace

std::string synthetic_kronodroid_csv(const SyntheticSpec& spec) {
    numkit::Rng rng(numkit::derive_seed(spec.seed, "synthetic_kronodroid"));

    ClassProfile benign{"Benign", spec.benign, {}, {}};
    for (std::size_t j = 0; j < spec.binary_features; ++j) benign.flag_rate.push_back(0.05 + 0.5 * rng.uniform());
    for (std::size_t j = 0; j < spec.count_features; ++j) benign.count_log_mean.push_back(0.5 + 2.0 * rng.uniform());

    std::vector<ClassProfile> profiles{benign};
    for (const auto& [name, count] : spec.families) {
        ClassProfile p{name, count, benign.flag_rate, benign.count_log_mean};
        const auto flags = numkit::rng_shuffle(rng, spec.binary_features);
        for (std::size_t s = 0; s < std::min(spec.signature_flags, spec.binary_features); ++s) {
            auto& rate = p.flag_rate[flags[s]];
            const double shift = spec.signature_shift * (0.7 + 0.6 * rng.uniform());
            rate = rate < 0.3 ? std::min(0.95, rate + shift) : std::max(0.02, rate - shift);
        }
        const auto counts = numkit::rng_shuffle(rng, spec.count_features);
        for (std::size_t s = 0; s < std::min(spec.signature_counts, spec.count_features); ++s)
            p.count_log_mean[counts[s]] += (rng.uniform() < 0.5 ? -0.6 : 0.6);
        profiles.push_back(std::move(p));
    }

    std::string out = "sha256,Package,MalFamily,Malware";
    for (std::size_t j = 0; j < spec.binary_features; ++j) {
        char buf[32];
        std::snprintf(buf, sizeof buf, ",perm_%03zu", j);
        out += buf;
    }
    for (std::size_t j = 0; j < spec.count_features; ++j) {
        char buf[32];
        std::snprintf(buf, sizeof buf, ",count_%03zu", j);
        out += buf;
    }
    out += '\n';

    // Interleave classes so the file is not sorted by label.
    std::vector<std::size_t> row_class;
    for (std::size_t c = 0; c < profiles.size(); ++c) row_class.insert(row_class.end(), profiles[c].count, c);
    const auto order = numkit::rng_shuffle(rng, row_class.size());

    for (auto o : order) {
        const auto& p = profiles[row_class[o]];
        out += hex_id(rng);
        out += ",com.example.app";
        out += std::to_string(rng.uniform_index(100000));
        out += ',';
        out += p.name;
        out += p.name == "Benign" ? ",0" : ",1";
        for (double rate : p.flag_rate) {
            out += ',';
            if (spec.missing_rate > 0.0 && rng.uniform() < spec.missing_rate) continue;
            out += rng.uniform() < rate ? '1' : '0';
        }
        for (double mean : p.count_log_mean) {
            out += ',';
            if (spec.missing_rate > 0.0 && rng.uniform() < spec.missing_rate) continue;
            const double v = std::floor(std::exp(mean + 0.7 * rng.normal()));
            out += std::to_string(static_cast<long long>(v));
        }
        out += '\n';
    }
    return out;
}

}  // namespace dicnn::data
