#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dicnn::data {

// Parameters of a synthetic table laid out like the KronoDroid static-feature
// CSV: identifier columns (sha256, Package), a family column, a binary
// Malware column, then binary permission/API flags and integer counts.
//
// Each family carries a handful of signature flags whose firing rate differs
// from the benign rate, plus shifted means on a few count features. It is a
// fixture for tests and demos, not a model of the real data.
struct SyntheticSpec {
    std::size_t benign = 600;
    std::vector<std::pair<std::string, std::size_t>> families{
        {"SMS", 320}, {"BankBot", 260}, {"Airpush", 420}, {"Dowgin", 80}};
    std::size_t binary_features = 96;
    std::size_t count_features = 24;
    std::size_t signature_flags = 8;
    std::size_t signature_counts = 3;
    double signature_shift = 0.30;  // added to or removed from the benign rate
    double missing_rate = 0.0;
    std::uint64_t seed = 7;
};

std::string synthetic_kronodroid_csv(const SyntheticSpec& spec);

// Columns a loader must drop for this layout (identifiers and the leaked
// Malware flag).
std::vector<std::string> synthetic_identifier_columns();

}  // namespace dicnn::data
