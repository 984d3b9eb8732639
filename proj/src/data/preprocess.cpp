#include "dicnn/data/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dicnn/error.hpp"
#include "dicnn/numkit/rng.hpp"

namespace dicnn::data {

std::vector<double> missing_value_ratio(const RawTable& table) {
    if (table.rows == 0) throw DataError(table.source + ": cannot compute missing-value ratio of an empty table");
    std::vector<std::size_t> counts(table.width(), 0);
    for (std::size_t r = 0; r < table.rows; ++r)
        for (std::size_t c = 0; c < table.width(); ++c) counts[c] += table.is_missing(r, c) ? 1 : 0;
    std::vector<double> mvr(table.width());
    for (std::size_t c = 0; c < table.width(); ++c)
        mvr[c] = static_cast<double>(counts[c]) / static_cast<double>(table.rows);
    return mvr;
}

namespace {

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

ImputeResult impute_or_drop(const RawTable& table, std::span<const double> mvr, double drop_threshold) {
    if (!(drop_threshold >= 0.0 && drop_threshold <= 1.0)) {
        throw ConfigError("drop_threshold must lie in [0, 1], got " + std::to_string(drop_threshold));
    }
    if (mvr.size() != table.width()) throw ShapeError("impute_or_drop: mvr length does not match table width");

    ImputeResult result;
    std::vector<std::string> kept;
    for (std::size_t c = 0; c < table.width(); ++c) {
        if (mvr[c] > drop_threshold) {
            result.dropped.push_back({table.feature_names[c], "missing-value ratio above threshold", mvr[c]});
            continue;
        }
        std::vector<double> present;
        for (std::size_t r = 0; r < table.rows; ++r)
            if (!table.is_missing(r, c)) present.push_back(table.value(r, c));
        if (present.empty()) {
            throw DataError(table.source + ": feature '" + table.feature_names[c] +
                            "' is entirely missing and cannot be imputed");
        }
        kept.push_back(table.feature_names[c]);
        result.medians.push_back(median(std::move(present)));
    }
    result.table = impute_with(select_columns(table, kept), result.medians);
    return result;
}

RawTable impute_with(const RawTable& table, std::span<const double> medians) {
    if (medians.size() != table.width()) throw ShapeError("impute_with: medians length does not match table width");
    RawTable out = table;
    for (std::size_t r = 0; r < out.rows; ++r) {
        for (std::size_t c = 0; c < out.width(); ++c) {
            const auto i = r * out.width() + c;
            if (out.missing[i]) {
                out.cells[i] = medians[c];
                out.missing[i] = 0;
            }
        }
    }
    return out;
}

Standardized standardize(const numkit::Tensor& features) {
    if (features.rank() != 2) throw ShapeError("standardize expects a matrix");
    const auto n = features.dim(0);
    const auto f = features.dim(1);
    Standardized out;
    out.mu.assign(f, 0.0);
    out.sigma.assign(f, 0.0);
    for (std::size_t j = 0; j < f; ++j) {
        bool constant = true;
        const double first = features.at(0, j);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = features.at(i, j);
            constant = constant && v == first;
            sum += v;
        }
        if (constant) {
            out.mu[j] = first;
            out.constant_columns.push_back(j);
            continue;
        }
        const double mu = sum / static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = features.at(i, j) - mu;
            ss += d * d;
        }
        out.mu[j] = mu;
        out.sigma[j] = std::sqrt(ss / static_cast<double>(n));
    }
    out.features = apply_standardization(features, out.mu, out.sigma);
    return out;
}

numkit::Tensor apply_standardization(const numkit::Tensor& features, std::span<const double> mu,
                                     std::span<const double> sigma) {
    if (features.rank() != 2 || mu.size() != features.dim(1) || sigma.size() != features.dim(1)) {
        throw ShapeError("apply_standardization: statistics do not match " + numkit::shape_string(features.shape()));
    }
    const auto n = features.dim(0);
    const auto f = features.dim(1);
    std::vector<double> out(n * f);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < f; ++j)
            out[i * f + j] = sigma[j] > 0.0 ? (features.at(i, j) - mu[j]) / sigma[j] : 0.0;
    return numkit::Tensor({n, f}, std::move(out));
}

LabelEncoding encode_labels(std::span<const std::string> labels) {
    std::set<std::string> distinct(labels.begin(), labels.end());
    if (distinct.size() < 2) {
        throw DataError("labels are degenerate: need at least 2 distinct classes, found " +
                        std::to_string(distinct.size()));
    }
    LabelEncoding enc;
    enc.class_names.assign(distinct.begin(), distinct.end());
    enc.indices = encode_with(labels, enc.class_names);
    return enc;
}

std::vector<std::size_t> encode_with(std::span<const std::string> labels, std::span<const std::string> class_names) {
    std::vector<std::size_t> out;
    out.reserve(labels.size());
    for (const auto& l : labels) {
        auto it = std::find(class_names.begin(), class_names.end(), l);
        if (it == class_names.end()) throw DataError("label '" + l + "' is not a known class");
        out.push_back(static_cast<std::size_t>(it - class_names.begin()));
    }
    return out;
}

numkit::Tensor one_hot(std::span<const std::size_t> indices, std::size_t k) {
    if (indices.empty() || k == 0) throw ShapeError("one_hot needs at least one index and k >= 1");
    std::vector<double> out(indices.size() * k, 0.0);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= k) {
            throw ShapeError("one_hot: index " + std::to_string(indices[i]) + " out of bounds for k=" +
                             std::to_string(k));
        }
        out[i * k + indices[i]] = 1.0;
    }
    return numkit::Tensor({indices.size(), k}, std::move(out));
}

Dataset to_dataset(const RawTable& table) {
    for (auto m : table.missing) {
        if (m) throw DataError(table.source + ": table still has missing cells; impute first");
    }
    auto enc = encode_labels(table.labels);
    Dataset ds;
    ds.features = numkit::Tensor({table.rows, table.width()}, table.cells);
    ds.labels = std::move(enc.indices);
    ds.feature_names = table.feature_names;
    ds.class_names = std::move(enc.class_names);
    ds.source = table.source;
    ds.validate();
    return ds;
}

SplitSpec stratified_split(std::span<const std::size_t> labels, std::span<const std::string> class_names, double eta,
                           std::uint64_t seed) {
    if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("eta must lie in (0, 1), got " + std::to_string(eta));
    const auto k = class_names.size();
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < labels.size(); ++i) members.at(labels[i]).push_back(i);

    SplitSpec split;
    split.eta = eta;
    split.seed = seed;
    numkit::Rng rng(numkit::derive_seed(seed, "stratified_split"));
    for (std::size_t c = 0; c < k; ++c) {
        const auto& rows = members[c];
        if (rows.size() < 2) {
            throw DataError("cannot stratify: class '" + class_names[c] + "' has " + std::to_string(rows.size()) +
                            " sample(s), at least 2 required");
        }
        const auto perm = numkit::rng_shuffle(rng, rows.size());
        auto n_val = static_cast<std::size_t>(std::floor(eta * static_cast<double>(rows.size()) + 0.5));
        n_val = std::clamp<std::size_t>(n_val, 1, rows.size() - 1);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            (i < n_val ? split.val_indices : split.train_indices).push_back(rows[perm[i]]);
        }
    }
    std::sort(split.train_indices.begin(), split.train_indices.end());
    std::sort(split.val_indices.begin(), split.val_indices.end());
    return split;
}

SplitSpec stratified_split(const Dataset& dataset, double eta, std::uint64_t seed) {
    return stratified_split(dataset.labels, dataset.class_names, eta, seed);
}

namespace {

// Seeded sample of `count` members, returned in ascending row order.
std::vector<std::size_t> sample_rows(const std::vector<std::size_t>& rows, std::size_t count, numkit::Rng& rng) {
    const auto perm = numkit::rng_shuffle(rng, rows.size());
    std::vector<std::size_t> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(rows[perm[i]]);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> rows_of(const Dataset& dataset, std::size_t cls) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < dataset.rows(); ++i)
        if (dataset.labels[i] == cls) rows.push_back(i);
    return rows;
}

// Re-encode a row subset so that only the present classes remain, ordered
// lexicographically.
Dataset reencode(const Dataset& dataset, const std::vector<std::size_t>& rows, const std::string& source) {
    std::vector<std::string> names;
    names.reserve(rows.size());
    for (auto r : rows) names.push_back(dataset.class_names[dataset.labels[r]]);
    auto enc = encode_labels(names);
    Dataset out;
    out.features = numkit::take_rows(dataset.features, rows);
    out.labels = std::move(enc.indices);
    out.feature_names = dataset.feature_names;
    out.class_names = std::move(enc.class_names);
    out.source = source;
    return out;
}

}  // namespace

std::vector<Dataset> build_family_subsets(const Dataset& dataset, const std::vector<std::string>& families,
                                          const std::string& benign_label, std::uint64_t seed) {
    const auto benign_rows = rows_of(dataset, find_class(dataset, benign_label));
    std::vector<Dataset> out;
    for (const auto& family : families) {
        auto it = std::find(dataset.class_names.begin(), dataset.class_names.end(), family);
        if (it == dataset.class_names.end()) throw DataError("unknown malware family '" + family + "'");
        const auto family_rows = rows_of(dataset, static_cast<std::size_t>(it - dataset.class_names.begin()));
        const auto m = std::min(benign_rows.size(), family_rows.size());
        numkit::Rng rng(numkit::derive_seed(seed, "family_subset:" + family));
        auto rows = sample_rows(benign_rows, m, rng);
        const auto fam = sample_rows(family_rows, m, rng);
        rows.insert(rows.end(), fam.begin(), fam.end());
        std::sort(rows.begin(), rows.end());
        out.push_back(reencode(dataset, rows, dataset.source + "#" + benign_label + "-vs-" + family));
    }
    return out;
}

Dataset build_family_multiclass(const Dataset& dataset, const std::vector<std::string>& families, std::uint64_t seed) {
    std::vector<std::vector<std::size_t>> members;
    std::size_t m = static_cast<std::size_t>(-1);
    for (const auto& family : families) {
        auto it = std::find(dataset.class_names.begin(), dataset.class_names.end(), family);
        if (it == dataset.class_names.end()) throw DataError("unknown malware family '" + family + "'");
        members.push_back(rows_of(dataset, static_cast<std::size_t>(it - dataset.class_names.begin())));
        m = std::min(m, members.back().size());
    }
    numkit::Rng rng(numkit::derive_seed(seed, "family_multiclass"));
    std::vector<std::size_t> rows;
    for (const auto& mem : members) {
        const auto picked = sample_rows(mem, m, rng);
        rows.insert(rows.end(), picked.begin(), picked.end());
    }
    std::sort(rows.begin(), rows.end());
    return reencode(dataset, rows, dataset.source + "#families");
}

}  // namespace dicnn::data
