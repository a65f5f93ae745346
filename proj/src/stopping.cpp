#include "hazmap/stopping.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace hazmap {

std::size_t default_stratification_bins(std::size_t dim)
{
    return dim <= 3 ? 10 : 6;
}

std::size_t stratification_cell(const SearchSpace& space, std::span<const double> p, std::size_t bins)
{
    check_dim(space.dim(), p.size(), "stratification_cell");
    std::size_t cell = 0;
    for (std::size_t d = 0; d < space.dim(); ++d) {
        const double u = (p[d] - space.lower[d]) / space.span(d);
        auto b = static_cast<long long>(std::floor(u * static_cast<double>(bins)));
        b = std::clamp<long long>(b, 0, static_cast<long long>(bins) - 1);
        cell = cell * bins + static_cast<std::size_t>(b);
    }
    return cell;
}

StratifiedSplit stratified_split(std::span<const SampleRecord> records, const SearchSpace& space,
                                 std::size_t bins)
{
    if (bins < 2) throw Error("stratified_split: bins must be >= 2");
    StratifiedSplit split;
    split.bins = bins;
    split.total_cells = 1;
    for (std::size_t d = 0; d < space.dim(); ++d) split.total_cells *= bins;

    std::map<std::size_t, std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < records.size(); ++i) {
        cells[stratification_cell(space, records[i].point, bins)].push_back(i);
    }
    split.occupied_cells = cells.size();

    std::vector<char> is_test(records.size(), 0);
    std::vector<double> risks;
    for (const auto& [cell, members] : cells) {
        risks.clear();
        for (std::size_t m : members) risks.push_back(records[m].risk);
        std::sort(risks.begin(), risks.end());
        const std::size_t k = risks.size();
        const double median = k % 2 ? risks[k / 2] : 0.5 * (risks[k / 2 - 1] + risks[k / 2]);

        std::size_t pick = members.front();
        for (std::size_t m : members) {
            const double dm = std::abs(records[m].risk - median);
            const double dp = std::abs(records[pick].risk - median);
            if (dm < dp || (dm == dp && records[m].sample_index < records[pick].sample_index)) pick = m;
        }
        is_test[pick] = 1;
    }
    for (std::size_t i = 0; i < records.size(); ++i) (is_test[i] ? split.test : split.train).push_back(i);
    return split;
}

double coverage_ct(const StratifiedSplit& split)
{
    if (split.total_cells == 0) return 0.0;
    return static_cast<double>(split.occupied_cells) / static_cast<double>(split.total_cells);
}

double f2_from_counts(std::size_t tp, std::size_t fp, std::size_t fn)
{
    if (tp == 0) return 0.0;
    const double p = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double r = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return 5.0 * p * r / (4.0 * p + r);
}

double f2_score(std::span<const unsigned char> predicted, std::span<const unsigned char> truth)
{
    if (predicted.size() != truth.size()) throw Error("f2_score: length mismatch");
    if (predicted.empty()) throw Error("f2_score: empty input");
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool p = predicted[i] != 0;
        const bool t = truth[i] != 0;
        tp += p && t;
        fp += p && !t;
        fn += !p && t;
    }
    return f2_from_counts(tp, fp, fn);
}

StopDecision should_stop(std::span<const SampleRecord> records, const SearchSpace& space,
                         const ClassifierConfig& classifier, const StopSettings& settings)
{
    if (records.size() < 2) throw Error("should_stop: need at least 2 records");
    const std::size_t bins = settings.bins ? settings.bins : default_stratification_bins(space.dim());
    const auto split = stratified_split(records, space, bins);

    StopDecision dec;
    dec.n_samples = records.size();
    dec.coverage = coverage_ct(split);
    dec.coverage_threshold = settings.coverage_threshold;
    dec.f2_threshold = settings.f2_threshold;
    dec.test_size = split.test.size();
    dec.train_size = split.train.size();

    if (!split.train.empty() && !split.test.empty()) {
        std::vector<SampleRecord> train;
        train.reserve(split.train.size());
        for (std::size_t i : split.train) train.push_back(records[i]);
        const auto model = train_classifier(train, space, classifier);

        PointSet pts(space.dim());
        std::vector<unsigned char> truth;
        for (std::size_t i : split.test) {
            pts.push_back(records[i].point);
            truth.push_back(records[i].hazardous ? 1 : 0);
        }
        const auto pred = model.predict_many(pts);
        std::vector<unsigned char> labels(pred.size());
        for (std::size_t i = 0; i < pred.size(); ++i) labels[i] = pred[i].label ? 1 : 0;
        dec.f2_obv = f2_score(labels, truth);
    }
    dec.stop = dec.coverage >= settings.coverage_threshold && dec.f2_obv >= settings.f2_threshold;
    return dec;
}

bool is_check_point(std::size_t n, const StopSettings& settings)
{
    if (n < settings.first_check) return false;
    return settings.check_every == 0 ? n == settings.first_check
                                     : (n - settings.first_check) % settings.check_every == 0;
}

std::size_t next_check_point(std::size_t n, const StopSettings& settings)
{
    if (n < settings.first_check) return settings.first_check;
    if (settings.check_every == 0) return static_cast<std::size_t>(-1);
    return settings.first_check + ((n - settings.first_check) / settings.check_every + 1) * settings.check_every;
}

}  // namespace hazmap
