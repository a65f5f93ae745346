#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hazmap/classifier.hpp"
#include "hazmap/space.hpp"

namespace hazmap {

/// Records split by a uniform grid: one representative per occupied cell goes
/// to the test set, everything else trains the observation model.
struct StratifiedSplit {
    std::size_t bins = 0;
    std::vector<std::size_t> test;   // record positions
    std::vector<std::size_t> train;
    std::size_t occupied_cells = 0;
    std::size_t total_cells = 0;
};

/// 10 bins per axis up to three dimensions, 6 beyond.
std::size_t default_stratification_bins(std::size_t dim);

/// Flat cell index of p on a bins^dim grid over the space.
std::size_t stratification_cell(const SearchSpace& space, std::span<const double> p, std::size_t bins);

/// Per occupied cell the test representative is the record whose risk is
/// closest to the cell's median risk (ties: lowest sample_index).
StratifiedSplit stratified_split(std::span<const SampleRecord> records, const SearchSpace& space,
                                 std::size_t bins);

double coverage_ct(const StratifiedSplit& split);

/// F2 = 5 P R / (4 P + R); 0 when there are no true positives.
double f2_score(std::span<const unsigned char> predicted, std::span<const unsigned char> truth);
double f2_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

struct StopSettings {
    double f2_threshold = 0.9;
    double coverage_threshold = 0.8;
    std::size_t bins = 0;  // 0 selects default_stratification_bins
    std::size_t first_check = 500;
    std::size_t check_every = 250;
};

struct StopDecision {
    std::size_t n_samples = 0;
    double coverage = 0.0;
    double f2_obv = 0.0;
    bool stop = false;
    double coverage_threshold = 0.8;
    double f2_threshold = 0.9;
    std::size_t test_size = 0;
    std::size_t train_size = 0;
};

/// Trains a fresh observation classifier on the train split, scores F2 on
/// the test split and applies (C_T >= coverage threshold) and (F2 >= F_s).
StopDecision should_stop(std::span<const SampleRecord> records, const SearchSpace& space,
                         const ClassifierConfig& classifier, const StopSettings& settings);

/// True when n is a scheduled check point (first_check, first_check + every, ...).
bool is_check_point(std::size_t n, const StopSettings& settings);
/// Smallest scheduled check point strictly greater than n.
std::size_t next_check_point(std::size_t n, const StopSettings& settings);

}  // namespace hazmap
