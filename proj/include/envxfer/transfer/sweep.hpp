#pragma once

#include <string>
#include <vector>

#include "envxfer/audio/waveform.hpp"
#include "envxfer/csv.hpp"
#include "envxfer/parallel.hpp"
#include "envxfer/transfer/transfer.hpp"

namespace envxfer::transfer {

struct ClipPair {
    std::string id;
    audio::Waveform content;
    audio::Waveform style;
};

struct SweepRecord {
    std::string pair_id;
    std::size_t filter_width = 0;
    double alpha = 0.0;
    TransferResult result;
};

/// One run_transfer per (width, pair) with the base seeds shared across widths.
/// Records are ordered width-major, then by pair.
inline std::vector<SweepRecord> filter_width_sweep(const std::vector<ClipPair>& pairs,
                                                   const std::vector<std::size_t>& widths, const TransferConfig& base,
                                                   const dsp::StftParams& stft_params, std::size_t workers = 0) {
    if (widths.empty()) throw UsageError("sweep: empty width list");
    std::vector<SweepRecord> records(widths.size() * pairs.size());
    parallel_for(
        records.size(),
        [&](std::size_t i) {
            const std::size_t w = i / pairs.size(), p = i % pairs.size();
            TransferConfig cfg = base;
            cfg.filter_width = widths[w];
            records[i] = {pairs[p].id, widths[w], cfg.alpha,
                          run_transfer(pairs[p].content, pairs[p].style, cfg, stft_params)};
        },
        workers);
    return records;
}

/// Same as the width sweep but over the content weight.
inline std::vector<SweepRecord> alpha_sweep(const std::vector<ClipPair>& pairs, const std::vector<double>& alphas,
                                            const TransferConfig& base, const dsp::StftParams& stft_params,
                                            std::size_t workers = 0) {
    if (alphas.empty()) throw UsageError("sweep: empty alpha grid");
    std::vector<SweepRecord> records(alphas.size() * pairs.size());
    parallel_for(
        records.size(),
        [&](std::size_t i) {
            const std::size_t a = i / pairs.size(), p = i % pairs.size();
            TransferConfig cfg = base;
            cfg.alpha = alphas[a];
            records[i] = {pairs[p].id, cfg.filter_width, alphas[a],
                          run_transfer(pairs[p].content, pairs[p].style, cfg, stft_params)};
        },
        workers);
    return records;
}

/// Frobenius distance between two equally-shaped grids.
inline double grid_distance(const dsp::MagnitudeGrid& a, const dsp::MagnitudeGrid& b) {
    return (a.values - b.values).norm();
}

inline CsvWriter sweep_table(const std::vector<SweepRecord>& records) {
    CsvWriter csv({"pair_id", "alpha", "filter_width", "initial_total", "final_total", "final_content", "final_style",
                   "grid_distance_content", "griffin_lim_consistency"});
    for (const auto& r : records) {
        const auto& l = r.result.loss;
        csv.row({r.pair_id, fmt_num(r.alpha), std::to_string(r.filter_width), fmt_num(l.trace.front().total),
                 fmt_num(l.total), fmt_num(l.content), fmt_num(l.style),
                 fmt_num(grid_distance(r.result.x_final, r.result.content_grid)),
                 fmt_num(r.result.griffin_lim_consistency.back())});
    }
    return csv;
}

}  // namespace envxfer::transfer
