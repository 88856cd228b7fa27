#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "envxfer/csv.hpp"
#include "envxfer/eval/autoencoder.hpp"

namespace envxfer::eval {

/// Median of the finite entries; NaN when there are none.
inline double median(std::vector<double> v) {
    v.erase(std::remove_if(v.begin(), v.end(), [](double x) { return !std::isfinite(x); }), v.end());
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct PairEval {
    std::string pair_id;
    std::string content_id;
    std::string style_id;
    std::size_t content_class = 0;
    std::size_t style_class = 0;
    double alpha = 0.0;
    std::size_t filter_width = 0;
    std::size_t pred_transfer = 0;
    std::size_t pred_mix = 0;
    Preservation preservation;
};

struct Medians {
    double d_x_content = 0.0;
    double d_x_style = 0.0;
    double ratio_content = 0.0;
    double ratio_style = 0.0;
    std::size_t flagged = 0;
};

inline Medians medians(const std::vector<PairEval>& pairs) {
    std::vector<double> dc, ds, rc, rs;
    Medians m;
    for (const auto& p : pairs) {
        if (p.preservation.flagged) {
            ++m.flagged;
            continue;
        }
        dc.push_back(p.preservation.d_x_content);
        ds.push_back(p.preservation.d_x_style);
        rc.push_back(p.preservation.ratio_content);
        rs.push_back(p.preservation.ratio_style);
    }
    m.d_x_content = median(dc);
    m.d_x_style = median(ds);
    m.ratio_content = median(rc);
    m.ratio_style = median(rs);
    return m;
}

struct EvalReport {
    double p0 = 0.0;
    double p1 = 0.0;
    double value = 0.0;
    double pt_content = 0.0;
    double pt_style = 0.0;
    double pm_content = 0.0;
    double pm_style = 0.0;
    bool retrained = false;
    std::vector<PairEval> pairs;
};

inline const std::vector<std::string>& pair_columns() {
    static const std::vector<std::string> c{"pair_id",     "content_id",    "style_id",     "content_class",
                                            "style_class", "alpha",         "filter_width", "pred_transfer",
                                            "pred_mix",    "d_x_content",   "d_x_style",    "d_z_content",
                                            "d_z_style",   "ratio_content", "ratio_style",  "flagged"};
    return c;
}

inline CsvWriter pair_table(const std::vector<PairEval>& pairs) {
    CsvWriter w(pair_columns());
    for (const auto& p : pairs) {
        const auto& q = p.preservation;
        w.row({p.pair_id, p.content_id, p.style_id, std::to_string(p.content_class), std::to_string(p.style_class),
               fmt_num(p.alpha), std::to_string(p.filter_width), std::to_string(p.pred_transfer),
               std::to_string(p.pred_mix), fmt_num(q.d_x_content), fmt_num(q.d_x_style), fmt_num(q.d_z_content),
               fmt_num(q.d_z_style), fmt_num(q.ratio_content), fmt_num(q.ratio_style), q.flagged ? "1" : "0"});
    }
    return w;
}

namespace detail {

inline nlohmann::ordered_json number(double v) {
    return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace detail

inline nlohmann::ordered_json summary_json(const EvalReport& r) {
    const auto m = medians(r.pairs);
    nlohmann::ordered_json j;
    j["p0"] = detail::number(r.p0);
    j["p1"] = r.retrained ? detail::number(r.p1) : nlohmann::ordered_json(nullptr);
    j["value"] = r.retrained ? detail::number(r.value) : nlohmann::ordered_json(nullptr);
    j["pt_content"] = detail::number(r.pt_content);
    j["pt_style"] = detail::number(r.pt_style);
    j["pm_content"] = detail::number(r.pm_content);
    j["pm_style"] = detail::number(r.pm_style);
    j["pairs"] = r.pairs.size();
    j["flagged_pairs"] = m.flagged;
    j["median_d_x_content"] = detail::number(m.d_x_content);
    j["median_d_x_style"] = detail::number(m.d_x_style);
    j["median_ratio_content"] = detail::number(m.ratio_content);
    j["median_ratio_style"] = detail::number(m.ratio_style);
    return j;
}

inline void save_report(const std::filesystem::path& dir, const EvalReport& r) {
    std::filesystem::create_directories(dir);
    pair_table(r.pairs).save(dir / "eval_pairs.csv");
    std::ofstream(dir / "eval_summary.json", std::ios::binary | std::ios::trunc) << summary_json(r).dump(2) << '\n';
}

}  // namespace envxfer::eval
