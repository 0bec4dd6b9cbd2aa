#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lhi::hi {

// The seven health-indicator channels, in the canonical column order.
enum class Channel { rec, sap, nap, sap_ls, nap_ls, sigma_a, sigma_e };

inline constexpr std::array<Channel, 7> kAllChannels = {
    Channel::rec,    Channel::sap,     Channel::nap,    Channel::sap_ls,
    Channel::nap_ls, Channel::sigma_a, Channel::sigma_e};

const char* channel_name(Channel channel);
std::optional<Channel> channel_from_name(std::string_view name);

struct HISeries {
    int unit_id = 0;
    Channel channel = Channel::rec;
    std::vector<double> values;
};

// Mean over units of |#(delta>0) - #(delta<0)| / (n-1); zero deltas count in
// neither tally. Length-1 series are excluded with a warning.
double monotonicity(std::span<const HISeries> series_by_unit);

// Minimum over unit pairs of |Pearson correlation| after linearly resampling
// the longer series to the shorter one's length. A constant series makes its
// pairs contribute 0.
double trendability(std::span<const HISeries> series_by_unit);

// exp(-std of final values / mean |final - first|) over units that run to
// failure; denominator floored at 1e-12.
double prognosability(std::span<const HISeries> series_by_unit);

struct HIMetricRow {
    Channel channel = Channel::rec;
    double monotonicity = 0.0;
    double trendability = 0.0;
    double prognosability = 0.0;
    std::optional<double> rul_rmse;
};

// One row per channel present in the input, in canonical order; RMSE values
// are passed through unmodified.
std::vector<HIMetricRow> metric_table(std::span<const HISeries> all_series,
                                      const std::map<Channel, double>& rmse_by_channel);

// Columns: channel, monotonicity, trendability, prognosability, rul_rmse.
std::string metric_table_csv(std::span<const HIMetricRow> rows);

}  // namespace lhi::hi
