#include "lhi/hi_eval.hpp"

#include <algorithm>
#include <cmath>

#include "lhi/error.hpp"
#include "lhi/textio.hpp"

namespace lhi::hi {
namespace {

// Linear interpolation of v onto `target` evenly spaced points spanning the
// same support.
std::vector<double> resample(const std::vector<double>& v, std::size_t target) {
    if (v.size() == target) return v;
    std::vector<double> out(target);
    if (target == 1) {
        out[0] = v.front();
        return out;
    }
    const double step = static_cast<double>(v.size() - 1) / static_cast<double>(target - 1);
    for (std::size_t k = 0; k < target; ++k) {
        const double t = step * static_cast<double>(k);
        const std::size_t lo = std::min(v.size() - 2, static_cast<std::size_t>(t));
        const double frac = t - static_cast<double>(lo);
        out[k] = v[lo] + frac * (v[lo + 1] - v[lo]);
    }
    return out;
}

// |Pearson r|; zero-variance series yield 0.
double abs_pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    if (n < 2) return 0.0;
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) return 0.0;
    double r = sab / std::sqrt(saa * sbb);
    r = std::clamp(r, -1.0, 1.0);
    return std::abs(r);
}

}  // namespace

const char* channel_name(Channel channel) {
    switch (channel) {
        case Channel::rec: return "rec";
        case Channel::sap: return "sap";
        case Channel::nap: return "nap";
        case Channel::sap_ls: return "sap_ls";
        case Channel::nap_ls: return "nap_ls";
        case Channel::sigma_a: return "sigma_a";
        case Channel::sigma_e: return "sigma_e";
    }
    return "rec";
}

std::optional<Channel> channel_from_name(std::string_view name) {
    for (Channel c : kAllChannels) {
        if (name == channel_name(c)) return c;
    }
    return std::nullopt;
}

double monotonicity(std::span<const HISeries> series_by_unit) {
    double sum = 0.0;
    std::size_t counted = 0;
    for (const HISeries& s : series_by_unit) {
        if (s.values.size() < 2) {
            logging::warn("monotonicity: unit " + std::to_string(s.unit_id) +
                          " has fewer than 2 cycles and was excluded");
            continue;
        }
        long pos = 0, neg = 0;
        for (std::size_t i = 1; i < s.values.size(); ++i) {
            const double delta = s.values[i] - s.values[i - 1];
            if (delta > 0.0) ++pos;
            else if (delta < 0.0) ++neg;
        }
        sum += std::abs(static_cast<double>(pos - neg)) /
               static_cast<double>(s.values.size() - 1);
        ++counted;
    }
    if (counted == 0) throw UsageError("monotonicity: no unit series of length >= 2");
    return sum / static_cast<double>(counted);
}

double trendability(std::span<const HISeries> series_by_unit) {
    if (series_by_unit.size() < 2) {
        throw UsageError("trendability: need at least 2 unit series");
    }
    double min_corr = 1.0;
    for (std::size_t i = 0; i < series_by_unit.size(); ++i) {
        for (std::size_t j = i + 1; j < series_by_unit.size(); ++j) {
            const auto& a = series_by_unit[i].values;
            const auto& b = series_by_unit[j].values;
            const std::size_t common = std::min(a.size(), b.size());
            double corr = 0.0;
            if (common >= 2) {
                corr = abs_pearson(resample(a, common), resample(b, common));
            }
            min_corr = std::min(min_corr, corr);
        }
    }
    return min_corr;
}

double prognosability(std::span<const HISeries> series_by_unit) {
    if (series_by_unit.size() < 2) {
        throw UsageError("prognosability: need at least 2 unit series");
    }
    const double n = static_cast<double>(series_by_unit.size());
    double mean_final = 0.0;
    double mean_range = 0.0;
    for (const HISeries& s : series_by_unit) {
        if (s.values.empty()) throw UsageError("prognosability: empty unit series");
        mean_final += s.values.back();
        mean_range += std::abs(s.values.back() - s.values.front());
    }
    mean_final /= n;
    mean_range /= n;
    double ss = 0.0;
    for (const HISeries& s : series_by_unit) {
        const double d = s.values.back() - mean_final;
        ss += d * d;
    }
    const double std_final = std::sqrt(ss / (n - 1.0));
    const double denom = std::max(mean_range, 1e-12);
    return std::exp(-std_final / denom);
}

std::vector<HIMetricRow> metric_table(std::span<const HISeries> all_series,
                                      const std::map<Channel, double>& rmse_by_channel) {
    std::vector<HIMetricRow> rows;
    for (Channel channel : kAllChannels) {
        std::vector<HISeries> group;
        for (const HISeries& s : all_series) {
            if (s.channel == channel) group.push_back(s);
        }
        if (group.empty()) continue;
        HIMetricRow row;
        row.channel = channel;
        row.monotonicity = monotonicity(group);
        row.trendability = trendability(group);
        row.prognosability = prognosability(group);
        auto it = rmse_by_channel.find(channel);
        if (it != rmse_by_channel.end()) {
            row.rul_rmse = it->second;
        } else {
            logging::warn(std::string("metric_table: no RUL RMSE for channel ") +
                          channel_name(channel));
        }
        rows.push_back(row);
    }
    return rows;
}

std::string metric_table_csv(std::span<const HIMetricRow> rows) {
    std::string out = "channel,monotonicity,trendability,prognosability,rul_rmse\n";
    for (const HIMetricRow& row : rows) {
        out += textio::join_csv({channel_name(row.channel),
                                 textio::format_double(row.monotonicity),
                                 textio::format_double(row.trendability),
                                 textio::format_double(row.prognosability),
                                 row.rul_rmse ? textio::format_double(*row.rul_rmse) : ""});
        out += '\n';
    }
    return out;
}

}  // namespace lhi::hi
