#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "modkit/errors.hpp"
#include "modkit/stats.hpp"

namespace modkit::its {

// Cronbach's alpha over a weeks x items matrix (no missing entries).
inline double cronbach_alpha(const std::vector<std::vector<double>>& items) {
    const std::size_t k = items.size();
    if (k < 2) throw ParamError("cronbach_alpha: need at least 2 items");
    const std::size_t n = items[0].size();
    if (n < 3) throw ParamError("cronbach_alpha: need at least 3 observations");
    for (const auto& col : items) {
        if (col.size() != n) throw ParamError("cronbach_alpha: ragged item columns");
    }
    double item_var_sum = 0.0;
    for (const auto& col : items) item_var_sum += sample_variance(col);
    std::vector<double> totals(n, 0.0);
    for (const auto& col : items) {
        for (std::size_t i = 0; i < n; ++i) totals[i] += col[i];
    }
    const double total_var = sample_variance(totals);
    if (!(total_var > 0.0)) throw NumericError("cronbach_alpha: zero total variance");
    return (static_cast<double>(k) / static_cast<double>(k - 1)) * (1.0 - item_var_sum / total_var);
}

// One post's topic weights and reaction counts, tagged with its week.
struct PostTopicReactions {
    std::int64_t week = 0;                 // 0-based week index
    std::vector<double> topic_weights;     // simplex over topics
    std::vector<std::int64_t> reactions;   // counts per reaction type
};

// Weekly reaction-weighted share of one topic:
//   rho_w = sum_p weight_{topic,p} * n_{reaction,p} / sum_p n_{reaction,p}.
// Weeks with no reactions of the given type are missing.
inline std::vector<std::optional<double>> reaction_weighted_topic_share(
    const std::vector<PostTopicReactions>& posts, std::size_t topic, std::size_t reaction,
    std::size_t n_weeks) {
    std::vector<double> numer(n_weeks, 0.0);
    std::vector<double> denom(n_weeks, 0.0);
    for (const auto& post : posts) {
        if (post.week < 0 || static_cast<std::size_t>(post.week) >= n_weeks) {
            throw ParamError("reaction_weighted_topic_share: week out of range");
        }
        if (topic >= post.topic_weights.size()) {
            throw ParamError("reaction_weighted_topic_share: topic index out of range");
        }
        if (reaction >= post.reactions.size()) {
            throw ParamError("reaction_weighted_topic_share: reaction index out of range");
        }
        double weight_sum = 0.0;
        for (const double w : post.topic_weights) {
            if (w < 0.0) throw ParamError("reaction_weighted_topic_share: negative topic weight");
            weight_sum += w;
        }
        if (std::fabs(weight_sum - 1.0) > 1e-6) {
            throw ParamError("reaction_weighted_topic_share: topic weights off the simplex");
        }
        const auto count = post.reactions[reaction];
        if (count < 0) throw ParamError("reaction_weighted_topic_share: negative reaction count");
        const auto w = static_cast<std::size_t>(post.week);
        numer[w] += post.topic_weights[topic] * static_cast<double>(count);
        denom[w] += static_cast<double>(count);
    }
    std::vector<std::optional<double>> rho(n_weeks);
    for (std::size_t w = 0; w < n_weeks; ++w) {
        if (denom[w] > 0.0) rho[w] = numer[w] / denom[w];
    }
    return rho;
}

}  // namespace modkit::its
