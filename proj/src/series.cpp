#include "portopt/series.hpp"

#include <algorithm>
#include <cstddef>
#include <set>

#include "portopt/errors.hpp"
#include "portopt/stats.hpp"

namespace portopt {

void validate(const PriceSeries& series) {
    if (series.asset_id.empty()) throw ValidationError("price series without an asset id");
    if (series.dates.size() != series.closes.size())
        throw ValidationError(series.asset_id + ": date and close counts differ");
    if (series.dates.empty()) throw ValidationError(series.asset_id + ": empty price series");
    for (std::size_t i = 0; i < series.dates.size(); ++i) {
        if (!is_valid_date(series.dates[i]))
            throw ValidationError(series.asset_id + ": invalid calendar date");
        if (i > 0 && !(series.dates[i - 1] < series.dates[i]))
            throw ValidationError(series.asset_id + ": dates must strictly increase (" +
                                  to_iso(series.dates[i]) + " follows " +
                                  to_iso(series.dates[i - 1]) + ")");
        if (!(series.closes[i] > 0.0))
            throw ValidationError(series.asset_id + ": close on " + to_iso(series.dates[i]) +
                                  " is not positive");
    }
}

AlignedPrices align_prices(const std::vector<PriceSeries>& prices, std::size_t min_rows) {
    if (prices.empty()) throw ValidationError("align_prices: no price series given");
    std::set<std::string> seen;
    for (const auto& p : prices) {
        validate(p);
        if (!seen.insert(p.asset_id).second)
            throw ValidationError("align_prices: duplicate asset id " + p.asset_id);
    }

    // Running intersection of date sets; remember which series first
    // collapsed it below the required row count.
    std::vector<Date> common = prices.front().dates;
    std::string offender = prices.front().asset_id;
    for (std::size_t k = 1; k < prices.size(); ++k) {
        std::vector<Date> next;
        std::set_intersection(common.begin(), common.end(), prices[k].dates.begin(),
                              prices[k].dates.end(), std::back_inserter(next));
        if (next.size() < min_rows && common.size() >= min_rows) offender = prices[k].asset_id;
        common = std::move(next);
    }
    if (common.size() < min_rows)
        throw ValidationError("align_prices: fewer than " + std::to_string(min_rows) +
                              " common dates across the universe (series " + offender +
                              " shares too few dates)");

    AlignedPrices out;
    out.dates = std::move(common);
    out.closes.resize(static_cast<Eigen::Index>(out.dates.size()),
                      static_cast<Eigen::Index>(prices.size()));
    for (std::size_t j = 0; j < prices.size(); ++j) {
        out.assets.push_back(prices[j].asset_id);
        std::size_t cursor = 0;
        for (std::size_t i = 0; i < out.dates.size(); ++i) {
            while (prices[j].dates[cursor] < out.dates[i]) ++cursor;
            out.closes(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                prices[j].closes[cursor];
        }
    }
    return out;
}

ReturnMatrix simple_returns(const std::vector<PriceSeries>& prices) {
    const AlignedPrices aligned = align_prices(prices, 2);
    const Eigen::Index m = aligned.closes.rows() - 1;
    const Eigen::Index n = aligned.closes.cols();

    ReturnMatrix r;
    r.assets = aligned.assets;
    r.dates.assign(aligned.dates.begin() + 1, aligned.dates.end());
    r.returns = (aligned.closes.bottomRows(m).array() / aligned.closes.topRows(m).array() - 1.0)
                    .matrix();
    r.means.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) r.means(j) = stats::mean(r.returns.col(j));
    return r;
}

ReturnMatrix slice_by_date(const ReturnMatrix& r, const Date& first,
                           const Date& last_exclusive) {
    const auto lo = std::lower_bound(r.dates.begin(), r.dates.end(), first);
    const auto hi = std::lower_bound(r.dates.begin(), r.dates.end(), last_exclusive);
    const auto offset = static_cast<Eigen::Index>(lo - r.dates.begin());
    const auto count = static_cast<Eigen::Index>(hi - lo);

    ReturnMatrix out;
    out.assets = r.assets;
    out.dates.assign(lo, hi);
    out.returns = r.returns.middleRows(offset, count);
    out.means.resize(r.returns.cols());
    for (Eigen::Index j = 0; j < out.returns.cols(); ++j)
        out.means(j) = count > 0 ? stats::mean(out.returns.col(j)) : 0.0;
    return out;
}

CovarianceModel covariance_model(const ReturnMatrix& r) {
    CovarianceModel model;
    model.matrix = stats::covariance_matrix(r.returns);
    model.stddevs = model.matrix.diagonal().cwiseSqrt();
    model.is_positive_definite =
        qp::SpdFactor<double>::factor(model.matrix).positive_definite();
    return model;
}

Allocation make_allocation(std::vector<std::string> assets, Eigen::VectorXd weights) {
    if (static_cast<Eigen::Index>(assets.size()) != weights.size())
        throw ValidationError("allocation: asset and weight counts differ");
    if (weights.size() == 0) throw ValidationError("allocation: empty");
    if (std::abs(weights.sum() - 1.0) > 1e-10)
        throw ValidationError("allocation: weights must sum to 1");
    return Allocation{std::move(assets), std::move(weights)};
}

namespace {

void require_same_assets(const std::vector<std::string>& lhs,
                         const std::vector<std::string>& rhs, const char* who) {
    if (lhs != rhs) throw ValidationError(std::string(who) + ": asset lists do not match");
}

}  // namespace

Eigen::VectorXd portfolio_return_series(const ReturnMatrix& r, const Allocation& x) {
    require_same_assets(r.assets, x.assets, "portfolio_return_series");
    return portfolio_return_series(r.returns, x.weights);
}

double portfolio_mean(const ReturnMatrix& r, const Allocation& x) {
    require_same_assets(r.assets, x.assets, "portfolio_mean");
    return portfolio_mean(r.means, x.weights);
}

double portfolio_risk_of(const CovarianceModel& v, const Allocation& x) {
    if (v.matrix.rows() != x.weights.size())
        throw ValidationError("portfolio_risk_of: dimension mismatch");
    return portfolio_risk(v.matrix, x.weights);
}

FrontierModel<double> frontier_for(const ReturnMatrix& r) {
    const CovarianceModel v = covariance_model(r);
    return frontier_constants(r.means, v.matrix);
}

}  // namespace portopt
