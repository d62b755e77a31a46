#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "portopt/dates.hpp"
#include "portopt/frontier.hpp"

/// Dated market data: price series, aligned return matrices, covariance
/// models, and asset-labelled allocations. This layer owns asset identity and
/// calendar handling; the templated math layer underneath is label-free.
namespace portopt {

/// Adjusted daily closes for one asset. Dates strictly increase; closes are
/// positive.
struct PriceSeries {
    std::string asset_id;
    std::vector<Date> dates;
    std::vector<double> closes;
};

/// Throws ValidationError unless the series satisfies its invariants.
void validate(const PriceSeries& series);

/// Price rows shared by every series of a universe (inner join on dates).
struct AlignedPrices {
    std::vector<std::string> assets;
    std::vector<Date> dates;  ///< strictly increasing common dates
    Eigen::MatrixXd closes;   ///< one row per date, one column per asset
};

/// Inner-joins the series on their dates. Throws ValidationError when fewer
/// than `min_rows` common dates remain, naming the series that caused the
/// collapse.
[[nodiscard]] AlignedPrices align_prices(const std::vector<PriceSeries>& prices,
                                         std::size_t min_rows = 2);

/// Periodic simple returns for a universe, one row per period.
/// Row i holds (close_i - close_{i-1}) / close_{i-1} on the aligned dates and
/// is dated by the later close. means[j] is the arithmetic mean of column j.
struct ReturnMatrix {
    std::vector<std::string> assets;
    std::vector<Date> dates;
    Eigen::MatrixXd returns;
    Eigen::VectorXd means;
};

/// Computes simple returns on the inner-join date grid. The first aligned date
/// is consumed as the base, so m aligned prices produce m - 1 return rows.
[[nodiscard]] ReturnMatrix simple_returns(const std::vector<PriceSeries>& prices);

/// Returns the sub-matrix of rows dated in [first, last_exclusive).
[[nodiscard]] ReturnMatrix slice_by_date(const ReturnMatrix& r, const Date& first,
                                         const Date& last_exclusive);

/// Population covariance matrix of a universe with per-asset dispersions and
/// a positive-definiteness flag (recorded, never thrown).
struct CovarianceModel {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd stddevs;
    bool is_positive_definite = false;
};

[[nodiscard]] CovarianceModel covariance_model(const ReturnMatrix& r);

/// Capital split across named assets. Weights sum to 1 (within 1e-10); they
/// may be negative or exceed 1, which expresses leverage.
struct Allocation {
    std::vector<std::string> assets;
    Eigen::VectorXd weights;
};

/// Validating constructor for Allocation.
[[nodiscard]] Allocation make_allocation(std::vector<std::string> assets,
                                         Eigen::VectorXd weights);

/// Asset-checked wrappers over the label-free portfolio kernels.
[[nodiscard]] Eigen::VectorXd portfolio_return_series(const ReturnMatrix& r,
                                                      const Allocation& x);
[[nodiscard]] double portfolio_mean(const ReturnMatrix& r, const Allocation& x);
[[nodiscard]] double portfolio_risk_of(const CovarianceModel& v, const Allocation& x);

/// Frontier constants for a universe described by a return matrix.
[[nodiscard]] FrontierModel<double> frontier_for(const ReturnMatrix& r);

}  // namespace portopt
