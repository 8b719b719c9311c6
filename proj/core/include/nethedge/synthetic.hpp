#pragma once

#include "nethedge/data.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace nethedge {

/// Block-correlated synthetic market with one sector planted on a latent
/// carbon factor.
struct SyntheticMarketSpec {
  int n_stocks = 200;
  int n_sectors = 8;
  double rho_intra = 0.3;  ///< correlation of idiosyncratic noise within a sector
  double rho_inter = 0.0;  ///< ... across sectors
  GicsSector planted_sector = GicsSector::Utilities;
  double planted_loading = 0.5;
  int days = 1500;
  std::uint64_t seed = 7;
  Date start{2015, 1, 1};

  double noise_vol = 0.012;       ///< daily sd of the block noise
  double market_vol = 0.010;      ///< daily sd of MKT_RF
  double market_mean = 0.0004;
  double style_vol = 0.005;       ///< daily sd of SMB, HML, RMW, CMA
  double co2_vol = 0.008;         ///< daily sd of the latent carbon factor
  double risk_free = 0.00005;     ///< constant daily RF
  double beta_mean = 1.0;         ///< market beta = beta_mean + U(-beta_spread, beta_spread)
  double beta_spread = 0.3;
  double style_loading_sd = 0.3;  ///< loadings on SMB..CMA ~ N(0, sd)
  double emission_ratio_min = 10.0;   ///< planted intensity / others, lower bound
  double emission_ratio_max = 100.0;
};

void validate(const SyntheticMarketSpec& spec);

struct SyntheticMarket {
  PricePanel prices;
  FactorPanel factors;  ///< MKT_RF, SMB, HML, RMW, CMA, RF
  ScoreTable scores;
  Eigen::VectorXd latent_co2;      ///< the planted carbon factor, on return dates
  Eigen::MatrixXd loadings;        ///< n_stocks x 6: MKT_RF, SMB, HML, RMW, CMA, latent CO2
  std::vector<GicsSector> sectors; ///< per stock
};

/// Sectors used by a spec with n sectors: GICS order, with the planted
/// sector guaranteed to be included.
std::vector<GicsSector> synthetic_sectors(const SyntheticMarketSpec& spec);

/// Throws ConfigError for invalid parameters, including a noise
/// correlation structure that is not positive semi-definite.
SyntheticMarket generate_synthetic_market(const SyntheticMarketSpec& spec);

}  // namespace nethedge
