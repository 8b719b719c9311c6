#include "nethedge/synthetic.hpp"

#include "nethedge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace nethedge {

void validate(const SyntheticMarketSpec& s) {
  if (s.n_sectors < 1 || s.n_sectors > static_cast<int>(kGicsSectorCount)) throw ConfigError("n_sectors must lie in [1, 11]");
  if (s.n_stocks < s.n_sectors) throw ConfigError("need at least one stock per sector");
  if (s.days < 2) throw ConfigError("need at least 2 days");
  for (const double rho : {s.rho_intra, s.rho_inter}) {
    if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("sector correlations must lie in [0, 1)");
  }
  // The equicorrelated block structure is PSD only when rho_inter <= rho_intra.
  if (s.rho_inter > s.rho_intra) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "infeasible correlation matrix (not PSD): rho_inter=%g exceeds rho_intra=%g",
                  s.rho_inter, s.rho_intra);
    throw ConfigError(buf);
  }
  if (!std::isfinite(s.planted_loading)) throw ConfigError("planted loading must be finite");
  if (!(s.emission_ratio_min > 0.0 && s.emission_ratio_max >= s.emission_ratio_min)) {
    throw ConfigError("emission ratio bounds invalid");
  }
  for (const double v : {s.noise_vol, s.market_vol, s.style_vol, s.co2_vol}) {
    if (!(v >= 0.0)) throw ConfigError("volatilities must be non-negative");
  }
}

std::vector<GicsSector> synthetic_sectors(const SyntheticMarketSpec& spec) {
  std::vector<GicsSector> sectors;
  for (std::size_t i = 0; i < kGicsSectorCount && static_cast<int>(sectors.size()) < spec.n_sectors; ++i) {
    sectors.push_back(static_cast<GicsSector>(i));
  }
  if (std::find(sectors.begin(), sectors.end(), spec.planted_sector) == sectors.end()) {
    sectors.back() = spec.planted_sector;
  }
  return sectors;
}

SyntheticMarket generate_synthetic_market(const SyntheticMarketSpec& spec) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int n = spec.n_stocks;
  const int t_days = spec.days;
  const auto sectors = synthetic_sectors(spec);
  const int ns = static_cast<int>(sectors.size());

  SyntheticMarket m;
  m.sectors.resize(static_cast<std::size_t>(n));
  m.loadings.resize(n, 6);
  std::vector<std::string> tickers;
  for (int i = 0; i < n; ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "S%03d", i);
    tickers.emplace_back(name);
    const GicsSector sector = sectors[static_cast<std::size_t>(i % ns)];
    m.sectors[static_cast<std::size_t>(i)] = sector;
    m.loadings(i, 0) = spec.beta_mean + spec.beta_spread * (2.0 * unit(rng) - 1.0);
    for (int f = 1; f < 5; ++f) m.loadings(i, f) = spec.style_loading_sd * normal(rng);
    m.loadings(i, 5) = sector == spec.planted_sector ? spec.planted_loading : 0.0;
  }

  // Factor draws.
  Eigen::MatrixXd f(t_days, 6);
  m.latent_co2.resize(t_days);
  for (int t = 0; t < t_days; ++t) {
    f(t, 0) = spec.market_mean + spec.market_vol * normal(rng);
    for (int k = 1; k < 5; ++k) f(t, k) = spec.style_vol * normal(rng);
    f(t, 5) = spec.risk_free;
    m.latent_co2(t) = spec.co2_vol * normal(rng);
  }

  const double w_global = std::sqrt(spec.rho_inter);
  const double w_sector = std::sqrt(spec.rho_intra - spec.rho_inter);
  const double w_own = std::sqrt(1.0 - spec.rho_intra);
  Eigen::MatrixXd r(t_days, n);
  std::vector<double> sector_shock(static_cast<std::size_t>(ns));
  for (int t = 0; t < t_days; ++t) {
    const double global = normal(rng);
    for (auto& s : sector_shock) s = normal(rng);
    for (int i = 0; i < n; ++i) {
      const double noise = w_global * global + w_sector * sector_shock[static_cast<std::size_t>(i % ns)] + w_own * normal(rng);
      double v = spec.noise_vol * noise + m.loadings(i, 5) * m.latent_co2(t);
      for (int k = 0; k < 5; ++k) v += m.loadings(i, k) * f(t, k);
      r(t, i) = v;
    }
  }

  std::vector<Date> price_dates;
  Date d = spec.start;
  while (static_cast<int>(price_dates.size()) < t_days + 1) {
    if (d.is_weekday()) price_dates.push_back(d);
    d = d.plus_days(1);
  }
  Eigen::MatrixXd prices(t_days + 1, n);
  prices.row(0).setConstant(100.0);
  for (int t = 0; t < t_days; ++t) prices.row(t + 1) = prices.row(t).array() * r.row(t).array().exp();
  m.prices = PricePanel(price_dates, tickers, std::move(prices));

  std::vector<Date> return_dates(price_dates.begin() + 1, price_dates.end());
  m.factors = FactorPanel(return_dates,
                          {std::string(kMktRf), std::string(kSmb), std::string(kHml), std::string(kRmw),
                           std::string(kCma), std::string(kRf)},
                          std::move(f));

  std::lognormal_distribution<double> mcap(std::log(2e10), 1.0);
  std::uniform_real_distribution<double> base_intensity(1e-6, 2e-6);
  std::uniform_real_distribution<double> ratio(spec.emission_ratio_min, spec.emission_ratio_max);
  std::uniform_real_distribution<double> esg(40.0, 70.0);
  for (int i = 0; i < n; ++i) {
    ScoreRecord rec;
    rec.ticker = tickers[static_cast<std::size_t>(i)];
    rec.market_cap = mcap(rng);
    double intensity = base_intensity(rng);
    if (m.sectors[static_cast<std::size_t>(i)] == spec.planted_sector) intensity *= ratio(rng);
    const double tons = intensity * *rec.market_cap;
    rec.co2_scope1 = 0.7 * tons;
    rec.co2_scope2 = 0.3 * tons;
    rec.esg = esg(rng);
    rec.esg_promised = esg(rng);
    rec.esg_realized = esg(rng);
    rec.sector = m.sectors[static_cast<std::size_t>(i)];
    m.scores.insert(std::move(rec));
  }
  return m;
}

}  // namespace nethedge
