#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qsel/rng.hpp"
#include "qsel/types.hpp"

namespace qsel {

enum class Design { Pentagon5, T52D, T510D, Flower2, Uniform, DgpG, DgpU };

std::string to_string(Design d);
Design design_from_string(const std::string& s);

/// Simulated data source; `d` is the center separation of the two-component
/// designs DgpG / DgpU and ignored otherwise.
struct DgpSpec {
  Design design = Design::Uniform;
  int n = 300;
  double d = 0.0;
};

/// n iid draws with labels set to the generating component.
DataMatrix sample(const DgpSpec& spec, SeededRng& rng);

/// The K=1 and K=2 reference configurations of the two-component designs:
/// theta1 carries the mixture mean and covariance in closed form, theta2
/// the component triplets.
std::pair<ClusterConfiguration, ClusterConfiguration> reference_configurations(Design design,
                                                                               double d);

/// Monte Carlo estimates of the population hard and smooth scores of both
/// reference configurations along a separation grid.
struct PopulationScoreResult {
  std::vector<double> d_grid;
  std::vector<double> h_k1, h_k2, t_k1, t_k2;
  std::vector<double> se_h_k1, se_h_k2, se_t_k1, se_t_k2;
};

PopulationScoreResult population_score_curve(Design design, const std::vector<double>& d_grid,
                                             int draws, int repeats, const SeededRng& rng,
                                             int workers = 0);

/// First sign change of (a - b) along the grid, linearly interpolated;
/// empty when the curves do not cross.
std::optional<double> locate_crossing(const std::vector<double>& d_grid,
                                      const std::vector<double>& a, const std::vector<double>& b);

/// CSV with columns d, h_k1, h_k2, t_k1, t_k2 and their standard errors.
void write_population_curve_csv(const PopulationScoreResult& result, const std::string& path);

}  // namespace qsel
