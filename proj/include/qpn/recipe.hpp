#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpn/quasiprob.hpp"

namespace qpn {

inline constexpr double kRecipeFilterTol = 1e-8;

/// Parameters of a named experiment. Defaults come from default_recipe();
/// fields not used by a recipe are ignored.
struct RecipeConfig {
  std::string name;  // fig1 | fig2 | fig3 | fig4 | fig5 | custom
  double width = 1.2;
  GridSpec grid;
  std::size_t n_total = 266000;  // samples per dataset, split evenly over phases
  int phases = 10;
  std::uint64_t seed = 20170911;
  std::vector<double> amplitudes;
  double nbar = 0.5;
  double eta = 1.0;
  double threshold = kDefaultSignificance;
  std::string state;    // custom: state descriptor
  std::string process;  // custom: optional process descriptor
  double alpha_re = 0.0, alpha_im = 0.0;
  std::string out_dir = ".";

  /// Throws Parameter/Parse before anything is computed.
  void validate() const;
};

RecipeConfig default_recipe(const std::string& name);

/// Overrides fields of c from a JSON object (keys as in the manifest
/// "config" block). Unknown keys are a parse error.
void apply_overrides(RecipeConfig& c, const std::string& json_text);

/// 13 uniformly spaced amplitudes on [0, 1.6].
std::vector<double> default_amplitudes();

/// Runs the recipe, writes its CSV files and <out_dir>/manifest.json, and
/// returns the manifest text. Errors carry the failing stage in the message.
std::string run_recipe(const RecipeConfig& c);

}  // namespace qpn
