#ifndef SNNE_DEMO_HPP
#define SNNE_DEMO_HPP

#include <cstdint>
#include <string>

namespace snne {

// 1-D regression with a region the training data never covers. A closed-form
// linear fit and a small trained network are compared inside and beyond the
// training range; the network wins in range on curved ground truth while
// neither extrapolates.
enum class DemoGroundTruth { kLinear, kCubic };

struct ExtrapolationReport {
  double linear_in_mse = 0.0;
  double linear_out_mse = 0.0;
  double snn_in_mse = 0.0;
  double snn_out_mse = 0.0;
  double noise_sigma = 0.0;
};

// svg_path empty skips the plot.
ExtrapolationReport demo_extrapolation(std::uint64_t seed,
                                       const std::string& svg_path = "",
                                       DemoGroundTruth truth = DemoGroundTruth::kCubic);

}  // namespace snne

#endif  // SNNE_DEMO_HPP
