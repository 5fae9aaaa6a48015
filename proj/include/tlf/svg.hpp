#pragma once

#include <string>
#include <vector>

#include "tlf/types.hpp"

namespace tlf {

// One static timeline panel: predicted probability in orange, optional 0/1
// reference series in blue, seconds on x, probability on y.
void write_timeline_svg(const std::string& path, const std::string& title,
                        const std::vector<double>& predicted_probs,
                        const std::vector<uint8_t>& reference, double threshold);

// Count panel variant (HCP estimate vs reference counts).
void write_count_svg(const std::string& path, const std::string& title,
                     const std::vector<int>& predicted, const std::vector<int>& reference,
                     double samples_per_second);

}  // namespace tlf
