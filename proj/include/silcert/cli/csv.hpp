#pragma once

#include <istream>
#include <utility>

#include "silcert/ann.hpp"
#include "silcert/classifier.hpp"

namespace silcert::cli {

// `value,label` rows; labels `left`/`right`, case-insensitive. Returns the
// left and right samples. Errors name the offending line.
std::pair<classifier::LabeledSample, classifier::LabeledSample> read_samples_csv(std::istream& in);

// `x1,x2,label` rows.
ann::PointSet2D read_points_csv(std::istream& in);

}  // namespace silcert::cli
