#pragma once

#include <map>
#include <string>

#include "graspkit/geometry.hpp"

namespace graspkit {

/// A frame plus the item name behind each label.
struct LabeledFrame {
  RGBDFrame frame;
  std::map<LabelId, std::string> names;

  /// Label carrying `name`, or 0 if none does.
  LabelId label_for(const std::string& name) const;
};

/// Frame directory layout: color.ppm (P6), depth.pgm (16-bit, millimeters,
/// 0 = no measurement), labels.pgm (16-bit) and meta.txt with intrinsics,
/// camera pose and label names.
void save_frame(const LabeledFrame& frame, const std::string& dir);
LabeledFrame load_frame(const std::string& dir);

}  // namespace graspkit
