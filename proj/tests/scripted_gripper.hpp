#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "tactile/grasp_control.hpp"

namespace testing_support {

/// Noiseless gripper whose settled level is a function of width.  Each
/// capture starts at the width command, holds a 0.1 s motion and then a
/// decay of amplitude 10 and rate 1 per second towards the level.
class ScriptedGripper : public tactile::GripperPort {
 public:
  explicit ScriptedGripper(std::function<double(double)> level, double width = 60.0)
      : level_(std::move(level)), width_(width) {}

  double set_width(double mm) override {
    width_ = std::max(0.0, mm);
    commands.push_back(width_);
    return width_;
  }
  double current_width() const override { return width_; }

  tactile::ResistanceTrace capture(double duration) override {
    const double stop = 0.1;
    const double c = level_(width_);
    const double a = c < 0.0 ? 10.0 : 0.0;
    std::vector<double> t, y;
    for (int k = 0; k / 15.0 <= stop + duration + 1e-9; ++k) {
      t.push_back(k / 15.0);
      y.push_back(t.back() < stop ? 0.0 : c + a * std::exp(-(t.back() - stop)));
    }
    return tactile::make_trace(tactile::SensorLayout{{0}, 1, 1}, t, {y},
                               {{0.0, tactile::MarkKind::close_start},
                                {stop, tactile::MarkKind::close_stop}});
  }

  std::vector<double> commands;

 private:
  std::function<double(double)> level_;
  double width_;
};

}  // namespace testing_support
