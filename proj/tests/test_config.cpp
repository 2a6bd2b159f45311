// Copyright 2026 The Foreval Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "foreval/config.hpp"

#include <gtest/gtest.h>

namespace foreval {
namespace {

TEST(ValidateConfig, CarDefaultsPass) {
  const EvalConfig cfg = validate_config(EvalConfig::for_profile(ClassProfile::kCar));
  EXPECT_EQ(cfg.current_thresholds, (std::vector<double>{0.5, 1.0, 2.0, 4.0}));
  EXPECT_EQ(cfg.final_thresholds, (std::vector<double>{1.0, 2.0, 4.0, 8.0}));
}

TEST(ValidateConfig, PedestrianDefaultsPass) {
  const EvalConfig cfg = validate_config(EvalConfig::for_profile(ClassProfile::kPedestrian));
  EXPECT_EQ(cfg.current_thresholds, (std::vector<double>{0.125, 0.25, 0.5, 1.0}));
  EXPECT_EQ(cfg.final_thresholds, (std::vector<double>{0.25, 0.5, 1.0, 2.0}));
}

TEST(ValidateConfig, ThresholdLengthMismatchRejected) {
  EvalConfig cfg = EvalConfig::for_profile(ClassProfile::kCar);
  cfg.current_thresholds = {1.0};
  cfg.final_thresholds = {2.0, 4.0};
  EXPECT_THROW(validate_config(cfg), ValidationError);
}

TEST(ValidateConfig, BadValuesRejected) {
  EvalConfig cfg = EvalConfig::for_profile(ClassProfile::kCar);
  cfg.k = 0;
  EXPECT_THROW(validate_config(cfg), ValidationError);

  cfg = EvalConfig::for_profile(ClassProfile::kCar);
  cfg.current_thresholds[1] = 0.0;
  EXPECT_THROW(validate_config(cfg), ValidationError);

  cfg = EvalConfig::for_profile(ClassProfile::kCar);
  cfg.recall_levels = {0.6, 1.2};
  EXPECT_THROW(validate_config(cfg), ValidationError);

  cfg = EvalConfig::for_profile(ClassProfile::kCar);
  cfg.pr_points = 1;
  EXPECT_THROW(validate_config(cfg), ValidationError);

  cfg = EvalConfig::for_profile(ClassProfile::kCar);
  cfg.timeline.dt = 0.0;
  EXPECT_THROW(validate_config(cfg), ValidationError);
}

}  // namespace
}  // namespace foreval
