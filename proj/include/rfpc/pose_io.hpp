// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "rfpc/camera.hpp"
#include "rfpc/focus_area.hpp"

namespace rfpc {

enum class PoseFormat { transforms_json, pose_csv };

/// Guesses the format from the extension (.json vs .csv).
PoseFormat pose_format_from_path(const std::string& path);

std::vector<CameraPose> load_poses(const std::string& path, PoseFormat format);
std::vector<CameraPose> load_poses(const std::string& path);

void save_poses_csv(const std::vector<CameraPose>& poses,
                    const std::string& path);
void save_poses_transforms_json(const std::vector<CameraPose>& poses,
                                const std::string& path);

std::vector<FocusArea> load_focus_areas(const std::string& path);
void save_focus_areas(const std::vector<FocusArea>& areas,
                      const std::string& path);

} // namespace rfpc
