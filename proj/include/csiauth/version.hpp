// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace csiauth {

inline constexpr const char* kToolkitVersion = "0.1.0";

}  // namespace csiauth
