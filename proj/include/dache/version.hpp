// SPDX-FileCopyrightText: 2026 The dache authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace dache {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dache
