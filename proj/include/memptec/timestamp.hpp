/*
 * Copyright 2026 The memptec Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace memptec {

// Millisecond-resolution UTC instant.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// Accepts ISO-8601 forms used by package registries:
//   2014-08-29T23:08:36.810Z, 2014-08-29T23:08:36+02:00, 2014-08-29 23:08:36,
//   2014-08-29. A missing zone suffix means UTC.
std::optional<Timestamp> ParseTimestamp(std::string_view text);

// Canonical form, always "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string FormatTimestamp(Timestamp t);

// Whole calendar days between the UTC dates of `from` and `to`
// (negative when `to` falls on an earlier date).
std::int64_t CalendarDaysBetween(Timestamp from, Timestamp to);

Timestamp AddDays(Timestamp t, std::int64_t days);

}  // namespace memptec
