// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>

#include "gnnperf/common.hpp"

namespace gnnperf {

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace gnnperf
