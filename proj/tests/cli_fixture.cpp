// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

// Writes the header of a full-resolution table file with no payload, which
// is enough for `hpbrdf info` to report its size.

#include <cstdio>

#include "hpbrdf/table.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <out.hpbt>\n", argv[0]);
    return 2;
  }
  { hpbrdf::TableFileWriter w(argv[1], {hpbrdf::TableDims::full(), hpbrdf::WavelengthGrid::full()}); }
  return 0;
}
