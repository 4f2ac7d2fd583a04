// Copyright 2026 The hpbrdf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hpbrdf {

enum class ErrorCode {
  MismatchedPropagation,
  NumericalFailure,
  ZeroIntensity,
  BelowHorizon,
  InsufficientMeasurements,
  RankDeficient,
  NonFinite,
  DegenerateHalfVector,
  EmptyTable,
  UnfilledBin,
  BadMagic,
  TruncatedFile,
  DimMismatch,
  InsufficientSamples,
  DivergedLoss,
  NoVisibleBands,
  InvalidConfig,
  Io,
};

/// Stable machine-parsable name, e.g. "BadMagic".
std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MismatchedPropagation: return "MismatchedPropagation";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::ZeroIntensity: return "ZeroIntensity";
    case ErrorCode::BelowHorizon: return "BelowHorizon";
    case ErrorCode::InsufficientMeasurements: return "InsufficientMeasurements";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DegenerateHalfVector: return "DegenerateHalfVector";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::UnfilledBin: return "UnfilledBin";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::TruncatedFile: return "TruncatedFile";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::DivergedLoss: return "DivergedLoss";
    case ErrorCode::NoVisibleBands: return "NoVisibleBands";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace hpbrdf
