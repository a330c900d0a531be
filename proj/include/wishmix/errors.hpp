#pragma once

#include <stdexcept>
#include <string>

namespace wishmix {

// Error taxonomy. The three bases map onto CLI exit codes:
// ConfigError -> 2, DataError -> 3, NumericError -> 4.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct DataError : Error {
  using Error::Error;
};

struct NumericError : Error {
  using Error::Error;
};

struct NotSymmetric : NumericError {
  double max_asymmetry;
  explicit NotSymmetric(double asym)
      : NumericError("matrix is not symmetric (max asymmetry " +
                     std::to_string(asym) + ")"),
        max_asymmetry(asym) {}
};

struct NotPositiveDefinite : NumericError {
  int pivot;
  explicit NotPositiveDefinite(int pivot_index)
      : NumericError("matrix is not positive definite (pivot " +
                     std::to_string(pivot_index) + " is nonpositive)"),
        pivot(pivot_index) {}
};

struct DimMismatch : NumericError {
  DimMismatch(int a, int b)
      : NumericError("dimension mismatch: " + std::to_string(a) + " vs " +
                     std::to_string(b)) {}
};

struct InvalidDof : NumericError {
  InvalidDof(double value, double lower)
      : NumericError("degrees of freedom " + std::to_string(value) +
                     " must exceed " + std::to_string(lower)) {}
};

struct DomainError : NumericError {
  using NumericError::NumericError;
};

struct LengthMismatch : NumericError {
  LengthMismatch(std::size_t got, std::size_t want)
      : NumericError("length mismatch: got " + std::to_string(got) +
                     ", expected " + std::to_string(want)) {}
};

struct ZeroDiagonal : NumericError {
  explicit ZeroDiagonal(int index)
      : NumericError("nonpositive diagonal entry at index " +
                     std::to_string(index)) {}
};

struct NonConvergence : NumericError {
  using NumericError::NumericError;
};

struct TableMissing : NumericError {
  using NumericError::NumericError;
};

struct EmptyTrace : DataError {
  EmptyTrace() : DataError("trace has no retained draws") {}
};

struct TooShort : DataError {
  TooShort(std::size_t got, std::size_t want)
      : DataError("series of length " + std::to_string(got) +
                  " is too short (need >= " + std::to_string(want) + ")") {}
};

struct DegenerateMargins : DataError {
  DegenerateMargins() : DataError("contingency table has a zero margin") {}
};

struct BadK : ConfigError {
  BadK(int k, int n)
      : ConfigError("cluster count k=" + std::to_string(k) +
                    " outside [1, " + std::to_string(n) + "]") {}
};

struct HeterogeneousDims : DataError {
  HeterogeneousDims(int got, int want)
      : DataError("observation dimension " + std::to_string(got) +
                  " differs from " + std::to_string(want)) {}
};

struct NonSpdObservation : DataError {
  int index;
  explicit NonSpdObservation(int obs_index, const std::string& why)
      : DataError("observation " + std::to_string(obs_index) +
                  " is not symmetric positive definite: " + why),
        index(obs_index) {}
};

struct RaggedSeries : DataError {
  using DataError::DataError;
};

struct NonNumericCell : DataError {
  long row, col;
  NonNumericCell(const std::string& file, long r, long c)
      : DataError("non-numeric cell at row " + std::to_string(r) + ", column " +
                  std::to_string(c) + " in " + file),
        row(r),
        col(c) {}
};

struct InsufficientLength : DataError {
  using DataError::DataError;
};

struct MissingScaleConfig : ConfigError {
  MissingScaleConfig()
      : ConfigError("large-matrix setting requires the two fixed scale "
                    "matrices; none were supplied") {}
};

struct TooShortSeries : ConfigError {
  TooShortSeries(int t, int p)
      : ConfigError("series length T=" + std::to_string(t) +
                    " is shorter than the matrix dimension p=" +
                    std::to_string(p)) {}
};

}  // namespace wishmix
