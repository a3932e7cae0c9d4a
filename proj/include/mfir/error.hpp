#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mfir {

enum class ErrorKind {
  UnreadableFile,
  UnsupportedFormat,
  InvalidParams,
  EmptyImage,
  MissingLabels,
  UnknownAttribute,
  TooManyAttributes,
  LengthMismatch,
  TooFewCandidates,
  InvalidWeights,
  EmptyIndex,
  NoImagesFound,
  IoError,
  CorruptIndex,
  UnsupportedVersion,
  InsufficientCorpus,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Single exception type for the library; callers switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::UnreadableFile: return "UnreadableFile";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::EmptyImage: return "EmptyImage";
    case ErrorKind::MissingLabels: return "MissingLabels";
    case ErrorKind::UnknownAttribute: return "UnknownAttribute";
    case ErrorKind::TooManyAttributes: return "TooManyAttributes";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::TooFewCandidates: return "TooFewCandidates";
    case ErrorKind::InvalidWeights: return "InvalidWeights";
    case ErrorKind::EmptyIndex: return "EmptyIndex";
    case ErrorKind::NoImagesFound: return "NoImagesFound";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::CorruptIndex: return "CorruptIndex";
    case ErrorKind::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorKind::InsufficientCorpus: return "InsufficientCorpus";
  }
  return "Unknown";
}

}  // namespace mfir
