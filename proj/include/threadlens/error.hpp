#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace threadlens {

enum class errc {
  file_not_readable,
  missing_text_column,
  out_of_range,
  empty_training_set,
  non_positive_alpha,
  dimension_mismatch,
  length_mismatch,
  unknown_label,
  empty_corpus,
  bad_fraction,
  destination_not_writable,
  no_active_model,
  insufficient_labeled_data,
  bad_filter,
  bad_model_file,
  bad_config,
  bad_request,
  corrupt_store,
};

constexpr std::string_view to_string(errc code) noexcept {
  switch (code) {
    case errc::file_not_readable: return "FileNotReadable";
    case errc::missing_text_column: return "MissingTextColumn";
    case errc::out_of_range: return "OutOfRange";
    case errc::empty_training_set: return "EmptyTrainingSet";
    case errc::non_positive_alpha: return "NonPositiveAlpha";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::length_mismatch: return "LengthMismatch";
    case errc::unknown_label: return "UnknownLabel";
    case errc::empty_corpus: return "EmptyCorpus";
    case errc::bad_fraction: return "BadFraction";
    case errc::destination_not_writable: return "DestinationNotWritable";
    case errc::no_active_model: return "NoActiveModel";
    case errc::insufficient_labeled_data: return "InsufficientLabeledData";
    case errc::bad_filter: return "BadFilter";
    case errc::bad_model_file: return "BadModelFile";
    case errc::bad_config: return "BadConfig";
    case errc::bad_request: return "BadRequest";
    case errc::corrupt_store: return "CorruptStore";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// the CLI and the HTTP layer can map it to an exit code or status.
class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

}  // namespace threadlens
