#pragma once

#include <stdexcept>
#include <string>

namespace cueboot {

enum class errc {
  parse_error,
  duplicate_id,
  dangling_reference,
  no_annotations,
  insufficient_data,
  insufficient_annotators,
  empty_corpus,
  empty_input,
  empty_pool,
  missing_ia,
  missing_gold,
  no_feasible_config,
  invalid_argument,
  io_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::parse_error:              return "PARSE_ERROR";
    case errc::duplicate_id:             return "DUPLICATE_ID";
    case errc::dangling_reference:       return "DANGLING_REFERENCE";
    case errc::no_annotations:           return "NO_ANNOTATIONS";
    case errc::insufficient_data:        return "INSUFFICIENT_DATA";
    case errc::insufficient_annotators:  return "INSUFFICIENT_ANNOTATORS";
    case errc::empty_corpus:             return "EMPTY_CORPUS";
    case errc::empty_input:              return "EMPTY_INPUT";
    case errc::empty_pool:               return "EMPTY_POOL";
    case errc::missing_ia:               return "MISSING_IA";
    case errc::missing_gold:             return "MISSING_GOLD";
    case errc::no_feasible_config:       return "NO_FEASIBLE_CONFIG";
    case errc::invalid_argument:         return "INVALID_ARGUMENT";
    case errc::io_error:                 return "IO_ERROR";
  }
  return "UNKNOWN";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

}  // namespace cueboot
