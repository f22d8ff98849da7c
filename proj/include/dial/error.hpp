/* SPDX-License-Identifier: Apache-2.0 */

/** Error codes shared by every module.
 *
 * Each code has a stable snake_case name; those names are what the CLI
 * prints on stderr and what the session protocol sends in `error`
 * messages, so they must never be renamed. */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dial {

enum class ErrorCode {
  // beacon_protocol
  InvalidModel,
  ReservedFlags,
  WrongLength,
  ChecksumMismatch,
  // ndef_inventory
  Truncated,
  BadHeader,
  EmptyMessage,
  NotAUriRecord,
  UnknownPrefixCode,
  InvalidUri,
  InvalidUtf8,
  InvalidPassword,
  MissingUrl,
  DuplicateField,
  PayloadTooLarge,
  // radio_model
  InvalidParams,
  // dial_reader
  UnknownTag,
  NotUwbCapable,
  NotUwb,
  NothingInRange,
  IoError,
  MalformedFile,
  // world_sim
  ParseError,
  SemanticError,
  NoSuchReader,
  InvalidArgument,
  Timeout,
  // metrics
  ZeroCurrent,
  OutOfRangeAnswer,
  WrongQuestionCount,
  // gateway
  UnknownType,
  BadSession,
  BadRequest,
  NoScenario,
  NoBuzzer,
};

constexpr std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidModel: return "invalid_model";
    case ErrorCode::ReservedFlags: return "reserved_flags";
    case ErrorCode::WrongLength: return "wrong_length";
    case ErrorCode::ChecksumMismatch: return "checksum_mismatch";
    case ErrorCode::Truncated: return "truncated";
    case ErrorCode::BadHeader: return "bad_header";
    case ErrorCode::EmptyMessage: return "empty_message";
    case ErrorCode::NotAUriRecord: return "not_a_uri_record";
    case ErrorCode::UnknownPrefixCode: return "unknown_prefix_code";
    case ErrorCode::InvalidUri: return "invalid_uri";
    case ErrorCode::InvalidUtf8: return "invalid_utf8";
    case ErrorCode::InvalidPassword: return "invalid_password";
    case ErrorCode::MissingUrl: return "missing_url";
    case ErrorCode::DuplicateField: return "duplicate_field";
    case ErrorCode::PayloadTooLarge: return "payload_too_large";
    case ErrorCode::InvalidParams: return "invalid_params";
    case ErrorCode::UnknownTag: return "unknown_tag";
    case ErrorCode::NotUwbCapable: return "not_uwb_capable";
    case ErrorCode::NotUwb: return "not_uwb";
    case ErrorCode::NothingInRange: return "nothing_in_range";
    case ErrorCode::IoError: return "io_error";
    case ErrorCode::MalformedFile: return "malformed_file";
    case ErrorCode::ParseError: return "parse_error";
    case ErrorCode::SemanticError: return "semantic_error";
    case ErrorCode::NoSuchReader: return "no_such_reader";
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Timeout: return "timeout";
    case ErrorCode::ZeroCurrent: return "zero_current";
    case ErrorCode::OutOfRangeAnswer: return "out_of_range_answer";
    case ErrorCode::WrongQuestionCount: return "wrong_question_count";
    case ErrorCode::UnknownType: return "unknown_type";
    case ErrorCode::BadSession: return "bad_session";
    case ErrorCode::BadRequest: return "bad_request";
    case ErrorCode::NoScenario: return "no_scenario";
    case ErrorCode::NoBuzzer: return "no_buzzer";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(code_name(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace dial
