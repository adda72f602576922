// Copyright 2026 AGNav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AGNAV_ERRORS_HPP
#define AGNAV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace agnav {

/// Base class for all library exceptions.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

enum class ParseErrorCode {
  kMalformedXml,
  kMissingRoot,
  kDuplicateName,
  kMissingRequiredTag,
  kDanglingNodeRef,
  kDegenerateGeometry,
  kInvalidPassage,
};

inline const char* to_string(ParseErrorCode c) {
  switch (c) {
    case ParseErrorCode::kMalformedXml: return "MalformedXml";
    case ParseErrorCode::kMissingRoot: return "MissingRoot";
    case ParseErrorCode::kDuplicateName: return "DuplicateName";
    case ParseErrorCode::kMissingRequiredTag: return "MissingRequiredTag";
    case ParseErrorCode::kDanglingNodeRef: return "DanglingNodeRef";
    case ParseErrorCode::kDegenerateGeometry: return "DegenerateGeometry";
    case ParseErrorCode::kInvalidPassage: return "InvalidPassage";
  }
  return "Unknown";
}

/// Raised when an OSM map file cannot be materialized into an AreaGraph.
struct ParseError : Error {
  ParseErrorCode code;
  ParseError(ParseErrorCode c, const std::string& msg)
      : Error(std::string(to_string(c)) + ": " + msg), code(c) {}
};

/// Geodetic projection asked for a latitude too close to the poles.
struct PolarLatitudeError : Error {
  explicit PolarLatitudeError(double lat)
      : Error("PolarLatitude: |" + std::to_string(lat) + "| deg too close to a pole") {}
};

/// Area lookup or containment query failed.
struct UnknownAreaError : Error {
  explicit UnknownAreaError(const std::string& name)
      : Error("UnknownArea: " + name) {}
};

struct NotInAnyAreaError : Error {
  explicit NotInAnyAreaError(const std::string& what) : Error("NotInAnyArea: " + what) {}
};

struct AmbiguousContainmentError : Error {
  explicit AmbiguousContainmentError(const std::string& what)
      : Error("AmbiguousContainment: " + what) {}
};

struct DegenerateAreaError : Error {
  explicit DegenerateAreaError(const std::string& name)
      : Error("DegenerateArea: " + name) {}
};

/// Virtual passage could not be attached to any resident passage.
struct AttachFailedError : Error {
  explicit AttachFailedError(const std::string& what) : Error("AttachFailed: " + what) {}
};

struct PoseOutsideMapError : Error {
  explicit PoseOutsideMapError(const std::string& what)
      : Error("PoseOutsideMap: " + what) {}
};

struct StaleOdometryError : Error {
  explicit StaleOdometryError(const std::string& what)
      : Error("StaleOdometry: " + what) {}
};

/// Cache file did not match the expected schema or source map.
struct CacheFileError : Error {
  explicit CacheFileError(const std::string& what) : Error("CacheFile: " + what) {}
};

/// The monolithic grid baseline only plans within one floor.
struct CrossFloorUnsupportedError : Error {
  explicit CrossFloorUnsupportedError(const std::string& what)
      : Error("CrossFloorUnsupported: " + what) {}
};

}  // namespace agnav

#endif  // AGNAV_ERRORS_HPP
