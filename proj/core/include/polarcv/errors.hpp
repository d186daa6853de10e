/**********
 *   Copyright 2026 The polarcv authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
\**********/
#ifndef POLARCV_ERRORS_HPP
#define POLARCV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace polarcv {

// Malformed inputs: bad dimensions, out-of-range values, unreadable files.
// The CLI maps this family to exit code 2.
class InvalidInputError : public std::runtime_error {
 public:
  explicit InvalidInputError(const std::string& msg) : std::runtime_error(msg) {}
};

// A mosaic layout that is not a permutation of the four orientations.
class InvalidLayoutError : public InvalidInputError {
 public:
  explicit InvalidLayoutError(const std::string& msg) : InvalidInputError(msg) {}
};

// Non-finite losses or other numerical breakdown. CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace polarcv

#endif  // POLARCV_ERRORS_HPP
