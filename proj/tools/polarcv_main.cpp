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
#include <exception>
#include <iostream>

#include "common.hpp"
#include "polarcv/errors.hpp"
#include "polarcv/version.hpp"

// Exit codes: 0 success, 2 invalid input (bad flags, files, layouts),
// 3 numerical failure (non-finite loss).
int main(int argc, char** argv) {
  CLI::App app{"polarcv - polarimetric imaging toolkit"};
  app.set_version_flag("--version", polarcv::kVersion);
  app.require_subcommand(1);

  polarcv::cli::register_decode(app);
  polarcv::cli::register_hsl(app);
  polarcv::cli::register_augment(app);
  polarcv::cli::register_render(app);
  polarcv::cli::register_optimize(app);
  polarcv::cli::register_eval(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const polarcv::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const polarcv::InvalidInputError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
