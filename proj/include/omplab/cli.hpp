#pragma once

// Command-line dispatcher. Exit codes: 0 success, 1 check violations
// (report still emitted), 2 usage errors, 3 I/O errors. Every run
// prints its fully resolved configuration, defaults and seeds included,
// to stderr. OMPLAB_SEED overrides default seeds; explicit flags win.

#include <string>
#include <vector>

namespace omplab {

int run_command(const std::vector<std::string>& argv);

}  // namespace omplab
