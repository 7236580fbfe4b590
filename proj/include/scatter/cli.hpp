#pragma once

#include <iosfwd>

namespace scatter {

/// Entry point of the `scatter` executable. Returns 0 on success, 1 for
/// invalid input and 2 for numerical failure; failures print a single
/// `error kind=<Kind> message=<text>` line on `err`.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace scatter
