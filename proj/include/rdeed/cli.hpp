#pragma once

namespace rdeed {

// Subcommands: analyze, equilibrium, constants, simulate, verify-eed,
// verify-lemma, fit-rate. Returns 0 on success, 1 on domain or I/O errors
// (message on stderr), 2 on usage errors.
int dispatch(int argc, char** argv);

}  // namespace rdeed
