#pragma once

namespace uvc {

// Command-line front end (encode / decode / metrics / train / ablate).
// Shared by the binary's main() and the harness, which synthesizes argv.
int run_cli(int argc, const char* const* argv);

}  // namespace uvc
