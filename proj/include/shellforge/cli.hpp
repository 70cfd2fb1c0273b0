// Batch front door: every stage and the end-to-end pipeline as subcommands
// with file-based, reproducible inputs and outputs.
#pragma once

namespace shellforge {

// Exit codes: 0 success, 1 usage error, 2 stage failure (stage named on
// stderr). All diagnostics also land in the JSON report next to the outputs.
int dispatch(int argc, const char* const* argv);

}  // namespace shellforge
