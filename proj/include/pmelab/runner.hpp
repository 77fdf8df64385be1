#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace pme::runner {

// Executes one experiment described by a JSON config and writes CSV/JSON
// artifacts into out_dir. Returns the JSON summary (also written to disk).
// Throws pme::domain_error for validation problems and other exceptions for
// numerical failures.
nlohmann::json run_config(const nlohmann::json& cfg, const std::string& out_dir,
                          std::uint64_t seed = 0);

// File-level wrapper with the documented exit-code contract:
// 0 success, 2 validation error, 3 numerical failure.
int run(const std::string& config_path, const std::string& out_dir, int threads,
        std::uint64_t seed);

// Contraction comparison of two stored runs (PMEF trajectories, optional
// matching sources). Exit codes as above.
int compare(const std::string& run_a, const std::string& run_b, const std::string& source_a,
            const std::string& source_b, const std::string& out_dir);

}  // namespace pme::runner
