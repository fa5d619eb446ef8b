#ifndef PEERLOC_CONFIG_FILE_HPP
#define PEERLOC_CONFIG_FILE_HPP

#include <iosfwd>
#include <string>
#include <string_view>

#include "peerloc/experiment.hpp"

namespace peerloc {

/// Flat "key = value" experiment configuration with dotted key paths
/// ("scenario.n_mobile = 20"); first line must be "# peerloc config v1".
/// Unknown keys are errors. See README for the full key list.
ExperimentSpec parse_config(std::istream& in);
ExperimentSpec parse_config_file(const std::string& path);

/// Apply one "key=value" assignment; shared by the parser and the CLI
/// --set overrides.
void apply_override(ExperimentSpec& spec, std::string_view key,
                    std::string_view value);

}  // namespace peerloc

#endif  // PEERLOC_CONFIG_FILE_HPP
