#ifndef PEERLOC_SCENARIO_IO_HPP
#define PEERLOC_SCENARIO_IO_HPP

#include <iosfwd>
#include <string>

#include "peerloc/scenario.hpp"

namespace peerloc {

/// Plain-text scenario serialization. The format is line oriented with a
/// versioned header ("# peerloc scenario v1"); doubles are written with 17
/// significant digits so a load reproduces the generated scenario bit for
/// bit. See README for the record grammar.
void save_scenario(const Scenario& scenario, std::ostream& out);
void save_scenario(const Scenario& scenario, const std::string& path);

Scenario load_scenario(std::istream& in);
Scenario load_scenario(const std::string& path);

}  // namespace peerloc

#endif  // PEERLOC_SCENARIO_IO_HPP
