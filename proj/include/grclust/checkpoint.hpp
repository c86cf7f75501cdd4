#pragma once

#include <iosfwd>
#include <string>

#include "grclust/model.hpp"

namespace grclust {

// Binary model container: magic "GRCK", format version, the config in its
// text form, every named parameter, and both graph snapshots. Fixed-width
// little-endian fields throughout; writing is deterministic, so equal states
// produce equal bytes.
void save_checkpoint(const ModelState& s, std::ostream& out);
void save_checkpoint(const ModelState& s, const std::string& path);

// Throws CheckpointVersionError on a bad magic, unsupported version,
// truncation, or a parameter set that does not match the config's model
// shape; FormatError when the path cannot be opened.
ModelState load_checkpoint(std::istream& in);
ModelState load_checkpoint(const std::string& path);

} // namespace grclust
