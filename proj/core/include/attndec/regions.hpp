// Electrode montage metadata: the 64-channel cap label set and named scalp
// region groupings used for channel-subset analyses.
#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

namespace attndec::regions {

// Standard 64-electrode cap labels in amplifier order (A1-A32, B1-B32).
const std::vector<std::string>& cap64_labels();

// Region name -> electrode labels. Keys: frontal, frontocentral, central,
// centroparietal, parietal, occipital. The union covers all 64 electrodes.
using RegionMap = std::map<std::string, std::vector<std::string>>;
const RegionMap& default_regions();

// Parse a region definition file: one `region <name> <label>...` per line,
// `#` starts a comment, blank lines ignored. Duplicate names or empty label
// lists are rejected.
RegionMap load_regions(const std::string& path);

// Positions of `wanted` labels within `labels`; a missing label is an error
// naming the offending channel.
std::vector<Eigen::Index> channel_indices(const std::vector<std::string>& labels,
                                          const std::vector<std::string>& wanted);

}  // namespace attndec::regions
