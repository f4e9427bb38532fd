#include "attndec/regions.hpp"

#include <fstream>
#include <sstream>

#include "attndec/errors.hpp"

namespace attndec::regions {

const std::vector<std::string>& cap64_labels() {
  static const std::vector<std::string> labels = {
      // A1-A32 (left hemisphere + midline rear)
      "Fp1", "AF7", "AF3", "F1", "F3", "F5", "F7", "FT7", "FC5", "FC3", "FC1", "C1", "C3", "C5",
      "T7", "TP7", "CP5", "CP3", "CP1", "P1", "P3", "P5", "P7", "P9", "PO7", "PO3", "O1", "Iz",
      "Oz", "POz", "Pz", "CPz",
      // B1-B32 (midline front + right hemisphere)
      "Fpz", "Fp2", "AF8", "AF4", "AFz", "Fz", "F2", "F4", "F6", "F8", "FT8", "FC6", "FC4", "FC2",
      "FCz", "Cz", "C2", "C4", "C6", "T8", "TP8", "CP6", "CP4", "CP2", "P2", "P4", "P6", "P8",
      "P10", "PO8", "PO4", "O2"};
  return labels;
}

const RegionMap& default_regions() {
  static const RegionMap map = {
      {"frontal",
       {"Fp1", "Fpz", "Fp2", "AF7", "AF3", "AFz", "AF4", "AF8", "F7", "F5", "F3", "F1", "Fz", "F2",
        "F4", "F6", "F8"}},
      {"frontocentral", {"FT7", "FC5", "FC3", "FC1", "FCz", "FC2", "FC4", "FC6", "FT8"}},
      {"central", {"T7", "C5", "C3", "C1", "Cz", "C2", "C4", "C6", "T8"}},
      {"centroparietal", {"TP7", "CP5", "CP3", "CP1", "CPz", "CP2", "CP4", "CP6", "TP8"}},
      {"parietal", {"P9", "P7", "P5", "P3", "P1", "Pz", "P2", "P4", "P6", "P8", "P10"}},
      {"occipital", {"PO7", "PO3", "POz", "PO4", "PO8", "O1", "Oz", "O2", "Iz"}},
  };
  return map;
}

RegionMap load_regions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open region file: " + path);
  RegionMap map;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string tok;
    if (!(ss >> tok)) continue;  // blank
    if (tok != "region") {
      throw io_error(path + ":" + std::to_string(line_no) + ": expected 'region', got '" + tok +
                     "'");
    }
    std::string name;
    if (!(ss >> name)) {
      throw io_error(path + ":" + std::to_string(line_no) + ": missing region name");
    }
    if (map.count(name)) {
      throw io_error(path + ":" + std::to_string(line_no) + ": duplicate region '" + name + "'");
    }
    std::vector<std::string> chans;
    while (ss >> tok) chans.push_back(tok);
    if (chans.empty()) {
      throw io_error(path + ":" + std::to_string(line_no) + ": region '" + name +
                     "' lists no channels");
    }
    map.emplace(std::move(name), std::move(chans));
  }
  if (map.empty()) throw io_error(path + ": no region definitions found");
  return map;
}

std::vector<Eigen::Index> channel_indices(const std::vector<std::string>& labels,
                                          const std::vector<std::string>& wanted) {
  std::vector<Eigen::Index> idx;
  idx.reserve(wanted.size());
  for (const std::string& w : wanted) {
    const auto it = std::find(labels.begin(), labels.end(), w);
    if (it == labels.end()) {
      throw invalid_argument("channel '" + w + "' not present in series labels");
    }
    idx.push_back(static_cast<Eigen::Index>(it - labels.begin()));
  }
  return idx;
}

}  // namespace attndec::regions
