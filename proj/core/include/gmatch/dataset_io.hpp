#pragma once

#include <string>
#include <vector>

#include "gmatch/graph.hpp"

namespace gmatch {

// Line-delimited text datasets: one pair per record (line), sections split
// by '|', numbers printed with %.17g so doubles round-trip exactly. See
// docs/dataset_format.md for the byte-exact layout.
void save_pairs(const std::string& path, const std::vector<MatchingPair>& pairs);
std::vector<MatchingPair> load_pairs(const std::string& path);

std::string encode_pair(const MatchingPair& pair);
MatchingPair decode_pair(const std::string& line, int record_index);

}  // namespace gmatch
