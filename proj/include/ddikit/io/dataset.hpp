#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "ddikit/data/pairs.hpp"

namespace ddikit::io {

/// A corpus loaded from the two delimited tables:
///   drugs: drug_id, smiles
///   pairs: drug_id_1, drug_id_2, relation_id, label
/// The delimiter (tab or comma) is sniffed from each header line. Rows with
/// unparseable SMILES are dropped and counted, as are pairs referencing a
/// dropped drug; a pair naming an id that never appeared in the drug table
/// is an error. Row order is preserved.
struct DatasetBundle {
  data::PairDataset data;
  std::vector<std::string> drug_ids;  // aligned with data.molecules
  std::unordered_map<std::string, int> id_to_index;
  std::size_t dropped_molecules = 0;
  std::size_t dropped_pairs = 0;
  std::vector<std::string> drop_log;
};

DatasetBundle load_dataset(const std::string& drugs_path, const std::string& pairs_path);

}  // namespace ddikit::io
