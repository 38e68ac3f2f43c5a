#pragma once

#include <vector>

#include "ddikit/chem/molecule.hpp"

namespace ddikit::data {

/// One labelled drug pair: indices into a molecule table, a relation id and
/// a binary interaction label.
struct PairExample {
  int i = 0;
  int j = 0;
  int relation = 0;
  int label = 0;
};

struct PairDataset {
  std::vector<chem::MolecularGraph> molecules;  // featurized
  std::vector<PairExample> pairs;
  int relation_count = 1;
};

}  // namespace ddikit::data
