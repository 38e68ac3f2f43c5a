#pragma once

#include <stdexcept>
#include <string>

#include "ddikit/chem/molecule.hpp"

namespace ddikit::chem {

class SmilesError : public std::runtime_error {
 public:
  SmilesError(const std::string& message, std::size_t position)
      : std::runtime_error(message + " (at position " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Parses a SMILES subset into a molecular graph:
///   - organic-subset atoms B C N O P S F Cl Br I, aromatic b c n o p s
///   - bracket atoms with an optional H count, charge and chirality tag
///     (H counts and chirality are accepted and ignored; isotopes rejected)
///   - bond symbols - = # : plus the stereo bonds / \ read as single
///   - branches, ring closures 1-9 and %nn
/// Dots (multi-fragment input) are rejected. Aromatic atoms must lie on a
/// ring and aromatic bonds must join two aromatic atoms. Ring membership is
/// derived by bridge finding: a bond is in a ring iff it is not a bridge.
MolecularGraph parse_smiles(const std::string& text);

}  // namespace ddikit::chem
