#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "ddikit/chem/featurize.hpp"
#include "ddikit/chem/smiles.hpp"
#include "ddikit/core/random.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace ddikit;
using chem::BondOrder;
using chem::Hybridization;

TEST_CASE("single atom and single bond") {
  auto methane = chem::parse_smiles("C");
  CHECK(methane.atom_count() == 1);
  CHECK(methane.bond_count() == 0);
  CHECK(methane.atoms[0].degree == 0);
  CHECK(methane.atoms[0].hybridization == Hybridization::Sp3);

  auto ethane = chem::parse_smiles("CC");
  CHECK(ethane.atom_count() == 2);
  CHECK(ethane.bond_count() == 1);
  CHECK(ethane.atoms[0].degree == 1);
  CHECK(ethane.atoms[1].degree == 1);
  CHECK(ethane.bonds[0].record.order == BondOrder::Single);
  CHECK_FALSE(ethane.bonds[0].record.in_ring);
}

TEST_CASE("benzene: aromatic ring") {
  // Counts cross-checked against the token-scan oracle and the molecular
  // formula (C6H6: 6 heavy atoms, ring => |E| = |V|).
  const std::string smiles = "c1ccccc1";
  const auto tc = testing::token_scan(smiles);
  CHECK(tc.atoms == 6);
  CHECK(tc.aromatic_atoms == 6);
  CHECK(tc.bonds() == 6);

  auto g = chem::parse_smiles(smiles);
  CHECK(g.atom_count() == 6);
  CHECK(g.bond_count() == 6);
  for (const auto& atom : g.atoms) {
    CHECK(atom.aromatic);
    CHECK(atom.degree == 2);
    CHECK(atom.hybridization == Hybridization::Sp2);
  }
  for (const auto& bond : g.bonds) {
    CHECK(bond.record.order == BondOrder::Aromatic);
    CHECK(bond.record.in_ring);
  }
}

TEST_CASE("aspirin") {
  // 13 heavy atoms / 13 bonds (C9H8O4, one ring); token-scan agrees.
  const std::string smiles = "CC(=O)Oc1ccccc1C(=O)O";
  const auto tc = testing::token_scan(smiles);
  CHECK(tc.atoms == 13);
  CHECK(tc.bonds() == 13);

  auto g = chem::parse_smiles(smiles);
  CHECK(g.atom_count() == 13);
  CHECK(g.bond_count() == 13);

  int aromatic_atoms = 0, ring_bonds = 0, double_bonds = 0;
  for (const auto& a : g.atoms) aromatic_atoms += a.aromatic ? 1 : 0;
  for (const auto& b : g.bonds) {
    ring_bonds += b.record.in_ring ? 1 : 0;
    double_bonds += b.record.order == BondOrder::Double ? 1 : 0;
  }
  CHECK(aromatic_atoms == 6);
  CHECK(ring_bonds == 6);
  CHECK(double_bonds == 2);  // the two carbonyls

  // Carbonyl carbons are sp2, the methyl carbon sp3.
  CHECK(g.atoms[0].hybridization == Hybridization::Sp3);
  CHECK(g.atoms[1].hybridization == Hybridization::Sp2);
}

TEST_CASE("parse errors carry character positions") {
  CHECK_THROWS_AS(chem::parse_smiles("C(C"), chem::SmilesError);
  CHECK_THROWS_AS(chem::parse_smiles("CC)C"), chem::SmilesError);
  CHECK_THROWS_AS(chem::parse_smiles("C1CC"), chem::SmilesError);
  CHECK_THROWS_AS(chem::parse_smiles("Xy"), chem::SmilesError);
  CHECK_THROWS_AS(chem::parse_smiles("C.C"), chem::SmilesError);
  CHECK_THROWS_AS(chem::parse_smiles(""), chem::SmilesError);
  CHECK_THROWS_AS(chem::parse_smiles("[13C]"), chem::SmilesError);
  CHECK_THROWS_AS(chem::parse_smiles("cc"), chem::SmilesError);  // aromatic outside a ring
  CHECK_THROWS_AS(chem::parse_smiles("C="), chem::SmilesError);
  CHECK_THROWS_AS(chem::parse_smiles("C11"), chem::SmilesError);

  try {
    chem::parse_smiles("CC.C");
  } catch (const chem::SmilesError& e) {
    CHECK(e.position() == 2);
    CHECK(std::string(e.what()).find("position 2") != std::string::npos);
  }
}

TEST_CASE("bracket atoms: charge parsed, hydrogens and chirality ignored") {
  auto anion = chem::parse_smiles("[O-]");
  CHECK(anion.atoms[0].formal_charge == -1);
  CHECK(anion.atoms[0].hybridization == Hybridization::Other);

  auto cation = chem::parse_smiles("[NH4+]");
  CHECK(cation.atom_count() == 1);
  CHECK(cation.atoms[0].formal_charge == 1);

  auto charged2 = chem::parse_smiles("[N+2]");
  CHECK(charged2.atoms[0].formal_charge == 2);
  auto charged2b = chem::parse_smiles("[N++]");
  CHECK(charged2b.atoms[0].formal_charge == 2);

  auto chiral = chem::parse_smiles("C[C@H](N)O");
  CHECK(chiral.atom_count() == 4);
  CHECK(chiral.bond_count() == 3);

  auto pyrrole = chem::parse_smiles("c1cc[nH]c1");
  CHECK(pyrrole.atom_count() == 5);
  CHECK(pyrrole.bond_count() == 5);
  CHECK(pyrrole.atoms[3].element == "N");
  CHECK(pyrrole.atoms[3].aromatic);
}

TEST_CASE("stereo bond tokens read as single bonds") {
  auto g = chem::parse_smiles("F/C=C/F");
  CHECK(g.atom_count() == 4);
  CHECK(g.bond_count() == 3);
  CHECK(g.bonds[0].record.order == BondOrder::Single);
  CHECK(g.bonds[1].record.order == BondOrder::Double);
}

TEST_CASE("triple bonds give sp centres") {
  auto g = chem::parse_smiles("C#N");
  CHECK(g.atoms[0].hybridization == Hybridization::Sp);
  CHECK(g.atoms[1].hybridization == Hybridization::Sp);
}

TEST_CASE("parsing is stable across repeated calls") {
  core::RandomStream rng(101);
  for (int trial = 0; trial < 25; ++trial) {
    const std::string smiles = testing::random_smiles(rng);
    auto a = chem::parse_smiles(smiles);
    auto b = chem::parse_smiles(smiles);
    REQUIRE(a.atom_count() == b.atom_count());
    REQUIRE(a.bond_count() == b.bond_count());
    for (int i = 0; i < a.atom_count(); ++i) {
      CHECK(a.atoms[i].element == b.atoms[i].element);
      CHECK(a.atoms[i].degree == b.atoms[i].degree);
      CHECK(a.atoms[i].aromatic == b.atoms[i].aromatic);
    }
    for (int i = 0; i < a.bond_count(); ++i) {
      CHECK(a.bonds[i].u == b.bonds[i].u);
      CHECK(a.bonds[i].v == b.bonds[i].v);
      CHECK(a.bonds[i].record.order == b.bonds[i].record.order);
    }
  }
}

TEST_CASE("degree sum equals twice the bond count") {
  core::RandomStream rng(202);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = chem::parse_smiles(testing::random_smiles(rng));
    int total = 0;
    for (const auto& a : g.atoms) total += a.degree;
    CHECK(total == 2 * g.bond_count());
    const auto tc = testing::token_scan(testing::random_smiles(rng));
    CHECK(tc.atoms >= 1);
  }
}

TEST_CASE("ring flags agree with the simple-cycle oracle") {
  core::RandomStream rng(303);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    testing::MoleculeOptions opt;
    opt.min_atoms = 3;
    opt.max_atoms = 12;
    opt.ring_prob = 0.6;
    auto g = chem::parse_smiles(testing::random_smiles(rng, opt));
    if (g.atom_count() > 12) continue;
    const auto oracle = testing::cycle_membership(g);
    for (int b = 0; b < g.bond_count(); ++b) {
      CHECK(g.bonds[b].record.in_ring == oracle[static_cast<std::size_t>(b)]);
    }
    ++checked;
  }
  CHECK(checked >= 40);

  // Fused rings exercise the non-bridge condition properly.
  auto naphthalene = chem::parse_smiles("c1ccc2ccccc2c1");
  const auto oracle = testing::cycle_membership(naphthalene);
  for (int b = 0; b < naphthalene.bond_count(); ++b) {
    CHECK(naphthalene.bonds[b].record.in_ring);
    CHECK(oracle[static_cast<std::size_t>(b)]);
  }
}

TEST_CASE("featurization layout") {
  auto methane = chem::parse_smiles("C");
  chem::featurize_graph(methane);
  REQUIRE(static_cast<int>(methane.node_features.size()) == chem::kNodeFeatureDim);
  const double* row = methane.node_features.data();
  CHECK(row[1] == 1.0);                        // element one-hot at C
  CHECK(row[chem::kElementBlock + 0] == 1.0);  // degree 0
  CHECK(row[chem::kElementBlock + chem::kDegreeBlock + 2] == 1.0);  // charge 0
  CHECK(row[chem::kElementBlock + chem::kDegreeBlock + chem::kChargeBlock +
            static_cast<int>(Hybridization::Sp3)] == 1.0);
  CHECK(row[chem::kNodeFeatureDim - 1] == 0.0);  // not aromatic

  auto benzene = chem::parse_smiles("c1ccccc1");
  chem::featurize_graph(benzene);
  const double* bond_row = benzene.edge_features.data();
  CHECK(bond_row[static_cast<int>(BondOrder::Aromatic)] == 1.0);
  CHECK(bond_row[4] == 1.0);  // in-ring flag

  auto anion = chem::parse_smiles("[O-]");
  chem::featurize_graph(anion);
  CHECK(anion.node_features[chem::kElementBlock + chem::kDegreeBlock + 1] == 1.0);  // charge -1
}

TEST_CASE("feature matrices are exact one-hot blocks") {
  core::RandomStream rng(404);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = chem::parse_smiles(testing::random_smiles(rng));
    chem::featurize_graph(g);
    for (double v : g.node_features) CHECK((v == 0.0 || v == 1.0));
    for (double v : g.edge_features) CHECK((v == 0.0 || v == 1.0));

    const int blocks[] = {chem::kElementBlock, chem::kDegreeBlock, chem::kChargeBlock,
                          chem::kHybridizationBlock};
    for (int a = 0; a < g.atom_count(); ++a) {
      const double* row = g.node_features.data() + a * chem::kNodeFeatureDim;
      int base = 0;
      for (int width : blocks) {
        const double sum = std::accumulate(row + base, row + base + width, 0.0);
        CHECK(sum == 1.0);
        base += width;
      }
    }
    for (int b = 0; b < g.bond_count(); ++b) {
      const double* row = g.edge_features.data() + b * chem::kEdgeFeatureDim;
      CHECK(std::accumulate(row, row + 4, 0.0) == 1.0);
    }
  }
}
