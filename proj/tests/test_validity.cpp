#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "oracles.hpp"
#include "validity_fixtures.hpp"

using namespace posebench;
using namespace posebench::validity;
using chem::ComplexStructure;
using chem::LigandInstance;
using chem::ResidueSite;
using fixtures::atom;
using fixtures::bond;
using molgraph::BondOrder;
using molgraph::MolecularGraph;

using namespace fixtures;

namespace {

CheckReport topo(const LigandInstance& truth, const LigandInstance& pred) { return check_topology(truth.graph, pred.graph, pred.coords); }
CheckReport geo(const LigandInstance& l) { return check_geometry(l.graph, l.coords); }

}  // namespace

TEST(CheckReport, NamesAndOrder) {
  EXPECT_EQ(kCheckNames.size(), 24u);
  EXPECT_EQ(std::set<std::string_view>(kCheckNames.begin(), kCheckNames.end()).size(), 24u);
  EXPECT_EQ(check_index("mol_pred_loaded"), 0u);
  EXPECT_EQ(check_index("volume_overlap_with_waters"), 23u);
  EXPECT_THROW(check_index("nope"), InvalidArgument);
}

TEST(CheckReport, PbValidIsConjunction) {
  std::mt19937_64 rng(11);
  std::bernoulli_distribution pass(0.93), present(0.97);
  int valid = 0;
  for (int trial = 0; trial < 200; ++trial) {
    CheckReport r;
    bool expect = true;
    for (auto n : kCheckNames) {
      if (!present(rng)) {
        expect = false;
        continue;
      }
      const bool p = pass(rng);
      r.set(n, p);
      expect = expect && p;
    }
    EXPECT_EQ(r.pb_valid(), expect);
    valid += expect;
  }
  EXPECT_GT(valid, 5);
  EXPECT_LT(valid, 195);
}

TEST(CheckReport, PartialAndMerge) {
  CheckReport a, b;
  a.set("bond_lengths", true);
  b.set("bond_angles", false);
  EXPECT_FALSE(a.pb_valid());
  a.merge(b);
  EXPECT_EQ(a.size(), 2u);
  EXPECT_EQ(a.failed(), std::vector<std::string_view>{"bond_angles"});
  EXPECT_THROW(a.at("internal_energy"), InvalidArgument);
}

TEST(Config, Validation) {
  CheckConfig c;
  EXPECT_NO_THROW(c.validate());
  c.clash_vdw_factor = 1.5;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.grid_spacing = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

// ---------------------------------------------------------------------------
// Load checks

TEST(LoadChecks, CleanComplexPassesEverything) {
  const auto s = fixtures::pocket_complex(fixtures::toluene());
  const auto rep = run_all_checks(s, s);
  EXPECT_TRUE(rep.complete());
  EXPECT_TRUE(rep.pb_valid()) << (rep.failed().empty() ? "" : std::string(rep.failed().front()));
  EXPECT_TRUE(rep.at("mol_pred_loaded").pass);
  EXPECT_TRUE(rep.at("mol_true_loaded").pass);
  EXPECT_TRUE(rep.at("mol_cond_loaded").pass);
}

TEST(LoadChecks, MissingPredictedLigand) {
  const auto truth = fixtures::pocket_complex(fixtures::toluene());
  auto pred = truth;
  pred.ligands.clear();
  const auto rep = run_all_checks(truth, pred);
  EXPECT_FALSE(rep.at("mol_pred_loaded").pass);
  EXPECT_TRUE(rep.at("mol_true_loaded").pass);
  EXPECT_FALSE(rep.pb_valid());
  EXPECT_TRUE(rep.complete());
}

TEST(LoadChecks, NonFiniteCoordinatesFailPredLoad) {
  const auto truth = fixtures::pocket_complex(fixtures::toluene());
  auto pred = truth;
  pred.ligands[0].coords[2].x() = std::numeric_limits<double>::quiet_NaN();
  const auto rep = run_all_checks(truth, pred);
  EXPECT_FALSE(rep.at("mol_pred_loaded").pass);
  EXPECT_FALSE(rep.pb_valid());
}

TEST(LoadChecks, MissingTruthLigand) {
  const auto pred = fixtures::pocket_complex(fixtures::toluene());
  auto truth = pred;
  truth.ligands.clear();
  const auto rep = run_all_checks(truth, pred);
  EXPECT_FALSE(rep.at("mol_true_loaded").pass);
  EXPECT_TRUE(rep.at("mol_pred_loaded").pass);
}

TEST(LoadChecks, MissingConditioningProtein) {
  const auto truth = fixtures::pocket_complex(fixtures::toluene());
  auto pred = truth;
  pred.chains.clear();
  const auto rep = run_all_checks(truth, pred);
  EXPECT_FALSE(rep.at("mol_cond_loaded").pass);
  EXPECT_TRUE(rep.at("mol_pred_loaded").pass);
}

TEST(LoadChecks, FailedLoadReport) {
  const auto rep = failed_load_report({false, true, true}, "unreadable SDF");
  EXPECT_TRUE(rep.complete());
  EXPECT_FALSE(rep.pb_valid());
  EXPECT_FALSE(rep.at("mol_pred_loaded").pass);
  EXPECT_TRUE(rep.at("mol_true_loaded").pass);
  EXPECT_FALSE(rep.at("bond_lengths").pass);
  EXPECT_NE(rep.at("bond_lengths").detail.find("unreadable SDF"), std::string::npos);
}

// ---------------------------------------------------------------------------
// Topology

TEST(Topology, SanitizationPassAndFail) {
  auto neopentane = lig("neo", MolecularGraph({atom(6), atom(6), atom(6), atom(6), atom(6)}, {bond(0, 1), bond(0, 2), bond(0, 3), bond(0, 4)}),
                        Coords(5, Vec3::Zero()));
  EXPECT_TRUE(topo(neopentane, neopentane).at("sanitization").pass);
  // Pentavalent carbon.
  MolecularGraph bad({atom(6), atom(6), atom(6), atom(6), atom(6), atom(6)},
                     {bond(0, 1), bond(0, 2), bond(0, 3), bond(0, 4), bond(0, 5)});
  LigandInstance five{"bad", bad, Coords(6, Vec3::Zero())};
  const auto rep = topo(five, five);
  EXPECT_FALSE(rep.at("sanitization").pass);
  EXPECT_NE(rep.at("sanitization").detail.find("C1"), std::string::npos);
}

TEST(Topology, ConnectivityPassAndFail) {
  const auto e = ethanol();
  EXPECT_TRUE(topo(e, e).at("all_atoms_connected").pass);
  auto two = lig("two", MolecularGraph({atom(6), atom(6), atom(8)}, {bond(0, 1)}), {Vec3(0, 0, 0), Vec3(1.5, 0, 0), Vec3(5, 0, 0)});
  const auto rep = topo(two, two);
  EXPECT_FALSE(rep.at("all_atoms_connected").pass);
  EXPECT_EQ(rep.at("all_atoms_connected").value, 2.0);
}

TEST(Topology, FormulaPassAndFail) {
  EXPECT_TRUE(topo(ethanol(), ethanol()).at("molecular_formula").pass);
  // Same formula, different connectivity.
  EXPECT_TRUE(topo(ethanol(), dimethyl_ether()).at("molecular_formula").pass);
  const auto rep = topo(ethanol(), propane());
  EXPECT_FALSE(rep.at("molecular_formula").pass);
  EXPECT_EQ(rep.at("molecular_formula").detail, "C3H8 != C2H6O");
}

TEST(Topology, BondsPassAndFail) {
  EXPECT_TRUE(topo(ethanol(), ethanol()).at("molecular_bonds").pass);
  EXPECT_FALSE(topo(ethanol(), dimethyl_ether()).at("molecular_bonds").pass);
  // Relabelled atoms still match.
  auto e = ethanol();
  auto perm = lig("ethanol-perm", MolecularGraph({atom(8), atom(6), atom(6)}, {bond(0, 1), bond(1, 2)}),
                  {e.coords[2], e.coords[1], e.coords[0]});
  EXPECT_TRUE(topo(e, perm).at("molecular_bonds").pass);
}

// ---------------------------------------------------------------------------
// Stereo

TEST(Stereo, TetrahedralPassAndFail) {
  const auto truth = annotated(chfclbr(false));
  ASSERT_TRUE(truth.atom(0).parity.has_value());
  const auto same = chfclbr(false), mirror = chfclbr(true);
  EXPECT_TRUE(check_stereo(truth, same.graph, same.coords).at("tetrahedral_chirality").pass);
  EXPECT_FALSE(check_stereo(truth, mirror.graph, mirror.coords).at("tetrahedral_chirality").pass);
  // No stereocentres: passes trivially.
  const auto e = ethanol();
  EXPECT_TRUE(check_stereo(e.graph, e.graph, e.coords).at("tetrahedral_chirality").pass);
}

TEST(Stereo, DoubleBondPassAndFail) {
  const auto truth = annotated(butene(true));
  ASSERT_TRUE(truth.bond(1).stereo.has_value());
  const auto cis = butene(true), trans = butene(false);
  EXPECT_TRUE(check_stereo(truth, cis.graph, cis.coords).at("double_bond_stereochemistry").pass);
  EXPECT_FALSE(check_stereo(truth, trans.graph, trans.coords).at("double_bond_stereochemistry").pass);
}

TEST(Stereo, GraphMismatchFailsAnnotatedChecks) {
  const auto truth = annotated(chfclbr(false));
  const auto e = ethanol();
  const auto rep = check_stereo(truth, e.graph, e.coords);
  EXPECT_FALSE(rep.at("tetrahedral_chirality").pass);
  EXPECT_TRUE(rep.at("double_bond_stereochemistry").pass);
}

// ---------------------------------------------------------------------------
// Intramolecular geometry

TEST(Geometry, BondLengthsPassAndFail) {
  EXPECT_TRUE(geo(fixtures::toluene()).at("bond_lengths").pass);
  auto t = fixtures::toluene();
  t.coords[6] = Vec3(1.39 + 2.3, 0, 0);
  const auto r = geo(t).at("bond_lengths");
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(*r.value, 2.3 / 1.52 - 1.0, 1e-9);
}

TEST(Geometry, BondAnglesPassAndFail) {
  EXPECT_TRUE(geo(propane(112.0)).at("bond_angles").pass);
  const auto r = geo(propane(60.0)).at("bond_angles");
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(*r.value, 1.0 - 60.0 / 109.47, 1e-6);
  // Ring angles use the ring's own ideal.
  EXPECT_TRUE(geo(fixtures::benzene()).at("bond_angles").pass);
}

TEST(Geometry, InternalClashPassAndFail) {
  auto two = [](double d) {
    return lig("pair", MolecularGraph({atom(6), atom(6)}, {}), {Vec3(0, 0, 0), Vec3(d, 0, 0)});
  };
  EXPECT_TRUE(geo(two(4.0)).at("internal_steric_clash").pass);
  const auto r = geo(two(1.0)).at("internal_steric_clash");
  EXPECT_FALSE(r.pass);
  EXPECT_NEAR(*r.value, 1.0 / 3.4, 1e-9);
  // Nothing four bonds apart: passes with no value.
  const auto e = geo(ethanol()).at("internal_steric_clash");
  EXPECT_TRUE(e.pass);
  EXPECT_FALSE(e.value.has_value());
}

TEST(Geometry, AromaticFlatnessPassAndFail) {
  EXPECT_TRUE(geo(fixtures::benzene()).at("aromatic_ring_flatness").pass);
  auto b = fixtures::benzene();
  b.coords[0].z() = 0.9;
  EXPECT_FALSE(geo(b).at("aromatic_ring_flatness").pass);
  EXPECT_TRUE(geo(ethanol()).at("aromatic_ring_flatness").pass);
}

TEST(Geometry, DoubleBondFlatnessPassAndFail) {
  EXPECT_TRUE(geo(butene(false)).at("double_bond_flatness").pass);
  EXPECT_FALSE(geo(butene(false, 1.2)).at("double_bond_flatness").pass);
}

TEST(Geometry, InternalEnergyPassAndFail) {
  const auto ref = fixtures::toluene();
  EXPECT_TRUE(check_geometry(ref.graph, ref.coords, {}, chem::RadiiTable::builtin(), &ref.graph, &ref.coords)
                  .at("internal_energy")
                  .pass);
  auto strained = ref;
  strained.coords[6] = Vec3(1.39 + 3.5, 0, 0);
  const auto r = check_geometry(strained.graph, strained.coords, {}, chem::RadiiTable::builtin(), &ref.graph, &ref.coords)
                     .at("internal_energy");
  EXPECT_FALSE(r.pass);
  EXPECT_GT(*r.value, 100.0);
  // Without a reference the check is skipped, not failed.
  EXPECT_TRUE(geo(strained).at("internal_energy").pass);
}

TEST(Geometry, StrainEnergyZeroAtIdeal) {
  // Single bond at exactly the covalent sum, no angles, no nonbonded pairs.
  MolecularGraph g({atom(6), atom(8)}, {bond(0, 1)});
  EXPECT_NEAR(strain_energy(g, {Vec3(0, 0, 0), Vec3(1.42, 0, 0)}, chem::RadiiTable::builtin()).total(), 0.0, 1e-12);
}

// ---------------------------------------------------------------------------
// Environment

TEST(Environment, MaximumDistancePassAndFail) {
  auto s = fixtures::pocket_complex(fixtures::toluene());
  EXPECT_TRUE(check_environment(s).at("protein-ligand_maximum_distance").pass);
  s.ligands[0] = fixtures::translated(s.ligands[0], Vec3(0, 0, 20));
  const auto r = check_environment(s).at("protein-ligand_maximum_distance");
  EXPECT_FALSE(r.pass);
  EXPECT_GT(*r.value, 5.0);
}

TEST(Environment, ProteinDistanceAndOverlapPassAndFail) {
  const auto ok = check_environment(fixtures::pocket_complex(fixtures::toluene()));
  EXPECT_TRUE(ok.at("minimum_distance_to_protein").pass);
  EXPECT_TRUE(ok.at("volume_overlap_with_protein").pass);
  // CB atoms pushed into the ring.
  const auto bad = check_environment(fixtures::pocket_complex(fixtures::toluene(), 12, 2.0));
  EXPECT_FALSE(bad.at("minimum_distance_to_protein").pass);
  EXPECT_FALSE(bad.at("volume_overlap_with_protein").pass);
}

TEST(Environment, CofactorGroupsPass) {
  const auto rep = check_environment(environment_fixture(5.0));
  for (auto n : {"minimum_distance_to_organic_cofactors", "minimum_distance_to_inorganic_cofactors", "minimum_distance_to_waters",
                 "volume_overlap_with_organic_cofactors", "volume_overlap_with_inorganic_cofactors", "volume_overlap_with_waters"}) {
    EXPECT_TRUE(rep.at(n).pass) << n;
    EXPECT_TRUE(rep.at(n).value.has_value()) << n;
  }
}

TEST(Environment, CofactorGroupsFail) {
  const auto rep = check_environment(environment_fixture(0.0));
  for (auto n : {"minimum_distance_to_organic_cofactors", "minimum_distance_to_inorganic_cofactors", "minimum_distance_to_waters",
                 "volume_overlap_with_organic_cofactors", "volume_overlap_with_inorganic_cofactors", "volume_overlap_with_waters"})
    EXPECT_FALSE(rep.at(n).pass) << n;
  EXPECT_TRUE(rep.at("minimum_distance_to_protein").pass);
}

TEST(Environment, AbsentGroupsPass) {
  const auto rep = check_environment(fixtures::pocket_complex(fixtures::toluene()));
  EXPECT_TRUE(rep.at("minimum_distance_to_waters").pass);
  EXPECT_EQ(rep.at("minimum_distance_to_waters").detail, "group absent");
}

TEST(Environment, OtherLigandCopiesCountAsOrganic) {
  auto s = fixtures::pocket_complex(fixtures::toluene());
  s.ligands.push_back(fixtures::translated(fixtures::benzene(), Vec3(0.3, 0.2, 0.5)));
  EXPECT_FALSE(check_environment(s).at("minimum_distance_to_organic_cofactors").pass);
  s.target_ligand = 1;
  EXPECT_FALSE(check_environment(s).at("volume_overlap_with_organic_cofactors").pass);
}

TEST(VolumeOverlap, TwoSphereLensOracle) {
  struct Case {
    double r1, r2, d;
  };
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& c : {Case{1.7, 1.7, 1.7}, Case{1.7, 1.52, 2.0}, Case{1.7, 1.39, 1.0}, Case{1.55, 1.7, 2.8},
                        Case{1.7, 1.7, 0.4}, Case{1.52, 2.0, 0.3}}) {
    const double expect = oracles::sphere_overlap_fraction(c.r1, c.r2, c.d);
    for (int rep = 0; rep < 5; ++rep) {
      const Vec3 dir = Vec3(u(rng), u(rng), u(rng)).normalized();
      const Vec3 origin(u(rng) * 10, u(rng) * 10, u(rng) * 10);
      const double got = volume_overlap_fraction({{origin, c.r1}}, {{origin + c.d * dir, c.r2}}, 0.25);
      EXPECT_NEAR(got, expect, 0.02) << c.r1 << " " << c.r2 << " " << c.d;
    }
  }
  EXPECT_NEAR(oracles::sphere_overlap_fraction(1.7, 1.7, 1.7), 5.0 / 16.0, 1e-12);
}

TEST(VolumeOverlap, DisjointAndErrors) {
  EXPECT_EQ(volume_overlap_fraction({{Vec3(0, 0, 0), 1.7}}, {{Vec3(4, 0, 0), 1.7}}, 0.25), 0.0);
  EXPECT_EQ(volume_overlap_fraction({}, {{Vec3(0, 0, 0), 1.7}}, 0.25), 0.0);
  EXPECT_THROW(volume_overlap_fraction({{Vec3(0, 0, 0), 1.7}}, {}, 0.0), InvalidArgument);
}

TEST(VolumeOverlap, RigidMotionInvariant) {
  const auto s = environment_fixture(1.0);
  const auto base = check_environment(s);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 5; ++i) {
    auto m = s;
    fixtures::apply_motion(m, fixtures::random_rotation(rng), Vec3(3.0 * i, -7.0, 2.5));
    const auto rep = check_environment(m);
    for (std::size_t k = 0; k < kCheckCount; ++k) {
      if (!base.slot(k)) continue;
      EXPECT_EQ(rep.slot(k)->pass, base.slot(k)->pass) << kCheckNames[k];
    }
  }
}
