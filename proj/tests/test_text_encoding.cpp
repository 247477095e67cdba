#include "chemdyn/text_encoding.hpp"

#include "chemdyn/trajectory_io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace chemdyn;

namespace {

Frame h2_frame() {
  Frame f;
  f.elements = {Element{1}, Element{1}};
  f.positions.resize(2, 3);
  f.positions << 0, 0, 0, 0.74, 0, 0;
  return f;
}

}  // namespace

TEST_CASE("encode_3d emits the full serialization") {
  const std::string text = encode_3d(h2_frame());
  CHECK(text ==
        "The system is non-periodic. The atom and its position are as follows:\n"
        "H1 0.00 0.00 0.00\n"
        "H2 0.74 0.00 0.00\n"
        "The distance between atoms is as follows:\n"
        "atom1_index atom2_index distance(A)\n"
        "1 2 0.74\n"
        "2 1 0.74\n");
}

TEST_CASE("encode_3d of an isolated atom has an empty edge section") {
  Frame f;
  f.elements = {Element{8}};
  f.positions = Positions::Zero(1, 3);
  const std::string text = encode_3d(f);
  CHECK(text ==
        "The system is non-periodic. The atom and its position are as follows:\n"
        "O1 0.00 0.00 0.00\n"
        "The distance between atoms is as follows:\n"
        "atom1_index atom2_index distance(A)\n");
}

TEST_CASE("encode_3d prints lattice vectors for periodic frames") {
  Frame f = h2_frame();
  f.cell.basis << 10, 0, 0, 0, 10, 0, 0, 0, 20;
  f.cell.pbc = {true, true, false};
  const std::string text = encode_3d(f);
  CHECK(text.rfind("The system is periodic. The lattice vectors are as follows:\n"
                   "x 10.00 0.00 0.00\n"
                   "y 0.00 10.00 0.00\n"
                   "z 0.00 0.00 20.00\n"
                   "The atom and its position are as follows:\n",
                   0) == 0);
}

TEST_CASE("negative zero never appears in the output") {
  Frame f;
  f.elements = {Element{6}};
  f.positions.resize(1, 3);
  f.positions << -0.001, 0.0, -0.0;
  const std::string text = encode_3d(f);
  CHECK(text.find("-0.00") == std::string::npos);
  CHECK(text.find("C1 0.00 0.00 0.00") != std::string::npos);
}

TEST_CASE("encode_4d_sparse") {
  Trajectory t;
  t.frames.push_back(h2_frame());

  SUBCASE("single frame equals a headed encode_3d") {
    CHECK(encode_4d_sparse(t) == "Frame 1:\n" + encode_3d(t.frames[0]));
  }

  SUBCASE("sub-threshold motion leaves frame 2 empty") {
    Frame f2 = h2_frame();
    f2.positions(1, 0) += 0.05;
    t.frames.push_back(f2);
    const std::string text = encode_4d_sparse(t);
    CHECK(text.find("Frame 2:\n"
                    "The atom with big movements are listed as follows:\n"
                    "New edge distances:\n"
                    "atom1_index atom2_index distance(A)\n") !=
          std::string::npos);
  }

  SUBCASE("a moved atom is listed with its incident edges") {
    Frame f2 = h2_frame();
    f2.positions(1, 0) = 0.94;  // moved 0.2
    t.frames.push_back(f2);
    const std::string text = encode_4d_sparse(t);
    CHECK(text.find("Frame 2:\n"
                    "The atom with big movements are listed as follows:\n"
                    "H2 0.94 0.00 0.00\n"
                    "New edge distances:\n"
                    "atom1_index atom2_index distance(A)\n"
                    "1 2 0.94\n"
                    "2 1 0.94\n") != std::string::npos);
  }

  SUBCASE("displacement exactly at delta is omitted") {
    Frame f2 = h2_frame();
    f2.positions(1, 0) += 0.1;
    t.frames.push_back(f2);
    const std::string text = encode_4d_sparse(t);
    const auto frame2 = text.substr(text.find("Frame 2:"));
    CHECK(frame2.find("H2") == std::string::npos);
  }

  SUBCASE("motion is measured against the true previous frame") {
    Frame f2 = h2_frame();
    f2.positions(1, 0) = 0.80;  // +0.06 from frame 1: silent
    Frame f3 = h2_frame();
    f3.positions(1, 0) = 0.95;  // +0.15 from frame 2: reported
    t.frames.push_back(f2);
    t.frames.push_back(f3);
    const std::string text = encode_4d_sparse(t);
    const auto frame2 = text.substr(text.find("Frame 2:"), 90);
    CHECK(frame2.find("H2") == std::string::npos);
    const auto frame3 = text.substr(text.find("Frame 3:"));
    CHECK(frame3.find("H2 0.95 0.00 0.00") != std::string::npos);
  }
}

TEST_CASE("reported atoms equal the over-threshold set on random trajectories") {
  std::mt19937_64 rng(53);
  const EncodingConfig cfg;
  for (int it = 0; it < 100; ++it) {
    const Trajectory t = chemdyn::testing::random_trajectory(rng, 6, 4);
    const std::string text = encode_4d_sparse(t);
    // Re-extract the per-frame reported atom names from the text.
    std::vector<std::vector<std::string>> reported;
    std::istringstream in(text);
    std::string line;
    int frame = -1;
    bool in_atoms = false;
    while (std::getline(in, line)) {
      if (line.rfind("Frame ", 0) == 0) {
        ++frame;
        in_atoms = false;
      } else if (line == "The atom with big movements are listed as follows:") {
        in_atoms = true;
        reported.emplace_back();
      } else if (line == "New edge distances:") {
        in_atoms = false;
      } else if (in_atoms) {
        reported.back().push_back(line.substr(0, line.find(' ')));
      }
    }
    REQUIRE(static_cast<int>(reported.size()) == t.frame_count() - 1);
    for (int k = 1; k < t.frame_count(); ++k) {
      const auto expect =
          atoms_over_threshold(t.frames[k - 1], t.frames[k], cfg.delta);
      std::vector<std::string> names;
      for (int idx : expect) {
        names.push_back(std::string(t.frames[k].elements[idx].symbol()) +
                        std::to_string(idx + 1));
      }
      CHECK(names == reported[k - 1]);
    }
  }
}

TEST_CASE("atom lines round coordinates to within half an ulp of the grid") {
  std::mt19937_64 rng(71);
  const EncodingConfig cfg;
  for (int it = 0; it < 40; ++it) {
    const Frame f = chemdyn::testing::random_frame(rng, 8);
    const std::string text = encode_3d(f, cfg);
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    while (line.rfind("The atom and its position", 0) == std::string::npos &&
           line.find("The atom and its position") == std::string::npos) {
      std::getline(in, line);
    }
    for (int i = 0; i < f.atom_count(); ++i) {
      REQUIRE(std::getline(in, line));
      std::istringstream atom_line(line);
      std::string name;
      double x, y, z;
      atom_line >> name >> x >> y >> z;
      CHECK(std::abs(x - f.positions(i, 0)) <= 0.005 + 1e-12);
      CHECK(std::abs(y - f.positions(i, 1)) <= 0.005 + 1e-12);
      CHECK(std::abs(z - f.positions(i, 2)) <= 0.005 + 1e-12);
    }
  }
}

TEST_CASE("encoding is deterministic") {
  std::mt19937_64 rng(83);
  const Trajectory t = chemdyn::testing::random_trajectory(rng, 10, 4);
  const std::string a = encode_4d_sparse(t);
  const std::string b = encode_4d_sparse(t);
  CHECK(a == b);
  CHECK(encode_full3d(t) == encode_full3d(t));
}

TEST_CASE("token_stats") {
  const TokenStats s = token_stats("H1 0.00 0.00 0.00");
  CHECK(s.whitespace_tokens == 4);
  CHECK(s.lines == 1);
  CHECK(s.chars == 17);
  const TokenStats empty = token_stats("");
  CHECK(empty.whitespace_tokens == 0);
  CHECK(empty.chars == 0);
  CHECK(empty.lines == 0);
  CHECK(token_stats("a\nb\n").lines == 2);
  CHECK(token_stats("  \n\t\n").whitespace_tokens == 0);
}

TEST_CASE("build_token_layout") {
  Trajectory t;
  for (int k = 0; k < 2; ++k) {
    Frame f;
    f.elements = {Element{6}, Element{8}, Element{1}};
    f.positions.resize(3, 3);
    f.positions << 0, 0, 0, 1.2, 0, 0, 2.0, 0.5, 0.1 * k;
    t.frames.push_back(f);
  }

  SUBCASE("marker and feature-row counts follow K and N") {
    const TokenLayout layout = build_token_layout(
        t, [](const Frame& f) { return mock_encoder(f, 512); });
    CHECK(layout.markers.size() == 2 * (3 + 2));
    CHECK(layout.feature_rows.rows() == 6);
    CHECK(layout.feature_rows.cols() == 528);
    CHECK(layout.markers.front().kind == MarkerKind::graph_start);
    CHECK(layout.markers[1].kind == MarkerKind::graph_node);
    CHECK(layout.markers[1].atom == 0);
    CHECK(layout.markers[4].kind == MarkerKind::graph_end);
  }

  SUBCASE("zero encoder leaves only the raw block distinguishing atoms") {
    RawFeatureLayout raw;
    raw.encoder_width = 4;
    const TokenLayout layout = build_token_layout(
        t,
        [](const Frame& f) {
          return Eigen::MatrixXd::Zero(f.atom_count(), 4);
        },
        raw);
    CHECK(layout.feature_rows.cols() == 20);
    CHECK(layout.feature_rows.leftCols(4).isZero(0.0));
    CHECK(layout.feature_rows(0, 4) == 6.0);   // atomic number
    CHECK(layout.feature_rows(1, 4) == 8.0);
    CHECK(layout.feature_rows(1, 5) == 1.2);   // x
    CHECK(layout.feature_rows(0, 8) == 0.0);   // pbc flags
  }

  SUBCASE("rotating the frame rotates exactly the xyz slice") {
    RawFeatureLayout raw;
    raw.encoder_width = 2;
    auto zero_enc = [](const Frame& f) {
      return Eigen::MatrixXd::Zero(f.atom_count(), 2);
    };
    const double c = std::cos(0.3), s = std::sin(0.3);
    Mat3 rot;
    rot << c, -s, 0, s, c, 0, 0, 0, 1;
    Trajectory rotated = t;
    for (auto& f : rotated.frames) {
      f.positions = (rot * f.positions.transpose()).transpose();
    }
    const TokenLayout a = build_token_layout(t, zero_enc, raw);
    const TokenLayout b = build_token_layout(rotated, zero_enc, raw);
    for (int r = 0; r < a.feature_rows.rows(); ++r) {
      const Eigen::Vector3d xyz = a.feature_rows.block(r, 3, 1, 3).transpose();
      const Eigen::Vector3d want = rot * xyz;
      const Eigen::Vector3d got = b.feature_rows.block(r, 3, 1, 3).transpose();
      CHECK((want - got).norm() < 1e-12);
    }
  }

  SUBCASE("shape mismatch from the encoder is an error") {
    CHECK_THROWS_AS(
        build_token_layout(
            t, [](const Frame&) { return Eigen::MatrixXd::Zero(2, 512); }),
        std::invalid_argument);
  }

  SUBCASE("counts hold for random atom and frame counts") {
    std::mt19937_64 rng(7);
    RawFeatureLayout raw;
    raw.encoder_width = 8;
    for (int it = 0; it < 25; ++it) {
      const Trajectory rt = chemdyn::testing::random_trajectory(rng, 9, 6);
      const int n = rt.frames.front().atom_count();
      const int frames = rt.frame_count();
      const TokenLayout layout = build_token_layout(
          rt,
          [&](const Frame& f) {
            return Eigen::MatrixXd::Zero(f.atom_count(), 8);
          },
          raw);
      CHECK(layout.markers.size() ==
            static_cast<std::size_t>(frames) * (n + 2));
      CHECK(layout.feature_rows.rows() == frames * n);
      CHECK(layout.feature_rows.cols() == raw.width());
    }
  }
}

TEST_CASE("mock_encoder") {
  Frame f;
  f.elements = {Element{6}, Element{8}, Element{6}};
  f.positions.resize(3, 3);
  f.positions << 0, 0, 0, 1.2, 0, 0, -1.2, 0, 0;

  SUBCASE("identical frames give identical matrices") {
    CHECK(mock_encoder(f, 16) == mock_encoder(f, 16));
  }
  SUBCASE("rigid translation leaves the features unchanged") {
    Frame g = f;
    for (int i = 0; i < 3; ++i) {
      g.positions.row(i) += Eigen::RowVector3d(5, 5, 5);
    }
    CHECK(mock_encoder(f, 16) == mock_encoder(g, 16));
  }
  SUBCASE("rigid rotation leaves the features unchanged") {
    const double c = std::cos(1.1), s = std::sin(1.1);
    Mat3 rot;
    rot << c, -s, 0, s, c, 0, 0, 0, 1;
    Frame g = f;
    g.positions = (rot * f.positions.transpose()).transpose();
    CHECK(mock_encoder(f, 16) == mock_encoder(g, 16));
  }
  SUBCASE("different elements in symmetric environments differ") {
    const Eigen::MatrixXd m = mock_encoder(f, 16);
    CHECK(m.row(0) != m.row(1));
    // Atoms 0 and 2 differ: atom 0 has two neighbors at 1.2, atom 2 one.
    CHECK(m.row(0) != m.row(2));
  }
}

TEST_CASE("supervision pairs") {
  ReactionRecord rec;
  rec.id = "g1";
  Frame f1 = h2_frame();
  Frame f2 = h2_frame();
  f2.positions(1, 0) = 0.94;
  rec.reactant = f1;
  rec.transition_state = f2;
  rec.product = f2;
  rec.reactant_smiles = "[H][H]";
  rec.product_smiles = "[H][H]";
  rec.barrier_ev = 0.5;
  rec.enthalpy_ev = -0.25;

  SUBCASE("text4d prompts carry frame headers") {
    const auto pairs =
        emit_supervision_pairs(std::vector<ReactionRecord>{rec}, PairMode::text4d);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].prompt.find("Frame 1:") != std::string::npos);
    CHECK(pairs[0].prompt.find("Frame 2:") != std::string::npos);
    CHECK(pairs[0].prompt.rfind("Given the reactant and transition state "
                                "geometries, predict the product SMILES, "
                                "reaction barrier and reaction enthalpy. "
                                "The geometry is as follows:\n",
                                0) == 0);
    CHECK(pairs[0].target ==
          "Product: [H][H]\nBarrier: 0.50 eV\nEnthalpy: -0.25 eV");
  }
  SUBCASE("text3d prompts carry no frame headers") {
    const auto pairs =
        emit_supervision_pairs(std::vector<ReactionRecord>{rec}, PairMode::text3d);
    CHECK(pairs[0].prompt.find("Frame") == std::string::npos);
    CHECK(pairs[0].prompt.find("The system is non-periodic.") !=
          std::string::npos);
  }
  SUBCASE("catalytic targets list every labeled field") {
    CatalyticRecord cat;
    cat.id = "c1";
    Frame f = h2_frame();
    f.energy = 0.0;
    Frame g = f;
    g.positions(1, 0) = 1.2;
    g.energy = 0.7;
    Frame h = g;
    h.positions(1, 0) = 1.4;
    h.energy = 0.2;
    cat.trajectory.frames = {f, g, h};
    cat.profile.energies = {0.0, 0.7, 0.2};
    cat.reaction_type = ReactionType::dissociation;
    cat.adsorbate_smiles = "[H][H]";
    cat.product_smiles = "[H].[H]";
    cat.ts_step = 1;
    cat.barrier_ev = 0.7;
    cat.enthalpy_ev = 0.2;
    const auto pairs =
        emit_supervision_pairs(std::vector<CatalyticRecord>{cat}, PairMode::text4d);
    CHECK(pairs[0].target ==
          "Type: dissociation\nAdsorbate: [H][H]\nProduct: [H].[H]\n"
          "TS step: 2\nBarrier: 0.70 eV\nEnthalpy: 0.20 eV");
  }
}
