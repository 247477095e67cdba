#include "chemdyn/synth.hpp"

#include "chemdyn/pbc.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace chemdyn {

namespace {

constexpr double kLatticeSpacing = 2.5;  // A, square surface lattice
constexpr double kLayerSpacing = 2.0;
constexpr double kAdsorbateHeight = 2.0;    // above the top layer
constexpr double kDetachThreshold = 4.0;    // A, desorption criterion
constexpr double kBondCutoff = 2.0;         // A, adsorbate-internal bonds
constexpr int kSites = 3;

// Deterministic draws on top of mt19937_64; the std distributions are
// implementation-defined, these are not.
struct Rng {
  std::mt19937_64 engine;

  explicit Rng(std::uint64_t seed) : engine(seed) {}
  std::uint64_t next() { return engine(); }
  int uniform_int(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
};

struct Species {
  const char* name;
  std::vector<Element> elements;
  double bond_length;  // 0 for monoatomic
  const char* smiles;
  const char* dissociated_smiles;  // nullptr when not dissociable
};

const std::vector<Species>& species_table() {
  static const std::vector<Species> table = {
      {"O", {Element{8}}, 0.0, "[O]", nullptr},
      {"CO", {Element{6}, Element{8}}, 1.13, "[C-]#[O+]", "[C].[O]"},
      {"OH", {Element{8}, Element{1}}, 0.97, "[OH]", "[O].[H]"},
      {"O2", {Element{8}, Element{8}}, 1.21, "O=O", "[O].[O]"},
  };
  return table;
}

Frame make_slab_frame() {
  Frame f;
  f.cell.basis << kSites * kLatticeSpacing, 0, 0,
                  0, kSites * kLatticeSpacing, 0,
                  0, 0, 20.0;
  f.cell.pbc = {true, true, false};
  f.elements.assign(kToySlabAtomCount, Element{29});  // Cu
  f.positions.resize(kToySlabAtomCount, 3);
  int idx = 0;
  for (int layer = 0; layer < 2; ++layer) {
    for (int i = 0; i < kSites; ++i) {
      for (int j = 0; j < kSites; ++j) {
        f.positions.row(idx++) << i * kLatticeSpacing, j * kLatticeSpacing,
            layer * kLayerSpacing;
      }
    }
  }
  return f;
}

// Adsorbate atom positions for a rigid placement: center plus both atoms
// along +-x for diatomics.
void place_adsorbate(Frame& f, const Species& sp, const Vec3& center,
                     double bond_length) {
  const int base = kToySlabAtomCount;
  if (sp.elements.size() == 1) {
    f.positions.row(base) = center.transpose();
  } else {
    f.positions.row(base) << center.x() - bond_length / 2.0, center.y(),
        center.z();
    f.positions.row(base + 1) << center.x() + bond_length / 2.0, center.y(),
        center.z();
  }
}

}  // namespace

double min_adsorbate_slab_distance(const Frame& f, int slab_atom_count) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = slab_atom_count; i < f.atom_count(); ++i) {
    for (int j = 0; j < slab_atom_count; ++j) {
      const Vec3 d = mic_displacement(f.positions.row(i).transpose(),
                                      f.positions.row(j).transpose(), f.cell);
      best = std::min(best, d.norm());
    }
  }
  return best;
}

ReactionType classify_reaction(const Trajectory& t, int slab_atom_count) {
  if (t.frames.empty()) {
    throw std::invalid_argument("classify_reaction: empty trajectory");
  }
  const Frame& first = t.frames.front();
  const Frame& last = t.frames.back();
  if (min_adsorbate_slab_distance(last, slab_atom_count) > kDetachThreshold) {
    return ReactionType::desorption;
  }

  auto component_count = [&](const Frame& f) {
    const int n_ads = f.atom_count() - slab_atom_count;
    std::vector<int> comp(n_ads, -1);
    int count = 0;
    for (int i = 0; i < n_ads; ++i) {
      if (comp[i] != -1) continue;
      std::vector<int> stack{i};
      comp[i] = count;
      while (!stack.empty()) {
        const int a = stack.back();
        stack.pop_back();
        for (int b = 0; b < n_ads; ++b) {
          if (comp[b] != -1) continue;
          const Vec3 d = mic_displacement(
              f.positions.row(slab_atom_count + a).transpose(),
              f.positions.row(slab_atom_count + b).transpose(), f.cell);
          if (d.norm() <= kBondCutoff) {
            comp[b] = count;
            stack.push_back(b);
          }
        }
      }
      ++count;
    }
    return count;
  };

  if (component_count(last) > component_count(first)) {
    return ReactionType::dissociation;
  }
  return ReactionType::transfer;
}

std::vector<CatalyticRecord> synthesize_catalytic_records(std::uint64_t seed,
                                                          int count) {
  if (count < 1) throw std::invalid_argument("count must be >= 1");
  Rng rng(seed);
  const Frame slab = make_slab_frame();
  const double top_z = kLayerSpacing;  // z of the top layer

  std::vector<CatalyticRecord> out;
  out.reserve(count);
  for (int rec_idx = 0; rec_idx < count; ++rec_idx) {
    const ReactionType type = static_cast<ReactionType>(rng.uniform_int(3));

    const auto& table = species_table();
    const Species* sp = nullptr;
    if (type == ReactionType::dissociation) {
      // Only multi-atom species can fragment.
      const int pick = rng.uniform_int(3);
      sp = &table[1 + pick];
    } else {
      sp = &table[rng.uniform_int(static_cast<int>(table.size()))];
    }

    const int site_i = rng.uniform_int(kSites);
    const int site_j = rng.uniform_int(kSites);
    const int n_frames = 5 + rng.uniform_int(8);  // 5..12

    double enthalpy = 0.0;
    switch (type) {
      case ReactionType::desorption: enthalpy = rng.uniform(0.2, 1.0); break;
      case ReactionType::dissociation: enthalpy = rng.uniform(-0.4, 0.6); break;
      case ReactionType::transfer: enthalpy = rng.uniform(-0.2, 0.2); break;
    }
    const double bump_height = std::abs(enthalpy) + 0.3 + rng.uniform(0.0, 1.2);
    const double bump_skew = rng.uniform(0.0, 0.3);

    const double rise = rng.uniform(2.5, 4.5);       // desorption extra height
    const int dir = rng.uniform_int(4);              // transfer direction
    static constexpr double kDirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

    const Vec3 start_center(site_i * kLatticeSpacing, site_j * kLatticeSpacing,
                            top_z + kAdsorbateHeight);

    CatalyticRecord rec;
    rec.id = "cat-s" + std::to_string(seed) + "-" + std::to_string(rec_idx);
    rec.reaction_type = type;
    rec.adsorbate_smiles = sp->smiles;
    rec.product_smiles = type == ReactionType::dissociation
                             ? sp->dissociated_smiles
                             : sp->smiles;

    const int n_ads = static_cast<int>(sp->elements.size());
    for (int k = 0; k < n_frames; ++k) {
      const double s = static_cast<double>(k) / (n_frames - 1);
      Frame f = slab;
      f.elements.insert(f.elements.end(), sp->elements.begin(),
                        sp->elements.end());
      Positions padded(kToySlabAtomCount + n_ads, 3);
      padded.topRows(kToySlabAtomCount) = slab.positions;
      f.positions = std::move(padded);

      Vec3 center = start_center;
      double bond = sp->bond_length;
      switch (type) {
        case ReactionType::desorption:
          center.z() += s * rise;
          break;
        case ReactionType::transfer:
          center.x() += s * kDirs[dir][0] * kLatticeSpacing;
          center.y() += s * kDirs[dir][1] * kLatticeSpacing;
          center.z() += 0.6 * std::sin(M_PI * s);
          break;
        case ReactionType::dissociation:
          bond = sp->bond_length + s * (3.5 - sp->bond_length);
          break;
      }
      place_adsorbate(f, *sp, center, bond);

      const double energy = bump_height * std::sin(M_PI * s) * std::sin(M_PI * s) *
                                (1.0 + bump_skew * s) +
                            enthalpy * s;
      f.energy = energy;
      rec.trajectory.frames.push_back(std::move(f));
      rec.profile.energies.push_back(energy);
    }

    int ts = 0;
    for (int k = 1; k < rec.profile.size(); ++k) {
      if (rec.profile.energies[k] > rec.profile.energies[ts]) ts = k;
    }
    rec.ts_step = ts;
    rec.barrier_ev = rec.profile.energies[ts] - rec.profile.energies.front();
    rec.enthalpy_ev =
        rec.profile.energies.back() - rec.profile.energies.front();
    out.push_back(std::move(rec));
  }
  return out;
}

CatalyticRecordRow to_row(const CatalyticRecord& rec,
                          const std::string& trajectory_path) {
  CatalyticRecordRow row;
  row.id = rec.id;
  row.trajectory_path = trajectory_path;
  row.reaction_type = to_string(rec.reaction_type);
  row.adsorbate_smiles = rec.adsorbate_smiles;
  row.product_smiles = rec.product_smiles;
  row.ts_step = rec.ts_step;
  row.barrier_ev = rec.barrier_ev;
  row.enthalpy_ev = rec.enthalpy_ev;
  return row;
}

}  // namespace chemdyn
