#include "chemdyn/pbc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace chemdyn {

namespace {

constexpr double kDegenerateNorm = 1e-9;

int sign_of_first_nonzero(const Vec3& v) {
  for (int k = 0; k < 3; ++k) {
    if (v[k] > 0.0) return 1;
    if (v[k] < 0.0) return -1;
  }
  return 0;
}

bool lex_less(const Vec3& a, const Vec3& b) {
  for (int k = 0; k < 3; ++k) {
    if (a[k] < b[k]) return true;
    if (a[k] > b[k]) return false;
  }
  return false;
}

// Minimum-norm image of a difference vector whose first nonzero component is
// already canonicalized to be positive.
Vec3 mic_of_diff(const Vec3& d, const Cell& cell) {
  Vec3 best = d;
  double best_norm2 = d.squaredNorm();
  const int ra = cell.pbc[0] ? 1 : 0;
  const int rb = cell.pbc[1] ? 1 : 0;
  const int rc = cell.pbc[2] ? 1 : 0;
  for (int na = -ra; na <= ra; ++na) {
    for (int nb = -rb; nb <= rb; ++nb) {
      for (int nc = -rc; nc <= rc; ++nc) {
        if (na == 0 && nb == 0 && nc == 0) continue;
        const Vec3 shift = na * cell.basis.row(0).transpose() +
                           nb * cell.basis.row(1).transpose() +
                           nc * cell.basis.row(2).transpose();
        const Vec3 cand = d + shift;
        const double n2 = cand.squaredNorm();
        if (n2 < best_norm2 || (n2 == best_norm2 && lex_less(cand, best))) {
          best = cand;
          best_norm2 = n2;
        }
      }
    }
  }
  return best;
}

}  // namespace

Vec3 mic_displacement(const Vec3& a, const Vec3& b, const Cell& cell) {
  if (!cell.periodic()) return b - a;
  Vec3 d = b - a;

  // Reduce by whole lattice steps first (least squares over the periodic
  // rows, rounded), so distant unwrapped positions land within reach of the
  // +-1 scan. std::round is odd, so the reduction negates exactly with d.
  {
    int rows[3];
    int k = 0;
    for (int i = 0; i < 3; ++i) {
      if (cell.pbc[i] && cell.basis.row(i).norm() > kDegenerateNorm) {
        rows[k++] = i;
      }
    }
    if (k > 0) {
      Eigen::MatrixXd p(k, 3);
      for (int i = 0; i < k; ++i) p.row(i) = cell.basis.row(rows[i]);
      const Eigen::MatrixXd gram = p * p.transpose();
      const Eigen::VectorXd coeff = gram.ldlt().solve(p * d);
      for (int i = 0; i < k; ++i) {
        const double n = std::round(coeff[i]);
        if (n != 0.0) d -= n * p.row(i).transpose();
      }
    }
  }

  // Canonicalize the sign so that swapped arguments run the identical
  // candidate search, which makes the result exactly antisymmetric even when
  // two images tie in norm.
  if (sign_of_first_nonzero(d) < 0) return -mic_of_diff(-d, cell);
  return mic_of_diff(d, cell);
}

std::array<int, 3> tiling_extent(const Cell& cell, double cutoff) {
  std::array<int, 3> extent{0, 0, 0};
  for (int d = 0; d < 3; ++d) {
    if (!cell.pbc[d]) continue;
    const Vec3 row = cell.basis.row(d);
    // Perpendicular height of row d over the span of the other periodic rows.
    std::vector<Vec3> others;
    for (int o = 0; o < 3; ++o) {
      if (o != d && cell.pbc[o]) others.push_back(cell.basis.row(o));
    }
    double h = 0.0;
    if (others.empty()) {
      h = row.norm();
    } else if (others.size() == 1) {
      const Vec3& u = others[0];
      const double u2 = u.squaredNorm();
      h = u2 > 0.0 ? (row - (row.dot(u) / u2) * u).norm() : row.norm();
    } else {
      const Vec3 n = others[0].cross(others[1]);
      const double nn = n.norm();
      h = nn > 0.0 ? std::abs(row.dot(n)) / nn : 0.0;
    }
    if (h < kDegenerateNorm) {
      extent[d] = 0;
      continue;
    }
    extent[d] = static_cast<int>(std::ceil(cutoff / h - 1e-12));
    extent[d] = std::max(extent[d], 0);
  }
  return extent;
}

std::vector<std::string> validate_cell(const Cell& cell) {
  std::vector<std::string> out;
  for (int d = 0; d < 3; ++d) {
    if (cell.pbc[d] && cell.basis.row(d).norm() < kDegenerateNorm) {
      std::ostringstream os;
      os << "periodic direction " << d << " has a near-zero basis vector";
      out.push_back(os.str());
    }
  }
  // Skew envelope for the +-1 minimum-image scan: every pair of periodic
  // rows must satisfy the Gauss reduction condition
  // |r_i . r_j| <= 0.5 * min(|r_i|^2, |r_j|^2).
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (!cell.pbc[i] || !cell.pbc[j]) continue;
      const Vec3 ri = cell.basis.row(i);
      const Vec3 rj = cell.basis.row(j);
      const double lim = 0.5 * std::min(ri.squaredNorm(), rj.squaredNorm());
      if (std::abs(ri.dot(rj)) > lim + 1e-9) {
        std::ostringstream os;
        os << "cell rows " << i << " and " << j
           << " are too skewed for the +-1 minimum-image scan";
        out.push_back(os.str());
      }
    }
  }
  return out;
}

NeighborGraph build_neighbor_graph(const Frame& f, double cutoff, int k_cap) {
  if (cutoff <= 0.0) throw std::invalid_argument("cutoff must be positive");
  if (k_cap < 1) throw std::invalid_argument("k_cap must be at least 1");
  {
    const auto cell_issues = validate_cell(f.cell);
    if (!cell_issues.empty()) {
      throw std::invalid_argument("build_neighbor_graph: " + cell_issues.front());
    }
  }

  const int n = f.atom_count();
  const auto extent = tiling_extent(f.cell, cutoff);
  const double cutoff2 = cutoff * cutoff;

  struct Candidate {
    double dist2;
    int dst;
    std::array<int, 3> shift;
  };

  NeighborGraph graph;
  graph.cutoff = cutoff;
  graph.k_cap = k_cap;

  std::vector<Candidate> cands;
  for (int i = 0; i < n; ++i) {
    cands.clear();
    for (int j = 0; j < n; ++j) {
      // Grouping (pos_j - pos_i) + shift keeps the i->j and j->i image
      // distances bitwise identical, which the symmetry property relies on.
      const Vec3 base =
          f.positions.row(j).transpose() - f.positions.row(i).transpose();
      for (int na = -extent[0]; na <= extent[0]; ++na) {
        for (int nb = -extent[1]; nb <= extent[1]; ++nb) {
          for (int nc = -extent[2]; nc <= extent[2]; ++nc) {
            if (i == j && na == 0 && nb == 0 && nc == 0) continue;
            const Vec3 shift = na * f.cell.basis.row(0).transpose() +
                               nb * f.cell.basis.row(1).transpose() +
                               nc * f.cell.basis.row(2).transpose();
            const double d2 = (base + shift).squaredNorm();
            if (d2 > 0.0 && d2 <= cutoff2) {
              cands.push_back({d2, j, {na, nb, nc}});
            }
          }
        }
      }
    }
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) {
                if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
                if (a.dst != b.dst) return a.dst < b.dst;
                return a.shift < b.shift;
              });
    const int keep = std::min<int>(k_cap, static_cast<int>(cands.size()));
    for (int k = 0; k < keep; ++k) {
      graph.edges.push_back({i, cands[k].dst, std::sqrt(cands[k].dist2)});
    }
  }
  return graph;
}

}  // namespace chemdyn
