#pragma once

#include <algorithm>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <vector>

#include "qadc/common/errors.hpp"
#include "qadc/linop/mzi.hpp"
#include "qadc/linop/unitary.hpp"

namespace qadc::linop {

/// Cell positions of the universal rectangular layout on n modes: n layers,
/// even layers pair (0,1),(2,3),..., odd layers pair (1,2),(3,4),...
/// Gives n(n-1)/2 cells, 28 for 8 modes.
inline std::vector<CellPosition> rectangular_layout(int n_modes) {
  std::vector<CellPosition> out;
  for (int layer = 0; layer < n_modes; ++layer)
    for (int top = layer % 2; top + 1 < n_modes; top += 2) out.push_back({layer, top});
  return out;
}

/// One full setting of the programmable interferometer.
struct MeshProgram {
  int n_modes = 0;
  std::vector<MZCell> cells;
  std::vector<int> input_occupation;

  /// Every layout cell idle (identity transfer), no photons.
  static MeshProgram idle(int n_modes) {
    MeshProgram p;
    p.n_modes = n_modes;
    for (auto pos : rectangular_layout(n_modes)) p.cells.push_back(idle_cell(pos));
    p.input_occupation.assign(static_cast<std::size_t>(n_modes), 0);
    return p;
  }

  MZCell& cell_at(int layer, int top_mode) {
    for (auto& c : cells)
      if (c.position.layer == layer && c.position.top_mode == top_mode) return c;
    throw LayoutError("no cell at layer " + std::to_string(layer) + ", top mode " +
                      std::to_string(top_mode));
  }
  const MZCell& cell_at(int layer, int top_mode) const {
    return const_cast<MeshProgram*>(this)->cell_at(layer, top_mode);
  }

  /// Throws LayoutError / DomainError when the program is malformed.
  void validate() const {
    if (n_modes < 2) throw LayoutError("mesh needs at least 2 modes");
    const auto layout = rectangular_layout(n_modes);
    if (cells.size() != layout.size())
      throw LayoutError("expected " + std::to_string(layout.size()) + " cells, got " +
                        std::to_string(cells.size()));
    std::set<std::pair<int, int>> touched;  // (layer, mode)
    for (const auto& c : cells) {
      const auto [layer, top] = c.position;
      if (layer < 0 || layer >= n_modes || top < 0 || top + 1 >= n_modes)
        throw LayoutError("cell position out of range");
      if (!touched.insert({layer, top}).second || !touched.insert({layer, top + 1}).second)
        throw LayoutError("overlapping cells in layer " + std::to_string(layer));
      if (std::find(layout.begin(), layout.end(), c.position) == layout.end())
        throw LayoutError("cell at layer " + std::to_string(layer) + ", top mode " +
                          std::to_string(top) + " is not part of the rectangular layout");
    }
    if (!input_occupation.empty() &&
        input_occupation.size() != static_cast<std::size_t>(n_modes))
      throw DomainError("input_occupation length must equal n_modes");
    for (int occ : input_occupation)
      if (occ < 0) throw DomainError("input_occupation entries must be non-negative");
  }

  /// Input modes listed once per photon, in mode order.
  std::vector<int> input_modes() const {
    std::vector<int> out;
    for (std::size_t m = 0; m < input_occupation.size(); ++m)
      for (int k = 0; k < input_occupation[m]; ++k) out.push_back(static_cast<int>(m));
    return out;
  }
};

/// Transfer matrix of the whole mesh: cells embedded on their mode pair and
/// applied layer by layer (layer 0 acts first).
inline UnitaryMatrix mesh_unitary(const MeshProgram& program) {
  program.validate();
  std::vector<const MZCell*> order;
  for (const auto& c : program.cells) order.push_back(&c);
  std::stable_sort(order.begin(), order.end(), [](const MZCell* a, const MZCell* b) {
    return a->position.layer < b->position.layer;
  });
  const int n = program.n_modes;
  CMatrix u = CMatrix::Identity(n, n);
  for (const MZCell* c : order) {
    const Eigen::Matrix2cd t = cell_unitary(*c);
    const int top = c->position.top_mode;
    // u <- T_embedded * u, touching only rows top, top+1
    const Eigen::Matrix<cplx, 2, Eigen::Dynamic> rows = u.middleRows(top, 2);
    u.middleRows(top, 2) = t * rows;
  }
  return UnitaryMatrix(std::move(u));
}

inline nlohmann::json to_json(const MeshProgram& p) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : p.cells)
    cells.push_back({{"layer", c.position.layer},
                     {"top_mode", c.position.top_mode},
                     {"theta", c.theta},
                     {"phi", c.phi}});
  return {{"n_modes", p.n_modes}, {"cells", cells}, {"input_occupation", p.input_occupation}};
}

inline MeshProgram mesh_program_from_json(const nlohmann::json& j) {
  MeshProgram p;
  try {
    p.n_modes = j.at("n_modes").get<int>();
    for (const auto& c : j.at("cells"))
      p.cells.push_back(MZCell{c.at("theta").get<double>(), c.at("phi").get<double>(),
                               {c.at("layer").get<int>(), c.at("top_mode").get<int>()}});
    p.input_occupation = j.at("input_occupation").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("mesh program JSON: ") + e.what());
  }
  p.validate();
  return p;
}

}  // namespace qadc::linop
