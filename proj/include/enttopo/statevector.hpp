#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "enttopo/errors.hpp"
#include "enttopo/graph.hpp"
#include "enttopo/graph_state.hpp"

namespace enttopo {

/// Hard cap for the dense oracle; 2^12 amplitudes keeps the full property
/// suite well under a minute.
inline constexpr std::size_t kStatevectorQubitCap = 12;

/// Dense statevector over a fixed number of qubits. Qubit q corresponds to
/// bit q of the amplitude index.
class Statevector {
public:
  using Amplitude = std::complex<double>;

  /// |G> for the live vertices of g, in ascending vertex-id order.
  static Statevector of_graph_state(const LabeledGraph& g) {
    const std::vector<VertexId> live = g.live_vertices();
    if (live.size() > kStatevectorQubitCap) {
      throw CapacityError("graph state of " + std::to_string(live.size()) +
                          " qubits exceeds the statevector cap of " +
                          std::to_string(kStatevectorQubitCap));
    }
    std::vector<std::size_t> position(g.id_bound(), 0);
    for (std::size_t i = 0; i < live.size(); ++i) {
      position[live[i]] = i;
    }

    Statevector sv;
    sv.num_qubits_ = live.size();
    const std::size_t dim = std::size_t{1} << sv.num_qubits_;
    const double amp = 1.0 / std::sqrt(static_cast<double>(dim));
    sv.amps_.assign(dim, Amplitude(amp, 0.0));
    for (VertexId u : live) {
      for (VertexId w : g.neighbors(u)) {
        if (u < w) {
          const std::uint64_t both = (std::uint64_t{1} << position[u]) |
                                     (std::uint64_t{1} << position[w]);
          for (std::size_t idx = 0; idx < dim; ++idx) {
            if ((idx & both) == both) {
              sv.amps_[idx] = -sv.amps_[idx];
            }
          }
        }
      }
    }
    return sv;
  }

  std::size_t qubit_count() const { return num_qubits_; }
  const std::vector<Amplitude>& amplitudes() const { return amps_; }

  /// Applies (I + P_q)/2 and renormalizes. Graph states never make the +1
  /// branch impossible, but a vanishing norm is guarded anyway.
  void project_pauli_plus(std::size_t qubit, PauliBasis basis) {
    const std::uint64_t bit = std::uint64_t{1} << qubit;
    const std::size_t dim = amps_.size();
    std::vector<Amplitude> out(dim);
    const Amplitude i_unit(0.0, 1.0);
    for (std::size_t idx = 0; idx < dim; ++idx) {
      switch (basis) {
        case PauliBasis::Z:
          out[idx] = (idx & bit) ? Amplitude(0.0, 0.0) : amps_[idx];
          break;
        case PauliBasis::X:
          out[idx] = 0.5 * (amps_[idx] + amps_[idx ^ bit]);
          break;
        case PauliBasis::Y: {
          const Amplitude flipped = (idx & bit) ? i_unit * amps_[idx ^ bit]
                                                : -i_unit * amps_[idx ^ bit];
          out[idx] = 0.5 * (amps_[idx] + flipped);
          break;
        }
      }
    }
    amps_ = std::move(out);
    normalize();
  }

  /// Removes qubit q assuming the state factorizes across it (true right
  /// after a +1 Pauli projection): slices the bit-0 hyperplane and
  /// renormalizes.
  void drop_qubit(std::size_t qubit) {
    const std::uint64_t bit = std::uint64_t{1} << qubit;
    const std::uint64_t low_mask = bit - 1;
    const std::size_t new_dim = amps_.size() / 2;
    std::vector<Amplitude> out(new_dim);
    for (std::size_t k = 0; k < new_dim; ++k) {
      const std::uint64_t idx = (k & low_mask) | ((k & ~low_mask) << 1);
      out[k] = amps_[idx];
    }
    amps_ = std::move(out);
    --num_qubits_;
    normalize();
  }

  /// Schmidt rank across the bipartition (qubits in mask | rest).
  int schmidt_rank(std::uint64_t mask) const {
    std::vector<std::size_t> a_bits;
    std::vector<std::size_t> b_bits;
    for (std::size_t q = 0; q < num_qubits_; ++q) {
      if (mask & (std::uint64_t{1} << q)) {
        a_bits.push_back(q);
      } else {
        b_bits.push_back(q);
      }
    }
    const std::size_t rows = std::size_t{1} << a_bits.size();
    const std::size_t cols = std::size_t{1} << b_bits.size();
    std::vector<std::vector<Amplitude>> matrix(rows,
                                               std::vector<Amplitude>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
      std::uint64_t base = 0;
      for (std::size_t i = 0; i < a_bits.size(); ++i) {
        if (r & (std::size_t{1} << i)) {
          base |= std::uint64_t{1} << a_bits[i];
        }
      }
      for (std::size_t c = 0; c < cols; ++c) {
        std::uint64_t idx = base;
        for (std::size_t i = 0; i < b_bits.size(); ++i) {
          if (c & (std::size_t{1} << i)) {
            idx |= std::uint64_t{1} << b_bits[i];
          }
        }
        matrix[r][c] = amps_[idx];
      }
    }
    return complex_rank(matrix);
  }

private:
  void normalize() {
    double norm_sq = 0.0;
    for (const Amplitude& a : amps_) {
      norm_sq += std::norm(a);
    }
    if (norm_sq < 1e-12) {
      throw std::runtime_error("projection produced a zero-probability branch");
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (Amplitude& a : amps_) {
      a *= inv;
    }
  }

  static int complex_rank(std::vector<std::vector<Amplitude>>& m) {
    const std::size_t rows = m.size();
    const std::size_t cols = m.empty() ? 0 : m[0].size();
    double max_abs = 0.0;
    for (const auto& row : m) {
      for (const Amplitude& a : row) {
        max_abs = std::max(max_abs, std::abs(a));
      }
    }
    if (max_abs == 0.0) {
      return 0;
    }
    const double tol = max_abs * 1e-8;
    int rank = 0;
    std::size_t pivot_row = 0;
    for (std::size_t col = 0; col < cols && pivot_row < rows; ++col) {
      std::size_t best = pivot_row;
      for (std::size_t r = pivot_row + 1; r < rows; ++r) {
        if (std::abs(m[r][col]) > std::abs(m[best][col])) {
          best = r;
        }
      }
      if (std::abs(m[best][col]) <= tol) {
        continue;
      }
      std::swap(m[pivot_row], m[best]);
      const Amplitude inv = 1.0 / m[pivot_row][col];
      for (std::size_t r = pivot_row + 1; r < rows; ++r) {
        const Amplitude factor = m[r][col] * inv;
        if (std::abs(factor) == 0.0) {
          continue;
        }
        for (std::size_t c = col; c < cols; ++c) {
          m[r][c] -= factor * m[pivot_row][c];
        }
      }
      ++pivot_row;
      ++rank;
    }
    return rank;
  }

  std::vector<Amplitude> amps_;
  std::size_t num_qubits_ = 0;
};

/// Independent check of a measurement rewrite: projects the dense state of
/// |G_before> onto the +1 outcome on qubit a, discards a, and compares
/// Schmidt ranks against the dense state of the claimed |G_after> across
/// every bipartition of the survivors. Rank spectra are invariant under the
/// untracked local unitaries, so equality across all cuts is exactly the
/// "up to local unitaries" claim.
inline bool statevector_oracle_check(const GraphState& before, VertexId a,
                                     PauliBasis basis,
                                     std::optional<VertexId> b0,
                                     const LabeledGraph& after) {
  (void)b0; // the +1 projector does not depend on the measurement partner
  const LabeledGraph& g = before.graph();
  g.require_live(a);
  if (g.vertex_count() > kStatevectorQubitCap) {
    throw CapacityError("oracle limited to " +
                        std::to_string(kStatevectorQubitCap) + " qubits");
  }

  const std::vector<VertexId> live = g.live_vertices();
  std::size_t a_pos = 0;
  std::vector<VertexId> survivors;
  survivors.reserve(live.size() - 1);
  for (std::size_t i = 0; i < live.size(); ++i) {
    if (live[i] == a) {
      a_pos = i;
    } else {
      survivors.push_back(live[i]);
    }
  }
  if (after.live_vertices() != survivors) {
    return false;
  }

  Statevector measured = Statevector::of_graph_state(g);
  measured.project_pauli_plus(a_pos, basis);
  measured.drop_qubit(a_pos);

  const Statevector expected = Statevector::of_graph_state(after);

  const std::size_t m = survivors.size();
  if (m < 2) {
    return true;
  }
  const std::uint64_t full = (std::uint64_t{1} << m) - 1;
  for (std::uint64_t mask = 1; mask < full; ++mask) {
    if (!(mask & 1)) {
      continue; // complements have equal rank; check each cut once
    }
    if (measured.schmidt_rank(mask) != expected.schmidt_rank(mask)) {
      return false;
    }
  }
  return true;
}

} // namespace enttopo
