#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ldom/cgood.hpp"

namespace ldom {

/// Finitely many levels K_1 ⊆ ... ⊆ K_N of a k_omega sequence, a bounded
/// host window of the real line, and one island interval per level.
class KwSequence {
 public:
  /// Validates nesting (every site of K_n is a site of K_{n+1}), that the
  /// islands lie in the host and are pairwise disjoint with positive gaps,
  /// and that there is one island per level. Throws StructuralError.
  KwSequence(std::vector<DomainPtr> levels, DomainPtr host, std::vector<DomainPtr> islands);

  std::size_t size() const noexcept { return levels_.size(); }
  const std::vector<DomainPtr>& levels() const noexcept { return levels_; }
  const DomainPtr& host() const noexcept { return host_; }
  const std::vector<DomainPtr>& islands() const noexcept { return islands_; }

  /// Sites of K_n inside K_{n+1}, for n = 0..size()-2 (0-based levels).
  const std::vector<std::size_t>& nesting(std::size_t n) const { return nesting_.at(n); }

 private:
  std::vector<DomainPtr> levels_;
  DomainPtr host_;
  std::vector<DomainPtr> islands_;
  std::vector<std::vector<std::size_t>> nesting_;
};

/// K_n = [-n, n] with `per_unit` sites per unit length, islands
/// I_n = [2n, 2n+1] with matching grids, host [0, 2N+2] fine enough to
/// contain every island grid.
KwSequence make_interval_sequence(std::size_t levels, std::size_t per_unit = 16);

/// (f_1, ..., f_N) with f_n on K_n.
struct ChainElement {
  std::vector<SampledFn> components;
};

/// Restrictions of one function on the line to every level.
ChainElement restrict_family(const KwSequence& seq, const std::function<double(double)>& f);

/// L_1 onto C(K_1), L_{n+1} onto C(K_{n+1}; K_n), and extenders of K_n in K_{n+1}.
struct ChainMaps {
  std::vector<CGoodMap> level_maps;
  std::vector<Extender> extenders;
};

/// L_1 = affine identification of I_1 with K_1; L_{n+1} = that of I_{n+1}
/// with K_{n+1} followed by the projection f -> (f - e(f|K_n))/2.
ChainMaps default_chain_maps(const KwSequence& seq);

/// g -> (pi_n L g)_n with pi_1 L = L_1 rho_1 and
/// pi_{n+1} L = e_n^{n+1}(pi_n L) + L_{n+1} rho_{n+1}, rho_n restriction to I_n.
class ChainOperator {
 public:
  /// Throws StructuralError when map domains, targets or extenders do not
  /// match the sequence.
  ChainOperator(KwSequence seq, ChainMaps maps);

  const KwSequence& sequence() const noexcept { return seq_; }
  const ChainMaps& maps() const noexcept { return maps_; }

  ChainElement apply(const SampledFn& g) const;

  /// g on the host with apply(g) = target: g_1 = L_1.lift(f_1),
  /// g_{n+1} = L_{n+1}.lift(f_{n+1} - e(f_{n+1}|K_n)), joined linearly across
  /// the gaps. Throws ContractViolation on an incoherent target.
  SampledFn lift(const ChainElement& target, double tol = 1e-9) const;

 private:
  KwSequence seq_;
  ChainMaps maps_;
};

ChainOperator build_chain(const KwSequence& seq, const ChainMaps& maps);
SampledFn lift_chain(const ChainElement& target, const ChainOperator& chain, double tol = 1e-9);

/// True iff f_{n+1} agrees with f_n on the sites of K_n within tol.
bool coherence_check(const ChainElement& target, const KwSequence& seq, double tol = 1e-9);

/// Largest |f_{n+1} - f_n| over the sites of K_n and all n.
double coherence_defect(const ChainElement& target, const KwSequence& seq);

/// {levels, islands, components: [{level, file}]}; files named
/// `<prefix><n>.csv` for the caller to write.
nlohmann::json chain_json(const KwSequence& seq, const std::string& prefix);

}  // namespace ldom
