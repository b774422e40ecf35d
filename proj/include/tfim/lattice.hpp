#pragma once

#include <cstdint>
#include <limits>
#include <nlohmann/json.hpp>
#include <set>
#include <vector>

namespace tfim {

/// The chain {-m, ..., m+L}. The block [0, L] always sits inside it with m
/// sites of padding on each side.
class Lattice {
 public:
  Lattice(int m, int L);

  int m() const { return m_; }
  int L() const { return L_; }
  int size() const { return 2 * m_ + L_ + 1; }
  int first_site() const { return -m_; }
  int last_site() const { return m_ + L_; }

  bool contains(int site) const { return site >= first_site() && site <= last_site(); }
  /// Position of a site in ascending order (site -m has index 0).
  int index_of(int site) const;
  int site_at(int index) const { return index - m_; }
  std::vector<int> sites() const;

  bool operator==(const Lattice&) const = default;

 private:
  int m_;
  int L_;
};

Lattice build_lattice(int m, int L);

/// Transverse fields h_x > 0 on every site plus the ferromagnetic coupling J.
class FieldProfile {
 public:
  /// Throws std::invalid_argument unless every field is strictly positive,
  /// J >= 0, and there is one field per site.
  FieldProfile(Lattice lattice, std::vector<double> h, double J);

  const Lattice& lattice() const { return lattice_; }
  double J() const { return J_; }
  /// Fields in ascending site order.
  const std::vector<double>& fields() const { return h_; }
  double field(int site) const { return h_[lattice_.index_of(site)]; }

  FieldProfile with_coupling(double J) const { return FieldProfile(lattice_, h_, J); }

  bool operator==(const FieldProfile&) const = default;

 private:
  Lattice lattice_;
  std::vector<double> h_;
  double J_;
};

FieldProfile homogeneous_profile(const Lattice& lattice, double h, double J);

/// h_x = period_values[x mod p], with the modulus taken in [0, p) so that
/// negative sites continue the pattern.
FieldProfile periodic_profile(const Lattice& lattice, const std::vector<double>& period_values,
                              double J);

struct UniformLaw {
  double a;
  double b;
};

/// i.i.d. fields drawn from U(a, b); h_x depends only on (seed, x), so
/// lattices of different size share the fields on their common sites.
FieldProfile random_profile(const Lattice& lattice, std::uint64_t seed, UniformLaw law, double J);

nlohmann::json to_json(const FieldProfile& profile);
FieldProfile profile_from_json(const nlohmann::json& j);

struct SiteInterval {
  int first;
  int last;
  int length() const { return last - first + 1; }
  bool operator==(const SiteInterval&) const = default;
};

struct ClusterDecomposition {
  std::vector<int> low_field_sites;    // A, ascending
  std::vector<SiteInterval> clusters;  // maximal intervals of A, ascending
  int K = 0;                           // largest cluster length, 0 when A is empty
  double C1 = std::numeric_limits<double>::infinity();  // min field on A
  double C2 = std::numeric_limits<double>::infinity();  // min field off A
};

/// A := {x : h_x < threshold}.
ClusterDecomposition decompose_clusters(const FieldProfile& profile, double threshold);

/// Decomposition for a caller-chosen A. Sites outside the lattice are rejected.
ClusterDecomposition decompose_clusters(const FieldProfile& profile, const std::set<int>& low_field_sites);

}  // namespace tfim
