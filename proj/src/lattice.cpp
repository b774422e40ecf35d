#include "tfim/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tfim/rng.hpp"

namespace tfim {

Lattice::Lattice(int m, int L) : m_(m), L_(L) {
  if (m < 0 || L < 0) throw std::invalid_argument("lattice: m and L must be nonnegative");
}

int Lattice::index_of(int site) const {
  if (!contains(site)) throw std::out_of_range("lattice: site " + std::to_string(site) + " outside lattice");
  return site + m_;
}

std::vector<int> Lattice::sites() const {
  std::vector<int> out(size());
  for (int i = 0; i < size(); ++i) out[i] = site_at(i);
  return out;
}

Lattice build_lattice(int m, int L) { return Lattice(m, L); }

FieldProfile::FieldProfile(Lattice lattice, std::vector<double> h, double J)
    : lattice_(lattice), h_(std::move(h)), J_(J) {
  if (static_cast<int>(h_.size()) != lattice_.size())
    throw std::invalid_argument("profile: expected " + std::to_string(lattice_.size()) + " fields, got " +
                                std::to_string(h_.size()));
  if (!(J_ >= 0.0) || !std::isfinite(J_)) throw std::invalid_argument("profile: J must be finite and >= 0");
  for (double h : h_)
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("profile: fields must be finite and > 0");
}

FieldProfile homogeneous_profile(const Lattice& lattice, double h, double J) {
  return FieldProfile(lattice, std::vector<double>(lattice.size(), h), J);
}

FieldProfile periodic_profile(const Lattice& lattice, const std::vector<double>& period_values, double J) {
  if (period_values.empty()) throw std::invalid_argument("periodic profile: empty period");
  for (double v : period_values)
    if (!(v > 0.0)) throw std::invalid_argument("periodic profile: values must be > 0");
  const int p = static_cast<int>(period_values.size());
  std::vector<double> h;
  h.reserve(lattice.size());
  for (int x : lattice.sites()) h.push_back(period_values[((x % p) + p) % p]);
  return FieldProfile(lattice, std::move(h), J);
}

FieldProfile random_profile(const Lattice& lattice, std::uint64_t seed, UniformLaw law, double J) {
  if (!(law.a > 0.0)) throw std::invalid_argument("random profile: lower bound must be > 0");
  if (law.b < law.a) throw std::invalid_argument("random profile: empty support");
  // one stream per site, so a seed fixes a single disorder realization on Z
  // and nested lattices agree on their common sites
  const CounterRng root(seed);
  std::vector<double> h(lattice.size());
  for (int k = 0; k < lattice.size(); ++k) {
    CounterRng rng = root.split(static_cast<std::uint64_t>(static_cast<std::int64_t>(lattice.site_at(k))));
    h[k] = law.a + (law.b - law.a) * rng.uniform();
  }
  return FieldProfile(lattice, std::move(h), J);
}

nlohmann::json to_json(const FieldProfile& profile) {
  return {{"m", profile.lattice().m()}, {"L", profile.lattice().L()}, {"J", profile.J()}, {"h", profile.fields()}};
}

FieldProfile profile_from_json(const nlohmann::json& j) {
  return FieldProfile(Lattice(j.at("m").get<int>(), j.at("L").get<int>()), j.at("h").get<std::vector<double>>(),
                      j.at("J").get<double>());
}

ClusterDecomposition decompose_clusters(const FieldProfile& profile, double threshold) {
  if (!(threshold > 0.0)) throw std::invalid_argument("decompose_clusters: threshold must be > 0");
  std::set<int> a;
  for (int x : profile.lattice().sites())
    if (profile.field(x) < threshold) a.insert(x);
  return decompose_clusters(profile, a);
}

ClusterDecomposition decompose_clusters(const FieldProfile& profile, const std::set<int>& low_field_sites) {
  const Lattice& lat = profile.lattice();
  for (int x : low_field_sites)
    if (!lat.contains(x)) throw std::invalid_argument("decompose_clusters: site outside lattice");

  ClusterDecomposition out;
  out.low_field_sites.assign(low_field_sites.begin(), low_field_sites.end());
  for (int x : lat.sites()) {
    const bool in_a = low_field_sites.contains(x);
    const double h = profile.field(x);
    if (in_a) {
      out.C1 = std::min(out.C1, h);
      if (!out.clusters.empty() && out.clusters.back().last == x - 1)
        out.clusters.back().last = x;
      else
        out.clusters.push_back({x, x});
    } else {
      out.C2 = std::min(out.C2, h);
    }
  }
  for (const auto& c : out.clusters) out.K = std::max(out.K, c.length());
  return out;
}

}  // namespace tfim
