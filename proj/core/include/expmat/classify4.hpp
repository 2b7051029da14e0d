#ifndef EXPMAT_CLASSIFY4_HPP
#define EXPMAT_CLASSIFY4_HPP

#include <string>
#include <vector>

#include "expmat/heisenberg.hpp"
#include "expmat/stripes.hpp"

namespace expmat {

enum class Regime { P2, P3, P5Plus };

Regime regime_of(Prime p);

// Structural family of a class, shared across regimes.
enum class ClassKind { A13, A22, A31, J4, J31, J13, Heis };

// One canonical class of the four-by-four classification, with its
// polynomial parameters (in display order) and scalar constants (mu, or
// lambda, mu, nu).
struct ClassLabel4 {
  Prime p = Prime(2);
  int index = 1;
  std::vector<Poly> polys;
  std::vector<uint32_t> constants;

  Regime regime() const { return regime_of(p); }
  ClassKind kind() const;
  void validate() const;
};

ClassKind class_kind(Regime regime, int index);
int class_count(Regime regime);

// The displayed matrix of the class; always exponential.
PolyMatrix canonical_template(const ClassLabel4& label);

struct Classified4 {
  ClassLabel4 label;
  FMatrix conjugator; // P with P^{-1} A P = canonical_template(label)
};

// Full classification pipeline: triangulate, read the ordered
// partition, route to the stripe / corner-block / Heisenberg machinery.
Classified4 classify4(const PolyMatrix& a);

// Class-instance equality up to the residual parameter action: same
// regime and index, and the parameters are linked by the family's
// equivalence decider.
bool classify4_instances_equivalent(const ClassLabel4& a, const ClassLabel4& b);

// Machine-readable descriptor of one class of a regime.
struct ClassDescriptor {
  int index = 1;
  ClassKind kind = ClassKind::A13;
  std::string name;
  std::vector<std::string> poly_params;
  std::vector<std::string> constant_params;
  std::vector<std::string> side_conditions;
};

std::vector<ClassDescriptor> enumerate_classes(Prime p);

} // namespace expmat

#endif
