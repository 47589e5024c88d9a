#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "scarsim/error.hpp"

namespace scarsim {

using Config = std::uint32_t;

enum class BoundaryCondition { Periodic, Open };

BoundaryCondition parse_boundary(const std::string& text);
const char* boundary_name(BoundaryCondition bc);

constexpr int kMaxSites = 32;

// Adjacent 1-bits are forbidden; under Periodic the pair (N-1, 0) is a bond too.
bool is_legal(Config s, int n_sites, BoundaryCondition bc);

inline int popcount(Config s) { return __builtin_popcount(s); }

Config translate(Config s, int shift, int n_sites);
Config reflect(Config s, int n_sites);

class ConstrainedBasis {
public:
    ConstrainedBasis(int n_sites, BoundaryCondition bc, std::vector<Config> states);

    int n_sites() const { return n_sites_; }
    BoundaryCondition bc() const { return bc_; }
    std::size_t size() const { return states_.size(); }
    const std::vector<Config>& states() const { return states_; }
    Config state(std::size_t i) const { return states_[i]; }
    std::optional<std::size_t> index_of(Config s) const;

private:
    int n_sites_;
    BoundaryCondition bc_;
    std::vector<Config> states_;
};

ConstrainedBasis enumerate_basis(int n_sites, BoundaryCondition bc);
std::uint64_t dimension(int n_sites, BoundaryCondition bc);

// Named product states over a basis, as full-basis vectors.
CVector product_state(const ConstrainedBasis& basis, Config s);
Config neel_config(int n_sites);
Config anti_neel_config(int n_sites);
CVector z2_state(const ConstrainedBasis& basis);
CVector zplus_state(const ConstrainedBasis& basis);
CVector polarized_state(const ConstrainedBasis& basis);

enum class Parity : int { None = 0, Even = 1, Odd = -1 };

Parity parse_parity(const std::string& text);
std::string parity_name(Parity p);

class SymmetrySector {
public:
    SymmetrySector(std::shared_ptr<const ConstrainedBasis> basis, int k, Parity p);

    const ConstrainedBasis& basis() const { return *basis_; }
    std::shared_ptr<const ConstrainedBasis> basis_ptr() const { return basis_; }
    int momentum_k() const { return k_; }
    Parity inversion_p() const { return p_; }
    std::size_t size() const { return representatives_.size(); }
    const std::vector<Config>& representatives() const { return representatives_; }
    // Sum of conjugated characters over the stabilizer of each representative.
    const std::vector<double>& normalization() const { return norm_; }
    int group_order() const { return group_order_; }
    bool is_real() const;

    // Slot of the representative owning full-basis state i, or -1 if its orbit is dropped.
    int slot_of(std::size_t full_index) const { return slot_[full_index]; }
    // Character of the group element g with state(i) = g * representative.
    cplx character_of(std::size_t full_index) const { return chi_[full_index]; }

    CVector expand(const CVector& sector_vec) const;
    CVector project(const CVector& full_vec) const;

private:
    std::shared_ptr<const ConstrainedBasis> basis_;
    int k_;
    Parity p_;
    int group_order_;
    std::vector<Config> representatives_;
    std::vector<double> norm_;
    std::vector<int> slot_;
    std::vector<cplx> chi_;
};

SymmetrySector build_sector(const ConstrainedBasis& basis, int k, Parity p);
SymmetrySector build_sector(std::shared_ptr<const ConstrainedBasis> basis, int k, Parity p);

// Inversion can only be resolved together with k = 0 or k = N/2.
bool parity_allowed(int n_sites, int k);

}  // namespace scarsim
