#include "scarsim/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace scarsim {

BoundaryCondition parse_boundary(const std::string& text) {
    if (text == "pbc" || text == "periodic" || text == "Periodic") return BoundaryCondition::Periodic;
    if (text == "obc" || text == "open" || text == "Open") return BoundaryCondition::Open;
    fail(ErrorKind::Config, "unknown boundary condition '" + text + "' (expected pbc or obc)");
}

const char* boundary_name(BoundaryCondition bc) {
    return bc == BoundaryCondition::Periodic ? "pbc" : "obc";
}

static Config site_mask(int n_sites) {
    return n_sites >= 32 ? ~Config{0} : ((Config{1} << n_sites) - 1);
}

Config translate(Config s, int shift, int n_sites) {
    shift %= n_sites;
    if (shift < 0) shift += n_sites;
    if (shift == 0) return s;
    return ((s << shift) | (s >> (n_sites - shift))) & site_mask(n_sites);
}

Config reflect(Config s, int n_sites) {
    Config out = 0;
    for (int j = 0; j < n_sites; ++j)
        if (s >> j & 1u) out |= Config{1} << (n_sites - 1 - j);
    return out;
}

bool is_legal(Config s, int n_sites, BoundaryCondition bc) {
    if ((s & ~site_mask(n_sites)) != 0) return false;
    if (bc == BoundaryCondition::Open) return (s & (s >> 1)) == 0;
    return (s & translate(s, 1, n_sites)) == 0;
}

ConstrainedBasis::ConstrainedBasis(int n_sites, BoundaryCondition bc, std::vector<Config> states)
    : n_sites_(n_sites), bc_(bc), states_(std::move(states)) {}

std::optional<std::size_t> ConstrainedBasis::index_of(Config s) const {
    auto it = std::lower_bound(states_.begin(), states_.end(), s);
    if (it == states_.end() || *it != s) return std::nullopt;
    return static_cast<std::size_t>(it - states_.begin());
}

static void check_size(int n_sites) {
    if (n_sites < 1 || n_sites > kMaxSites)
        fail(ErrorKind::Size, "n_sites must lie in [1, 32], got " + std::to_string(n_sites));
}

ConstrainedBasis enumerate_basis(int n_sites, BoundaryCondition bc) {
    check_size(n_sites);
    std::vector<Config> out;
    out.reserve(static_cast<std::size_t>(dimension(n_sites, bc)));
    // Depth-first from the most significant site, 0 before 1, yields ascending order.
    struct Frame {
        int pos;
        Config prefix;
    };
    std::vector<Frame> stack;
    stack.push_back({n_sites - 1, 0});
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        if (f.pos < 0) {
            if (bc == BoundaryCondition::Open || is_legal(f.prefix, n_sites, bc)) out.push_back(f.prefix);
            continue;
        }
        bool upper_set = f.pos + 1 < n_sites && (f.prefix >> (f.pos + 1) & 1u);
        if (!upper_set) stack.push_back({f.pos - 1, f.prefix | (Config{1} << f.pos)});
        stack.push_back({f.pos - 1, f.prefix});
    }
    return ConstrainedBasis(n_sites, bc, std::move(out));
}

std::uint64_t dimension(int n_sites, BoundaryCondition bc) {
    check_size(n_sites);
    // f[n] counts open chains of length n without adjacent excitations.
    std::vector<std::uint64_t> f(static_cast<std::size_t>(n_sites) + 1);
    f[0] = 1;
    if (n_sites >= 1) f[1] = 2;
    for (int n = 2; n <= n_sites; ++n) f[n] = f[n - 1] + f[n - 2];
    if (bc == BoundaryCondition::Open) return f[n_sites];
    if (n_sites == 1) return 1;
    if (n_sites == 2) return 3;
    return f[n_sites - 1] + f[n_sites - 3];
}

CVector product_state(const ConstrainedBasis& basis, Config s) {
    auto idx = basis.index_of(s);
    if (!idx) fail(ErrorKind::Basis, "configuration is not blockade-legal in this basis");
    CVector v = CVector::Zero(static_cast<Eigen::Index>(basis.size()));
    v[static_cast<Eigen::Index>(*idx)] = 1.0;
    return v;
}

Config neel_config(int n_sites) {
    Config s = 0;
    for (int j = 0; j < n_sites; j += 2) s |= Config{1} << j;
    return s;
}

Config anti_neel_config(int n_sites) {
    Config s = 0;
    for (int j = 1; j < n_sites; j += 2) s |= Config{1} << j;
    return s;
}

CVector z2_state(const ConstrainedBasis& basis) {
    return product_state(basis, neel_config(basis.n_sites()));
}

CVector zplus_state(const ConstrainedBasis& basis) {
    if (basis.n_sites() % 2 != 0) fail(ErrorKind::Shape, "Z+ requires an even number of sites");
    CVector v = product_state(basis, neel_config(basis.n_sites())) +
                product_state(basis, anti_neel_config(basis.n_sites()));
    return v / std::sqrt(2.0);
}

CVector polarized_state(const ConstrainedBasis& basis) { return product_state(basis, 0); }

Parity parse_parity(const std::string& text) {
    if (text == "+1" || text == "1" || text == "+") return Parity::Even;
    if (text == "-1" || text == "-") return Parity::Odd;
    if (text == "none" || text.empty()) return Parity::None;
    fail(ErrorKind::Config, "unknown inversion parity '" + text + "' (expected +1, -1 or none)");
}

std::string parity_name(Parity p) {
    switch (p) {
    case Parity::Even: return "+1";
    case Parity::Odd: return "-1";
    case Parity::None: return "none";
    }
    return "none";
}

bool parity_allowed(int n_sites, int k) { return k == 0 || 2 * k == n_sites; }

bool SymmetrySector::is_real() const { return parity_allowed(basis_->n_sites(), k_); }

SymmetrySector::SymmetrySector(std::shared_ptr<const ConstrainedBasis> basis, int k, Parity p)
    : basis_(std::move(basis)), k_(k), p_(p) {
    const int n = basis_->n_sites();
    if (basis_->bc() != BoundaryCondition::Periodic)
        fail(ErrorKind::UnsupportedSymmetry, "momentum sectors require periodic boundaries");
    if (k < 0 || k >= n) fail(ErrorKind::UnsupportedSymmetry, "momentum index outside [0, N)");
    if (p != Parity::None && !parity_allowed(n, k))
        fail(ErrorKind::UnsupportedSymmetry, "inversion parity only resolves at k = 0 or k = N/2");

    const int n_refl = p == Parity::None ? 1 : 2;
    group_order_ = n * n_refl;
    const double sign = p == Parity::Odd ? -1.0 : 1.0;
    auto character = [&](int shift, int refl) {
        cplx c;
        if (parity_allowed(n, k)) {
            c = (k == 0 || shift % 2 == 0) ? 1.0 : -1.0;
        } else {
            double angle = -2.0 * std::numbers::pi * k * shift / n;
            c = cplx(std::cos(angle), std::sin(angle));
        }
        return refl ? sign * c : c;
    };

    const auto& states = basis_->states();
    slot_.assign(states.size(), -1);
    chi_.assign(states.size(), cplx(0.0));
    std::vector<Config> rep_of(states.size());
    std::vector<int> rep_slot(states.size(), -1);
    for (std::size_t i = 0; i < states.size(); ++i) {
        const Config t = states[i];
        Config best = t;
        int best_shift = 0, best_refl = 0;
        for (int refl = 0; refl < n_refl; ++refl) {
            Config base = refl ? reflect(t, n) : t;
            for (int j = 0; j < n; ++j) {
                Config img = translate(base, j, n);
                if (img < best) {
                    best = img;
                    best_shift = j;
                    best_refl = refl;
                }
            }
        }
        chi_[i] = std::conj(character(best_shift, best_refl));
        if (best == t) {
            double s = 0.0;
            for (int refl = 0; refl < n_refl; ++refl) {
                Config base = refl ? reflect(t, n) : t;
                for (int j = 0; j < n; ++j)
                    if (translate(base, j, n) == t) s += std::conj(character(j, refl)).real();
            }
            if (s > 0.5) {
                rep_slot[i] = static_cast<int>(representatives_.size());
                representatives_.push_back(t);
                norm_.push_back(s);
            }
            slot_[i] = rep_slot[i];
        } else {
            slot_[i] = rep_slot[*basis_->index_of(best)];
        }
    }
}

CVector SymmetrySector::expand(const CVector& sector_vec) const {
    if (static_cast<std::size_t>(sector_vec.size()) != size())
        fail(ErrorKind::Basis, "sector vector dimension does not match the sector");
    CVector full = CVector::Zero(static_cast<Eigen::Index>(basis_->size()));
    for (std::size_t i = 0; i < slot_.size(); ++i) {
        int a = slot_[i];
        if (a < 0) continue;
        full[static_cast<Eigen::Index>(i)] =
            std::conj(chi_[i]) * std::sqrt(norm_[a] / group_order_) * sector_vec[a];
    }
    return full;
}

CVector SymmetrySector::project(const CVector& full_vec) const {
    if (static_cast<std::size_t>(full_vec.size()) != basis_->size())
        fail(ErrorKind::Basis, "full vector dimension does not match the basis");
    CVector out = CVector::Zero(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < slot_.size(); ++i) {
        int a = slot_[i];
        if (a < 0) continue;
        out[a] += chi_[i] * std::sqrt(norm_[a] / group_order_) * full_vec[static_cast<Eigen::Index>(i)];
    }
    return out;
}

SymmetrySector build_sector(std::shared_ptr<const ConstrainedBasis> basis, int k, Parity p) {
    return SymmetrySector(std::move(basis), k, p);
}

SymmetrySector build_sector(const ConstrainedBasis& basis, int k, Parity p) {
    return SymmetrySector(std::make_shared<const ConstrainedBasis>(basis), k, p);
}

}  // namespace scarsim
