#pragma once

#include <complex>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "kd/arith.hpp"

namespace kd {

using cplx = std::complex<double>;

// exact angle num/den of a full turn, 0 <= num < den, reduced
struct Turn {
    u64 num = 0;
    u64 den = 1;

    static Turn make(i64 num, u64 den);
    Turn operator+(const Turn& o) const;
    Turn operator-() const;
    Turn operator-(const Turn& o) const { return *this + (-o); }
    Turn times(i64 k) const;
    bool operator==(const Turn&) const = default;
    cplx value() const;
};

// e(num/den) from the reduced fraction
cplx e_frac(i64 num, u64 den);

enum class ComponentKind { Cyclic, TwoSign, TwoFive };

struct UnitComponent {
    ComponentKind kind;
    u64 prime;
    unsigned exponent;   // component modulus is prime^exponent
    u64 modulus;
    u64 generator;       // residue mod component modulus
    u64 order;
    u64 global_generator;  // unit mod q, == generator on this component, 1 on the others
};

class UnitGroup {
public:
    explicit UnitGroup(u64 q);

    u64 modulus() const { return q_; }
    u64 order() const { return phi_; }
    u64 exponent() const { return exponent_; }
    const std::vector<UnitComponent>& components() const { return comps_; }

    // exponent vector of a unit; nullopt when gcd(n, q) > 1
    std::optional<std::vector<u64>> log(i64 n) const;
    u64 element(const std::vector<u64>& exps) const;

private:
    u64 dlog(size_t i, u64 x) const;

    u64 q_;
    u64 phi_;
    u64 exponent_;
    std::vector<UnitComponent> comps_;
    std::vector<std::vector<std::uint32_t>> tables_;  // residue -> log, empty when BSGS is used
};

std::shared_ptr<const UnitGroup> unit_group(u64 q);

class DirichletCharacter {
public:
    DirichletCharacter(std::shared_ptr<const UnitGroup> g, std::vector<u64> exps);

    u64 modulus() const { return g_->modulus(); }
    const std::vector<u64>& exponents() const { return exps_; }
    const UnitGroup& group() const { return *g_; }
    std::shared_ptr<const UnitGroup> group_ptr() const { return g_; }

    std::optional<Turn> turn(i64 n) const;
    cplx operator()(i64 n) const;
    // chi(n) for n = 0..q-1
    std::vector<cplx> table() const;

    u64 conductor() const { return conductor_; }
    int parity() const { return kappa_; }
    bool is_principal() const;
    bool is_primitive() const { return conductor_ == modulus(); }
    u64 order() const;
    DirichletCharacter conj() const;
    DirichletCharacter operator*(const DirichletCharacter& o) const;

    bool operator==(const DirichletCharacter& o) const {
        return modulus() == o.modulus() && exps_ == o.exps_;
    }

private:
    std::shared_ptr<const UnitGroup> g_;
    std::vector<u64> exps_;
    u64 conductor_ = 1;
    int kappa_ = 0;
};

std::vector<DirichletCharacter> all_characters(u64 q);
DirichletCharacter principal_character(u64 q);

// character of the group determined by its values on the global generators
template <class F>
DirichletCharacter character_from_values(std::shared_ptr<const UnitGroup> g, F value_at);

DirichletCharacter induce(const DirichletCharacter& chi, u64 q);
DirichletCharacter primitive_part(const DirichletCharacter& chi);
inline bool is_primitive(const DirichletCharacter& chi) { return chi.is_primitive(); }
// for d | q with gcd(d, q/d) = 1: the factor chi_d with chi = chi_d * chi_{q/d}
DirichletCharacter crt_component(const DirichletCharacter& chi, u64 d);

std::vector<DirichletCharacter> chars_with_conductor_at_most(u64 q, u64 R);

cplx gauss_sum(const DirichletCharacter& chi);
// sum over M < n <= M + N
cplx incomplete_char_sum(const DirichletCharacter& chi, i64 M, u64 N);
// |sum| / (tau(q/r) sqrt(r) log r); requires conductor r != 1
double polya_vinogradov_ratio(const DirichletCharacter& chi, i64 M, u64 N);

// sum of chi(n) over chi in X_q(R), for n = 0..q-1 (real by conjugation symmetry)
std::vector<double> family_sum_table(u64 q, u64 R);

template <class F>
DirichletCharacter character_from_values(std::shared_ptr<const UnitGroup> g, F value_at) {
    std::vector<u64> exps;
    for (const auto& c : g->components()) {
        Turn t = value_at(c.global_generator);
        u128 a = u128(t.num) * c.order;
        if (a % t.den) throw std::invalid_argument("character_from_values: value is not an order-th root of unity");
        exps.push_back(u64(a / t.den));
    }
    return DirichletCharacter(std::move(g), std::move(exps));
}

}  // namespace kd
