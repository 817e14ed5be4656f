#include "kd/characters.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace kd {

Turn Turn::make(i64 num, u64 den) {
    if (den == 0) throw std::invalid_argument("Turn: zero denominator");
    u64 r = mod_floor(num, den);
    u64 g = gcd(r, den);
    if (r == 0) return {0, 1};
    return {r / g, den / g};
}

Turn Turn::operator+(const Turn& o) const {
    u64 l = lcm(den, o.den);
    u64 a = u64((u128(num) * (l / den) + u128(o.num) * (l / o.den)) % l);
    u64 g = gcd(a, l);
    if (a == 0) return {0, 1};
    return {a / g, l / g};
}

Turn Turn::operator-() const {
    if (num == 0) return *this;
    return {den - num, den};
}

Turn Turn::times(i64 k) const {
    u64 km = mod_floor(k, den);
    u64 a = mulmod(num, km, den);
    if (a == 0) return {0, 1};
    u64 g = gcd(a, den);
    return {a / g, den / g};
}

cplx Turn::value() const { return e_frac(i64(num), den); }

cplx e_frac(i64 num, u64 den) {
    if (den == 0) throw std::invalid_argument("e_frac: zero denominator");
    u64 r = mod_floor(num, den);
    if (r == 0) return {1.0, 0.0};
    if (2 * u128(r) == den) return {-1.0, 0.0};
    if (4 * u128(r) == den) return {0.0, 1.0};
    if (4 * u128(r) == 3 * u128(den)) return {0.0, -1.0};
    // symmetric representative keeps the angle small
    long double x = (2 * u128(r) > den) ? -(long double)(den - r) / den : (long double)r / den;
    long double a = 2.0L * std::numbers::pi_v<long double> * x;
    return {double(std::cos(a)), double(std::sin(a))};
}

namespace {

u64 primitive_root_mod_p(u64 p) {
    if (p == 2) return 1;
    FactoredInt f = factorize(p - 1);
    for (u64 g = 2;; ++g) {
        bool ok = true;
        for (const auto& pp : f.factors) {
            if (powmod(g, (p - 1) / pp.p, p) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return g;
    }
}

u64 lift_generator(u64 g, u64 comp_mod, u64 q) {
    u64 rest = q / comp_mod;
    auto r = crt(g % comp_mod, comp_mod, 1 % rest, rest);
    return r->r;
}

constexpr u64 kTableLimit = 1000000;

}  // namespace

UnitGroup::UnitGroup(u64 q) : q_(q), phi_(1), exponent_(1) {
    if (q == 0) throw std::invalid_argument("unit_group: modulus must be positive");
    FactoredInt f = factorize(q);
    for (const auto& pp : f.factors) {
        u64 pe = ipow(pp.p, pp.e);
        if (pp.p == 2) {
            if (pp.e == 1) continue;
            comps_.push_back({ComponentKind::TwoSign, 2, pp.e, pe, pe - 1, 2, 0});
            if (pp.e >= 3) comps_.push_back({ComponentKind::TwoFive, 2, pp.e, pe, 5, pe / 4, 0});
        } else {
            u64 g = primitive_root_mod_p(pp.p);
            if (pp.e > 1 && powmod(g, pp.p - 1, pp.p * pp.p) == 1) g += pp.p;
            comps_.push_back({ComponentKind::Cyclic, pp.p, pp.e, pe, g % pe, pe / pp.p * (pp.p - 1), 0});
        }
    }
    for (auto& c : comps_) {
        c.global_generator = lift_generator(c.generator, c.modulus, q);
        phi_ *= c.order;
        exponent_ = lcm(exponent_, c.order);
    }
    tables_.resize(comps_.size());
    for (size_t i = 0; i < comps_.size(); ++i) {
        const auto& c = comps_[i];
        if (c.kind == ComponentKind::TwoSign || c.modulus > kTableLimit) continue;
        auto& t = tables_[i];
        t.assign(c.modulus, std::uint32_t(-1));
        u64 x = 1;
        for (u64 k = 0; k < c.order; ++k) {
            t[x] = std::uint32_t(k);
            x = mulmod(x, c.generator, c.modulus);
        }
    }
}

u64 UnitGroup::dlog(size_t i, u64 x) const {
    const auto& c = comps_[i];
    if (!tables_[i].empty()) return tables_[i][x];
    // baby-step giant-step
    u64 m = isqrt(c.order) + 1;
    std::unordered_map<u64, u64> baby;
    u64 e = 1;
    for (u64 j = 0; j < m; ++j) {
        baby.emplace(e, j);
        e = mulmod(e, c.generator, c.modulus);
    }
    u64 giant = powmod(*modinv(i64(c.generator), c.modulus), m, c.modulus);
    u64 y = x;
    for (u64 k = 0; k <= m; ++k) {
        auto it = baby.find(y);
        if (it != baby.end()) return (k * m + it->second) % c.order;
        y = mulmod(y, giant, c.modulus);
    }
    throw std::logic_error("discrete log not found");
}

std::optional<std::vector<u64>> UnitGroup::log(i64 n) const {
    u64 r = mod_floor(n, q_);
    if (gcd(r, q_) != 1) return std::nullopt;
    std::vector<u64> out(comps_.size());
    for (size_t i = 0; i < comps_.size(); ++i) {
        const auto& c = comps_[i];
        u64 x = r % c.modulus;
        switch (c.kind) {
            case ComponentKind::Cyclic:
                out[i] = dlog(i, x);
                break;
            case ComponentKind::TwoSign:
                out[i] = (x % 4 == 3) ? 1 : 0;
                break;
            case ComponentKind::TwoFive:
                if (x % 4 == 3) x = c.modulus - x;
                out[i] = dlog(i, x);
                break;
        }
    }
    return out;
}

u64 UnitGroup::element(const std::vector<u64>& exps) const {
    u64 x = 1 % q_;
    for (size_t i = 0; i < comps_.size(); ++i)
        x = mulmod(x, powmod(comps_[i].global_generator, exps[i] % comps_[i].order, q_), q_);
    return x;
}

std::shared_ptr<const UnitGroup> unit_group(u64 q) {
    static std::mutex mu;
    static std::map<u64, std::shared_ptr<const UnitGroup>> cache;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(q);
        if (it != cache.end()) return it->second;
    }
    auto g = std::make_shared<const UnitGroup>(q);
    std::lock_guard<std::mutex> lock(mu);
    return cache.emplace(q, g).first->second;
}

DirichletCharacter::DirichletCharacter(std::shared_ptr<const UnitGroup> g, std::vector<u64> exps)
    : g_(std::move(g)), exps_(std::move(exps)) {
    const auto& comps = g_->components();
    if (exps_.size() != comps.size()) throw std::invalid_argument("character: exponent vector size mismatch");
    for (size_t i = 0; i < comps.size(); ++i) exps_[i] %= comps[i].order;

    // conductor from the exponent vector, prime by prime
    conductor_ = 1;
    Turn minus_one{0, 1};
    for (size_t i = 0; i < comps.size(); ++i) {
        const auto& c = comps[i];
        u64 a = exps_[i];
        if (c.kind == ComponentKind::Cyclic) {
            if (a != 0) {
                unsigned v = std::min(valuation(a, c.prime), c.exponent - 1);
                conductor_ *= ipow(c.prime, c.exponent - v);
            }
            minus_one = minus_one + Turn::make(i64(a), 2);
        } else if (c.kind == ComponentKind::TwoSign) {
            bool five_trivial = true;
            if (i + 1 < comps.size() && comps[i + 1].kind == ComponentKind::TwoFive) five_trivial = exps_[i + 1] == 0;
            if (five_trivial) {
                if (a != 0) conductor_ *= 4;
            } else {
                unsigned v = valuation(exps_[i + 1], 2);
                conductor_ *= ipow(2, c.exponent - v);
            }
            minus_one = minus_one + Turn::make(i64(a), 2);
        }
    }
    kappa_ = minus_one.num == 0 ? 0 : 1;
}

std::optional<Turn> DirichletCharacter::turn(i64 n) const {
    auto lg = g_->log(n);
    if (!lg) return std::nullopt;
    const auto& comps = g_->components();
    u64 E = g_->exponent();
    u128 s = 0;
    for (size_t i = 0; i < comps.size(); ++i) {
        u128 term = u128(exps_[i]) * (*lg)[i] % comps[i].order;
        s = (s + term * (E / comps[i].order)) % E;
    }
    return Turn::make(i64(s), E);
}

cplx DirichletCharacter::operator()(i64 n) const {
    auto t = turn(n);
    return t ? t->value() : cplx(0.0, 0.0);
}

std::vector<cplx> DirichletCharacter::table() const {
    u64 q = modulus();
    std::vector<cplx> out(q, cplx(0.0, 0.0));
    // walk the group once: element(exps) enumerates every unit
    const auto& comps = g_->components();
    u64 E = g_->exponent();
    std::vector<cplx> roots(E);
    for (u64 j = 0; j < E; ++j) roots[j] = e_frac(i64(j), E);
    std::vector<u64> idx(comps.size(), 0);
    while (true) {
        u64 x = 1 % q;
        u64 s = 0;
        for (size_t i = 0; i < comps.size(); ++i) {
            x = mulmod(x, powmod(comps[i].global_generator, idx[i], q), q);
            s = (s + (exps_[i] * idx[i] % comps[i].order) * (E / comps[i].order)) % E;
        }
        out[x] = roots[s];
        size_t i = 0;
        for (; i < comps.size(); ++i) {
            if (++idx[i] < comps[i].order) break;
            idx[i] = 0;
        }
        if (i == comps.size()) break;
    }
    return out;
}

bool DirichletCharacter::is_principal() const {
    for (u64 a : exps_)
        if (a) return false;
    return true;
}

u64 DirichletCharacter::order() const {
    u64 o = 1;
    const auto& comps = g_->components();
    for (size_t i = 0; i < comps.size(); ++i) o = lcm(o, comps[i].order / gcd(exps_[i], comps[i].order));
    return o;
}

DirichletCharacter DirichletCharacter::conj() const {
    std::vector<u64> e = exps_;
    const auto& comps = g_->components();
    for (size_t i = 0; i < comps.size(); ++i) e[i] = (comps[i].order - e[i]) % comps[i].order;
    return DirichletCharacter(g_, std::move(e));
}

DirichletCharacter DirichletCharacter::operator*(const DirichletCharacter& o) const {
    if (modulus() != o.modulus()) throw std::invalid_argument("character product: moduli differ");
    std::vector<u64> e = exps_;
    const auto& comps = g_->components();
    for (size_t i = 0; i < comps.size(); ++i) e[i] = (e[i] + o.exps_[i]) % comps[i].order;
    return DirichletCharacter(g_, std::move(e));
}

std::vector<DirichletCharacter> all_characters(u64 q) {
    auto g = unit_group(q);
    const auto& comps = g->components();
    std::vector<DirichletCharacter> out;
    std::vector<u64> idx(comps.size(), 0);
    // lexicographic: first component most significant
    while (true) {
        out.emplace_back(g, idx);
        size_t i = comps.size();
        while (i > 0) {
            --i;
            if (++idx[i] < comps[i].order) break;
            idx[i] = 0;
            if (i == 0) return out;
        }
        if (comps.empty()) return out;
    }
}

DirichletCharacter principal_character(u64 q) {
    auto g = unit_group(q);
    return DirichletCharacter(g, std::vector<u64>(g->components().size(), 0));
}

DirichletCharacter induce(const DirichletCharacter& chi, u64 q) {
    u64 f = chi.modulus();
    if (q % f) throw std::invalid_argument("induce: modulus does not divide target");
    return character_from_values(unit_group(q), [&](u64 g) { return *chi.turn(i64(g % f)); });
}

DirichletCharacter primitive_part(const DirichletCharacter& chi) {
    u64 q = chi.modulus();
    u64 f = chi.conductor();
    return character_from_values(unit_group(f), [&](u64 g) {
        for (u64 x = g;; x += f) {
            if (gcd(x, q) == 1) return *chi.turn(i64(x));
        }
    });
}

DirichletCharacter crt_component(const DirichletCharacter& chi, u64 d) {
    u64 q = chi.modulus();
    if (d == 0 || q % d || gcd(d, q / d) != 1) throw std::invalid_argument("crt_component: d must be a unitary divisor");
    u64 rest = q / d;
    return character_from_values(unit_group(d), [&](u64 g) {
        u64 y = crt(g % d, d, 1 % rest, rest)->r;
        return *chi.turn(i64(y));
    });
}

std::vector<DirichletCharacter> chars_with_conductor_at_most(u64 q, u64 R) {
    std::vector<DirichletCharacter> out;
    for (auto& c : all_characters(q))
        if (c.conductor() <= R) out.push_back(c);
    return out;
}

cplx gauss_sum(const DirichletCharacter& chi) {
    u64 q = chi.modulus();
    // weights per exact angle, summed once
    std::map<std::pair<u64, u64>, u64> counts;
    for (u64 a = 0; a < q; ++a) {
        auto t = chi.turn(i64(a));
        if (!t) continue;
        Turn s = *t + Turn::make(i64(a), q);
        ++counts[{s.num, s.den}];
    }
    cplx z = 0;
    for (const auto& [k, n] : counts) z += double(n) * e_frac(i64(k.first), k.second);
    return z;
}

cplx incomplete_char_sum(const DirichletCharacter& chi, i64 M, u64 N) {
    u64 q = chi.modulus();
    auto tab = chi.table();
    u64 start = mod_floor(M + 1, q);
    // full periods vanish unless chi is principal
    u64 full = N / q;
    cplx z = 0;
    if (full && chi.is_principal()) z += double(full) * double(chi.group().order());
    u64 rem = N % q;
    for (u64 i = 0; i < rem; ++i) z += tab[(start + i) % q];
    return z;
}

double polya_vinogradov_ratio(const DirichletCharacter& chi, i64 M, u64 N) {
    u64 r = chi.conductor();
    if (r == 1) throw std::invalid_argument("polya_vinogradov_ratio: conductor must exceed 1");
    double bound = double(tau_k(factorize(chi.modulus() / r), 2)) * std::sqrt(double(r)) * std::log(double(r));
    return std::abs(incomplete_char_sum(chi, M, N)) / bound;
}

std::vector<double> family_sum_table(u64 q, u64 R) {
    std::vector<double> out(q, 0.0);
    for (const auto& c : chars_with_conductor_at_most(q, R)) {
        auto t = c.table();
        for (u64 n = 0; n < q; ++n) out[n] += t[n].real();
    }
    return out;
}

}  // namespace kd
