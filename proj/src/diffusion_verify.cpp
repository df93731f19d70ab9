/*
   Copyright 2026 The mdlang Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "mdl/diffusion_verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mdl/errors.hpp"

namespace mdl {

CNumberState CNumberState::from_density(const DensityMatrix& rho, const ThreeLevelMap& map,
                                        const ThreeLevelRates& rates, double m, double kappa,
                                        double n_th)
{
    CNumberState s;
    const ThreeLevelView v = ThreeLevelView::from_density(rho, map);
    s.a[kAc] = m;
    s.a[kA] = m;
    s.a[kS23] = v.s23;
    s.a[kS31] = v.s31;
    s.a[kS21] = v.s21;
    s.a[kS23c] = std::conj(v.s23);
    s.a[kS31c] = std::conj(v.s31);
    s.a[kS21c] = std::conj(v.s21);
    s.a[kS33] = v.p3;
    s.a[kS22] = v.p2;
    s.a[kS11] = v.p1;
    s.params.rates = rates;
    s.params.g = 1.0;
    s.params.kappa = kappa;
    s.params.n_th = n_th;
    return s;
}

namespace {

struct PairInfo {
    CorrelationPair pair;
    const char* label;
};

constexpr PairInfo kPairs[] = {
    {CorrelationPair::kFaDagFa, "Fa+Fa"},
    {CorrelationPair::kFaFaDag, "FaFa+"},
    {CorrelationPair::kF23DagF23, "F23+F23"},
    {CorrelationPair::kF23F23Dag, "F23F23+"},
    {CorrelationPair::kF31DagF31, "F31'+F31'"},
    {CorrelationPair::kF31F31Dag, "F31'F31'+"},
    {CorrelationPair::kF21DagF21, "F21'+F21'"},
    {CorrelationPair::kF21F21Dag, "F21'F21'+"},
    {CorrelationPair::kF33F33, "F33F33"},
    {CorrelationPair::kF22F22, "F22F22"},
    {CorrelationPair::kF11F11, "F1'1'F1'1'"},
};

} // namespace

CorrelationPair correlation_pair_from_label(const std::string& l)
{
    for (const auto& p : kPairs)
        if (l == p.label)
            return p.pair;
    throw DomainError("unknown correlation pair '" + l + "'");
}

std::string label(CorrelationPair pair)
{
    for (const auto& p : kPairs)
        if (p.pair == pair)
            return p.label;
    return "?";
}

std::vector<CorrelationPair> all_correlation_pairs()
{
    std::vector<CorrelationPair> out;
    for (const auto& p : kPairs)
        out.push_back(p.pair);
    return out;
}

double quantum_correlation(CorrelationPair pair, const CNumberState& s)
{
    const ThreeLevelRates& r = s.params.rates;
    const double p3 = s.a[kS33].real(), p2 = s.a[kS22].real(), p1 = s.a[kS11].real();
    const double it3 = r.r23 + r.r13, it2 = r.r32 + r.r12, it1 = r.r21 + r.r31;
    switch (pair) {
    case CorrelationPair::kFaDagFa:
        return s.params.kappa * s.params.n_th;
    case CorrelationPair::kFaFaDag:
        return s.params.kappa * (s.params.n_th + 1.0);
    case CorrelationPair::kF23DagF23:
        return (2.0 * r.g23 - it3) * p3 + r.r32 * p2 + r.r31 * p1;
    case CorrelationPair::kF23F23Dag:
        return r.r23 * p3 + (2.0 * r.g23 - it2) * p2 + r.r21 * p1;
    case CorrelationPair::kF31DagF31:
        return r.r13 * p3 + r.r12 * p2 + (2.0 * r.g13 - it1) * p1;
    case CorrelationPair::kF31F31Dag:
        return (2.0 * r.g13 - it3) * p3 + r.r32 * p2 + r.r31 * p1;
    case CorrelationPair::kF21DagF21:
        return r.r13 * p3 + r.r12 * p2 + (2.0 * r.g12 - it1) * p1;
    case CorrelationPair::kF21F21Dag:
        return r.r23 * p3 + (2.0 * r.g12 - it2) * p2 + r.r21 * p1;
    case CorrelationPair::kF33F33:
        return it3 * p3 + r.r32 * p2 + r.r31 * p1;
    case CorrelationPair::kF22F22:
        return r.r23 * p3 + it2 * p2 + r.r21 * p1;
    case CorrelationPair::kF11F11:
        return r.r13 * p3 + r.r12 * p2 + it1 * p1;
    }
    throw DomainError("unknown correlation pair");
}

double quantum_correlation(const std::string& pair, const CNumberState& state)
{
    return quantum_correlation(correlation_pair_from_label(pair), state);
}

CMatrix11 cnumber_diffusion_matrix(const CNumberState& st)
{
    const ThreeLevelRates& r = st.params.rates;
    const cd i(0.0, 1.0);
    const cd ga = st.ga(), gac = st.gac();
    const cd s23 = st.a[kS23], s31 = st.a[kS31], s21 = st.a[kS21];
    const cd s23c = st.a[kS23c], s31c = st.a[kS31c], s21c = st.a[kS21c];
    const double p3 = st.a[kS33].real(), p2 = st.a[kS22].real(), p1 = st.a[kS11].real();
    const double om = r.omega;

    CMatrix11 d = CMatrix11::Zero();
    auto set = [&](int a, int b, cd v) {
        d(a, b) = v;
        d(b, a) = v;
    };

    set(kAc, kA, st.params.kappa * st.params.n_th);

    set(kS23c, kS23c, -2.0 * i * gac * s23c);
    set(kS23c, kS31c, i * gac * s31c);
    set(kS23c, kS21c, -i * gac * s21c);
    set(kS23c, kS33, -r.r32 * s23c);
    set(kS23c, kS22, (r.r32 + r.r12) * s23c);
    set(kS23c, kS11, -r.r12 * s23c);
    set(kS23c, kS21, (r.g23 + r.g12 - r.g13) * s31);
    set(kS23c, kS23, (2.0 * r.g23 - r.r23 - r.r13) * p3 + r.r32 * p2);

    set(kS31c, kS31c, 2.0 * i * om * s31c);
    set(kS31c, kS33, -i * ga * s21c + (r.r23 + r.r13) * s31c);
    set(kS31c, kS22, i * ga * s21c - r.r23 * s31c);
    set(kS31c, kS11, -r.r13 * s31c);
    set(kS31c, kS31, (2.0 * r.g13 - r.r21 - r.r31) * p1 + r.r12 * p2 + r.r13 * p3);

    set(kS21c, kS33, -r.r32 * s21c);
    set(kS21c, kS22, (r.r32 + r.r12) * s21c);
    set(kS21c, kS11, -r.r12 * s21c);
    set(kS21c, kS21, (2.0 * r.g12 - r.r21 - r.r31) * p1 + r.r12 * p2 + r.r13 * p3);
    set(kS21c, kS23, (r.g23 + r.g12 - r.g13) * s31c);

    const cd x = i * (gac * s23 - ga * s23c);
    const cd y = i * om * (s31c - s31);
    set(kS33, kS33, (r.r23 + r.r13) * p3 + r.r32 * p2 + r.r31 * p1 + x + y);
    set(kS33, kS22, -r.r32 * p2 - r.r23 * p3 - x);
    set(kS33, kS11, -y - r.r31 * p1 - r.r13 * p3);
    set(kS22, kS22, r.r23 * p3 + (r.r32 + r.r12) * p2 + r.r21 * p1 + x);
    set(kS22, kS11, -r.r21 * p1 - r.r12 * p2);
    set(kS11, kS11, r.r12 * p2 + (r.r21 + r.r31) * p1 + y + r.r13 * p3);

    set(kS33, kS21, -r.r32 * s21);
    set(kS33, kS31, i * gac * s21 + (r.r23 + r.r13) * s31);
    set(kS33, kS23, -r.r32 * s23);
    set(kS22, kS21, (r.r32 + r.r12) * s21);
    set(kS22, kS31, -i * gac * s21 - r.r23 * s31);
    set(kS22, kS23, (r.r32 + r.r12) * s23);
    set(kS11, kS21, -r.r12 * s21);
    set(kS11, kS31, -r.r13 * s31);
    set(kS11, kS23, -r.r12 * s23);

    set(kS21, kS23, i * ga * s21);
    set(kS31, kS31, -2.0 * i * om * s31);
    set(kS31, kS23, -i * ga * s31);
    set(kS23, kS23, 2.0 * i * ga * s23);
    return d;
}

Factor block_factor(BlockFamily family, cd a, cd b, cd c, bool coherence_variant)
{
    const cd i(0.0, 1.0);
    Factor f;
    switch (family) {
    case BlockFamily::kCoherencePopulation:
        f.resize(4, 2);
        f << a, -i * a, -b, -i * c, b, i * c, std::conj(a), i * std::conj(a);
        break;
    case BlockFamily::kPopulationPair:
        f.resize(2, 1);
        if (coherence_variant)
            f << a, std::conj(a);
        else
            f << a, -a;
        break;
    case BlockFamily::kCoherenceCross:
        f.resize(4, 2);
        f << a, i * a, b, -i * b, c, i * c, std::conj(a), -i * std::conj(a);
        break;
    case BlockFamily::kConjugatePair:
        f.resize(2, 2);
        f << a, i * a, a, -i * a;
        break;
    }
    return f;
}

Factor block_matrix(BlockFamily family, cd a, cd b, cd c, bool coherence_variant)
{
    const cd ac = std::conj(a);
    Factor d;
    switch (family) {
    case BlockFamily::kCoherencePopulation:
        d.resize(4, 4);
        d << 0.0, -a * b - a * c, a * b + a * c, 2.0 * std::norm(a),
            -a * b - a * c, b * b - c * c, -b * b + c * c, -ac * b + ac * c,
            a * b + a * c, -b * b + c * c, b * b - c * c, ac * b - ac * c,
            2.0 * std::norm(a), -ac * b + ac * c, ac * b - ac * c, 0.0;
        break;
    case BlockFamily::kPopulationPair:
        d.resize(2, 2);
        if (coherence_variant)
            d << a * a, std::norm(a), std::norm(a), ac * ac;
        else
            d << a * a, -a * a, -a * a, a * a;
        break;
    case BlockFamily::kCoherenceCross:
        d.resize(4, 4);
        d << 0.0, 2.0 * a * b, 0.0, 2.0 * std::norm(a),
            2.0 * a * b, 0.0, 2.0 * b * c, 0.0,
            0.0, 2.0 * b * c, 0.0, 2.0 * ac * c,
            2.0 * std::norm(a), 0.0, 2.0 * ac * c, 0.0;
        break;
    case BlockFamily::kConjugatePair:
        d.resize(2, 2);
        d << 0.0, 2.0 * a * a, 2.0 * a * a, 0.0;
        break;
    }
    return d;
}

std::string cnumber_label(int k)
{
    static const char* names[11] = {"a*",  "a",   "s23*", "s31'*", "s21'*", "s33",
                                    "s22", "s1'1'", "s21'", "s31'", "s23"};
    return (k >= 0 && k < 11) ? names[k] : "?";
}

NoiseAssembly assemble_noise_matrix(const CNumberState& st, double rel_tol)
{
    const ThreeLevelRates& r = st.params.rates;
    const cd i(0.0, 1.0);
    const cd ga = st.ga();
    const double m = ga.real();
    const cd rho32 = st.a[kS23], rho13 = st.a[kS31], rho12 = st.a[kS21];
    const cd rho23 = st.a[kS23c], rho31 = st.a[kS31c], rho21 = st.a[kS21c];
    const double p3 = st.a[kS33].real(), p2 = st.a[kS22].real(), p1 = st.a[kS11].real();
    const double a32 = std::norm(rho32), a13 = std::norm(rho13), a12 = std::norm(rho12);
    auto csqrt = [](double x) { return std::sqrt(cd(x, 0.0)); };

    NoiseAssembly out;
    auto cp = [&](int sa, int pa, int pb, int sb, cd a, int eta, double s, cd z,
                  const char* tag) {
        const cd b = double(eta) * s * z.real();
        const cd c = -i * double(eta) * s * z.imag();
        out.blocks.push_back(
            {BlockFamily::kCoherencePopulation, false, {sa, pa, pb, sb}, a, b, c, tag});
    };
    const double sr32 = std::sqrt(r.r32), sr23 = std::sqrt(r.r23);
    const double sr12 = std::sqrt(r.r12), sr13 = std::sqrt(r.r13);

    cp(kS23c, kS33, kS22, kS23, sr32, +1, sr32, rho32, "r32 (s23*,s33,s22,s23)");
    cp(kS31c, kS33, kS11, kS31, sr13, -1, sr13, rho13, "r1'3 (s31'*,s33,s1'1',s31')");
    cp(kS21c, kS22, kS11, kS21, sr12, -1, sr12, rho12, "r1'2 (s21'*,s22,s1'1',s21')");
    cp(kS23c, kS22, kS11, kS23, sr12, -1, sr12, rho32, "r1'2 (s23*,s22,s1'1',s23)");
    cp(kS31c, kS33, kS22, kS31, sr23, -1, sr23, rho13, "r23 (s31'*,s33,s22,s31')");
    cp(kS31c, kS33, kS22, kS31, i * m, +1, 1.0, rho12, "field (s31'*,s33,s22,s31')");
    cp(kS21c, kS33, kS22, kS21, sr32, +1, sr32, rho12, "r32 (s21'*,s33,s22,s21')");

    const double x21 = -(r.r32 + 1.0) * a12 + r.r23 * (p3 - a13) + r.r32 * (p2 - a32) -
                       2.0 * m * rho32.imag();
    const double x22 = -2.0 * r.omega * rho31.imag() + r.r31 * p1 + r.r13 * (p3 - a13);
    const double x23 = r.r21 * p1 - r.r12 * (a12 - p2 + a32);
    out.blocks.push_back({BlockFamily::kPopulationPair, false, {kS33, kS22}, csqrt(x21), 0.0,
                          0.0, "occupation (s33,s22)"});
    out.blocks.push_back({BlockFamily::kPopulationPair, false, {kS33, kS11}, csqrt(x22), 0.0,
                          0.0, "occupation (s33,s1'1')"});
    out.blocks.push_back({BlockFamily::kPopulationPair, false, {kS22, kS11}, csqrt(x23), 0.0,
                          0.0, "occupation (s22,s1'1')"});
    out.blocks.push_back({BlockFamily::kPopulationPair, true, {kS23c, kS23},
                          std::sqrt(-2.0 * i * m * rho23), 0.0, 0.0, "coherence (s23*,s23)"});
    out.blocks.push_back({BlockFamily::kPopulationPair, true, {kS31c, kS31},
                          std::sqrt(2.0 * i * r.omega * rho31), 0.0, 0.0,
                          "coherence (s31'*,s31')"});

    const cd sgs = csqrt(0.5 * (r.g12 - r.g13 + r.g23));
    out.blocks.push_back({BlockFamily::kCoherenceCross, false, {kS23c, kS31c, kS31, kS23},
                          0.5 * i * m, rho31, rho13, "cross (s23*,s31'*,s31',s23)"});
    out.blocks.push_back({BlockFamily::kCoherenceCross, false, {kS23c, kS21c, kS21, kS23},
                          -0.5 * i * m, rho21, rho12, "cross (s23*,s21'*,s21',s23)"});
    out.blocks.push_back({BlockFamily::kCoherenceCross, false, {kS23c, kS21, kS21c, kS23}, sgs,
                          sgs * rho13, sgs * rho31, "cross (s23*,s21',s21'*,s23)"});

    // the [a, a*] coherence variant adds +|a|^2 to the (s*, s) entries
    const double x41 = 0.5 * (r.g13 - r.g12 - r.g23) + 0.5 * r.r32 * p2 +
                       0.5 * (2.0 * r.g23 - r.r13 - r.r23) * p3 - 0.5 * m * m - r.r12 - r.r32 -
                       std::abs(m * rho32);
    const double x42 = 0.5 * (2.0 * r.g13 - r.r21 - r.r31) * p1 + 0.5 * r.r12 * p2 - a13 +
                       0.5 * r.r13 * p3 - m * m - r.r13 - r.r23 - std::abs(r.omega * rho13);
    const double x43 = 0.5 * (2.0 * r.g12 - r.r21 - r.r31) * p1 + 0.5 * r.r12 * p2 - a12 +
                       0.5 * r.r13 * p3 - r.r12 - r.r32 + 0.5 * (r.g13 - r.g12 - r.g23) * a13;
    out.blocks.push_back({BlockFamily::kConjugatePair, false, {kS23c, kS23}, csqrt(x41), 0.0,
                          0.0, "conjugate (s23*,s23)"});
    out.blocks.push_back({BlockFamily::kConjugatePair, false, {kS31c, kS31}, csqrt(x42), 0.0,
                          0.0, "conjugate (s31'*,s31')"});
    out.blocks.push_back({BlockFamily::kConjugatePair, false, {kS21c, kS21}, csqrt(x43), 0.0,
                          0.0, "conjugate (s21'*,s21')"});
    out.blocks.push_back({BlockFamily::kConjugatePair, false, {kAc, kA},
                          csqrt(0.5 * st.params.kappa * st.params.n_th), 0.0, 0.0,
                          "field (a*,a)"});

    int cols = 0;
    for (const auto& b : out.blocks)
        cols += (b.family == BlockFamily::kPopulationPair) ? 1 : 2;
    out.b = Eigen::Matrix<cd, 11, Eigen::Dynamic>::Zero(11, cols);
    int col = 0;
    for (const auto& b : out.blocks) {
        const Factor f = block_factor(b.family, b.a, b.b, b.c, b.coherence_variant);
        for (int rr = 0; rr < f.rows(); ++rr)
            for (int cc = 0; cc < f.cols(); ++cc)
                out.b(b.rows[rr], col + cc) += f(rr, cc);
        col += static_cast<int>(f.cols());
    }

    const CMatrix11 d = cnumber_diffusion_matrix(st);
    out.residual = d - out.b * out.b.transpose();
    out.scale = d.cwiseAbs().maxCoeff();
    // block products cancel at zero state; measure against their size too
    const double bmax = out.b.cwiseAbs().maxCoeff();
    const double tol = rel_tol * std::max(out.scale, bmax * bmax);
    for (int a = 0; a < 11; ++a)
        for (int b = a; b < 11; ++b)
            if (std::abs(out.residual(a, b)) > tol) {
                std::ostringstream os;
                os << "(" << cnumber_label(a) << "," << cnumber_label(b)
                   << ") residual " << std::abs(out.residual(a, b));
                out.offending.push_back(os.str());
            }
    return out;
}

std::array<ComplexMatrix, 2> pair_operators(CorrelationPair pair, const ThreeLevelMap& map)
{
    auto ket_bra = [](int i, int j) {
        ComplexMatrix m = ComplexMatrix::Zero(3, 3);
        m(i, j) = 1.0;
        return m;
    };
    const int i1 = map.injector, i2 = map.lower, i3 = map.upper;
    const ComplexMatrix s23 = ket_bra(i2, i3), s31 = ket_bra(i3, i1), s21 = ket_bra(i2, i1);
    switch (pair) {
    case CorrelationPair::kF23DagF23:
        return {s23.adjoint(), s23};
    case CorrelationPair::kF23F23Dag:
        return {s23, s23.adjoint()};
    case CorrelationPair::kF31DagF31:
        return {s31.adjoint(), s31};
    case CorrelationPair::kF31F31Dag:
        return {s31, s31.adjoint()};
    case CorrelationPair::kF21DagF21:
        return {s21.adjoint(), s21};
    case CorrelationPair::kF21F21Dag:
        return {s21, s21.adjoint()};
    case CorrelationPair::kF33F33:
        return {ket_bra(i3, i3), ket_bra(i3, i3)};
    case CorrelationPair::kF22F22:
        return {ket_bra(i2, i2), ket_bra(i2, i2)};
    case CorrelationPair::kF11F11:
        return {ket_bra(i1, i1), ket_bra(i1, i1)};
    default:
        throw DomainError("pair_operators: field pairs have no system operator");
    }
}

ComplexMatrix adjoint_dissipator(const QuantumSystem& sys, const ComplexMatrix& a)
{
    const int n = sys.num_levels();
    ComplexMatrix d(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            d(i, j) = (i == j) ? cd(0.0) : -sys.gamma(i, j) * a(i, j);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (i != j)
                d(j, j) += sys.rate(i, j) * (a(i, i) - a(j, j));
    return d;
}

double einstein_check(CorrelationPair pair, const DensityMatrix& rho, const QuantumSystem& sys,
                      const ThreeLevelMap& map, double e_z, double dt)
{
    if (sys.num_levels() != 3)
        throw DomainError("einstein_check: three-level system required");
    const auto ops = pair_operators(pair, map);
    const ComplexMatrix h = coherent_generator(sys, e_z);
    const cd mi(0.0, -1.0 / kHbar);

    auto lindblad = [&](const ComplexMatrix& r) -> ComplexMatrix {
        return mi * (h * r - r * h) + dissipator(sys, r);
    };
    auto rk4 = [&](ComplexMatrix r, double step) {
        const ComplexMatrix k1 = lindblad(r);
        const ComplexMatrix k2 = lindblad(r + 0.5 * step * k1);
        const ComplexMatrix k3 = lindblad(r + 0.5 * step * k2);
        const ComplexMatrix k4 = lindblad(r + step * k3);
        return ComplexMatrix(r + step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    };
    auto heisenberg = [&](const ComplexMatrix& a) -> ComplexMatrix {
        return -mi * (h * a - a * h) + adjoint_dissipator(sys, a);
    };

    const ComplexMatrix x = ops[0] * ops[1];
    const ComplexMatrix rp = rk4(rho, dt), rm = rk4(rho, -dt);
    const cd ddt = ((x * rp).trace() - (x * rm).trace()) / (2.0 * dt);
    const cd ma = (heisenberg(ops[0]) * ops[1] * rho).trace();
    const cd am = (ops[0] * heisenberg(ops[1]) * rho).trace();
    const double two_d = (ddt - ma - am).real();

    const CNumberState st = CNumberState::from_density(
        rho, map, ThreeLevelRates::from_system(sys, map), 0.0);
    return quantum_correlation(pair, st) - two_d;
}

DensityMatrix random_density_matrix(std::mt19937_64& rng, int n)
{
    std::normal_distribution<double> g;
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = cd(g(rng), g(rng));
    DensityMatrix rho = m * m.adjoint();
    rho /= rho.trace().real();
    return rho;
}

QuantumSystem random_three_level_system(std::mt19937_64& rng, double unit, double omega)
{
    constexpr double kMeVJ = 1.602176634e-22;
    std::uniform_real_distribution<double> u(0.2, 2.0), d(0.0, 1.0);
    QuantumSystemParams p;
    p.level_names = {"1'", "2", "3"};
    p.energies = {0.0, 5.0 * kMeVJ, 19.5 * kMeVJ};
    p.dipole_z = RealMatrix::Zero(3, 3);
    p.dipole_z(1, 2) = p.dipole_z(2, 1) = 6e-9 * 1.602176634e-19;
    p.tunneling = RealMatrix::Zero(3, 3);
    const double om = omega >= 0.0 ? omega : u(rng) * unit;
    p.tunneling(0, 2) = p.tunneling(2, 0) = om;
    p.scatter_rates = RealMatrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j)
                p.scatter_rates(i, j) = u(rng) * unit;
    const double dl[3] = {d(rng) * unit, d(rng) * unit, d(rng) * unit};
    p.pure_dephasing = RealMatrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j)
                p.pure_dephasing(i, j) = 0.5 * (dl[i] + dl[j]);
    p.carrier_density = 5e21;
    p.period_length = 50e-9;
    return QuantumSystem(std::move(p));
}

} // namespace mdl
