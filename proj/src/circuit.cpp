#include "dsqe/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace dsqe {

namespace {

constexpr int kMaxSimQubits = 20;
constexpr double kHalfPi = 1.5707963267948966;

std::vector<int> support_qubits(BasisState mask) {
    std::vector<int> out;
    for (int q = 0; q < 64 && (mask >> q); ++q)
        if ((mask >> q) & 1ull) out.push_back(q);
    return out;
}

void check_gate(const Gate& g, int Q) {
    if (g.q0 < 0 || g.q0 >= Q) throw InvalidArgument("gate qubit out of range");
    if (g.kind == GateKind::CNOT) {
        if (g.q1 < 0 || g.q1 >= Q) throw InvalidArgument("CNOT target out of range");
        if (g.q1 == g.q0) throw InvalidArgument("CNOT control equals target");
    }
}

}  // namespace

ResourceSummary summarize(const Circuit& c, int n_steps, long long identity_dropped) {
    ResourceSummary r;
    r.n_steps = n_steps;
    r.identity_terms_dropped = identity_dropped;
    r.gate_count = static_cast<long long>(c.gates.size());
    std::vector<long long> layer(c.Q, 0);
    for (const auto& g : c.gates) {
        if (g.kind == GateKind::CNOT) {
            ++r.cnot_count;
            const long long d = std::max(layer[g.q0], layer[g.q1]) + 1;
            layer[g.q0] = layer[g.q1] = d;
        } else {
            ++layer[g.q0];
        }
    }
    r.depth = layer.empty() ? 0 : *std::max_element(layer.begin(), layer.end());
    return r;
}

Circuit compile_pauli_exponential(const PauliString& P, double phi, int Q) {
    if (Q < 1) throw InvalidArgument("invalid dimension: Q must be >= 1");
    const BasisState support = P.x_mask | P.z_mask;
    if (support == 0)
        throw InvalidArgument("identity exponential is a global phase; nothing to compile");
    if (Q < 64 && (support >> Q) != 0)
        throw InvalidArgument("string support exceeds the register");

    Circuit c;
    c.Q = Q;
    const auto qubits = support_qubits(support);
    const int target = qubits.back();

    // Basis changes bringing every letter to Z: RY(-pi/2) maps Z->X (so it
    // conjugates X measurements into Z), RX(pi/2) does the same for Y.
    for (const int q : qubits) {
        const bool x = (P.x_mask >> q) & 1ull, z = (P.z_mask >> q) & 1ull;
        if (x && !z)
            c.gates.push_back({GateKind::RY, q, -1, -kHalfPi});
        else if (x && z)
            c.gates.push_back({GateKind::RX, q, -1, kHalfPi});
    }
    // Parity ladder onto the last support qubit.
    for (std::size_t i = 0; i + 1 < qubits.size(); ++i)
        c.gates.push_back({GateKind::CNOT, qubits[i], target, 0.0});
    // exp(i phi Z...Z) restricted to the parity qubit: RZ(theta) is
    // exp(-i theta Z / 2), so theta = -2 phi.
    c.gates.push_back({GateKind::RZ, target, -1, -2.0 * phi});
    // Mirror.
    for (std::size_t i = qubits.size() - 1; i-- > 0;)
        c.gates.push_back({GateKind::CNOT, qubits[i], target, 0.0});
    for (auto it = qubits.rbegin(); it != qubits.rend(); ++it) {
        const int q = *it;
        const bool x = (P.x_mask >> q) & 1ull, z = (P.z_mask >> q) & 1ull;
        if (x && !z)
            c.gates.push_back({GateKind::RY, q, -1, kHalfPi});
        else if (x && z)
            c.gates.push_back({GateKind::RX, q, -1, -kHalfPi});
    }
    return c;
}

Circuit prep_circuit(int Q, BasisState occupation) {
    if (Q < 1) throw InvalidArgument("invalid dimension: Q must be >= 1");
    if (Q < 64 && (occupation >> Q) != 0)
        throw InvalidArgument("occupation has bits above qubit Q-1");
    Circuit c;
    c.Q = Q;
    for (const int q : support_qubits(occupation))
        c.gates.push_back({GateKind::PauliX, q, -1, 0.0});
    return c;
}

CompiledEvolution compile_evolution(const PauliHamiltonian& H0, const PauliHamiltonian& H,
                                    const EvolutionSchedule& sched) {
    if (H0.Q != H.Q) throw InvalidArgument("Hamiltonians disagree on qubit count");
    if (sched.n_steps < 0) throw InvalidArgument("schedule needs n_steps >= 0");
    CompiledEvolution out;
    out.circuit.Q = H.Q;

    // Same merged table and ordering as the statevector route.
    std::map<std::pair<BasisState, BasisState>, std::pair<double, double>> acc;
    for (const auto& P : H0.terms) acc[{P.x_mask, P.z_mask}].first = P.coeff.real();
    for (const auto& P : H.terms) acc[{P.x_mask, P.z_mask}].second = P.coeff.real();

    long long dropped = 0;
    for (int i = 1; i <= sched.n_steps; ++i) {
        const double lambda = static_cast<double>(i) / sched.n_steps;
        for (const auto& [key, c01] : acc) {
            const double coeff = (1.0 - lambda) * c01.first + lambda * c01.second;
            if (coeff == 0.0) continue;
            if (key.first == 0 && key.second == 0) {
                ++dropped;  // identity: global phase only
                continue;
            }
            // One step applies exp(-i coeff dt P) = exp(i phi P), phi = -coeff dt.
            PauliString P{key.first, key.second, 1.0};
            const Circuit unit = compile_pauli_exponential(P, -coeff * sched.dt, H.Q);
            out.circuit.gates.insert(out.circuit.gates.end(), unit.gates.begin(),
                                     unit.gates.end());
        }
    }
    out.resources = summarize(out.circuit, sched.n_steps, dropped);
    return out;
}

StateVector simulate_circuit(const Circuit& c, const StateVector& initial) {
    if (c.Q != initial.Q) throw InvalidArgument("circuit and state disagree on qubit count");
    if (c.Q > kMaxSimQubits)
        throw CapacityError("circuit simulation limited to Q <= " +
                            std::to_string(kMaxSimQubits));
    StateVector state = initial;
    const std::size_t dim = state.dim();
    for (const auto& g : c.gates) {
        check_gate(g, c.Q);
        const std::size_t bit = std::size_t{1} << g.q0;
        switch (g.kind) {
            case GateKind::PauliX:
                for (std::size_t j = 0; j < dim; ++j)
                    if (!(j & bit)) std::swap(state.amps[j], state.amps[j | bit]);
                break;
            case GateKind::RX: {
                const double h = 0.5 * g.angle;
                const cdouble cc{std::cos(h), 0.0}, ss{0.0, -std::sin(h)};
                for (std::size_t j = 0; j < dim; ++j) {
                    if (j & bit) continue;
                    const cdouble a = state.amps[j], b = state.amps[j | bit];
                    state.amps[j] = cc * a + ss * b;
                    state.amps[j | bit] = ss * a + cc * b;
                }
                break;
            }
            case GateKind::RY: {
                const double h = 0.5 * g.angle;
                const double cc = std::cos(h), ss = std::sin(h);
                for (std::size_t j = 0; j < dim; ++j) {
                    if (j & bit) continue;
                    const cdouble a = state.amps[j], b = state.amps[j | bit];
                    state.amps[j] = cc * a - ss * b;
                    state.amps[j | bit] = ss * a + cc * b;
                }
                break;
            }
            case GateKind::RZ: {
                const cdouble lo = std::exp(cdouble{0.0, -0.5 * g.angle});
                const cdouble hi = std::exp(cdouble{0.0, 0.5 * g.angle});
                for (std::size_t j = 0; j < dim; ++j)
                    state.amps[j] *= (j & bit) ? hi : lo;
                break;
            }
            case GateKind::CNOT: {
                const std::size_t tbit = std::size_t{1} << g.q1;
                for (std::size_t j = 0; j < dim; ++j)
                    if ((j & bit) && !(j & tbit)) std::swap(state.amps[j], state.amps[j | tbit]);
                break;
            }
        }
    }
    return state;
}

std::string emit_qasm(const Circuit& c) {
    if (c.Q < 1) throw InvalidArgument("invalid dimension: Q must be >= 1");
    std::string out;
    out += "OPENQASM 2.0;\n";
    out += "include \"qelib1.inc\";\n";
    out += "qreg q[" + std::to_string(c.Q) + "];\n";
    out += "creg m[" + std::to_string(c.Q) + "];\n";
    char buf[96];
    for (const auto& g : c.gates) {
        check_gate(g, c.Q);
        switch (g.kind) {
            case GateKind::PauliX:
                std::snprintf(buf, sizeof buf, "x q[%d];\n", g.q0);
                break;
            case GateKind::RX:
                std::snprintf(buf, sizeof buf, "rx(%.17g) q[%d];\n", g.angle, g.q0);
                break;
            case GateKind::RY:
                std::snprintf(buf, sizeof buf, "ry(%.17g) q[%d];\n", g.angle, g.q0);
                break;
            case GateKind::RZ:
                std::snprintf(buf, sizeof buf, "rz(%.17g) q[%d];\n", g.angle, g.q0);
                break;
            case GateKind::CNOT:
                std::snprintf(buf, sizeof buf, "cx q[%d],q[%d];\n", g.q0, g.q1);
                break;
        }
        out += buf;
    }
    for (int q = 0; q < c.Q; ++q)
        out += "measure q[" + std::to_string(q) + "] -> m[" + std::to_string(q) + "];\n";
    return out;
}

}  // namespace dsqe
