#pragma once

#include <string>
#include <vector>

#include "dsqe/statevector.hpp"

namespace dsqe {

enum class GateKind { PauliX, RX, RY, RZ, CNOT };

struct Gate {
    GateKind kind;
    int q0 = 0;       // target for 1q gates, control for CNOT
    int q1 = -1;      // CNOT target
    double angle = 0.0;
};

struct Circuit {
    int Q = 0;
    std::vector<Gate> gates;
};

struct ResourceSummary {
    long long gate_count = 0;
    long long cnot_count = 0;
    long long depth = 0;
    int n_steps = 0;
    long long identity_terms_dropped = 0;
};

ResourceSummary summarize(const Circuit& c, int n_steps = 0, long long identity_dropped = 0);

// exp(i phi P) for a non-identity string, in the standard ladder form: basis
// changes (RY(-pi/2) on X qubits, RX(pi/2) on Y qubits), a CNOT chain onto the
// highest support qubit, RZ(-2 phi) there, then the mirrored chain and inverse
// basis changes. Uses 2 (k - 1) CNOTs for support size k.
Circuit compile_pauli_exponential(const PauliString& P, double phi, int Q);

// X gates preparing |occupation> from |0...0>.
Circuit prep_circuit(int Q, BasisState occupation);

struct CompiledEvolution {
    Circuit circuit;
    ResourceSummary resources;
};

// Gate-level transcription of diabatic_evolve over the same merged term list
// and ordering; identity strings contribute only a global phase and are
// dropped (counted in the summary).
CompiledEvolution compile_evolution(const PauliHamiltonian& H0, const PauliHamiltonian& H,
                                    const EvolutionSchedule& sched);

// Dense statevector execution, guarded at Q <= 20.
StateVector simulate_circuit(const Circuit& c, const StateVector& initial);

// OpenQASM 2.0 text: header, qelib1 include, registers, one line per gate,
// terminal measurement of every qubit.
std::string emit_qasm(const Circuit& c);

}  // namespace dsqe
