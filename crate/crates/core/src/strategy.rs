//! Runtime-selectable measurement strategies.
//!
//! Each task family (state comparison, dynamics probing, principal
//! component analysis) has a conventional and a quantum-enhanced
//! implementation behind a common trait. Implementations are registered
//! by name in a [`StrategyRegistry`] and selected from configuration or
//! the command line; sweeps iterate over whatever is registered.

use std::collections::BTreeMap;

use crate::bell::{compare_observables, run_quantum_enhanced};
use crate::dynamics::{
    run_conventional_dynamics, run_quantum_enhanced_dynamics, DynamicsExperimentConfig,
    DynamicsStrategyKind, OutcomeMatrix,
};
use crate::ensemble::EnsembleSpec;
use crate::noise::ReadoutProfile;
use crate::pauli::PauliString;
use crate::qpca::{conventional_baseline, two_copy_guess, Hypothesis, PcaInstance};
use crate::rngstream::Stream;
use crate::shadow::{compare_observables_conventional, run_conventional};
use crate::statevec::Circuit;
use crate::Result;

pub const CONVENTIONAL: &str = "conventional";
pub const QUANTUM_ENHANCED: &str = "quantum_enhanced";

/// A strategy for the two-observable comparison task on ensemble states.
pub trait StateComparison: Send + Sync {
    fn name(&self) -> &'static str;

    /// Copies of the state consumed per experiment (the budget accounting
    /// convention: a two-copy experiment costs 2).
    fn copies_per_experiment(&self) -> u64;

    /// Bits measured per experiment (sizes the readout-noise profile).
    fn measured_bits(&self, n: usize) -> usize;

    /// Run `budget` experiments against the ensemble and decide which of
    /// the two observables has the larger |tr(O rho)| (1 or 2).
    fn compare(
        &self,
        spec: &EnsembleSpec,
        budget: usize,
        o1: &PauliString,
        o2: &PauliString,
        noise: Option<&ReadoutProfile>,
        rng: &mut Stream,
    ) -> Result<usize>;
}

/// A strategy for probing an unknown dynamics.
pub trait DynamicsSampling: Send + Sync {
    fn name(&self) -> &'static str;
    fn kind(&self) -> DynamicsStrategyKind;

    /// The repetition count used by the reference experiments.
    fn default_repetitions(&self) -> usize;

    fn row_width(&self, n: usize) -> usize {
        self.kind().row_width(n)
    }

    fn run(
        &self,
        circuit: &Circuit,
        repetitions: usize,
        noise: Option<&ReadoutProfile>,
        rng: &mut Stream,
    ) -> Result<OutcomeMatrix>;
}

/// A strategy for the principal-component hypothesis decision.
pub trait PcaDecision: Send + Sync {
    fn name(&self) -> &'static str;

    /// Decide the hypothesis from at most `copies` copies of the state.
    fn decide(&self, instance: &PcaInstance, copies: usize, rng: &mut Stream) -> Result<Hypothesis>;
}

struct ShadowComparison;

impl StateComparison for ShadowComparison {
    fn name(&self) -> &'static str {
        CONVENTIONAL
    }

    fn copies_per_experiment(&self) -> u64 {
        1
    }

    fn measured_bits(&self, n: usize) -> usize {
        n
    }

    fn compare(
        &self,
        spec: &EnsembleSpec,
        budget: usize,
        o1: &PauliString,
        o2: &PauliString,
        noise: Option<&ReadoutProfile>,
        rng: &mut Stream,
    ) -> Result<usize> {
        let data = run_conventional(spec, budget, noise, rng)?;
        compare_observables_conventional(&data, o1, o2)
    }
}

struct BellComparison;

impl StateComparison for BellComparison {
    fn name(&self) -> &'static str {
        QUANTUM_ENHANCED
    }

    fn copies_per_experiment(&self) -> u64 {
        2
    }

    fn measured_bits(&self, n: usize) -> usize {
        2 * n
    }

    fn compare(
        &self,
        spec: &EnsembleSpec,
        budget: usize,
        o1: &PauliString,
        o2: &PauliString,
        noise: Option<&ReadoutProfile>,
        rng: &mut Stream,
    ) -> Result<usize> {
        let data = run_quantum_enhanced(spec, budget, noise, rng)?;
        compare_observables(&data, o1, o2)
    }
}

struct ConventionalDynamics;

impl DynamicsSampling for ConventionalDynamics {
    fn name(&self) -> &'static str {
        CONVENTIONAL
    }

    fn kind(&self) -> DynamicsStrategyKind {
        DynamicsStrategyKind::Conventional
    }

    fn default_repetitions(&self) -> usize {
        1000
    }

    fn run(
        &self,
        circuit: &Circuit,
        repetitions: usize,
        noise: Option<&ReadoutProfile>,
        rng: &mut Stream,
    ) -> Result<OutcomeMatrix> {
        let cfg = DynamicsExperimentConfig {
            n: circuit.n,
            depth: circuit.depth,
            repetitions,
            strategy: self.kind(),
            noise: noise.cloned(),
        };
        run_conventional_dynamics(circuit, &cfg, rng)
    }
}

struct QuantumEnhancedDynamics;

impl DynamicsSampling for QuantumEnhancedDynamics {
    fn name(&self) -> &'static str {
        QUANTUM_ENHANCED
    }

    fn kind(&self) -> DynamicsStrategyKind {
        DynamicsStrategyKind::QuantumEnhanced
    }

    fn default_repetitions(&self) -> usize {
        500
    }

    fn run(
        &self,
        circuit: &Circuit,
        repetitions: usize,
        noise: Option<&ReadoutProfile>,
        rng: &mut Stream,
    ) -> Result<OutcomeMatrix> {
        let cfg = DynamicsExperimentConfig {
            n: circuit.n,
            depth: circuit.depth,
            repetitions,
            strategy: self.kind(),
            noise: noise.cloned(),
        };
        run_quantum_enhanced_dynamics(circuit, &cfg, rng)
    }
}

struct BaselinePca;

impl PcaDecision for BaselinePca {
    fn name(&self) -> &'static str {
        CONVENTIONAL
    }

    fn decide(&self, instance: &PcaInstance, copies: usize, rng: &mut Stream) -> Result<Hypothesis> {
        conventional_baseline(instance, copies, rng)
    }
}

struct TwoCopyPca;

impl PcaDecision for TwoCopyPca {
    fn name(&self) -> &'static str {
        QUANTUM_ENHANCED
    }

    fn decide(&self, instance: &PcaInstance, copies: usize, rng: &mut Stream) -> Result<Hypothesis> {
        two_copy_guess(instance, copies, rng)
    }
}

/// Name-indexed strategy registry for all three task families.
pub struct StrategyRegistry {
    state: BTreeMap<&'static str, Box<dyn StateComparison>>,
    dynamics: BTreeMap<&'static str, Box<dyn DynamicsSampling>>,
    pca: BTreeMap<&'static str, Box<dyn PcaDecision>>,
}

impl StrategyRegistry {
    /// Registry pre-populated with the conventional and quantum-enhanced
    /// implementations of every task family.
    pub fn with_builtins() -> Self {
        let mut registry = StrategyRegistry {
            state: BTreeMap::new(),
            dynamics: BTreeMap::new(),
            pca: BTreeMap::new(),
        };
        registry.register_state(Box::new(ShadowComparison));
        registry.register_state(Box::new(BellComparison));
        registry.register_dynamics(Box::new(ConventionalDynamics));
        registry.register_dynamics(Box::new(QuantumEnhancedDynamics));
        registry.register_pca(Box::new(BaselinePca));
        registry.register_pca(Box::new(TwoCopyPca));
        registry
    }

    pub fn register_state(&mut self, strategy: Box<dyn StateComparison>) {
        self.state.insert(strategy.name(), strategy);
    }

    pub fn register_dynamics(&mut self, strategy: Box<dyn DynamicsSampling>) {
        self.dynamics.insert(strategy.name(), strategy);
    }

    pub fn register_pca(&mut self, strategy: Box<dyn PcaDecision>) {
        self.pca.insert(strategy.name(), strategy);
    }

    pub fn state(&self, name: &str) -> Option<&dyn StateComparison> {
        self.state.get(name).map(AsRef::as_ref)
    }

    pub fn dynamics(&self, name: &str) -> Option<&dyn DynamicsSampling> {
        self.dynamics.get(name).map(AsRef::as_ref)
    }

    pub fn pca(&self, name: &str) -> Option<&dyn PcaDecision> {
        self.pca.get(name).map(AsRef::as_ref)
    }

    pub fn state_names(&self) -> Vec<&'static str> {
        self.state.keys().copied().collect()
    }

    pub fn dynamics_names(&self) -> Vec<&'static str> {
        self.dynamics.keys().copied().collect()
    }

    pub fn pca_names(&self) -> Vec<&'static str> {
        self.pca.keys().copied().collect()
    }
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::sample_pauli_string;
    use crate::rngstream::stream;
    use crate::statevec::{generate_1d_circuit, SymmetryClass};
    use rand::Rng;

    #[test]
    fn builtins_are_registered_under_canonical_names() {
        let registry = StrategyRegistry::with_builtins();
        assert_eq!(registry.state_names(), vec![CONVENTIONAL, QUANTUM_ENHANCED]);
        assert_eq!(registry.dynamics_names(), vec![CONVENTIONAL, QUANTUM_ENHANCED]);
        assert_eq!(registry.pca_names(), vec![CONVENTIONAL, QUANTUM_ENHANCED]);
        assert!(registry.state("nonexistent").is_none());
    }

    #[test]
    fn copy_accounting_follows_the_two_copy_convention() {
        let registry = StrategyRegistry::with_builtins();
        assert_eq!(registry.state(CONVENTIONAL).unwrap().copies_per_experiment(), 1);
        assert_eq!(registry.state(QUANTUM_ENHANCED).unwrap().copies_per_experiment(), 2);
        assert_eq!(registry.state(QUANTUM_ENHANCED).unwrap().measured_bits(5), 10);
    }

    #[test]
    fn state_strategies_run_end_to_end() {
        let registry = StrategyRegistry::with_builtins();
        let mut rng = stream(140, "strategy", 0);
        let p = sample_pauli_string(4, true, &mut rng).unwrap();
        let mut q = sample_pauli_string(4, true, &mut rng).unwrap();
        while q == p {
            q = sample_pauli_string(4, true, &mut rng).unwrap();
        }
        let spec = EnsembleSpec::new(p, 0.9).unwrap();
        for name in registry.state_names() {
            let strategy = registry.state(name).unwrap();
            let choice = strategy.compare(&spec, 50, &p, &q, None, &mut rng).unwrap();
            assert!(choice == 1 || choice == 2);
        }
    }

    #[test]
    fn dynamics_strategies_produce_correct_row_widths() {
        let registry = StrategyRegistry::with_builtins();
        let mut rng = stream(141, "strategy", 0);
        let circuit = generate_1d_circuit(3, 2, SymmetryClass::General, &mut rng).unwrap();
        for name in registry.dynamics_names() {
            let strategy = registry.dynamics(name).unwrap();
            let m = strategy.run(&circuit, 20, None, &mut rng).unwrap();
            assert_eq!(m.width(), strategy.row_width(3));
            assert_eq!(m.len(), 20);
        }
        assert_eq!(registry.dynamics(CONVENTIONAL).unwrap().default_repetitions(), 1000);
        assert_eq!(registry.dynamics(QUANTUM_ENHANCED).unwrap().default_repetitions(), 500);
    }

    #[test]
    fn pca_strategies_decide() {
        let registry = StrategyRegistry::with_builtins();
        let mut rng = stream(142, "strategy", 0);
        for name in registry.pca_names() {
            let strategy = registry.pca(name).unwrap();
            let hyp = if rng.gen_bool(0.5) { Hypothesis::A } else { Hypothesis::B };
            let instance = PcaInstance::sample(4, hyp, &mut rng).unwrap();
            let _ = strategy.decide(&instance, 100, &mut rng).unwrap();
        }
    }
}
