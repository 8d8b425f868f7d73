//! Index-based view of a circuit for the inner loops of analysis code.

use std::collections::VecDeque;

use crate::circuit::{Circuit, GateType, NodeId};
use crate::concepts::{check_row, Assignment, ConceptError, SolutionConcept};
use crate::scalar::Scalar;

#[derive(Clone, Debug)]
pub struct CompiledGate<S> {
    pub gate_type: GateType<S>,
    inputs: [usize; 2],
    arity: usize,
    pub output: usize,
}

impl<S: Scalar> CompiledGate<S> {
    pub fn inputs(&self) -> &[usize] {
        &self.inputs[..self.arity]
    }

    /// Input values read from a dense value vector.
    pub fn input_values(&self, x: &[S]) -> [S; 2] {
        let mut v = [S::zero(); 2];
        for (slot, &i) in v.iter_mut().zip(self.inputs()) {
            *slot = x[i];
        }
        v
    }
}

/// Nodes are numbered in circuit insertion order; gates keep their ids.
#[derive(Clone, Debug)]
pub struct CompiledCircuit<S> {
    pub names: Vec<NodeId>,
    pub gates: Vec<CompiledGate<S>>,
    /// Producing gate of each node (the first one if several).
    pub producer: Vec<Option<usize>>,
    /// Consuming gates of each node, one entry per input position.
    pub consumers: Vec<Vec<usize>>,
    /// Gate indices in dependency order, when the circuit is acyclic.
    pub order: Option<Vec<usize>>,
}

impl<S: Scalar> CompiledCircuit<S> {
    pub fn new(circuit: &Circuit<S>) -> Self {
        let names: Vec<NodeId> = circuit.nodes().iter().cloned().collect();
        let index = |n: &NodeId| circuit.node_index(n).expect("gate nodes are registered");
        let mut producer = vec![None; names.len()];
        let mut consumers = vec![Vec::new(); names.len()];
        let mut gates = Vec::with_capacity(circuit.gates().len());
        for (gi, g) in circuit.gates().iter().enumerate() {
            let mut inputs = [0usize; 2];
            for (slot, n) in inputs.iter_mut().zip(&g.inputs) {
                *slot = index(n);
                consumers[*slot].push(gi);
            }
            let output = index(&g.output);
            producer[output].get_or_insert(gi);
            gates.push(CompiledGate { gate_type: g.gate_type, inputs, arity: g.inputs.len().min(2), output });
        }
        let mut compiled = CompiledCircuit { names, gates, producer, consumers, order: None };
        compiled.order = compiled.dependency_order(&vec![false; compiled.names.len()]);
        compiled
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn free_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.producer[i].is_none()).collect()
    }

    /// Orders the gates whose output is not `fixed` so that each comes after
    /// the producers of its non-fixed inputs. `None` if those gates form a cycle.
    pub fn dependency_order(&self, fixed: &[bool]) -> Option<Vec<usize>> {
        let active: Vec<bool> = self.gates.iter().map(|g| !fixed[g.output]).collect();
        let mut pending = vec![0usize; self.gates.len()];
        for (gi, g) in self.gates.iter().enumerate() {
            if !active[gi] {
                continue;
            }
            pending[gi] =
                g.inputs().iter().filter(|&&i| !fixed[i] && self.producer[i].is_some_and(|p| active[p])).count();
        }
        let mut queue: VecDeque<usize> = (0..self.gates.len()).filter(|&g| active[g] && pending[g] == 0).collect();
        let mut order = Vec::with_capacity(self.gates.len());
        while let Some(gi) = queue.pop_front() {
            order.push(gi);
            let out = self.gates[gi].output;
            if self.producer[out] != Some(gi) {
                continue;
            }
            for &c in &self.consumers[out] {
                if active[c] {
                    pending[c] -= 1;
                    if pending[c] == 0 {
                        queue.push_back(c);
                    }
                }
            }
        }
        (order.len() == active.iter().filter(|&&a| a).count()).then_some(order)
    }

    /// Dense value vector for an assignment; errors on missing nodes.
    pub fn values(&self, x: &Assignment<S>) -> Result<Vec<S>, ConceptError> {
        self.names.iter().map(|n| x.get(n).ok_or_else(|| ConceptError::MissingValue(n.clone()))).collect()
    }

    pub fn to_assignment(&self, values: &[S]) -> Assignment<S> {
        self.names.iter().cloned().zip(values.iter().copied()).collect()
    }

    /// Range and gate checks in one pass, without building a report.
    pub fn is_solution(&self, x: &[S], concept: &SolutionConcept<S>) -> bool {
        let upper = concept.upper();
        x.iter().all(|&v| v >= S::zero() && v <= upper)
            && self.gates.iter().all(|g| {
                let inputs = g.input_values(x);
                check_row(&g.gate_type, &inputs[..g.arity], x[g.output], concept).ok()
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_respects_dependencies() {
        let mut c = Circuit::<f64>::new();
        c.push(GateType::Copy, ["b"], "c");
        c.push(GateType::Not, ["a"], "b");
        let cc = CompiledCircuit::new(&c);
        assert_eq!(cc.order, Some(vec![1, 0]));
        assert_eq!(cc.free_nodes(), vec![cc.names.iter().position(|n| n.as_str() == "a").unwrap()]);
    }

    #[test]
    fn cycles_have_no_order_unless_fixed() {
        let mut c = Circuit::<f64>::new();
        c.push(GateType::Not, ["v"], "v");
        let cc = CompiledCircuit::new(&c);
        assert!(cc.order.is_none());
        assert_eq!(cc.dependency_order(&[true]), Some(vec![]));
    }

    #[test]
    fn fast_check_agrees_with_rows() {
        let mut c = Circuit::<f64>::new();
        c.push(GateType::Not, ["a"], "v");
        let cc = CompiledCircuit::new(&c);
        let weak = SolutionConcept::Weak { eps: 0.1 };
        assert!(cc.is_solution(&[0.15, 0.5], &weak));
        assert!(!cc.is_solution(&[0.15, 0.5], &SolutionConcept::Weak { eps: 0.2 }));
        assert!(!cc.is_solution(&[1.5, 0.5], &weak));
    }
}
