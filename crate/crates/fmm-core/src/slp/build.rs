use super::Op;
use crate::coeff::Coefficient;

/// Instruction emitter shared by the parser and the optimizers.
#[derive(Clone, Debug)]
pub(crate) struct Builder {
    pub n_inputs: usize,
    pub ops: Vec<Op>,
}

impl Builder {
    pub fn new(n_inputs: usize) -> Self {
        Builder { n_inputs, ops: Vec::new() }
    }

    pub fn push(&mut self, op: Op) -> usize {
        self.ops.push(op);
        self.n_inputs + self.ops.len() - 1
    }

    /// `|c|·x` as a slot.
    pub fn magnitude(&mut self, slot: usize, c: &Coefficient) -> usize {
        let a = c.abs();
        if a.is_one() {
            slot
        } else {
            self.push(Op::Scale(a, slot))
        }
    }

    /// `Σ cᵢxᵢ` as `(slot, negated)`, value `= ±slot`, starting from the first positive
    /// term so that signs ride on additions and subtractions.
    pub fn signed_sum(&mut self, terms: &[(usize, Coefficient)]) -> Option<(usize, bool)> {
        let terms: Vec<&(usize, Coefficient)> = terms.iter().filter(|(_, c)| !c.is_zero()).collect();
        let first = terms.iter().position(|(_, c)| c.signum() > 0).unwrap_or(0);
        let (s0, c0) = terms.get(first)?;
        let mut acc = self.magnitude(*s0, c0);
        let neg = c0.signum() < 0;
        for (i, (s, c)) in terms.iter().enumerate() {
            if i == first {
                continue;
            }
            let m = self.magnitude(*s, c);
            acc = if (c.signum() < 0) == neg { self.push(Op::Add(acc, m)) } else { self.push(Op::Sub(acc, m)) };
        }
        Some((acc, neg))
    }

    /// `Σ cᵢxᵢ` as a slot, negating at the end if needed.
    pub fn sum(&mut self, terms: &[(usize, Coefficient)]) -> Option<usize> {
        let (s, neg) = self.signed_sum(terms)?;
        Some(if neg { self.push(Op::Neg(s)) } else { s })
    }

    /// Copies `ops` written against `inputs.len()` input slots, binding them to `map`.
    pub fn splice(&mut self, ops: &[Op], map: &[usize], outputs: &[Option<usize>]) -> Vec<Option<usize>> {
        let n = map.len();
        let mut slot: Vec<usize> = map.to_vec();
        for op in ops {
            let r = |s: usize| slot[s];
            let new = match op {
                Op::Add(a, b) => Op::Add(r(*a), r(*b)),
                Op::Sub(a, b) => Op::Sub(r(*a), r(*b)),
                Op::Scale(c, a) => Op::Scale(c.clone(), r(*a)),
                Op::Neg(a) => Op::Neg(r(*a)),
                Op::Mul(a, b) => Op::Mul(r(*a), r(*b)),
            };
            let d = self.push(new);
            slot.push(d);
        }
        debug_assert_eq!(slot.len(), n + ops.len());
        outputs.iter().map(|o| o.map(|s| slot[s])).collect()
    }
}
