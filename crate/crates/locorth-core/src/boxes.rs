//! Exact-rational conditional probability tables ("boxes"), their
//! constructors, validation, tensor powers and noisy mixtures.
//!
//! Tables are sparse: events absent from the map have probability zero.
//! Every probability is an exact rational, so normalization and the
//! no-signaling equations are decided exactly, never within a tolerance.

use alloc::{collections::BTreeMap, vec, vec::Vec};
use core::fmt;

use num_traits::{One, Zero};
use rand::Rng;

use crate::scenario::{Event, Scenario, ScenarioError};
use crate::Rational;

/// A conditional distribution `P(a_1...a_n | x_1...x_n)` over a Bell
/// scenario, stored sparsely by event index.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NsBox {
    scenario: Scenario,
    table: BTreeMap<usize, Rational>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BoxError {
    /// A table entry is negative.
    NegativeProbability { event: usize },
    /// Tensor factors or mixture operands do not live on compatible scenarios.
    ScenarioMismatch,
    /// Mixing parameter outside `[0, 1]`.
    WeightOutOfRange,
    /// LHV weights do not sum to one (or are negative), or a strategy has
    /// the wrong shape.
    InvalidModel,
    /// Input distribution handed to `unconditional_joint` is not a
    /// distribution over the setting tuples.
    InvalidInputDistribution,
    Scenario(ScenarioError),
}

impl fmt::Display for BoxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoxError::NegativeProbability { event } => {
                write!(f, "negative probability at event index {event}")
            }
            BoxError::ScenarioMismatch => write!(f, "scenario mismatch"),
            BoxError::WeightOutOfRange => write!(f, "mixing weight outside [0,1]"),
            BoxError::InvalidModel => write!(f, "invalid hidden-variable model"),
            BoxError::InvalidInputDistribution => write!(f, "invalid input distribution"),
            BoxError::Scenario(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for BoxError {}

impl From<ScenarioError> for BoxError {
    fn from(e: ScenarioError) -> Self {
        BoxError::Scenario(e)
    }
}

/// Outcome of [`NsBox::validate`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum BoxVerdict {
    Ok,
    /// Probabilities of the given setting tuple do not sum to one.
    NotNormalized { settings: Vec<u8> },
    /// A marginal of `party` depends on that party's setting; `context`
    /// is a setting tuple witnessing the difference.
    Signaling { party: usize, context: Vec<u8> },
}

impl NsBox {
    /// Build a box from explicit entries; zero entries are dropped, negative
    /// entries are rejected. No normalization or no-signaling check is
    /// performed here — call [`NsBox::validate`].
    pub fn from_entries(
        scenario: Scenario,
        entries: impl IntoIterator<Item = (Event, Rational)>,
    ) -> Result<Self, BoxError> {
        let mut table = BTreeMap::new();
        for (e, p) in entries {
            let idx = scenario.index_of(&e.outcomes, &e.settings)?;
            if p < Rational::zero() {
                return Err(BoxError::NegativeProbability { event: idx });
            }
            if !p.is_zero() {
                table.insert(idx, p);
            }
        }
        Ok(NsBox { scenario, table })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// Probability of the event with the given mixed-radix index.
    pub fn prob_index(&self, index: usize) -> Rational {
        self.table.get(&index).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn prob(&self, e: &Event) -> Result<Rational, BoxError> {
        let idx = self.scenario.index_of(&e.outcomes, &e.settings)?;
        Ok(self.prob_index(idx))
    }

    /// Event indices with nonzero probability, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.table.keys().copied().collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.table.iter().map(|(&i, p)| (i, p))
    }

    /// Normalization plus every no-signaling equation, exactly.
    pub fn validate(&self) -> Result<BoxVerdict, BoxError> {
        for (&idx, p) in &self.table {
            if *p < Rational::zero() {
                return Err(BoxError::NegativeProbability { event: idx });
            }
        }
        let s = &self.scenario;
        let n = s.parties();
        let (m, d) = (s.settings(), s.outcomes());
        // normalization per context
        for ctx in 0..s.context_count() {
            let settings = decode_tuple(ctx, n, m);
            let mut sum = Rational::zero();
            for out in 0..s.outcome_tuple_count() {
                let outcomes = decode_tuple(out, n, d);
                let idx = s.index_of(&outcomes, &settings).expect("in range");
                sum += self.prob_index(idx);
            }
            if !sum.is_one() {
                return Ok(BoxVerdict::NotNormalized { settings });
            }
        }
        // no-signaling: marginal over party i must not depend on x_i
        for i in 0..n {
            for others_ctx in 0..m.pow((n - 1) as u32) {
                let others_x = decode_tuple(others_ctx, n - 1, m);
                for others_out in 0..d.pow((n - 1) as u32) {
                    let others_a = decode_tuple(others_out, n - 1, d);
                    let mut reference: Option<Rational> = None;
                    for xi in 0..m {
                        let mut sum = Rational::zero();
                        for ai in 0..d {
                            let (a, x) =
                                splice(i, ai as u8, xi as u8, &others_a, &others_x);
                            let idx = s.index_of(&a, &x).expect("in range");
                            sum += self.prob_index(idx);
                        }
                        match &reference {
                            None => reference = Some(sum),
                            Some(r) if *r != sum => {
                                let (_, x) =
                                    splice(i, 0, xi as u8, &others_a, &others_x);
                                return Ok(BoxVerdict::Signaling { party: i, context: x });
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
        Ok(BoxVerdict::Ok)
    }

    /// The Popescu-Rohrlich box: `P(ab|xy) = 1/2` iff `a xor b = x and y`.
    pub fn pr() -> NsBox {
        let scenario = Scenario::new(2, 2, 2).expect("(2,2,2) is valid");
        let half = Rational::new(1.into(), 2.into());
        let mut table = BTreeMap::new();
        for e in scenario.events() {
            let (a, b) = (e.outcomes[0], e.outcomes[1]);
            let (x, y) = (e.settings[0], e.settings[1]);
            if a ^ b == x & y {
                let idx = scenario.index_of(&e.outcomes, &e.settings).unwrap();
                table.insert(idx, half.clone());
            }
        }
        NsBox { scenario, table }
    }

    /// Maximally mixed box: every event of every context equally likely.
    pub fn uniform(scenario: Scenario) -> NsBox {
        let p = Rational::new(1.into(), (scenario.outcome_tuple_count() as i64).into());
        let table = (0..scenario.event_count()).map(|i| (i, p.clone())).collect();
        NsBox { scenario, table }
    }

    /// Deterministic box where party `i` always outputs `outputs[i]`,
    /// regardless of its setting.
    pub fn deterministic(scenario: Scenario, outputs: &[u8]) -> Result<NsBox, BoxError> {
        let strategies = vec![outputs
            .iter()
            .map(|&a| vec![a; scenario.settings()])
            .collect::<Vec<_>>()];
        LhvModel { weights: vec![Rational::one()], strategies }.to_box(scenario)
    }

    /// Tensor product of two boxes sharing `m` and `d`; probabilities
    /// multiply, parties concatenate.
    pub fn tensor(&self, other: &NsBox) -> Result<NsBox, BoxError> {
        let (s1, s2) = (&self.scenario, &other.scenario);
        if s1.settings() != s2.settings() || s1.outcomes() != s2.outcomes() {
            return Err(BoxError::ScenarioMismatch);
        }
        let scenario = Scenario::new(s1.parties() + s2.parties(), s1.settings(), s1.outcomes())?;
        let shift = s2.event_count();
        let mut table = BTreeMap::new();
        for (i1, p1) in &self.table {
            for (i2, p2) in &other.table {
                table.insert(i1 * shift + i2, p1 * p2);
            }
        }
        Ok(NsBox { scenario, table })
    }

    /// `k`-fold tensor power.
    pub fn tensor_power(&self, k: usize) -> Result<NsBox, BoxError> {
        assert!(k >= 1);
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.tensor(self)?;
        }
        Ok(acc)
    }

    /// Convex mixture `q * self + (1-q) * other` (same scenario, `q` in
    /// `[0,1]`).
    pub fn mix(&self, other: &NsBox, q: &Rational) -> Result<NsBox, BoxError> {
        if self.scenario != other.scenario {
            return Err(BoxError::ScenarioMismatch);
        }
        if *q < Rational::zero() || *q > Rational::one() {
            return Err(BoxError::WeightOutOfRange);
        }
        let cq = Rational::one() - q;
        let mut table: BTreeMap<usize, Rational> = BTreeMap::new();
        for (&i, p) in &self.table {
            let v = q * p;
            if !v.is_zero() {
                table.insert(i, v);
            }
        }
        for (&i, p) in &other.table {
            let v = &cq * p;
            if v.is_zero() {
                continue;
            }
            let entry = table.entry(i).or_insert_with(Rational::zero);
            *entry += v;
            if entry.is_zero() {
                table.remove(&i);
            }
        }
        Ok(NsBox { scenario: self.scenario, table })
    }

    /// Joint distribution `P(a,x) = P(a|x) P(x)` over events, for a given
    /// distribution over setting tuples. Sums to exactly one for every box,
    /// including boxes that violate orthogonality inequalities.
    pub fn unconditional_joint(
        &self,
        input_dist: &BTreeMap<Vec<u8>, Rational>,
    ) -> Result<BTreeMap<usize, Rational>, BoxError> {
        let s = &self.scenario;
        let mut total = Rational::zero();
        for (x, w) in input_dist {
            if x.len() != s.parties() || x.iter().any(|&xi| xi as usize >= s.settings()) {
                return Err(BoxError::InvalidInputDistribution);
            }
            if *w < Rational::zero() {
                return Err(BoxError::InvalidInputDistribution);
            }
            total += w;
        }
        if !total.is_one() {
            return Err(BoxError::InvalidInputDistribution);
        }
        let mut joint = BTreeMap::new();
        for (x, w) in input_dist {
            if w.is_zero() {
                continue;
            }
            for out in 0..s.outcome_tuple_count() {
                let a = decode_tuple(out, s.parties(), s.outcomes());
                let idx = s.index_of(&a, x).expect("in range");
                let mass = self.prob_index(idx) * w;
                if !mass.is_zero() {
                    joint.insert(idx, mass);
                }
            }
        }
        Ok(joint)
    }
}

/// A local hidden variable model: rational weights `q(lambda)` plus, for
/// each `lambda` and party, a deterministic setting-to-outcome strategy.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LhvModel {
    /// One weight per value of the hidden variable.
    pub weights: Vec<Rational>,
    /// `strategies[lambda][party][setting] -> outcome`.
    pub strategies: Vec<Vec<Vec<u8>>>,
}

impl LhvModel {
    /// The classical box defined by the model.
    pub fn to_box(&self, scenario: Scenario) -> Result<NsBox, BoxError> {
        let n = scenario.parties();
        let (m, d) = (scenario.settings(), scenario.outcomes());
        if self.weights.len() != self.strategies.len() || self.weights.is_empty() {
            return Err(BoxError::InvalidModel);
        }
        let mut total = Rational::zero();
        for w in &self.weights {
            if *w < Rational::zero() {
                return Err(BoxError::InvalidModel);
            }
            total += w;
        }
        if !total.is_one() {
            return Err(BoxError::InvalidModel);
        }
        for strat in &self.strategies {
            if strat.len() != n
                || strat
                    .iter()
                    .any(|f| f.len() != m || f.iter().any(|&a| a as usize >= d))
            {
                return Err(BoxError::InvalidModel);
            }
        }
        let mut table: BTreeMap<usize, Rational> = BTreeMap::new();
        for (w, strat) in self.weights.iter().zip(&self.strategies) {
            if w.is_zero() {
                continue;
            }
            for ctx in 0..scenario.context_count() {
                let x = decode_tuple(ctx, n, m);
                let a: Vec<u8> = (0..n).map(|i| strat[i][x[i] as usize]).collect();
                let idx = scenario.index_of(&a, &x).expect("in range");
                *table.entry(idx).or_insert_with(Rational::zero) += w;
            }
        }
        Ok(NsBox { scenario, table })
    }
}

/// Random no-signaling box for property tests: a convex mixture, with
/// bounded-denominator rational weights, of random deterministic boxes and
/// (when the scenario is a tensor of `(2,2,2)` cells) PR-box factors. Always
/// validates cleanly, without any polytope vertex enumeration.
pub fn random_ns_box<R: Rng>(scenario: Scenario, rng: &mut R) -> NsBox {
    let n = scenario.parties();
    let (m, d) = (scenario.settings(), scenario.outcomes());
    let parts = rng.gen_range(1..=4usize);
    let mut components: Vec<NsBox> = Vec::with_capacity(parts);
    for _ in 0..parts {
        let pr_cell = m == 2 && d == 2 && n % 2 == 0 && rng.gen_bool(0.5);
        if pr_cell {
            let mut acc = NsBox::pr();
            for _ in 1..n / 2 {
                acc = acc.tensor(&NsBox::pr()).expect("same m,d");
            }
            components.push(acc);
        } else {
            let strat: Vec<Vec<u8>> = (0..n)
                .map(|_| (0..m).map(|_| rng.gen_range(0..d) as u8).collect())
                .collect();
            let model = LhvModel {
                weights: vec![Rational::one()],
                strategies: vec![strat],
            };
            components.push(model.to_box(scenario).expect("valid model"));
        }
    }
    let raw: Vec<i64> = (0..parts).map(|_| rng.gen_range(1..=16i64)).collect();
    let total: i64 = raw.iter().sum();
    let mut acc = NsBox {
        scenario,
        table: BTreeMap::new(),
    };
    for (c, &w) in components.iter().zip(&raw) {
        let weight = Rational::new(w.into(), total.into());
        for (i, p) in &c.table {
            let v = &weight * p;
            let entry = acc.table.entry(*i).or_insert_with(Rational::zero);
            *entry += v;
        }
    }
    acc.table.retain(|_, p| !p.is_zero());
    acc
}

/// Decode `value` as `len` base-`radix` digits, most significant first.
pub(crate) fn decode_tuple(value: usize, len: usize, radix: usize) -> Vec<u8> {
    let mut out = vec![0u8; len];
    let mut rest = value;
    for i in (0..len).rev() {
        out[i] = (rest % radix) as u8;
        rest /= radix;
    }
    out
}

/// Insert `(ai, xi)` for party `i` into tuples over the remaining parties.
fn splice(i: usize, ai: u8, xi: u8, others_a: &[u8], others_x: &[u8]) -> (Vec<u8>, Vec<u8>) {
    let n = others_a.len() + 1;
    let mut a = Vec::with_capacity(n);
    let mut x = Vec::with_capacity(n);
    a.extend_from_slice(&others_a[..i]);
    a.push(ai);
    a.extend_from_slice(&others_a[i..]);
    x.extend_from_slice(&others_x[..i]);
    x.push(xi);
    x.extend_from_slice(&others_x[i..]);
    (a, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    #[test]
    fn pr_box_values_and_support() {
        let pr = NsBox::pr();
        let e = |a: &[u8], x: &[u8]| Event::new(a.to_vec(), x.to_vec());
        assert_eq!(pr.prob(&e(&[0, 0], &[0, 0])).unwrap(), ratio(1, 2));
        assert_eq!(pr.prob(&e(&[1, 1], &[1, 1])).unwrap(), ratio(0, 1));
        assert_eq!(pr.support().len(), 8);
        assert_eq!(pr.validate().unwrap(), BoxVerdict::Ok);
    }

    #[test]
    fn all_zero_is_not_normalized() {
        let s = Scenario::new(2, 2, 2).unwrap();
        let b = NsBox::from_entries(s, []).unwrap();
        assert!(matches!(b.validate().unwrap(), BoxVerdict::NotNormalized { .. }));
    }

    #[test]
    fn constructed_signaling_box_is_caught() {
        // party A outputs 0 deterministically when B inputs 0, outputs its
        // own setting when B inputs 1; B uniform. Normalized, but B's
        // setting steers A's marginal.
        let s = Scenario::new(2, 2, 2).unwrap();
        let half = ratio(1, 2);
        let mut entries = Vec::new();
        for x in 0..2u8 {
            for y in 0..2u8 {
                let a = if y == 0 { 0 } else { x };
                for b in 0..2u8 {
                    entries.push((Event::new(vec![a, b], vec![x, y]), half.clone()));
                }
            }
        }
        let b = NsBox::from_entries(s, entries).unwrap();
        match b.validate().unwrap() {
            BoxVerdict::Signaling { party, .. } => assert_eq!(party, 1),
            v => panic!("expected signaling verdict, got {v:?}"),
        }
    }

    #[test]
    fn negative_entry_is_an_error() {
        let s = Scenario::new(1, 1, 2).unwrap();
        let r = NsBox::from_entries(s, [(Event::new(vec![0], vec![0]), ratio(-1, 2))]);
        assert!(matches!(r, Err(BoxError::NegativeProbability { .. })));
    }

    #[test]
    fn lhv_deterministic_and_mixture() {
        let s = Scenario::new(2, 2, 2).unwrap();
        let det0 = NsBox::deterministic(s, &[0, 0]).unwrap();
        for ctx in 0..4 {
            let x = decode_tuple(ctx, 2, 2);
            assert_eq!(det0.prob(&Event::new(vec![0, 0], x)).unwrap(), ratio(1, 1));
        }
        let model = LhvModel {
            weights: vec![ratio(1, 2), ratio(1, 2)],
            strategies: vec![
                vec![vec![0, 0], vec![0, 0]],
                vec![vec![1, 1], vec![1, 1]],
            ],
        };
        let b = model.to_box(s).unwrap();
        for ctx in 0..4 {
            let x = decode_tuple(ctx, 2, 2);
            assert_eq!(b.prob(&Event::new(vec![0, 0], x.clone())).unwrap(), ratio(1, 2));
            assert_eq!(b.prob(&Event::new(vec![1, 1], x)).unwrap(), ratio(1, 2));
        }
        assert_eq!(b.validate().unwrap(), BoxVerdict::Ok);

        let bad = LhvModel {
            weights: vec![ratio(1, 2)],
            strategies: vec![vec![vec![0, 0], vec![0, 0]]],
        };
        assert!(matches!(bad.to_box(s), Err(BoxError::InvalidModel)));
    }

    #[test]
    fn tensor_and_mix() {
        let pr = NsBox::pr();
        let pr2 = pr.tensor(&pr).unwrap();
        assert_eq!(pr2.support().len(), 64);
        assert_eq!(
            pr2.prob(&Event::new(vec![0, 0, 0, 0], vec![0, 0, 0, 0])).unwrap(),
            ratio(1, 4)
        );
        let det = NsBox::deterministic(Scenario::new(2, 2, 2).unwrap(), &[0, 0]).unwrap();
        assert_eq!(pr.tensor(&det).unwrap().validate().unwrap(), BoxVerdict::Ok);

        let s = Scenario::new(2, 2, 2).unwrap();
        let uni = NsBox::uniform(s);
        assert_eq!(pr.mix(&uni, &ratio(1, 1)).unwrap(), pr);
        let m0 = pr.mix(&uni, &ratio(0, 1)).unwrap();
        for i in 0..16 {
            assert_eq!(m0.prob_index(i), ratio(1, 4));
        }
        let mh = pr.mix(&uni, &ratio(1, 2)).unwrap();
        assert_eq!(
            mh.prob(&Event::new(vec![0, 0], vec![0, 0])).unwrap(),
            ratio(3, 8)
        );
        assert!(pr.mix(&uni, &ratio(3, 2)).is_err());
    }

    #[test]
    fn joint_distribution_sums_to_one() {
        let pr = NsBox::pr();
        let s = *pr.scenario();
        let quarter = ratio(1, 4);
        let mut uniform_inputs = BTreeMap::new();
        for ctx in 0..4 {
            uniform_inputs.insert(decode_tuple(ctx, 2, 2), quarter.clone());
        }
        let joint = pr.unconditional_joint(&uniform_inputs).unwrap();
        assert_eq!(joint.len(), 8);
        for mass in joint.values() {
            assert_eq!(*mass, ratio(1, 8));
        }
        let total: Rational = joint.values().cloned().sum();
        assert_eq!(total, ratio(1, 1));

        // point mass recovers the conditional
        let mut point = BTreeMap::new();
        point.insert(vec![0u8, 1u8], ratio(1, 1));
        let joint = pr.unconditional_joint(&point).unwrap();
        for (idx, mass) in &joint {
            let e = s.event(*idx);
            assert_eq!(e.settings, vec![0, 1]);
            assert_eq!(*mass, pr.prob_index(*idx));
        }

        let mut bad = BTreeMap::new();
        bad.insert(vec![0u8, 0u8], ratio(1, 2));
        assert!(pr.unconditional_joint(&bad).is_err());
    }
}
